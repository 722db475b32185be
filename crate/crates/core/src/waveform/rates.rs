use super::{IsacWaveform, SymbolBlock};
use crate::error::{ensure_positive, Error, Result};
use crate::linalg::matmul;
use crate::propagation::ChannelSet;
use crate::Complex64;

/// SINR reported when both noise and residual interference vanish.
pub const SINR_CAP: f64 = 1e15;

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    /// bits/s/Hz per user including the pilot prelog.
    pub per_user_rate: Vec<f64>,
    pub sinr: Vec<f64>,
    /// 1 − τ_p/τ_c.
    pub prelog: f64,
    /// Users whose SINR hit [`SINR_CAP`].
    pub capped: Vec<bool>,
}

impl RateReport {
    pub fn mean_rate(&self) -> f64 {
        self.per_user_rate.iter().sum::<f64>() / self.per_user_rate.len() as f64
    }
}

/// Per-user rates on the true channels. For user k the received frame
/// yₖ = hₖX is split into the component along the intended symbols sₖ and
/// the residual (multi-user interference); SINR = signal / (MUI + σ²).
pub fn achievable_rates(
    truth: &ChannelSet,
    waveform: &IsacWaveform,
    symbols: &SymbolBlock,
    noise_power: f64,
    pilot_length: usize,
    coherence_interval: usize,
) -> Result<RateReport> {
    if noise_power < 0.0 || !noise_power.is_finite() {
        return Err(Error::InvalidArgument(format!("noise power must be non-negative, got {noise_power}")));
    }
    if pilot_length >= coherence_interval {
        return Err(Error::InvalidArgument(format!(
            "pilot length {pilot_length} must be shorter than the coherence interval {coherence_interval}"
        )));
    }
    ensure_positive("coherence interval", coherence_interval as f64)?;
    let (k, n) = truth.matrix.shape();
    if waveform.n_antennas() != n || symbols.users() != k || symbols.frame_length() != waveform.frame_length() {
        return Err(Error::DimensionMismatch(format!(
            "H {:?}, X {:?}, S {:?}",
            truth.matrix.shape(),
            waveform.matrix.shape(),
            symbols.matrix.shape()
        )));
    }
    let l = waveform.frame_length() as f64;
    let received = matmul(&truth.matrix, &waveform.matrix);
    let prelog = 1.0 - pilot_length as f64 / coherence_interval as f64;
    let mut report = RateReport {
        per_user_rate: Vec::with_capacity(k),
        sinr: Vec::with_capacity(k),
        prelog,
        capped: Vec::with_capacity(k),
    };
    for user in 0..k {
        let y = received.row(user);
        let s = symbols.matrix.row(user);
        let s_energy = s.norm_squared();
        let alpha: Complex64 = s.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum::<Complex64>() / s_energy;
        let signal = alpha.norm_sqr() * s_energy / l;
        let mui = y.iter().zip(s.iter()).map(|(b, a)| (b - alpha * a).norm_sqr()).sum::<f64>() / l;
        let denom = mui + noise_power;
        let (sinr, capped) = if denom <= 0.0 || signal / denom > SINR_CAP {
            (SINR_CAP, true)
        } else {
            (signal / denom, false)
        };
        report.sinr.push(sinr);
        report.capped.push(capped);
        report.per_user_rate.push(prelog * (1.0 + sinr).log2());
    }
    Ok(report)
}
