use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::propagation::ChannelSet;
use crate::{db_to_linear, rng, CMatrix, Complex64};

/// Least-squares channel estimate from orthogonal uplink pilots.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatedChannels {
    pub matrix: CMatrix,
    pub pilot_length: usize,
    pub pilot_snr_db: f64,
    /// Per-entry error variance σ²/(τ_p·P_pilot) with unit receiver noise.
    pub error_variance: f64,
}

impl EstimatedChannels {
    /// The estimate wrapped with the metadata of the channels it estimates.
    pub fn as_channel_set(&self, truth: &ChannelSet) -> Result<ChannelSet> {
        truth.with_matrix(self.matrix.clone())
    }
}

/// Simulates τ_p orthogonal (DFT) uplink pilots per user with unit-variance
/// receiver noise at the given pilot SNR, and returns the LS estimate.
pub fn estimate_channels_ls(
    truth: &ChannelSet,
    pilot_length: usize,
    pilot_snr_db: f64,
    seed: u64,
) -> Result<EstimatedChannels> {
    let (k, n) = truth.matrix.shape();
    if pilot_length < k {
        return Err(Error::PilotContamination { pilot_length, users: k });
    }
    let p = db_to_linear(pilot_snr_db);
    let tp = pilot_length as f64;
    let pilots = CMatrix::from_fn(k, pilot_length, |user, t| {
        Complex64::from_polar(1.0, -TAU * (user * t) as f64 / tp)
    });
    // Uplink: Y = √p·Hᵀ·Φ + W, W ~ CN(0, 1).
    let mut rng = rng::stream(seed, 0);
    let noise = rng::complex_normal_matrix(&mut rng, n, pilot_length, 1.0);
    let received = truth.matrix.transpose() * &pilots * Complex64::new(p.sqrt(), 0.0) + noise;
    let estimate_t = received * pilots.adjoint() / Complex64::new(tp * p.sqrt(), 0.0);
    Ok(EstimatedChannels {
        matrix: estimate_t.transpose(),
        pilot_length,
        pilot_snr_db,
        error_variance: 1.0 / (tp * p),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius_sq;
    use crate::propagation::{AmplitudeModel, WavefrontModel};

    fn truth(k: usize, n: usize) -> ChannelSet {
        ChannelSet {
            matrix: rng::complex_normal_matrix(&mut rng::stream(99, 0), k, n, 1.0),
            model: WavefrontModel::NearField,
            amplitude_model: AmplitudeModel::PhaseOnly,
            ue_points: vec![],
        }
    }

    #[test]
    fn noiseless_limit_recovers_channels() {
        let h = truth(4, 16);
        let e = estimate_channels_ls(&h, 4, 200.0, 1).unwrap();
        assert!((e.matrix - &h.matrix).norm() < 1e-8);
    }

    #[test]
    fn same_seed_same_estimate() {
        let h = truth(4, 16);
        assert_eq!(estimate_channels_ls(&h, 4, 0.0, 5).unwrap(), estimate_channels_ls(&h, 4, 0.0, 5).unwrap());
    }

    #[test]
    fn short_pilots_are_rejected() {
        assert!(matches!(
            estimate_channels_ls(&truth(4, 8), 3, 0.0, 1),
            Err(Error::PilotContamination { pilot_length: 3, users: 4 })
        ));
    }

    #[test]
    fn empirical_mse_matches_ls_error_variance() {
        let h = truth(4, 8);
        let seeds = 10_000u64;
        let total: f64 = (0..seeds)
            .map(|s| frobenius_sq(&(estimate_channels_ls(&h, 4, 0.0, s).unwrap().matrix - &h.matrix)))
            .sum();
        let mse = total / (seeds as f64 * 32.0);
        assert!((mse / 0.25 - 1.0).abs() < 0.05, "mse {mse}");
    }
}
