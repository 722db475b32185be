use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;
use statrs::function::gamma::gamma_ur;

use super::detector::{MatchedSubspaceDetector, PdEstimate};
use super::echo::{synthesize_echo_with, EchoModel};
use super::response::TargetResponse;
use crate::error::{Error, Result};
use crate::linalg::{matmul, row_rank};
use crate::waveform::IsacWaveform;
use crate::{rng, CMatrix, Complex64};

/// Minimum trials for a P_D estimate.
pub const MIN_PD_TRIALS: u64 = 1000;

/// A source of detector statistics under either hypothesis. Trial `i` of a
/// run keyed by `seed` always draws from `rng::stream(seed, i)`.
pub trait DetectionTrials: Sync {
    /// Degrees of freedom of the χ² null distribution.
    fn dof(&self) -> usize;
    fn draw(&self, rng: &mut ChaCha8Rng, target_present: bool) -> Result<f64>;
}

/// Full simulation: synthesize Y, then apply the detector.
#[derive(Debug, Clone)]
pub struct EchoTrials {
    pub response: TargetResponse,
    pub waveform: IsacWaveform,
    pub echo: EchoModel,
    pub detector: MatchedSubspaceDetector,
}

impl EchoTrials {
    pub fn new(response: TargetResponse, waveform: IsacWaveform, echo: EchoModel) -> Result<Self> {
        let detector = MatchedSubspaceDetector::new(&waveform, echo.clutter_basis(), echo.noise_power)?;
        Ok(Self {
            response,
            waveform,
            echo,
            detector,
        })
    }
}

impl DetectionTrials for EchoTrials {
    fn dof(&self) -> usize {
        self.detector.dof()
    }

    fn draw(&self, rng: &mut ChaCha8Rng, target_present: bool) -> Result<f64> {
        let y = synthesize_echo_with(&self.response, &self.waveform, &self.echo, target_present, rng)?;
        self.detector.statistic(&y)
    }
}

/// Exact reduction of the detector for large arrays. With M = P_c⊥·G·X the
/// projected data is M + W, W white, so after a unitary rotation aligning M
/// with one axis
///
/// T = (√λ + n₁)² + n₂² + χ²_{dof−2},   λ = 2‖M‖²_F/σ²,
///
/// with n₁, n₂ standard normal. Under H₀, λ = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedTrials {
    pub noncentrality: f64,
    pub dof: usize,
}

impl ReducedTrials {
    pub fn new(response: &TargetResponse, waveform: &IsacWaveform, echo: &EchoModel) -> Result<Self> {
        if echo.noise_power <= 0.0 {
            return Err(Error::InvalidArgument("reduced trials need positive noise power".into()));
        }
        let n = waveform.n_antennas();
        if response.n_antennas() != n {
            return Err(Error::DimensionMismatch(format!("response {} vs waveform {n} antennas", response.n_antennas())));
        }
        let basis = echo.clutter_basis().unwrap_or_else(|| CMatrix::zeros(n, 0));
        if basis.ncols() >= n {
            return Err(Error::InfeasibleNulling {
                constraints: basis.ncols(),
                antennas: n,
            });
        }
        let rank = row_rank(&waveform.matrix);
        // ‖P⊥·A·Γ·B‖² = tr((ΓB)ᴴ·W·(ΓB)) with W = (P⊥A)ᴴ(P⊥A), all S×S or S×L.
        let a = &response.steering;
        let mut a_perp = a.clone();
        if basis.ncols() > 0 {
            for _ in 0..2 {
                let coeff = basis.adjoint() * &a_perp;
                a_perp -= &basis * coeff;
            }
        }
        let w = a_perp.adjoint() * &a_perp;
        let mut gb = matmul(&a.transpose(), &waveform.matrix);
        for (s, mut row) in gb.row_iter_mut().enumerate() {
            row *= response.reflectivity[s];
        }
        let gram = &gb * gb.adjoint();
        let energy: Complex64 = (w * gram).trace();
        Ok(Self {
            noncentrality: 2.0 * energy.re.max(0.0) / echo.noise_power,
            dof: 2 * (n - basis.ncols()) * rank,
        })
    }
}

impl DetectionTrials for ReducedTrials {
    fn dof(&self) -> usize {
        self.dof
    }

    fn draw(&self, rng: &mut ChaCha8Rng, target_present: bool) -> Result<f64> {
        let n1: f64 = StandardNormal.sample(rng);
        let n2: f64 = StandardNormal.sample(rng);
        let shift = if target_present { self.noncentrality.sqrt() } else { 0.0 };
        let rest = if self.dof > 2 {
            ChiSquared::new((self.dof - 2) as f64)
                .map_err(|e| Error::InvalidArgument(e.to_string()))?
                .sample(rng)
        } else {
            0.0
        };
        Ok((shift + n1).powi(2) + n2 * n2 + rest)
    }
}

/// P(χ²_dof > t).
pub fn chi_square_tail(dof: usize, t: f64) -> f64 {
    if t <= 0.0 {
        1.0
    } else {
        gamma_ur(dof as f64 / 2.0, t / 2.0)
    }
}

fn check_p_fa(p_fa: f64) -> Result<()> {
    if !(p_fa > 0.0 && p_fa < 1.0) {
        return Err(Error::InvalidArgument(format!("p_fa must lie in (0, 1), got {p_fa}")));
    }
    Ok(())
}

/// Inverse χ² tail by bisection: the t with P(χ²_dof > t) = p_fa.
pub fn analytic_threshold(dof: usize, p_fa: f64) -> Result<f64> {
    check_p_fa(p_fa)?;
    if dof == 0 {
        return Err(Error::InvalidArgument("detector has zero degrees of freedom".into()));
    }
    let k = dof as f64;
    let mut hi = k + 10.0 * (2.0 * k).sqrt() + 10.0;
    while chi_square_tail(dof, hi) > p_fa {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if chi_square_tail(dof, mid) > p_fa {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdMethod {
    Analytic,
    MonteCarlo { trials: u64 },
}

/// Null statistics for trials 0..trials, in trial order.
pub fn null_statistics<T: DetectionTrials>(source: &T, trials: u64, seed: u64) -> Result<Vec<f64>> {
    (0..trials)
        .into_par_iter()
        .map(|i| source.draw(&mut rng::stream(seed, i), false))
        .collect()
}

/// Threshold giving false-alarm probability `p_fa`. The Monte Carlo path
/// needs at least 100/p_fa null trials and returns the midpoint between the
/// order statistics that bracket the (1 − p_fa) quantile.
pub fn calibrate_threshold<T: DetectionTrials>(source: &T, p_fa: f64, method: ThresholdMethod, seed: u64) -> Result<f64> {
    check_p_fa(p_fa)?;
    match method {
        ThresholdMethod::Analytic => analytic_threshold(source.dof(), p_fa),
        ThresholdMethod::MonteCarlo { trials } => {
            let required = (100.0 / p_fa).ceil() as u64;
            if trials < required {
                return Err(Error::CalibrationInfeasible { p_fa, trials, required });
            }
            let mut stats = null_statistics(source, trials, seed)?;
            stats.sort_by(|a, b| a.total_cmp(b));
            Ok(empirical_quantile_threshold(&stats, p_fa))
        }
    }
}

/// Threshold from sorted null samples with round(p_fa·n) exceedances.
pub fn empirical_quantile_threshold(sorted: &[f64], p_fa: f64) -> f64 {
    let n = sorted.len();
    let k = ((p_fa * n as f64).round() as usize).clamp(1, n - 1);
    0.5 * (sorted[n - k - 1] + sorted[n - k])
}

fn count_exceedances<T: DetectionTrials>(source: &T, threshold: f64, trials: u64, seed: u64, present: bool) -> Result<u64> {
    (0..trials)
        .into_par_iter()
        .map(|i| Ok(u64::from(source.draw(&mut rng::stream(seed, i), present)? > threshold)))
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

/// Empirical P_D with the target present in every trial.
pub fn estimate_pd<T: DetectionTrials>(source: &T, threshold: f64, trials: u64, seed: u64) -> Result<PdEstimate> {
    if trials < MIN_PD_TRIALS {
        return Err(Error::InvalidArgument(format!("P_D needs at least {MIN_PD_TRIALS} trials, got {trials}")));
    }
    PdEstimate::from_counts(count_exceedances(source, threshold, trials, seed, true)?, trials)
}

/// Empirical false-alarm rate at `threshold`.
pub fn estimate_false_alarm<T: DetectionTrials>(source: &T, threshold: f64, trials: u64, seed: u64) -> Result<PdEstimate> {
    PdEstimate::from_counts(count_exceedances(source, threshold, trials, seed, false)?, trials)
}

/// Sample mean and variance, used for moment checks.
pub fn moments(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_upa;
    use crate::propagation::{SourcePoint, WavefrontModel};
    use crate::sensing::response::{target_response, ScattererSet};
    use crate::waveform::reference_radar_waveform;

    fn small(clutter: bool, gain: f64) -> EchoTrials {
        let g = build_upa(7.8e9, 3, 0.25, 0.5).unwrap();
        let pts: Vec<_> = [(4.0, 0.0), (4.0, 8.0), (4.3, 0.0)]
            .iter()
            .map(|&(r, az)| SourcePoint::from_degrees(r, az, 0.0).unwrap())
            .collect();
        let target = ScattererSet::with_random_phases(&pts, 1).unwrap();
        let resp = target_response(&g, &target, WavefrontModel::NearField).unwrap().scaled(gain);
        let echo = if clutter {
            let c = ScattererSet::with_random_phases(
                &[SourcePoint::from_degrees(3.0, -30.0, 0.0).unwrap(), SourcePoint::from_degrees(6.0, 40.0, 0.0).unwrap()],
                2,
            )
            .unwrap();
            EchoModel::with_clutter(&g, &c, 5.0, 0.5).unwrap()
        } else {
            EchoModel::noise_only(0.5).unwrap()
        };
        EchoTrials::new(resp, reference_radar_waveform(9, 12, 1.0).unwrap(), echo).unwrap()
    }

    #[test]
    fn chi_square_inverse_tail() {
        // χ²₂ tail is exp(−t/2).
        let t = analytic_threshold(2, 1e-3).unwrap();
        assert!((t - 2.0 * 1e3f64.ln()).abs() < 1e-9);
        for dof in [4, 72, 2000, 1_800_000] {
            let t = analytic_threshold(dof, 1e-7).unwrap();
            assert!((chi_square_tail(dof, t) / 1e-7 - 1.0).abs() < 1e-6);
        }
        // Large-dof threshold near the normal approximation k + z·√(2k).
        let k = 1_800_000.0;
        let t = analytic_threshold(1_800_000, 1e-7).unwrap();
        assert!(((t - k) / (2.0f64 * k).sqrt() - 5.2).abs() < 0.1);
        assert!(analytic_threshold(10, 0.0).is_err());
        assert!(analytic_threshold(10, 1.0).is_err());
    }

    #[test]
    fn null_moments_match_chi_square_with_clutter() {
        let src = small(true, 1.0);
        assert_eq!(src.dof(), 2 * (9 - 2) * 9);
        let stats = null_statistics(&src, 40_000, 21).unwrap();
        let (mean, var) = moments(&stats);
        let k = src.dof() as f64;
        assert!((mean / k - 1.0).abs() < 0.01, "{mean}");
        assert!((var / (2.0 * k) - 1.0).abs() < 0.04, "{var}");
    }

    #[test]
    fn median_threshold() {
        let src = small(false, 1.0);
        let t = calibrate_threshold(&src, 0.5, ThresholdMethod::MonteCarlo { trials: 10_000 }, 4).unwrap();
        let mut stats = null_statistics(&src, 10_000, 4).unwrap();
        stats.sort_by(|a, b| a.total_cmp(b));
        assert_eq!(t, 0.5 * (stats[4999] + stats[5000]));
        assert_eq!(stats.iter().filter(|&&s| s > t).count(), 5000);
    }

    #[test]
    fn insufficient_trials_rejected() {
        let src = small(false, 1.0);
        let err = calibrate_threshold(&src, 1e-3, ThresholdMethod::MonteCarlo { trials: 50_000 }, 1).unwrap_err();
        assert!(matches!(err, Error::CalibrationInfeasible { required: 100_000, .. }));
    }

    #[test]
    fn analytic_matches_monte_carlo() {
        let src = small(true, 1.0);
        let mc = calibrate_threshold(&src, 1e-2, ThresholdMethod::MonteCarlo { trials: 200_000 }, 5).unwrap();
        let an = calibrate_threshold(&src, 1e-2, ThresholdMethod::Analytic, 0).unwrap();
        assert!((mc / an - 1.0).abs() < 0.02, "{mc} {an}");
    }

    #[test]
    fn reduced_path_agrees_with_full_echo() {
        let full = small(true, 0.22);
        let reduced = ReducedTrials::new(&full.response, &full.waveform, &full.echo).unwrap();
        assert_eq!(reduced.dof(), full.dof());
        let t = analytic_threshold(full.dof(), 1e-2).unwrap();
        let a = estimate_pd(&full, t, 20_000, 7).unwrap();
        let b = estimate_pd(&reduced, t, 20_000, 8).unwrap();
        assert!(a.p_hat > 0.1 && a.p_hat < 0.9, "{}", a.p_hat);
        assert!((a.p_hat - b.p_hat).abs() < 2.0 * (a.ci95_halfwidth + b.ci95_halfwidth), "{} {}", a.p_hat, b.p_hat);
        let (m_full, _) = moments(&(0..20_000).map(|i| full.draw(&mut rng::stream(3, i), true).unwrap()).collect::<Vec<_>>());
        let expected = full.dof() as f64 + reduced.noncentrality;
        assert!((m_full / expected - 1.0).abs() < 0.01);
    }

    #[test]
    fn vanishing_power_degenerates_to_false_alarm() {
        let src = small(false, 1.0);
        let quiet = EchoTrials::new(
            src.response.clone(),
            IsacWaveform::project_power(src.waveform.matrix.clone(), 1e-12).unwrap().0,
            src.echo.clone(),
        )
        .unwrap();
        let t = analytic_threshold(quiet.dof(), 0.05).unwrap();
        let pd = estimate_pd(&quiet, t, 20_000, 2).unwrap();
        assert!((pd.p_hat - 0.05).abs() < 3.0 * pd.ci95_halfwidth);
    }

    #[test]
    fn pd_grows_with_power_and_is_deterministic() {
        let src = small(true, 0.2);
        let t = analytic_threshold(src.dof(), 1e-3).unwrap();
        let mut last = 0.0;
        for p in [0.25, 1.0, 4.0, 16.0] {
            let r = ReducedTrials::new(&src.response, &IsacWaveform::project_power(src.waveform.matrix.clone(), p).unwrap().0, &src.echo).unwrap();
            let pd = estimate_pd(&r, t, 5000, 9).unwrap();
            assert!(pd.p_hat + 1e-12 >= last);
            last = pd.p_hat;
        }
        assert!(last >= 0.999);
        let a = estimate_pd(&src, t, 2000, 10).unwrap();
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| estimate_pd(&src, t, 2000, 10).unwrap());
        assert_eq!(a, b);
        assert!(estimate_pd(&src, t, 999, 10).is_err());
    }
}
