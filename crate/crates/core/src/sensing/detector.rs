use crate::error::{ensure_positive, Error, Result};
use crate::linalg::{frobenius_sq, matmul, row_space_basis};
use crate::waveform::IsacWaveform;
use crate::CMatrix;

/// Relative singular-value cut used for the transmit row space.
const ROW_SPACE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionOutcome {
    pub statistic: f64,
    pub threshold: f64,
    pub decision: bool,
}

/// Noise-whitened matched-subspace energy detector for a known transmit
/// block X and unknown target response:
///
/// T = (2/σ²)·‖P_c⊥ · Y · P_X‖²_F
///
/// P_X projects onto the row space of X and P_c⊥ removes the clutter steering
/// span. Under H₀ the clutter term is annihilated and T ~ χ² with
/// 2·(N − n_c)·rank(X) degrees of freedom.
#[derive(Debug, Clone)]
pub struct MatchedSubspaceDetector {
    /// L × r orthonormal columns spanning the rows of X.
    row_basis: CMatrix,
    /// N × n_c orthonormal clutter basis (possibly empty).
    clutter_basis: CMatrix,
    noise_power: f64,
}

impl MatchedSubspaceDetector {
    pub fn new(waveform: &IsacWaveform, clutter_basis: Option<CMatrix>, noise_power: f64) -> Result<Self> {
        ensure_positive("noise_power", noise_power)?;
        let n = waveform.n_antennas();
        let clutter_basis = clutter_basis.unwrap_or_else(|| CMatrix::zeros(n, 0));
        if clutter_basis.nrows() != n {
            return Err(Error::DimensionMismatch(format!(
                "clutter basis has {} rows, waveform {n}",
                clutter_basis.nrows()
            )));
        }
        if clutter_basis.ncols() >= n {
            return Err(Error::InfeasibleNulling {
                constraints: clutter_basis.ncols(),
                antennas: n,
            });
        }
        let row_basis = row_space_basis(&waveform.matrix, ROW_SPACE_TOL);
        Ok(Self {
            row_basis,
            clutter_basis,
            noise_power,
        })
    }

    pub fn rank(&self) -> usize {
        self.row_basis.ncols()
    }

    pub fn clutter_dimension(&self) -> usize {
        self.clutter_basis.ncols()
    }

    pub fn dof(&self) -> usize {
        2 * (self.clutter_basis.nrows() - self.clutter_dimension()) * self.rank()
    }

    pub fn statistic(&self, y: &CMatrix) -> Result<f64> {
        if y.shape() != (self.clutter_basis.nrows(), self.row_basis.nrows()) {
            return Err(Error::DimensionMismatch(format!(
                "echo {:?} vs expected {:?}",
                y.shape(),
                (self.clutter_basis.nrows(), self.row_basis.nrows())
            )));
        }
        let mut z = matmul(y, &self.row_basis);
        if self.clutter_dimension() > 0 {
            for _ in 0..2 {
                let coeff = self.clutter_basis.adjoint() * &z;
                z -= &self.clutter_basis * coeff;
            }
        }
        Ok(2.0 * frobenius_sq(&z) / self.noise_power)
    }

    pub fn decide(&self, y: &CMatrix, threshold: f64) -> Result<DetectionOutcome> {
        let statistic = self.statistic(y)?;
        Ok(DetectionOutcome {
            statistic,
            threshold,
            decision: statistic > threshold,
        })
    }
}

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959964;

/// Empirical detection rate with its Wilson 95% interval half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdEstimate {
    pub p_hat: f64,
    pub trials: u64,
    pub detections: u64,
    pub ci95_halfwidth: f64,
}

impl PdEstimate {
    pub fn from_counts(detections: u64, trials: u64) -> Result<Self> {
        if trials == 0 || detections > trials {
            return Err(Error::InvalidArgument(format!("{detections} detections out of {trials} trials")));
        }
        let n = trials as f64;
        let p = detections as f64 / n;
        let z2 = Z95 * Z95;
        let half = Z95 / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        Ok(Self {
            p_hat: p,
            trials,
            detections,
            ci95_halfwidth: half,
        })
    }

    /// Wilson interval (lower, upper).
    pub fn interval(&self) -> (f64, f64) {
        let n = self.trials as f64;
        let z2 = Z95 * Z95;
        let centre = (self.p_hat + z2 / (2.0 * n)) / (1.0 + z2 / n);
        ((centre - self.ci95_halfwidth).max(0.0), (centre + self.ci95_halfwidth).min(1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rng, Complex64};

    #[test]
    fn wilson_reference_values() {
        // 40 of 100: Wilson 95% interval (0.3094, 0.4980).
        let e = PdEstimate::from_counts(40, 100).unwrap();
        let (lo, hi) = e.interval();
        assert!((lo - 0.30938).abs() < 1e-4 && (hi - 0.49804).abs() < 1e-4, "{lo} {hi}");
        let zero = PdEstimate::from_counts(0, 1000).unwrap();
        assert!(zero.interval().0 < 1e-15);
        assert!(zero.ci95_halfwidth > 0.0);
        assert!(PdEstimate::from_counts(3, 2).is_err());
    }

    #[test]
    fn statistic_is_phase_invariant() {
        let mut g = rng::stream(8, 0);
        let x = IsacWaveform::project_power(rng::complex_normal_matrix(&mut g, 6, 10, 1.0), 1.0).unwrap().0;
        let det = MatchedSubspaceDetector::new(&x, None, 0.5).unwrap();
        let y = rng::complex_normal_matrix(&mut g, 6, 10, 1.0);
        let rotated = &y * Complex64::from_polar(1.0, 1.234);
        let (a, b) = (det.statistic(&y).unwrap(), det.statistic(&rotated).unwrap());
        assert!((a - b).abs() < 1e-12 * a);
        assert_eq!(det.dof(), 2 * 6 * 6);
    }

    #[test]
    fn rank_deficient_block_reduces_dof() {
        let mut g = rng::stream(9, 0);
        let a = rng::complex_normal_matrix(&mut g, 6, 2, 1.0);
        let b = rng::complex_normal_matrix(&mut g, 2, 10, 1.0);
        let x = IsacWaveform::project_power(a * b, 1.0).unwrap().0;
        let det = MatchedSubspaceDetector::new(&x, None, 1.0).unwrap();
        assert_eq!(det.rank(), 2);
        assert_eq!(det.dof(), 24);
    }
}
