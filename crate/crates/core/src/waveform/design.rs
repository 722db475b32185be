use nalgebra::Cholesky;

use super::{IsacWaveform, SymbolBlock};
use crate::error::{Error, Result};
use crate::linalg::{frobenius_sq, matmul};
use crate::propagation::ChannelSet;
use crate::{CMatrix, Complex64};

/// Result of the ρ-weighted design.
#[derive(Debug, Clone)]
pub struct WeightedDesign {
    /// Power-projected waveform.
    pub waveform: IsacWaveform,
    /// Factor applied to the unconstrained minimizer to meet the budget.
    pub scale: f64,
    /// HX − S for the unconstrained minimizer.
    pub residual: CMatrix,
    /// ‖HX − S‖²_F for the unconstrained minimizer.
    pub mui_energy: f64,
    /// Set when ρ = 1 and HHᴴ is singular (minimum-norm LS returned).
    pub rank_deficient: bool,
}

impl WeightedDesign {
    /// The minimizer before power projection.
    pub fn unscaled(&self) -> CMatrix {
        &self.waveform.matrix / Complex64::new(self.scale, 0.0)
    }
}

/// ρ‖HX − S‖²_F + (1−ρ)‖X − X₀‖²_F.
pub fn weighted_objective(h: &CMatrix, s: &CMatrix, x0: &CMatrix, x: &CMatrix, rho: f64) -> f64 {
    rho * frobenius_sq(&(h * x - s)) + (1.0 - rho) * frobenius_sq(&(x - x0))
}

fn check_dims(h: &CMatrix, s: &CMatrix, x0: &CMatrix) -> Result<()> {
    let (k, n) = h.shape();
    if k > n {
        return Err(Error::DimensionMismatch(format!("{k} users exceed {n} antennas")));
    }
    if s.nrows() != k || x0.nrows() != n || s.ncols() != x0.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "H {:?}, S {:?}, X0 {:?}",
            h.shape(),
            s.shape(),
            x0.shape()
        )));
    }
    Ok(())
}

/// Minimizes ρ‖HX − S‖²_F + (1−ρ)‖X − X₀‖²_F in closed form and projects the
/// result onto the total-power budget ‖X‖²_F = L·P.
///
/// The minimizer (ρHᴴH + (1−ρ)I)⁻¹(ρHᴴS + (1−ρ)X₀) is evaluated as
/// X₀ + ρHᴴ(ρHHᴴ + (1−ρ)I_K)⁻¹(S − HX₀), which needs only a K×K solve.
/// At ρ = 1 the minimum-norm least-squares solution H⁺S is returned.
pub fn design_weighted_waveform(
    channels: &ChannelSet,
    symbols: &SymbolBlock,
    reference: &IsacWaveform,
    rho: f64,
    power: f64,
) -> Result<WeightedDesign> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidArgument(format!("rho must lie in [0, 1], got {rho}")));
    }
    let h = &channels.matrix;
    let s = symbols.desired();
    let x0 = &reference.matrix;
    check_dims(h, &s, x0)?;
    let k = h.nrows();
    let h_adj = h.adjoint();

    let (x, rank_deficient) = if rho == 0.0 {
        (x0.clone(), false)
    } else if rho == 1.0 {
        let gram = h * &h_adj;
        let svd = gram.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let tol = smax * 1e-12 * k as f64;
        let rank = svd.singular_values.iter().filter(|&&v| v > tol).count();
        let pinv = svd
            .pseudo_inverse(tol)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        (matmul(&h_adj, &(pinv * &s)), rank < k)
    } else {
        let hx0 = matmul(h, x0);
        let e = &s - hx0;
        let mut a = crate::linalg::gram_rows(h) * Complex64::new(rho, 0.0);
        for i in 0..k {
            a[(i, i)] += Complex64::new(1.0 - rho, 0.0);
        }
        let chol = Cholesky::new(a).ok_or_else(|| {
            Error::InvalidArgument("regularized Gram matrix is not positive definite".into())
        })?;
        let q = chol.solve(&e) * Complex64::new(rho, 0.0);
        (x0 + matmul(&h_adj, &q), false)
    };

    let residual = matmul(h, &x) - &s;
    let mui_energy = frobenius_sq(&residual);
    let (waveform, scale) = IsacWaveform::project_power(x, power)?;
    Ok(WeightedDesign {
        waveform,
        scale,
        residual,
        mui_energy,
        rank_deficient,
    })
}

/// Maximum-ratio transmission X = Hᴴ·diag(1/‖hₖ‖)·S scaled to the budget.
///
/// `design` may be the true near-field channels or a mismatched model (for
/// example far-field rows built from the same user angles).
pub fn mrt_waveform(design: &ChannelSet, symbols: &SymbolBlock, power: f64) -> Result<IsacWaveform> {
    let h = &design.matrix;
    let s = symbols.desired();
    if s.nrows() != h.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "{} channel rows vs {} symbol streams",
            h.nrows(),
            s.nrows()
        )));
    }
    let mut weighted = s;
    for (k, mut row) in weighted.row_iter_mut().enumerate() {
        let norm = h.row(k).norm();
        if norm == 0.0 {
            return Err(Error::DegenerateChannel { user: k });
        }
        row /= Complex64::new(norm, 0.0);
    }
    let x = matmul(&h.adjoint(), &weighted);
    Ok(IsacWaveform::project_power(x, power)?.0)
}
