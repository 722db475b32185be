use super::IsacWaveform;
use crate::error::{Error, Result};
use crate::linalg::{frobenius_sq, orthonormal_columns};
use crate::propagation::SteeringVector;
use crate::{CMatrix, CVector};

#[derive(Debug, Clone)]
pub struct NullingOutcome {
    pub waveform: IsacWaveform,
    /// ‖X_projected‖²/‖X‖² before the power re-scaling.
    pub retained_energy_fraction: f64,
    /// Worst |cᵀxₗ|²/(‖c‖²‖xₗ‖²) over constraints and columns after projection.
    pub max_residual_ratio: f64,
}

/// Interference at a terminal with response `c` from column `x` is cᵀx, so
/// the constraint directions are the conjugated steering vectors.
fn constraint_basis(cpe: &[SteeringVector], n: usize) -> Result<CMatrix> {
    for c in cpe {
        if c.len() != n {
            return Err(Error::DimensionMismatch(format!("CPE vector length {} vs {n} antennas", c.len())));
        }
    }
    let cols: Vec<CVector> = cpe.iter().map(|c| c.entries.map(|z| z.conj())).collect();
    Ok(orthonormal_columns(&cols, 1e-10))
}

/// Projects every column of `matrix` onto the orthogonal complement of the
/// CPE constraint span, without re-scaling.
pub fn project_null_space(matrix: &CMatrix, cpe: &[SteeringVector]) -> Result<CMatrix> {
    let n = matrix.nrows();
    if cpe.is_empty() {
        return Ok(matrix.clone());
    }
    let q = constraint_basis(cpe, n)?;
    if q.ncols() >= n {
        return Err(Error::InfeasibleNulling {
            constraints: q.ncols(),
            antennas: n,
        });
    }
    let mut x = matrix.clone();
    // Second pass removes the rounding left by the first.
    for _ in 0..2 {
        let coeff = q.adjoint() * &x;
        x -= &q * coeff;
    }
    Ok(x)
}

/// Spatial nulling toward terminals that must not receive the ISAC signal,
/// followed by re-projection onto the power budget.
pub fn project_null_constraints(waveform: &IsacWaveform, cpe: &[SteeringVector]) -> Result<NullingOutcome> {
    if cpe.is_empty() {
        return Ok(NullingOutcome {
            waveform: waveform.clone(),
            retained_energy_fraction: 1.0,
            max_residual_ratio: 0.0,
        });
    }
    let projected = project_null_space(&waveform.matrix, cpe)?;
    let retained = frobenius_sq(&projected) / waveform.energy();
    let (out, _) = IsacWaveform::project_power(projected, waveform.total_power)?;
    let mut worst: f64 = 0.0;
    for c in cpe {
        let cn = c.entries.norm_squared();
        for col in out.matrix.column_iter() {
            let xn = col.norm_squared();
            if xn == 0.0 {
                continue;
            }
            let leak: crate::Complex64 = c.entries.iter().zip(col.iter()).map(|(a, b)| a * b).sum();
            worst = worst.max(leak.norm_sqr() / (cn * xn));
        }
    }
    Ok(NullingOutcome {
        waveform: out,
        retained_energy_fraction: retained,
        max_residual_ratio: worst,
    })
}
