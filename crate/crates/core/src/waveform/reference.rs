use std::f64::consts::PI;

use super::IsacWaveform;
use crate::error::{Error, Result};
use crate::{CMatrix, Complex64};

/// Zadoff–Chu sequence of length `len` with root 1.
fn zadoff_chu(len: usize) -> Vec<Complex64> {
    let l = len as f64;
    (0..len)
        .map(|n| {
            let n = n as f64;
            let phase = if len.is_multiple_of(2) { -PI * n * n / l } else { -PI * n * (n + 1.0) / l };
            Complex64::from_polar(1.0, phase)
        })
        .collect()
}

/// Orthogonal constant-modulus sensing reference: row n is a distinct cyclic
/// shift of a Zadoff–Chu sequence, scaled so that X₀X₀ᴴ = (L·P/N)·I.
pub fn reference_radar_waveform(n_antennas: usize, frame_length: usize, power: f64) -> Result<IsacWaveform> {
    if n_antennas == 0 {
        return Err(Error::InvalidArgument("n_antennas must be positive".into()));
    }
    crate::error::ensure_positive("power", power)?;
    if frame_length < n_antennas {
        return Err(Error::InfeasibleOrthogonality {
            rows: n_antennas,
            frame_length,
        });
    }
    let zc = zadoff_chu(frame_length);
    let step = frame_length / n_antennas;
    let amp = (power / n_antennas as f64).sqrt();
    let matrix = CMatrix::from_fn(n_antennas, frame_length, |row, col| {
        zc[(col + row * step) % frame_length] * amp
    });
    Ok(IsacWaveform {
        matrix,
        total_power: power,
    })
}
