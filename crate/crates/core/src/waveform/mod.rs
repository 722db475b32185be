//! ISAC transmit waveform design and the communication side of the link.

mod design;
mod estimation;
mod nulling;
mod rates;
mod reference;
mod symbols;

pub use design::{design_weighted_waveform, mrt_waveform, weighted_objective, WeightedDesign};
pub use estimation::{estimate_channels_ls, EstimatedChannels};
pub use nulling::{project_null_constraints, NullingOutcome};
pub use rates::{achievable_rates, RateReport, SINR_CAP};
pub use reference::reference_radar_waveform;
pub use symbols::SymbolBlock;

use crate::error::{Error, Result};
use crate::linalg::frobenius_sq;
use crate::{CMatrix, Complex64};

/// N×L transmit block with its per-slot power budget P (‖X‖²_F = L·P).
#[derive(Debug, Clone, PartialEq)]
pub struct IsacWaveform {
    pub matrix: CMatrix,
    pub total_power: f64,
}

impl IsacWaveform {
    /// Scales `matrix` so that ‖X‖²_F = L·P. Returns the waveform and the
    /// applied scale factor.
    pub fn project_power(matrix: CMatrix, power: f64) -> Result<(IsacWaveform, f64)> {
        crate::error::ensure_positive("power", power)?;
        let energy = frobenius_sq(&matrix);
        if energy == 0.0 {
            return Err(Error::InvalidArgument("cannot scale an all-zero waveform to the power budget".into()));
        }
        let target = matrix.ncols() as f64 * power;
        let scale = (target / energy).sqrt();
        Ok((
            IsacWaveform {
                matrix: matrix * Complex64::new(scale, 0.0),
                total_power: power,
            },
            scale,
        ))
    }

    pub fn n_antennas(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn frame_length(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn energy(&self) -> f64 {
        frobenius_sq(&self.matrix)
    }
}
