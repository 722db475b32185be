use rand::Rng;

use super::response::{target_response, ScattererSet, TargetResponse};
use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::linalg::{frobenius_sq, orthonormal_columns};
use crate::propagation::WavefrontModel;
use crate::waveform::IsacWaveform;
use crate::{rng, CMatrix};

/// Clutter and receiver noise seen by the radar receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoModel {
    /// Mean per-entry clutter echo power for a unit-power transmit block.
    pub clutter_power: f64,
    pub noise_power: f64,
    pub clutter: Option<TargetResponse>,
}

impl EchoModel {
    pub fn noise_only(noise_power: f64) -> Result<Self> {
        check_power("noise_power", noise_power)?;
        Ok(Self {
            clutter_power: 0.0,
            noise_power,
            clutter: None,
        })
    }

    /// Near-field point clutter; reflectivities keep their relative values
    /// and are rescaled so ‖C‖²_F = clutter_power·N², which gives a mean
    /// per-entry clutter power of `clutter_power` when XXᴴ ∝ I and P = 1.
    pub fn with_clutter(
        geometry: &ArrayGeometry,
        scatterers: &ScattererSet,
        clutter_power: f64,
        noise_power: f64,
    ) -> Result<Self> {
        check_power("noise_power", noise_power)?;
        check_power("clutter_power", clutter_power)?;
        let resp = target_response(geometry, scatterers, WavefrontModel::NearField)?;
        let n = geometry.n_antennas() as f64;
        let current = frobenius_sq(&resp.dense());
        if current == 0.0 {
            return Err(Error::InvalidArgument("clutter scatterers have zero reflectivity".into()));
        }
        let clutter = resp.scaled((clutter_power * n * n / current).sqrt());
        Ok(Self {
            clutter_power,
            noise_power,
            clutter: Some(clutter),
        })
    }

    /// Orthonormal basis (N × n_c) of the clutter steering span.
    pub fn clutter_basis(&self) -> Option<CMatrix> {
        let c = self.clutter.as_ref()?;
        let cols: Vec<_> = c.steering.column_iter().map(|v| v.into_owned()).collect();
        Some(orthonormal_columns(&cols, 1e-10))
    }
}

fn check_power(name: &str, value: f64) -> Result<()> {
    if value < 0.0 || !value.is_finite() {
        return Err(Error::InvalidArgument(format!("{name} must be non-negative and finite, got {value}")));
    }
    Ok(())
}

/// Y = [G·X if present] + C·X + W drawn from `rng`.
pub fn synthesize_echo_with<R: Rng + ?Sized>(
    response: &TargetResponse,
    waveform: &IsacWaveform,
    echo: &EchoModel,
    target_present: bool,
    rng: &mut R,
) -> Result<CMatrix> {
    let (n, l) = waveform.matrix.shape();
    let mut y = if echo.noise_power > 0.0 {
        rng::complex_normal_matrix(rng, n, l, echo.noise_power)
    } else {
        CMatrix::zeros(n, l)
    };
    if target_present {
        y += response.apply(&waveform.matrix)?;
    } else if response.n_antennas() != n {
        return Err(Error::DimensionMismatch(format!("response {} vs waveform {n} antennas", response.n_antennas())));
    }
    if let Some(c) = &echo.clutter {
        if echo.clutter_power > 0.0 {
            y += c.apply(&waveform.matrix)?;
        }
    }
    Ok(y)
}

/// Deterministic echo for `seed`.
pub fn synthesize_echo(
    response: &TargetResponse,
    waveform: &IsacWaveform,
    echo: &EchoModel,
    target_present: bool,
    seed: u64,
) -> Result<CMatrix> {
    synthesize_echo_with(response, waveform, echo, target_present, &mut rng::stream(seed, 0))
}
