use rayon::prelude::*;

use crate::error::{ensure_positive, Error, Result};
use crate::geometry::ArrayGeometry;
use crate::linalg::matmul;
use crate::propagation::{response, AmplitudeModel, SourcePoint, WavefrontModel};
use crate::rcs::{near_field_rcs_disk, DiskTarget, QuadratureMesh};
use crate::{rng, CMatrix, CVector, Complex64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scatterer {
    pub point: SourcePoint,
    pub reflectivity: Complex64,
}

/// Point scatterers making up an extended target (or the clutter field).
#[derive(Debug, Clone, PartialEq)]
pub struct ScattererSet {
    scatterers: Vec<Scatterer>,
}

impl ScattererSet {
    pub fn new(scatterers: Vec<Scatterer>) -> Result<Self> {
        if scatterers.is_empty() {
            return Err(Error::InvalidArgument("a scatterer set needs at least one scatterer".into()));
        }
        for s in &scatterers {
            ensure_positive("scatterer range", s.point.range)?;
        }
        Ok(Self { scatterers })
    }

    /// Scatterers at `points`, each with unit-magnitude reflectivity and a
    /// uniform random phase drawn from `seed`.
    pub fn with_random_phases(points: &[SourcePoint], seed: u64) -> Result<Self> {
        let mut g = rng::stream(seed, 0);
        Self::new(
            points
                .iter()
                .map(|&point| Scatterer {
                    point,
                    reflectivity: rng::unit_phase(&mut g),
                })
                .collect(),
        )
    }

    /// Reflectivities from a two-way radar equation around a disk scatterer:
    /// |γₛ|² = g_ref · σ(rₛ)/(1 m²) · (d_ref/rₛ)⁴, with σ the range-dependent
    /// disk RCS at the scatterer's own range and random phases from `seed`.
    pub fn from_disk_rcs(
        points: &[SourcePoint],
        disk_radius: f64,
        wavelength: f64,
        reference_gain_db: f64,
        reference_distance: f64,
        seed: u64,
    ) -> Result<Self> {
        ensure_positive("reference distance", reference_distance)?;
        let mesh = QuadratureMesh::for_wavelength(disk_radius, wavelength)?;
        let g_ref = crate::db_to_linear(reference_gain_db);
        let mut set = Self::with_random_phases(points, seed)?;
        for s in &mut set.scatterers {
            let sigma = near_field_rcs_disk(&DiskTarget::new(disk_radius, s.point)?, wavelength, &mesh)?;
            let mag = (g_ref * sigma).sqrt() * (reference_distance / s.point.range).powi(2);
            s.reflectivity *= mag;
        }
        Ok(set)
    }

    pub fn scatterers(&self) -> &[Scatterer] {
        &self.scatterers
    }

    pub fn points(&self) -> Vec<SourcePoint> {
        self.scatterers.iter().map(|s| s.point).collect()
    }

    pub fn len(&self) -> usize {
        self.scatterers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scatterers.is_empty()
    }
}

/// Monostatic response G = Σₛ γₛ·aₛ·aₛᵀ kept in factored form: `steering`
/// holds the N×S unit-modulus responses aₛ, `reflectivity` the γₛ.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetResponse {
    pub steering: CMatrix,
    pub reflectivity: CVector,
    pub model: WavefrontModel,
}

impl TargetResponse {
    pub fn n_antennas(&self) -> usize {
        self.steering.nrows()
    }

    pub fn n_scatterers(&self) -> usize {
        self.steering.ncols()
    }

    /// The full N×N matrix.
    pub fn dense(&self) -> CMatrix {
        let weighted = self.weighted_steering();
        matmul(&weighted, &self.steering.transpose())
    }

    /// A·diag(γ).
    fn weighted_steering(&self) -> CMatrix {
        let mut w = self.steering.clone();
        for (j, mut col) in w.column_iter_mut().enumerate() {
            col *= self.reflectivity[j];
        }
        w
    }

    /// G·X without forming G.
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.nrows() != self.n_antennas() {
            return Err(Error::DimensionMismatch(format!(
                "response has {} antennas, waveform {} rows",
                self.n_antennas(),
                x.nrows()
            )));
        }
        let projected = matmul(&self.steering.transpose(), x);
        Ok(matmul(&self.weighted_steering(), &projected))
    }

    /// Same scatterers with every reflectivity multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> TargetResponse {
        TargetResponse {
            reflectivity: &self.reflectivity * Complex64::new(factor, 0.0),
            ..self.clone()
        }
    }
}

/// Builds the monostatic target response under the chosen wavefront model.
/// Steering entries are unit-modulus phase terms; range loss lives in the
/// reflectivities.
pub fn target_response(geometry: &ArrayGeometry, target: &ScattererSet, model: WavefrontModel) -> Result<TargetResponse> {
    let cols: Vec<CVector> = target
        .scatterers
        .par_iter()
        .map(|s| Ok(response(geometry, &s.point, model, AmplitudeModel::PhaseOnly)?.entries))
        .collect::<Result<_>>()?;
    let mut steering = CMatrix::zeros(geometry.n_antennas(), cols.len());
    for (j, c) in cols.iter().enumerate() {
        steering.set_column(j, c);
    }
    Ok(TargetResponse {
        steering,
        reflectivity: CVector::from_iterator(target.len(), target.scatterers.iter().map(|s| s.reflectivity)),
        model,
    })
}
