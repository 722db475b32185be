//! Near-field (spherical) and far-field (planar) array responses and the
//! deterministic line-of-sight multi-user channels built from them.

use rayon::prelude::*;

use crate::error::{ensure_positive, Error, Result};
use crate::geometry::{ArrayGeometry, Point3};
use crate::{CMatrix, CVector, Complex64};

/// A point described by range and angles relative to the array centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourcePoint {
    pub range: f64,
    pub azimuth: f64,
    pub elevation: f64,
}

impl SourcePoint {
    pub fn new(range: f64, azimuth: f64, elevation: f64) -> Result<Self> {
        ensure_positive("range", range)?;
        if !azimuth.is_finite() || !elevation.is_finite() {
            return Err(Error::InvalidArgument("angles must be finite".into()));
        }
        Ok(Self { range, azimuth, elevation })
    }

    /// Convenience constructor taking angles in degrees.
    pub fn from_degrees(range: f64, azimuth_deg: f64, elevation_deg: f64) -> Result<Self> {
        Self::new(range, azimuth_deg.to_radians(), elevation_deg.to_radians())
    }

    /// Unit vector from the array centre towards the point.
    pub fn direction(&self) -> Point3 {
        direction(self.azimuth, self.elevation)
    }

    pub fn cartesian(&self) -> Point3 {
        let u = self.direction();
        [self.range * u[0], self.range * u[1], self.range * u[2]]
    }

    /// Same angles, different range.
    pub fn at_range(&self, range: f64) -> Result<Self> {
        Self::new(range, self.azimuth, self.elevation)
    }
}

/// Unit direction for (azimuth, elevation) under the crate convention.
pub fn direction(azimuth: f64, elevation: f64) -> Point3 {
    [
        azimuth.sin() * elevation.cos(),
        azimuth.cos() * elevation.cos(),
        elevation.sin(),
    ]
}

/// Per-element amplitude law for near-field responses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AmplitudeModel {
    /// Equal magnitudes; only the phase follows the exact distance.
    PhaseOnly,
    /// Magnitude ∝ 1/dₙ.
    FreeSpace,
    /// Magnitude ∝ √(cos ψₙ)/dₙ with ψₙ the incidence angle off the element normal.
    ApertureLoss,
}

impl AmplitudeModel {
    pub fn label(&self) -> &'static str {
        match self {
            AmplitudeModel::PhaseOnly => "phase-only",
            AmplitudeModel::FreeSpace => "free-space",
            AmplitudeModel::ApertureLoss => "aperture-loss",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "phase-only" => Some(AmplitudeModel::PhaseOnly),
            "free-space" => Some(AmplitudeModel::FreeSpace),
            "aperture-loss" => Some(AmplitudeModel::ApertureLoss),
            _ => None,
        }
    }

    /// Received amplitude at an element a distance `d` from the source, where
    /// `normal_component` is the source offset along the element normal (+y).
    pub fn amplitude(&self, d: f64, normal_component: f64) -> f64 {
        match self {
            AmplitudeModel::PhaseOnly => 1.0,
            AmplitudeModel::FreeSpace => 1.0 / d,
            AmplitudeModel::ApertureLoss => (normal_component / d).max(0.0).sqrt() / d,
        }
    }
}

/// Wavefront model used to build responses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WavefrontModel {
    NearField,
    FarField,
}

impl WavefrontModel {
    pub fn label(&self) -> &'static str {
        match self {
            WavefrontModel::NearField => "near-field",
            WavefrontModel::FarField => "far-field",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    UnitNorm,
    /// Entries are amplitudes relative to a reference element at the array centre.
    PhysicalAmplitude,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    pub entries: CVector,
    pub normalization: Normalization,
}

impl SteeringVector {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn unit_norm(&self) -> SteeringVector {
        let n = self.entries.norm();
        SteeringVector {
            entries: &self.entries / Complex64::new(n, 0.0),
            normalization: Normalization::UnitNorm,
        }
    }
}

fn distance(a: &Point3, b: &Point3) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

const COINCIDENCE_EPS: f64 = 1e-9;

/// Exact spherical-wavefront response with physical amplitudes: entry n is
/// (aₙ/a_ref)·exp(−j·2π/λ·dₙ), a_ref being the amplitude a reference element
/// at the array centre would receive.
pub fn near_field_response(
    geometry: &ArrayGeometry,
    point: &SourcePoint,
    amp: AmplitudeModel,
) -> Result<SteeringVector> {
    let src = point.cartesian();
    let k = geometry.wavenumber();
    let a_ref = amp.amplitude(point.range, src[1]);
    if a_ref <= 0.0 {
        return Err(Error::InvalidArgument(
            "source lies behind or in the array plane; reference amplitude is zero".into(),
        ));
    }
    let mut entries = CVector::zeros(geometry.n_antennas());
    for (n, p) in geometry.positions.iter().enumerate() {
        let d = distance(p, &src);
        if d < COINCIDENCE_EPS {
            return Err(Error::SingularGeometry { element: n, distance: d });
        }
        let a = amp.amplitude(d, src[1] - p[1]) / a_ref;
        entries[n] = Complex64::from_polar(a, -k * d);
    }
    Ok(SteeringVector {
        entries,
        normalization: Normalization::PhysicalAmplitude,
    })
}

/// Unit-norm near-field steering vector; the amplitude taper is kept relative.
pub fn near_field_steering(
    geometry: &ArrayGeometry,
    point: &SourcePoint,
    amp: AmplitudeModel,
) -> Result<SteeringVector> {
    Ok(near_field_response(geometry, point, amp)?.unit_norm())
}

/// Planar-wavefront response with unit-modulus entries
/// exp(−j·2π/λ·(r − ⟨pₙ, û⟩)) for a source at range `range` (use 0 to drop the
/// common phase).
pub fn far_field_response(geometry: &ArrayGeometry, azimuth: f64, elevation: f64, range: f64) -> SteeringVector {
    let u = direction(azimuth, elevation);
    let k = geometry.wavenumber();
    let entries = CVector::from_iterator(
        geometry.n_antennas(),
        geometry.positions.iter().map(|p| {
            let proj = p[0] * u[0] + p[1] * u[1] + p[2] * u[2];
            Complex64::from_polar(1.0, -k * (range - proj))
        }),
    );
    SteeringVector {
        entries,
        normalization: Normalization::PhysicalAmplitude,
    }
}

/// Unit-norm far-field steering vector, magnitudes 1/√N.
pub fn far_field_steering(geometry: &ArrayGeometry, azimuth: f64, elevation: f64) -> SteeringVector {
    far_field_response(geometry, azimuth, elevation, 0.0).unit_norm()
}

/// Physical-amplitude response under either wavefront model.
pub fn response(
    geometry: &ArrayGeometry,
    point: &SourcePoint,
    model: WavefrontModel,
    amp: AmplitudeModel,
) -> Result<SteeringVector> {
    match model {
        WavefrontModel::NearField => near_field_response(geometry, point, amp),
        WavefrontModel::FarField => Ok(far_field_response(geometry, point.azimuth, point.elevation, point.range)),
    }
}

/// Large-scale anchor: a user at `distance` sees average per-element gain
/// 10^(gain_db/10), falling off as distance⁻².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathlossReference {
    pub distance: f64,
    pub gain_db: f64,
}

impl PathlossReference {
    pub fn amplitude(&self, range: f64) -> f64 {
        10f64.powf(self.gain_db / 20.0) * self.distance / range
    }
}

/// K×N downlink channel matrix with the model that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub matrix: CMatrix,
    pub model: WavefrontModel,
    pub amplitude_model: AmplitudeModel,
    pub ue_points: Vec<SourcePoint>,
}

impl ChannelSet {
    pub fn n_users(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_antennas(&self) -> usize {
        self.matrix.ncols()
    }

    /// ‖h_k‖²/N.
    pub fn average_gain(&self, user: usize) -> f64 {
        self.matrix.row(user).norm_squared() / self.n_antennas() as f64
    }

    /// Same set with every entry multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> ChannelSet {
        ChannelSet {
            matrix: &self.matrix * Complex64::new(factor, 0.0),
            ..self.clone()
        }
    }

    /// Same users and model with a replacement matrix.
    pub fn with_matrix(&self, matrix: CMatrix) -> Result<ChannelSet> {
        if matrix.shape() != self.matrix.shape() {
            return Err(Error::DimensionMismatch(format!(
                "replacement matrix {:?} vs {:?}",
                matrix.shape(),
                self.matrix.shape()
            )));
        }
        Ok(ChannelSet { matrix, ..self.clone() })
    }
}

/// Builds the deterministic line-of-sight channel rows hₖ = βₖ·a(pₖ)ᵀ, where
/// a is the physical-amplitude response and βₖ the large-scale amplitude.
/// The received sample at user k for transmit vector x is hₖ·x.
pub fn build_channels(
    geometry: &ArrayGeometry,
    ue_points: &[SourcePoint],
    model: WavefrontModel,
    amp: AmplitudeModel,
    reference: PathlossReference,
) -> Result<ChannelSet> {
    if ue_points.is_empty() {
        return Err(Error::InvalidArgument("at least one user is required".into()));
    }
    ensure_positive("reference distance", reference.distance)?;
    let rows: Vec<CVector> = ue_points
        .par_iter()
        .map(|p| {
            let a = response(geometry, p, model, amp)?;
            Ok(a.entries * Complex64::new(reference.amplitude(p.range), 0.0))
        })
        .collect::<Result<_>>()?;
    let mut matrix = CMatrix::zeros(ue_points.len(), geometry.n_antennas());
    for (k, r) in rows.iter().enumerate() {
        matrix.set_row(k, &r.transpose());
    }
    Ok(ChannelSet {
        matrix,
        model,
        amplitude_model: amp,
        ue_points: ue_points.to_vec(),
    })
}

/// |aᴴb| for two unit-norm vectors.
pub fn correlation_magnitude(a: &SteeringVector, b: &SteeringVector) -> f64 {
    a.unit_norm().entries.dotc(&b.unit_norm().entries).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_upa, fraunhofer_distance};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn array_78() -> ArrayGeometry {
        build_upa(7.8e9, 31, 0.25, 0.5).unwrap()
    }

    #[test]
    fn far_field_boresight_is_uniform() {
        let g = array_78();
        let a = far_field_steering(&g, 0.0, 0.0);
        let first = a.entries[0];
        assert!(a.entries.iter().all(|z| (z - first).norm() < 1e-14));
        assert_relative_eq!(a.entries.norm(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn near_field_tends_to_planar_far_away() {
        let g = array_78();
        let d_fa = fraunhofer_distance(&g);
        let p = SourcePoint::new(100.0 * d_fa, 0.0, 0.0).unwrap();
        let nf = near_field_steering(&g, &p, AmplitudeModel::PhaseOnly).unwrap();
        let ff = far_field_steering(&g, 0.0, 0.0);
        assert!(correlation_magnitude(&nf, &ff) > 1.0 - 1e-3);

        let off = SourcePoint::from_degrees(1e6, 17.0, -8.0).unwrap();
        let nf = near_field_steering(&g, &off, AmplitudeModel::PhaseOnly).unwrap();
        let ff = far_field_steering(&g, off.azimuth, off.elevation);
        assert!(correlation_magnitude(&nf, &ff) > 0.9999);
    }

    #[test]
    fn single_element_steering_is_unit() {
        let g = build_upa(7.8e9, 1, 0.25, 0.5).unwrap();
        for p in [SourcePoint::new(3.0, 0.2, 0.1).unwrap(), SourcePoint::new(300.0, -1.0, 0.0).unwrap()] {
            let a = near_field_steering(&g, &p, AmplitudeModel::FreeSpace).unwrap();
            assert_eq!(a.len(), 1);
            assert_relative_eq!(a.entries[0].norm(), 1.0, max_relative = 1e-15);
        }
    }

    #[test]
    fn ranges_30_and_31_are_distinguishable() {
        let g = array_78();
        let a = near_field_steering(&g, &SourcePoint::new(30.0, 0.0, 0.0).unwrap(), AmplitudeModel::PhaseOnly).unwrap();
        let b = near_field_steering(&g, &SourcePoint::new(31.0, 0.0, 0.0).unwrap(), AmplitudeModel::PhaseOnly).unwrap();
        assert!(correlation_magnitude(&a, &b) < 1.0);
    }

    #[test]
    fn coincident_point_is_singular() {
        let g = build_upa(7.8e9, 2, 0.25, 0.5).unwrap();
        let p = g.positions[3];
        let r = (p[0] * p[0] + p[2] * p[2]).sqrt();
        let az = p[0].atan2(p[1]);
        let el = (p[2] / r).asin();
        let pt = SourcePoint::new(r, az, el).unwrap();
        assert!(matches!(
            near_field_steering(&g, &pt, AmplitudeModel::PhaseOnly),
            Err(Error::SingularGeometry { element: 3, .. })
        ));
    }

    #[test]
    fn channel_rows_follow_reference_anchor() {
        let g = array_78();
        let ue = [SourcePoint::new(30.0, 0.3, 0.0).unwrap()];
        let reference = PathlossReference { distance: 30.0, gain_db: 0.0 };
        let h = build_channels(&g, &ue, WavefrontModel::NearField, AmplitudeModel::PhaseOnly, reference).unwrap();
        assert_relative_eq!(h.average_gain(0), 1.0, max_relative = 1e-12);
        assert!(build_channels(&g, &[], WavefrontModel::NearField, AmplitudeModel::PhaseOnly, reference).is_err());
    }

    #[test]
    fn use_case_channels_have_expected_shape_and_differ_by_model() {
        let g = array_78();
        let ues: Vec<SourcePoint> = [30.0, 40.0, 50.0, 60.0]
            .iter()
            .zip([-40.0, -20.0, 20.0, 40.0])
            .map(|(&r, az)| SourcePoint::from_degrees(r, az, 0.0).unwrap())
            .collect();
        let reference = PathlossReference { distance: 30.0, gain_db: 0.0 };
        let nf = build_channels(&g, &ues, WavefrontModel::NearField, AmplitudeModel::FreeSpace, reference).unwrap();
        let ff = build_channels(&g, &ues, WavefrontModel::FarField, AmplitudeModel::FreeSpace, reference).unwrap();
        assert_eq!(nf.matrix.shape(), (4, 961));
        let row_nf = nf.matrix.row(0).transpose();
        let row_ff = ff.matrix.row(0).transpose();
        let c = row_nf.dotc(&row_ff).norm() / (row_nf.norm() * row_ff.norm());
        assert!(c < 1.0 - 1e-3, "correlation {c}");
        let again = build_channels(&g, &ues, WavefrontModel::NearField, AmplitudeModel::FreeSpace, reference).unwrap();
        assert_eq!(nf, again);
    }

    #[test]
    fn correlation_with_far_field_increases_with_range() {
        let g = array_78();
        let d_fa = fraunhofer_distance(&g);
        let ff = far_field_steering(&g, 0.2, 0.05);
        let mut last = 0.0;
        for m in [10.0, 100.0, 1000.0] {
            let p = SourcePoint::new(m * d_fa, 0.2, 0.05).unwrap();
            let nf = near_field_steering(&g, &p, AmplitudeModel::PhaseOnly).unwrap();
            let c = correlation_magnitude(&nf, &ff);
            assert!(c > last, "{c} after {last}");
            last = c;
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn phase_only_entries_have_constant_modulus(
            r in 0.5f64..500.0, az in -1.2f64..1.2, el in -0.8f64..0.8,
        ) {
            let g = build_upa(15e9, 6, 0.25, 0.5).unwrap();
            let p = SourcePoint::new(r, az, el).unwrap();
            let a = near_field_response(&g, &p, AmplitudeModel::PhaseOnly).unwrap();
            prop_assert!(a.entries.iter().all(|z| (z.norm() - 1.0).abs() <= 4.0 * f64::EPSILON));
            let u = near_field_steering(&g, &p, AmplitudeModel::FreeSpace).unwrap();
            prop_assert!((u.entries.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn far_field_vectors_are_unit_norm(az in -3.0f64..3.0, el in -1.5f64..1.5) {
            let g = build_upa(7.8e9, 5, 0.25, 0.5).unwrap();
            prop_assert!((far_field_steering(&g, az, el).entries.norm() - 1.0).abs() < 1e-12);
        }
    }
}
