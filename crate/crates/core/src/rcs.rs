//! Radar cross section of a flat circular disk.
//!
//! The far-field value is the closed form 4π³a⁴/λ². The range-dependent value
//! is a monostatic scalar physical-optics estimate: a point source at the
//! array centre illuminates a perfectly conducting disk with a spherical
//! wave, and the induced surface field is re-radiated back to the source,
//!
//! ```text
//! Eₛ = (jk/2π) ∬ e^{−j2kR}/R² · (n̂·R̂) dS,   σ(r) = 4π r⁴ |Eₛ|²
//! ```
//!
//! where `r` is the range to the disk centre (|E_inc| = 1/r there). As r → ∞
//! this tends to 4π(πa²)²/λ², the closed form.

use rayon::prelude::*;

use crate::error::{ensure_positive, Error, Result};
use crate::geometry::Point3;
use crate::propagation::SourcePoint;
use crate::Complex64;

/// Minimum quadrature density across the disk.
pub const MIN_SAMPLES_PER_WAVELENGTH: f64 = 10.0;
/// Minimum radial samples regardless of frequency.
pub const MIN_SAMPLES_PER_RADIUS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskTarget {
    pub radius: f64,
    pub center: SourcePoint,
    /// Unit normal; `None` faces the array centre.
    pub facing: Option<Point3>,
}

impl DiskTarget {
    pub fn new(radius: f64, center: SourcePoint) -> Result<Self> {
        ensure_positive("radius", radius)?;
        Ok(Self { radius, center, facing: None })
    }

    fn normal(&self) -> Point3 {
        match self.facing {
            Some(n) => {
                let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
                [n[0] / len, n[1] / len, n[2] / len]
            }
            None => {
                let u = self.center.direction();
                [-u[0], -u[1], -u[2]]
            }
        }
    }
}

/// Polar product rule on the unit-radius-scaled disk: Gauss–Legendre in
/// radius, uniform in angle.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureMesh {
    pub radius: f64,
    pub samples_per_radius: usize,
    pub angular_samples: usize,
    /// In-plane coordinates (u, v) of each node, m.
    pub nodes: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

impl QuadratureMesh {
    pub fn new(radius: f64, samples_per_radius: usize) -> Result<Self> {
        ensure_positive("radius", radius)?;
        if samples_per_radius < MIN_SAMPLES_PER_RADIUS {
            return Err(Error::InvalidArgument(format!(
                "need at least {MIN_SAMPLES_PER_RADIUS} samples per radius, got {samples_per_radius}"
            )));
        }
        let angular = ((std::f64::consts::TAU * samples_per_radius as f64).ceil() as usize).max(8);
        let (gx, gw) = gauss_legendre(samples_per_radius);
        let dtheta = std::f64::consts::TAU / angular as f64;
        let mut nodes = Vec::with_capacity(samples_per_radius * angular);
        let mut weights = Vec::with_capacity(samples_per_radius * angular);
        for (x, w) in gx.iter().zip(&gw) {
            let rho = 0.5 * radius * (x + 1.0);
            let wr = 0.5 * radius * w * rho * dtheta;
            for j in 0..angular {
                let theta = (j as f64 + 0.5) * dtheta;
                nodes.push([rho * theta.cos(), rho * theta.sin()]);
                weights.push(wr);
            }
        }
        Ok(Self {
            radius,
            samples_per_radius,
            angular_samples: angular,
            nodes,
            weights,
        })
    }

    /// Coarsest mesh meeting the density requirements at `wavelength`.
    pub fn for_wavelength(radius: f64, wavelength: f64) -> Result<Self> {
        ensure_positive("wavelength", wavelength)?;
        let needed = (MIN_SAMPLES_PER_WAVELENGTH * radius / wavelength).ceil() as usize;
        Self::new(radius, needed.max(MIN_SAMPLES_PER_RADIUS))
    }

    /// Mesh with twice the radial density.
    pub fn refined(&self) -> Result<Self> {
        Self::new(self.radius, 2 * self.samples_per_radius)
    }

    pub fn samples_per_wavelength(&self, wavelength: f64) -> f64 {
        self.samples_per_radius as f64 * wavelength / self.radius
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// 4π³a⁴/λ².
pub fn far_field_rcs_disk(radius: f64, wavelength: f64) -> Result<f64> {
    ensure_positive("radius", radius)?;
    ensure_positive("wavelength", wavelength)?;
    let pi = std::f64::consts::PI;
    Ok(4.0 * pi.powi(3) * radius.powi(4) / (wavelength * wavelength))
}

fn orthonormal_frame(n: Point3) -> (Point3, Point3) {
    let helper = if n[2].abs() < 0.9 { [0.0, 0.0, 1.0] } else { [1.0, 0.0, 0.0] };
    let cross = |a: Point3, b: Point3| [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let t1 = cross(helper, n);
    let l = (t1[0] * t1[0] + t1[1] * t1[1] + t1[2] * t1[2]).sqrt();
    let t1 = [t1[0] / l, t1[1] / l, t1[2] / l];
    (t1, cross(n, t1))
}

const CHUNK: usize = 4096;

/// Monostatic physical-optics RCS at the target's range.
pub fn near_field_rcs_disk(target: &DiskTarget, wavelength: f64, mesh: &QuadratureMesh) -> Result<f64> {
    ensure_positive("wavelength", wavelength)?;
    ensure_positive("range", target.center.range)?;
    if (mesh.radius - target.radius).abs() > 1e-12 * target.radius {
        return Err(Error::InvalidArgument(format!(
            "mesh radius {} does not match disk radius {}",
            mesh.radius, target.radius
        )));
    }
    let spw = mesh.samples_per_wavelength(wavelength);
    if spw < MIN_SAMPLES_PER_WAVELENGTH {
        return Err(Error::Resolution {
            samples_per_wavelength: spw,
            required: MIN_SAMPLES_PER_WAVELENGTH,
        });
    }
    let k = std::f64::consts::TAU / wavelength;
    let c = target.center.cartesian();
    let n = target.normal();
    let (t1, t2) = orthonormal_frame(n);
    // Fixed chunking keeps the summation order independent of thread count.
    let partials: Vec<Complex64> = mesh
        .nodes
        .par_chunks(CHUNK)
        .zip(mesh.weights.par_chunks(CHUNK))
        .map(|(nodes, weights)| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (uv, &w) in nodes.iter().zip(weights) {
                let q = [
                    c[0] + uv[0] * t1[0] + uv[1] * t2[0],
                    c[1] + uv[0] * t1[1] + uv[1] * t2[1],
                    c[2] + uv[0] * t1[2] + uv[1] * t2[2],
                ];
                let r2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
                let r = r2.sqrt();
                // R̂ points from the surface back to the source.
                let obliquity = (-(n[0] * q[0] + n[1] * q[1] + n[2] * q[2]) / r).abs();
                acc += Complex64::from_polar(w * obliquity / r2, -2.0 * k * r);
            }
            acc
        })
        .collect();
    let integral: Complex64 = partials.iter().sum();
    let scattered = Complex64::new(0.0, k / std::f64::consts::TAU) * integral;
    let range = target.center.range;
    Ok(4.0 * std::f64::consts::PI * range.powi(4) * scattered.norm_sqr())
}

/// One row of a range sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RcsSample {
    pub range: f64,
    pub near_field: f64,
    pub far_field: f64,
}

/// Near- and far-field RCS of a disk facing the array along boresight.
pub fn rcs_range_sweep(radius: f64, wavelength: f64, ranges: &[f64]) -> Result<Vec<RcsSample>> {
    let mesh = QuadratureMesh::for_wavelength(radius, wavelength)?;
    let ff = far_field_rcs_disk(radius, wavelength)?;
    ranges
        .iter()
        .map(|&r| {
            let target = DiskTarget::new(radius, SourcePoint::new(r, 0.0, 0.0)?)?;
            Ok(RcsSample {
                range: r,
                near_field: near_field_rcs_disk(&target, wavelength, &mesh)?,
                far_field: ff,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{fraunhofer_distance_for_size, wavelength};
    use approx::assert_relative_eq;

    /// On-axis disk facing the source reduces to a 1-D integral:
    /// Eₛ = jk·r·∫_r^{√(r²+a²)} e^{−j2kR}/R² dR. Composite Simpson, fine grid.
    fn on_axis_oracle(radius: f64, lambda: f64, r: f64) -> f64 {
        let k = std::f64::consts::TAU / lambda;
        let r_edge = (r * r + radius * radius).sqrt();
        let phase_span = 2.0 * k * (r_edge - r);
        let steps = ((phase_span * 40.0).ceil() as usize).max(2000) * 2;
        let h = (r_edge - r) / steps as f64;
        let f = |x: f64| Complex64::from_polar(1.0 / (x * x), -2.0 * k * x);
        let mut sum = f(r) + f(r_edge);
        for i in 1..steps {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += f(r + i as f64 * h) * w;
        }
        let integral = sum * (h / 3.0);
        let es = Complex64::new(0.0, k * r) * integral;
        4.0 * std::f64::consts::PI * r.powi(4) * es.norm_sqr()
    }

    #[test]
    fn closed_form_value_and_scalings() {
        let sigma = far_field_rcs_disk(0.1, 0.03843).unwrap();
        assert_relative_eq!(sigma, 8.40, max_relative = 2e-3);
        let a = far_field_rcs_disk(0.2, 0.05).unwrap();
        assert_eq!(far_field_rcs_disk(0.2, 0.025).unwrap(), 4.0 * a);
        assert_eq!(far_field_rcs_disk(0.4, 0.05).unwrap(), 16.0 * a);
        assert!(far_field_rcs_disk(-1.0, 0.1).is_err());
        assert!(far_field_rcs_disk(1.0, 0.0).is_err());
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert_relative_eq!(integral, 2.0 / 13.0, max_relative = 1e-13);
    }

    #[test]
    fn mesh_weights_sum_to_disk_area() {
        for (a, n) in [(0.1, 8), (0.25, 40), (1.0, 13)] {
            let mesh = QuadratureMesh::new(a, n).unwrap();
            assert_relative_eq!(mesh.weight_sum(), std::f64::consts::PI * a * a, max_relative = 1e-3);
        }
        assert!(QuadratureMesh::new(0.1, 4).is_err());
    }

    #[test]
    fn quadrature_matches_one_dimensional_oracle() {
        let lambda = wavelength(7.8e9);
        let mesh = QuadratureMesh::for_wavelength(0.25, lambda).unwrap();
        for r in [0.7, 2.0, 5.0, 13.0, 60.0] {
            let t = DiskTarget::new(0.25, SourcePoint::new(r, 0.0, 0.0).unwrap()).unwrap();
            let q = near_field_rcs_disk(&t, lambda, &mesh).unwrap();
            let o = on_axis_oracle(0.25, lambda, r);
            assert_relative_eq!(q, o, max_relative = 1e-3);
        }
    }

    #[test]
    fn converges_to_far_field() {
        let (a, lambda) = (0.1, wavelength(7.8e9));
        let d_disk = fraunhofer_distance_for_size(2.0 * a, lambda);
        let mesh = QuadratureMesh::for_wavelength(a, lambda).unwrap();
        let t = DiskTarget::new(a, SourcePoint::from_degrees(1000.0 * d_disk, 20.0, 5.0).unwrap()).unwrap();
        let nf = near_field_rcs_disk(&t, lambda, &mesh).unwrap();
        let ff = far_field_rcs_disk(a, lambda).unwrap();
        assert!((nf / ff - 1.0).abs() < 0.05);
    }

    #[test]
    fn refinement_is_self_consistent() {
        let lambda = wavelength(15e9);
        let mesh = QuadratureMesh::for_wavelength(0.25, lambda).unwrap();
        let fine = mesh.refined().unwrap();
        for r in [1.0, 4.0, 30.0, 150.0] {
            let t = DiskTarget::new(0.25, SourcePoint::new(r, 0.0, 0.0).unwrap()).unwrap();
            let a = near_field_rcs_disk(&t, lambda, &mesh).unwrap();
            let b = near_field_rcs_disk(&t, lambda, &fine).unwrap();
            assert!((a / b - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn under_resolved_mesh_is_rejected() {
        let lambda = wavelength(15e9);
        let mesh = QuadratureMesh::new(0.25, 8).unwrap();
        let t = DiskTarget::new(0.25, SourcePoint::new(10.0, 0.0, 0.0).unwrap()).unwrap();
        assert!(matches!(near_field_rcs_disk(&t, lambda, &mesh), Err(Error::Resolution { .. })));
        let t0 = DiskTarget { radius: 0.25, center: SourcePoint { range: 0.0, azimuth: 0.0, elevation: 0.0 }, facing: None };
        let ok_mesh = QuadratureMesh::for_wavelength(0.25, lambda).unwrap();
        assert!(matches!(near_field_rcs_disk(&t0, lambda, &ok_mesh), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn tilted_disk_scatters_less_in_far_field() {
        let lambda = wavelength(7.8e9);
        let mesh = QuadratureMesh::for_wavelength(0.1, lambda).unwrap();
        let center = SourcePoint::new(500.0, 0.0, 0.0).unwrap();
        let facing = DiskTarget::new(0.1, center).unwrap();
        let mut tilted = facing;
        tilted.facing = Some([0.3, -1.0, 0.0]);
        assert!(near_field_rcs_disk(&tilted, lambda, &mesh).unwrap() < near_field_rcs_disk(&facing, lambda, &mesh).unwrap());
    }

    #[test]
    fn range_sweep_shape_for_quarter_metre_disk() {
        let (a, lambda) = (0.25, wavelength(7.8e9));
        let d_disk = fraunhofer_distance_for_size(2.0 * a, lambda);
        let ranges = crate::analytics::log_space(1.0, 200.0, 120);
        let sweep = rcs_range_sweep(a, lambda, &ranges).unwrap();
        let db = |s: &RcsSample| 10.0 * (s.near_field / s.far_field).log10();
        assert!(sweep.iter().filter(|s| s.range < d_disk).any(|s| db(s).abs() > 1.0));
        let tail: Vec<_> = sweep.iter().filter(|s| s.range > 5.0 * d_disk).collect();
        assert!(!tail.is_empty() && tail.iter().all(|s| db(s).abs() < 1.0));
        assert!(sweep.iter().all(|s| s.near_field >= 0.0));
    }

    #[test]
    fn asymptote_stays_within_bound() {
        let (a, lambda) = (0.1, wavelength(7.8e9));
        let d_disk = fraunhofer_distance_for_size(2.0 * a, lambda);
        let ranges: Vec<f64> = [100.0, 200.0, 500.0, 1000.0, 1e4].iter().map(|m| m * d_disk).collect();
        for s in rcs_range_sweep(a, lambda, &ranges).unwrap() {
            assert!((s.near_field / s.far_field - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn long_range_frequency_ratio() {
        let a = 0.1;
        let at = |f: f64| {
            let lambda = wavelength(f);
            let r = 1000.0 * fraunhofer_distance_for_size(2.0 * a, wavelength(15e9));
            rcs_range_sweep(a, lambda, &[r]).unwrap()[0].near_field
        };
        let ratio = at(15e9) / at(7.8e9);
        assert!((ratio / (15.0f64 / 7.8).powi(2) - 1.0).abs() < 0.02);
    }
}
