//! Normalized array gain versus distance and steering-vector correlation
//! along range.

use rayon::prelude::*;

use crate::error::{ensure_positive, Result};
use crate::geometry::ArrayGeometry;
use crate::propagation::{near_field_steering, AmplitudeModel, SourcePoint};
use crate::linear_to_db;

/// One sample of a curve; `db` is `10·log10(value)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub abscissa: f64,
    pub value: f64,
    pub db: f64,
}

impl CurvePoint {
    pub fn new(abscissa: f64, value: f64) -> Self {
        Self { abscissa, value, db: linear_to_db(value) }
    }
}

/// Coherent (phase-aligned) received power of the array for a boresight
/// source at `distance`, relative to N reference elements at the array
/// centre: (Σₙ aₙ)² / (N·a_ref)².
pub fn normalized_array_gain(geometry: &ArrayGeometry, distance: f64, amp: AmplitudeModel) -> Result<f64> {
    ensure_positive("distance", distance)?;
    let a_ref = amp.amplitude(distance, distance);
    let sum: f64 = geometry
        .positions
        .iter()
        .map(|p| {
            let dx = p[0];
            let dy = distance - p[1];
            let dz = p[2];
            let d = (dx * dx + dy * dy + dz * dz).sqrt();
            amp.amplitude(d, dy)
        })
        .sum();
    let n = geometry.n_antennas() as f64;
    let ratio = sum / (n * a_ref);
    Ok(ratio * ratio)
}

/// Gain curve over the given distances (output order follows input order).
pub fn array_gain_curve(geometry: &ArrayGeometry, distances: &[f64], amp: AmplitudeModel) -> Result<Vec<CurvePoint>> {
    distances
        .par_iter()
        .map(|&d| Ok(CurvePoint::new(d, normalized_array_gain(geometry, d, amp)?)))
        .collect()
}

/// Power correlation |a(p₁)ᴴ a(p₂)|² of unit-norm phase-only near-field
/// steering vectors.
pub fn steering_correlation(geometry: &ArrayGeometry, a: &SourcePoint, b: &SourcePoint) -> Result<f64> {
    let va = near_field_steering(geometry, a, AmplitudeModel::PhaseOnly)?;
    let vb = near_field_steering(geometry, b, AmplitudeModel::PhaseOnly)?;
    Ok(va.entries.dotc(&vb.entries).norm_sqr().min(1.0))
}

/// Correlation between a fixed point and a second point moved along the same
/// direction to each of `ranges`.
pub fn correlation_range_sweep(geometry: &ArrayGeometry, anchor: &SourcePoint, ranges: &[f64]) -> Result<Vec<CurvePoint>> {
    let va = near_field_steering(geometry, anchor, AmplitudeModel::PhaseOnly)?;
    ranges
        .par_iter()
        .map(|&r| {
            let vb = near_field_steering(geometry, &anchor.at_range(r)?, AmplitudeModel::PhaseOnly)?;
            Ok(CurvePoint::new(r, va.entries.dotc(&vb.entries).norm_sqr().min(1.0)))
        })
        .collect()
}

/// Indices of strict interior local maxima of `values`.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] >= values[i + 1])
        .collect()
}

/// `count` logarithmically spaced samples from `start` to `stop` inclusive.
pub fn log_space(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![start],
        _ => {
            let (l0, l1) = (start.ln(), stop.ln());
            (0..count)
                .map(|i| (l0 + (l1 - l0) * i as f64 / (count - 1) as f64).exp())
                .collect()
        }
    }
}

/// `count` linearly spaced samples from `start` to `stop` inclusive.
pub fn lin_space(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![start],
        _ => (0..count)
            .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_upa, fraunhofer_distance};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn single_element_gain_is_one() {
        let g = build_upa(7.8e9, 1, 0.25, 0.5).unwrap();
        for amp in [AmplitudeModel::PhaseOnly, AmplitudeModel::FreeSpace, AmplitudeModel::ApertureLoss] {
            for d in [0.1, 1.0, 1e3] {
                assert_eq!(normalized_array_gain(&g, d, amp).unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn gain_saturates_in_deep_near_field() {
        let g = build_upa(7.8e9, 31, 0.25, 0.5).unwrap();
        let d_fa = fraunhofer_distance(&g);
        let far = normalized_array_gain(&g, 100.0 * d_fa, AmplitudeModel::ApertureLoss).unwrap();
        assert!((far - 1.0).abs() < 0.01);
        let near = normalized_array_gain(&g, 1.0, AmplitudeModel::ApertureLoss).unwrap();
        assert!(near < 1.0);
        assert!(near < normalized_array_gain(&g, d_fa, AmplitudeModel::ApertureLoss).unwrap());
        assert!(normalized_array_gain(&g, 0.0, AmplitudeModel::FreeSpace).is_err());
    }

    #[test]
    fn gain_curve_has_no_jumps() {
        let g = build_upa(7.8e9, 31, 0.25, 0.5).unwrap();
        let mut d = 0.2;
        let mut prev = normalized_array_gain(&g, d, AmplitudeModel::ApertureLoss).unwrap();
        while d < 500.0 {
            d *= 1.01;
            let cur = normalized_array_gain(&g, d, AmplitudeModel::ApertureLoss).unwrap();
            assert!((cur - prev).abs() / prev < 0.05);
            prev = cur;
        }
    }

    #[test]
    fn correlation_identities() {
        let g = build_upa(7.8e9, 12, 0.25, 0.5).unwrap();
        let p = SourcePoint::new(5.0, 0.1, 0.0).unwrap();
        assert_relative_eq!(steering_correlation(&g, &p, &p).unwrap(), 1.0, max_relative = 1e-12);
        let d_fa = fraunhofer_distance(&g);
        let a = p.at_range(1e3 * d_fa).unwrap();
        let b = p.at_range(5e3 * d_fa).unwrap();
        assert!(steering_correlation(&g, &a, &b).unwrap() >= 0.999);
    }

    fn secondary_peaks(g: &ArrayGeometry, ranges: &[f64]) -> Vec<(f64, f64)> {
        let anchor = SourcePoint::new(30.0, 0.0, 0.0).unwrap();
        let curve = correlation_range_sweep(g, &anchor, ranges).unwrap();
        let values: Vec<f64> = curve.iter().map(|c| c.value).collect();
        local_maxima(&values)
            .into_iter()
            .filter(|&i| values[i] < 0.99)
            .map(|i| (ranges[i], values[i]))
            .collect()
    }

    #[test]
    fn depth_of_focus_on_large_aperture() {
        let g = crate::geometry::build_upa_fixed_aperture(15e9, 1.243, 0.25, 0.5).unwrap();
        let close = secondary_peaks(&g, &log_space(1.0, 300.0, 3000));
        assert!(close.len() >= 2, "{close:?}");
        assert!(close.iter().all(|&(r, v)| r < 30.0 && v < 0.05));
        // Beyond the focus the curve is monotone: focal depth extends to infinity.
        assert!(secondary_peaks(&g, &log_space(31.0, 300.0, 600)).is_empty());
    }

    #[test]
    fn half_wavelength_39_array_is_far_field_at_30m() {
        let g = build_upa(15e9, 39, 0.25, 0.5).unwrap();
        assert!(secondary_peaks(&g, &lin_space(5.0, 300.0, 1200)).is_empty());
    }

    #[test]
    fn spacing_helpers() {
        let l = log_space(1.0, 100.0, 3);
        assert_relative_eq!(l[1], 10.0, max_relative = 1e-12);
        assert_eq!(lin_space(0.0, 1.0, 5), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn correlation_is_symmetric_and_bounded(
            r1 in 0.5f64..80.0, r2 in 0.5f64..80.0,
            az1 in -1.0f64..1.0, az2 in -1.0f64..1.0,
            el1 in -0.5f64..0.5, el2 in -0.5f64..0.5,
        ) {
            let g = build_upa(15e9, 6, 0.25, 0.5).unwrap();
            let a = SourcePoint::new(r1, az1, el1).unwrap();
            let b = SourcePoint::new(r2, az2, el2).unwrap();
            let ab = steering_correlation(&g, &a, &b).unwrap();
            let ba = steering_correlation(&g, &b, &a).unwrap();
            prop_assert!((ab - ba).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&ab));
        }
    }
}
