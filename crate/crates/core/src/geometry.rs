//! Uniform planar array (UPA) construction and Fraunhofer boundaries.
//!
//! Coordinate convention: the array lies in the x–z plane centred at the
//! origin with boresight along +y. Azimuth is measured in the x–y plane from
//! +y towards +x; elevation is measured up from the x–y plane.

use crate::error::{ensure_positive, Error, Result};
use crate::SPEED_OF_LIGHT;

/// Cartesian point in metres.
pub type Point3 = [f64; 3];

/// Square uniform planar array.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    pub carrier_frequency: f64,
    pub wavelength: f64,
    pub side_count: usize,
    /// Edge length of a square element, m.
    pub element_size: f64,
    /// Centre-to-centre spacing, m.
    pub spacing: f64,
    pub positions: Vec<Point3>,
    pub aperture_side: f64,
    pub aperture_diagonal: f64,
}

/// Wavelength for a carrier frequency in Hz.
pub fn wavelength(carrier_frequency: f64) -> f64 {
    SPEED_OF_LIGHT / carrier_frequency
}

/// Builds a `side_count × side_count` UPA with element size and spacing given
/// as fractions of the wavelength.
pub fn build_upa(
    carrier_frequency: f64,
    side_count: usize,
    element_size_frac: f64,
    spacing_frac: f64,
) -> Result<ArrayGeometry> {
    ensure_positive("carrier_frequency", carrier_frequency)?;
    ensure_positive("element_size_frac", element_size_frac)?;
    ensure_positive("spacing_frac", spacing_frac)?;
    if element_size_frac > spacing_frac {
        return Err(Error::GeometryOverlap {
            element_frac: element_size_frac,
            spacing_frac,
        });
    }
    let lambda = wavelength(carrier_frequency);
    from_physical(
        carrier_frequency,
        side_count,
        element_size_frac * lambda,
        spacing_frac * lambda,
    )
}

/// Builds a UPA whose physical aperture side is exactly `aperture_side`,
/// using the fewest elements for which the spacing does not exceed
/// `max_spacing_frac · λ`.
pub fn build_upa_fixed_aperture(
    carrier_frequency: f64,
    aperture_side: f64,
    element_size_frac: f64,
    max_spacing_frac: f64,
) -> Result<ArrayGeometry> {
    ensure_positive("carrier_frequency", carrier_frequency)?;
    ensure_positive("aperture_side", aperture_side)?;
    ensure_positive("element_size_frac", element_size_frac)?;
    ensure_positive("max_spacing_frac", max_spacing_frac)?;
    if element_size_frac > max_spacing_frac {
        return Err(Error::GeometryOverlap {
            element_frac: element_size_frac,
            spacing_frac: max_spacing_frac,
        });
    }
    let lambda = wavelength(carrier_frequency);
    let element_size = element_size_frac * lambda;
    if element_size > aperture_side {
        return Err(Error::InvalidArgument(format!(
            "element size {element_size} m exceeds aperture {aperture_side} m"
        )));
    }
    let span = aperture_side - element_size;
    let max_spacing = max_spacing_frac * lambda;
    let gaps = (span / max_spacing - 1e-12).ceil().max(0.0) as usize;
    if gaps == 0 {
        return from_physical(carrier_frequency, 1, aperture_side, aperture_side);
    }
    let spacing = span / gaps as f64;
    if spacing < element_size {
        return Err(Error::GeometryOverlap {
            element_frac: element_size_frac,
            spacing_frac: spacing / lambda,
        });
    }
    from_physical(carrier_frequency, gaps + 1, element_size, spacing)
}

fn from_physical(
    carrier_frequency: f64,
    side_count: usize,
    element_size: f64,
    spacing: f64,
) -> Result<ArrayGeometry> {
    if side_count == 0 {
        return Err(Error::InvalidArgument("side_count must be at least 1".into()));
    }
    let offset = (side_count as f64 - 1.0) / 2.0;
    let coords: Vec<f64> = (0..side_count)
        .map(|i| (i as f64 - offset) * spacing)
        .collect();
    let mut positions = Vec::with_capacity(side_count * side_count);
    for &z in &coords {
        for &x in &coords {
            positions.push([x, 0.0, z]);
        }
    }
    let aperture_side = (side_count as f64 - 1.0) * spacing + element_size;
    Ok(ArrayGeometry {
        carrier_frequency,
        wavelength: wavelength(carrier_frequency),
        side_count,
        element_size,
        spacing,
        positions,
        aperture_side,
        aperture_diagonal: std::f64::consts::SQRT_2 * aperture_side,
    })
}

impl ArrayGeometry {
    /// Total number of antennas.
    pub fn n_antennas(&self) -> usize {
        self.positions.len()
    }

    /// Wavenumber 2π/λ.
    pub fn wavenumber(&self) -> f64 {
        std::f64::consts::TAU / self.wavelength
    }
}

/// Aperture-based Fraunhofer array distance 2·D²/λ with D the aperture
/// diagonal. This is the boundary used by all scenario logic.
pub fn fraunhofer_distance(geometry: &ArrayGeometry) -> f64 {
    fraunhofer_distance_for_aperture(geometry.aperture_side, geometry.wavelength)
}

/// 2·(√2·side)²/λ for a square aperture of the given side.
pub fn fraunhofer_distance_for_aperture(aperture_side: f64, wavelength: f64) -> f64 {
    let diag = std::f64::consts::SQRT_2 * aperture_side;
    2.0 * diag * diag / wavelength
}

/// Element-count form 2·N·d_a²/λ.
pub fn fraunhofer_element_formula(n_antennas: usize, element_dim: f64, wavelength: f64) -> Result<f64> {
    if n_antennas == 0 {
        return Err(Error::InvalidArgument("n_antennas must be positive".into()));
    }
    ensure_positive("element_dim", element_dim)?;
    ensure_positive("wavelength", wavelength)?;
    Ok(2.0 * n_antennas as f64 * element_dim * element_dim / wavelength)
}

/// Classic two-times-size-squared rule for an object of largest dimension `size`.
pub fn fraunhofer_distance_for_size(size: f64, wavelength: f64) -> f64 {
    2.0 * size * size / wavelength
}
