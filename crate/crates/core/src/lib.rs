//! Near-field simulation toolkit for extremely-large-aperture arrays (ELAA)
//! operating in the upper mid-band.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: uniform planar arrays and Fraunhofer boundaries.
//! - [`propagation`]: spherical/planar steering vectors and multi-user channels.
//! - [`analytics`]: normalized array gain and range correlation sweeps.
//! - [`rcs`]: closed-form and physical-optics radar cross section of a disk.
//! - [`waveform`]: ISAC waveform design, channel estimation and rates.
//! - [`sensing`]: target responses, echo synthesis and detection.
//! - [`runner`]: scenario files, experiments and CSV/SVG output.

pub mod analytics;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod propagation;
pub mod rcs;
pub mod rng;
pub mod runner;
pub mod sensing;
pub mod waveform;

pub use error::{Error, Result};

pub use num_complex::Complex64;

/// Dense complex matrix used throughout the crate.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<Complex64>;

/// Speed of light used for wavelength conversions, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.998e8;

/// Converts a power ratio in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to dB.
pub fn linear_to_db(value: f64) -> f64 {
    10.0 * value.log10()
}
