use thiserror::Error;

/// Errors raised by the simulation modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("element size {element_frac}λ exceeds spacing {spacing_frac}λ")]
    GeometryOverlap { element_frac: f64, spacing_frac: f64 },

    #[error("source point coincides with array element {element} (distance {distance:e} m)")]
    SingularGeometry { element: usize, distance: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("quadrature under-resolved: {samples_per_wavelength:.2} samples per wavelength (need {required})")]
    Resolution {
        samples_per_wavelength: f64,
        required: f64,
    },

    #[error("cannot build {rows} orthogonal rows with frame length {frame_length}")]
    InfeasibleOrthogonality { rows: usize, frame_length: usize },

    #[error("channel row {user} has zero norm")]
    DegenerateChannel { user: usize },

    #[error("nulling infeasible: {constraints} constraints leave no null space in {antennas} dimensions")]
    InfeasibleNulling { constraints: usize, antennas: usize },

    #[error("pilot length {pilot_length} is shorter than user count {users}; pilot contamination is not supported")]
    PilotContamination { pilot_length: usize, users: usize },

    #[error("calibration infeasible: p_fa = {p_fa:e} needs at least {required} trials, got {trials}")]
    CalibrationInfeasible {
        p_fa: f64,
        trials: u64,
        required: u64,
    },

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("invalid config value for `{key}`: {message}")]
    ConfigValue { key: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("case {case}{}: {source}", rho.map(|r| format!(" at rho = {r}")).unwrap_or_default())]
    Case {
        case: String,
        rho: Option<f64>,
        source: Box<Error>,
    },
}

impl Error {
    /// True for errors caused by the scenario file rather than the run.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::ConfigParse(_) | Error::ConfigValue { .. })
    }

    pub(crate) fn in_case(self, case: &str, rho: Option<f64>) -> Error {
        Error::Case {
            case: case.to_string(),
            rho,
            source: Box::new(self),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {value}")))
    }
}
