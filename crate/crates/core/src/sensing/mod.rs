//! Radar side: target responses, echo synthesis and detection.

mod calibration;
mod detector;
mod echo;
mod response;

pub use calibration::{
    analytic_threshold, calibrate_threshold, chi_square_tail, empirical_quantile_threshold, estimate_false_alarm,
    estimate_pd, moments, null_statistics, DetectionTrials, EchoTrials, ReducedTrials, ThresholdMethod, MIN_PD_TRIALS,
};
pub use detector::{DetectionOutcome, MatchedSubspaceDetector, PdEstimate, Z95};
pub use echo::{synthesize_echo, synthesize_echo_with, EchoModel};
pub use response::{target_response, Scatterer, ScattererSet, TargetResponse};
