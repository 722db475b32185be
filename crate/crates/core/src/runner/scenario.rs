use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::propagation::{AmplitudeModel, SourcePoint};

/// Where the weighted design gets its channel knowledge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelSource {
    Estimated,
    Perfect,
}

/// Simulation scenario. Every key is optional; defaults reproduce the
/// use-case parameters. Angles are in degrees, distances in metres.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub seed: u64,
    pub output_dir: PathBuf,

    // Arrays. `side_counts[i]` pairs with `carrier_frequencies_hz[i]`.
    pub carrier_frequencies_hz: Vec<f64>,
    pub side_counts: Vec<usize>,
    pub element_size_frac: f64,
    pub spacing_frac: f64,
    pub aperture_side_m: f64,
    pub amplitude_model: String,

    // Users. The first K entries of the lists are used for a K-user case.
    pub ue_ranges_m: Vec<f64>,
    pub ue_azimuths_deg: Vec<f64>,
    pub ue_elevations_deg: Vec<f64>,
    pub user_counts: Vec<usize>,

    // Target and clutter.
    pub target_ranges_m: Vec<f64>,
    pub target_azimuths_deg: Vec<f64>,
    pub target_elevations_deg: Vec<f64>,
    pub target_disk_radius_m: f64,
    pub radar_reference_gain_db: f64,
    pub clutter_ranges_m: Vec<f64>,
    pub clutter_azimuths_deg: Vec<f64>,
    pub clutter_elevations_deg: Vec<f64>,
    pub clutter_to_noise_db: f64,

    // Link.
    pub coherence_interval: usize,
    /// 0 means τ_p = K.
    pub pilot_length: usize,
    pub pilot_snr_db: f64,
    pub transmit_power: f64,
    pub transmit_snr_db: f64,
    pub pathloss_reference_m: f64,
    pub channel_source: ChannelSource,

    // Trade-off sweep.
    pub p_fa: f64,
    pub rho_start: f64,
    pub rho_stop: f64,
    pub rho_step: f64,
    pub trials: u64,
    pub mrt_frequency_hz: f64,
    pub mrt_users: usize,
    pub desk_max_antennas: usize,

    // Figures.
    pub fig3a_max_side_count: usize,
    pub fig3a_element_size_frac: f64,
    pub fig3b_min_distance_m: f64,
    pub fig3b_max_dfa_multiple: f64,
    pub fig3b_points: usize,
    pub fig4_frequency_hz: f64,
    pub fig4_anchor_range_m: f64,
    pub fig4_min_range_m: f64,
    pub fig4_max_range_m: f64,
    pub fig4_points: usize,
    pub fig5_disk_radius_m: f64,
    pub fig5_min_range_m: f64,
    pub fig5_max_range_m: f64,
    pub fig5_points: usize,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            seed: 7,
            output_dir: PathBuf::from("out"),
            carrier_frequencies_hz: vec![3.5e9, 7.8e9, 15e9],
            side_counts: vec![20, 31, 39],
            element_size_frac: 0.25,
            spacing_frac: 0.5,
            aperture_side_m: 1.243,
            amplitude_model: "free-space".into(),
            ue_ranges_m: vec![30.0, 40.0, 50.0, 60.0, 35.0, 45.0],
            ue_azimuths_deg: vec![-40.0, -20.0, 20.0, 40.0, -30.0, 30.0],
            ue_elevations_deg: vec![0.0; 6],
            user_counts: vec![4, 6],
            target_ranges_m: vec![30.0, 30.0, 31.0, 31.0],
            target_azimuths_deg: vec![0.0, 2.0, 0.0, 2.0],
            target_elevations_deg: vec![0.0; 4],
            target_disk_radius_m: 0.1,
            radar_reference_gain_db: -42.0,
            clutter_ranges_m: vec![20.0, 45.0, 70.0],
            clutter_azimuths_deg: vec![-10.0, 15.0, -55.0],
            clutter_elevations_deg: vec![0.0; 3],
            clutter_to_noise_db: 10.0,
            coherence_interval: 196,
            pilot_length: 0,
            pilot_snr_db: 0.0,
            transmit_power: 1.0,
            transmit_snr_db: 10.0,
            pathloss_reference_m: 30.0,
            channel_source: ChannelSource::Estimated,
            p_fa: 1e-7,
            rho_start: 0.05,
            rho_stop: 0.95,
            rho_step: 0.05,
            trials: 10_000,
            mrt_frequency_hz: 7.8e9,
            mrt_users: 4,
            desk_max_antennas: 961,
            fig3a_max_side_count: 40,
            fig3a_element_size_frac: 0.5,
            fig3b_min_distance_m: 0.5,
            fig3b_max_dfa_multiple: 100.0,
            fig3b_points: 200,
            fig4_frequency_hz: 15e9,
            fig4_anchor_range_m: 30.0,
            fig4_min_range_m: 1.0,
            fig4_max_range_m: 300.0,
            fig4_points: 3000,
            fig5_disk_radius_m: 0.25,
            fig5_min_range_m: 1.0,
            fig5_max_range_m: 200.0,
            fig5_points: 200,
        }
    }
}

fn invalid(key: &str, message: impl Into<String>) -> Error {
    Error::ConfigValue {
        key: key.to_string(),
        message: message.into(),
    }
}

fn positive(key: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(key, format!("must be positive, got {v}")))
    }
}

fn points(ranges: &[f64], az: &[f64], el: &[f64], keys: [&str; 3]) -> Result<Vec<SourcePoint>> {
    if az.len() != ranges.len() {
        return Err(invalid(keys[1], format!("has {} entries, {} has {}", az.len(), keys[0], ranges.len())));
    }
    if el.len() != ranges.len() {
        return Err(invalid(keys[2], format!("has {} entries, {} has {}", el.len(), keys[0], ranges.len())));
    }
    ranges
        .iter()
        .zip(az)
        .zip(el)
        .map(|((&r, &a), &e)| {
            positive(keys[0], r)?;
            SourcePoint::from_degrees(r, a, e).map_err(|err| invalid(keys[0], err.to_string()))
        })
        .collect()
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let scenario: Scenario = toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<()> {
        if self.carrier_frequencies_hz.is_empty() {
            return Err(invalid("carrier_frequencies_hz", "must not be empty"));
        }
        for &f in &self.carrier_frequencies_hz {
            positive("carrier_frequencies_hz", f)?;
        }
        if self.side_counts.len() != self.carrier_frequencies_hz.len() {
            return Err(invalid("side_counts", "needs one entry per carrier frequency"));
        }
        if self.side_counts.contains(&0) {
            return Err(invalid("side_counts", "entries must be at least 1"));
        }
        positive("element_size_frac", self.element_size_frac)?;
        positive("spacing_frac", self.spacing_frac)?;
        if self.element_size_frac > self.spacing_frac {
            return Err(invalid("element_size_frac", "exceeds spacing_frac (elements overlap)"));
        }
        positive("aperture_side_m", self.aperture_side_m)?;
        self.amplitude()?;
        self.ue_points()?;
        if self.user_counts.is_empty() {
            return Err(invalid("user_counts", "must not be empty"));
        }
        for &k in &self.user_counts {
            if k == 0 || k > self.ue_ranges_m.len() {
                return Err(invalid("user_counts", format!("{k} users but {} UE positions", self.ue_ranges_m.len())));
            }
        }
        if self.mrt_users == 0 || self.mrt_users > self.ue_ranges_m.len() {
            return Err(invalid("mrt_users", format!("{} users but {} UE positions", self.mrt_users, self.ue_ranges_m.len())));
        }
        if self.target_ranges_m.is_empty() {
            return Err(invalid("target_ranges_m", "the target needs at least one scatterer"));
        }
        self.target_points()?;
        self.clutter_points()?;
        positive("target_disk_radius_m", self.target_disk_radius_m)?;
        if self.coherence_interval == 0 {
            return Err(invalid("coherence_interval", "must be positive"));
        }
        let max_k = self.user_counts.iter().copied().chain([self.mrt_users]).max().unwrap_or(1);
        if self.pilot_length > 0 && self.pilot_length < max_k {
            return Err(invalid("pilot_length", format!("{} is shorter than {max_k} users", self.pilot_length)));
        }
        if self.pilot_length.max(max_k) >= self.coherence_interval {
            return Err(invalid("pilot_length", format!("τ_p must be below coherence_interval {}", self.coherence_interval)));
        }
        positive("transmit_power", self.transmit_power)?;
        positive("pathloss_reference_m", self.pathloss_reference_m)?;
        if !(self.p_fa > 0.0 && self.p_fa < 1.0) {
            return Err(invalid("p_fa", format!("must lie in (0, 1), got {}", self.p_fa)));
        }
        self.rho_grid()?;
        if self.trials < 1 {
            return Err(invalid("trials", "must be at least 1"));
        }
        positive("mrt_frequency_hz", self.mrt_frequency_hz)?;
        if self.desk_max_antennas == 0 {
            return Err(invalid("desk_max_antennas", "must be positive"));
        }
        if self.fig3a_max_side_count == 0 {
            return Err(invalid("fig3a_max_side_count", "must be positive"));
        }
        positive("fig3a_element_size_frac", self.fig3a_element_size_frac)?;
        positive("fig3b_min_distance_m", self.fig3b_min_distance_m)?;
        positive("fig3b_max_dfa_multiple", self.fig3b_max_dfa_multiple)?;
        positive("fig4_frequency_hz", self.fig4_frequency_hz)?;
        positive("fig4_anchor_range_m", self.fig4_anchor_range_m)?;
        positive("fig4_min_range_m", self.fig4_min_range_m)?;
        positive("fig5_disk_radius_m", self.fig5_disk_radius_m)?;
        positive("fig5_min_range_m", self.fig5_min_range_m)?;
        for (key, lo, hi, n) in [
            ("fig4_max_range_m", self.fig4_min_range_m, self.fig4_max_range_m, self.fig4_points),
            ("fig5_max_range_m", self.fig5_min_range_m, self.fig5_max_range_m, self.fig5_points),
        ] {
            if hi <= lo {
                return Err(invalid(key, "must exceed the matching minimum range"));
            }
            if n < 2 {
                return Err(invalid(key, "sweep needs at least 2 points"));
            }
        }
        if self.fig3b_points < 2 {
            return Err(invalid("fig3b_points", "sweep needs at least 2 points"));
        }
        Ok(())
    }

    pub fn amplitude(&self) -> Result<AmplitudeModel> {
        AmplitudeModel::parse(&self.amplitude_model).ok_or_else(|| {
            invalid(
                "amplitude_model",
                format!("unknown model '{}' (phase-only, free-space, aperture-loss)", self.amplitude_model),
            )
        })
    }

    pub fn ue_points(&self) -> Result<Vec<SourcePoint>> {
        points(
            &self.ue_ranges_m,
            &self.ue_azimuths_deg,
            &self.ue_elevations_deg,
            ["ue_ranges_m", "ue_azimuths_deg", "ue_elevations_deg"],
        )
    }

    pub fn target_points(&self) -> Result<Vec<SourcePoint>> {
        points(
            &self.target_ranges_m,
            &self.target_azimuths_deg,
            &self.target_elevations_deg,
            ["target_ranges_m", "target_azimuths_deg", "target_elevations_deg"],
        )
    }

    pub fn clutter_points(&self) -> Result<Vec<SourcePoint>> {
        points(
            &self.clutter_ranges_m,
            &self.clutter_azimuths_deg,
            &self.clutter_elevations_deg,
            ["clutter_ranges_m", "clutter_azimuths_deg", "clutter_elevations_deg"],
        )
    }

    /// τ_p for a K-user case.
    pub fn pilot_length_for(&self, users: usize) -> usize {
        if self.pilot_length == 0 {
            users
        } else {
            self.pilot_length
        }
    }

    /// Receiver noise power σ² = P / 10^(SNR/10).
    pub fn noise_power(&self) -> f64 {
        self.transmit_power / crate::db_to_linear(self.transmit_snr_db)
    }

    /// ρ values start, start+step, … up to stop (inclusive within 1e-9).
    pub fn rho_grid(&self) -> Result<Vec<f64>> {
        let (a, b, h) = (self.rho_start, self.rho_stop, self.rho_step);
        if !(0.0..=1.0).contains(&a) {
            return Err(invalid("rho_start", format!("must lie in [0, 1], got {a}")));
        }
        if !(0.0..=1.0).contains(&b) || b < a {
            return Err(invalid("rho_stop", format!("must lie in [rho_start, 1], got {b}")));
        }
        if h.is_nan() || h <= 0.0 {
            return Err(invalid("rho_step", format!("must be positive, got {h}")));
        }
        let count = ((b - a) / h + 1e-9).floor() as usize + 1;
        // Rounded to 12 decimals so printed values are clean.
        Ok((0..count).map(|i| ((a + i as f64 * h) * 1e12).round() / 1e12).collect())
    }
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::ConfigParse(format!("{}: {e}", path.display())))?;
    Scenario::from_toml_str(&text)
}
