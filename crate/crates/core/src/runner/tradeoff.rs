use rayon::prelude::*;

use super::figures::ExperimentOutput;
use super::output::{line_plot, num, Series, Table};
use super::scenario::{ChannelSource, Scenario};
use crate::error::{Error, Result};
use crate::geometry::{build_upa, wavelength, ArrayGeometry};
use crate::propagation::{build_channels, ChannelSet, PathlossReference, SourcePoint, WavefrontModel};
use crate::sensing::{
    analytic_threshold, estimate_pd, target_response, EchoModel, PdEstimate, ReducedTrials, ScattererSet, TargetResponse,
};
use crate::waveform::{
    achievable_rates, design_weighted_waveform, estimate_channels_ls, mrt_waveform, reference_radar_waveform, IsacWaveform,
    SymbolBlock,
};
use crate::{db_to_linear, linear_to_db, rng};

/// Trial cap applied unless a full run is requested.
pub const DESK_MAX_TRIALS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseDesign {
    Weighted,
    MrtNearField,
    MrtFarField,
}

impl CaseDesign {
    pub fn label(&self) -> &'static str {
        match self {
            CaseDesign::Weighted => "weighted",
            CaseDesign::MrtNearField => "mrt-near-field",
            CaseDesign::MrtFarField => "mrt-far-field",
        }
    }
}

/// One entry of the case grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseSpec {
    pub id: String,
    pub users: usize,
    pub side_count: usize,
    pub frequency_hz: f64,
    pub design: CaseDesign,
    /// `None` when the case runs, otherwise why it was skipped.
    pub skipped: Option<String>,
}

impl CaseSpec {
    pub fn n_antennas(&self) -> usize {
        self.side_count * self.side_count
    }
}

/// One point of a trade-off curve.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffRow {
    pub case: String,
    /// `None` for the MRT cases, which have no weight.
    pub rho: Option<f64>,
    pub rate_bps_hz: f64,
    pub pd: PdEstimate,
    pub mean_sinr_db: f64,
    pub threshold: f64,
    pub dof: usize,
    pub noncentrality: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffCurve {
    pub cases: Vec<CaseSpec>,
    /// Grouped by case in grid order, ascending ρ within a case.
    pub rows: Vec<TradeoffRow>,
}

impl TradeoffCurve {
    pub fn case_rows(&self, case: &str) -> Vec<&TradeoffRow> {
        self.rows.iter().filter(|r| r.case == case).collect()
    }
}

/// Weighted cases K × N (N paired with its carrier), then the two MRT cases.
pub fn case_grid(s: &Scenario, full: bool) -> Result<Vec<CaseSpec>> {
    let skip = |side: usize| {
        (!full && side * side > s.desk_max_antennas).then(|| {
            format!("skipped: N = {} exceeds desk_max_antennas = {} (pass --full)", side * side, s.desk_max_antennas)
        })
    };
    let mut cases = Vec::new();
    for &k in &s.user_counts {
        for (&f, &side) in s.carrier_frequencies_hz.iter().zip(&s.side_counts) {
            cases.push(CaseSpec {
                id: format!("K{k}-N{}", side * side),
                users: k,
                side_count: side,
                frequency_hz: f,
                design: CaseDesign::Weighted,
                skipped: skip(side),
            });
        }
    }
    let i = s
        .carrier_frequencies_hz
        .iter()
        .position(|&f| f == s.mrt_frequency_hz)
        .ok_or_else(|| Error::ConfigValue {
            key: "mrt_frequency_hz".into(),
            message: "must be one of carrier_frequencies_hz".into(),
        })?;
    let side = s.side_counts[i];
    for (id, design) in [("MRT-NF", CaseDesign::MrtNearField), ("MRT-FF", CaseDesign::MrtFarField)] {
        cases.push(CaseSpec {
            id: format!("{id}-K{}-N{}", s.mrt_users, side * side),
            users: s.mrt_users,
            side_count: side,
            frequency_hz: s.mrt_frequency_hz,
            design,
            skipped: skip(side),
        });
    }
    Ok(cases)
}

/// Everything about a case that does not depend on ρ.
struct CaseSetup {
    truth: ChannelSet,
    design_channels: ChannelSet,
    reference: IsacWaveform,
    symbols: SymbolBlock,
    target: TargetResponse,
    echo: EchoModel,
    pilot_length: usize,
}

const SEED_SYMBOLS: u64 = 1;
const SEED_PILOTS: u64 = 2;
const SEED_TARGET: u64 = 3;
const SEED_CLUTTER: u64 = 4;
const SEED_TRIALS: u64 = 5;

fn frame_length(s: &Scenario, n: usize, pilot_length: usize) -> usize {
    let block = s.coherence_interval - pilot_length;
    n.div_ceil(block) * block
}

fn setup_case(s: &Scenario, case: &CaseSpec, case_seed: u64) -> Result<(ArrayGeometry, CaseSetup)> {
    let g = build_upa(case.frequency_hz, case.side_count, s.element_size_frac, s.spacing_frac)?;
    let n = g.n_antennas();
    let amp = s.amplitude()?;
    let reference_gain = PathlossReference {
        distance: s.pathloss_reference_m,
        gain_db: 0.0,
    };
    let ues: Vec<SourcePoint> = s.ue_points()?.into_iter().take(case.users).collect();
    let truth = build_channels(&g, &ues, WavefrontModel::NearField, amp, reference_gain)?;
    let pilot_length = s.pilot_length_for(case.users);
    let l = frame_length(s, n, pilot_length);
    let p = s.transmit_power;
    let reference = reference_radar_waveform(n, l, p)?;
    let symbols = SymbolBlock::qpsk(case.users, l, rng::derive_seed(case_seed, SEED_SYMBOLS)).with_amplitude((p / case.users as f64).sqrt());
    let design_channels = match case.design {
        CaseDesign::Weighted => {
            let known = match s.channel_source {
                ChannelSource::Estimated => estimate_channels_ls(&truth, pilot_length, s.pilot_snr_db, rng::derive_seed(case_seed, SEED_PILOTS))?
                    .as_channel_set(&truth)?,
                ChannelSource::Perfect => truth.clone(),
            };
            known.scaled(1.0 / (n as f64).sqrt())
        }
        CaseDesign::MrtNearField => truth.clone(),
        CaseDesign::MrtFarField => build_channels(&g, &ues, WavefrontModel::FarField, amp, reference_gain)?,
    };
    // Target and clutter phases depend on the scenario seed only, so every
    // case sees the same scene.
    let lambda = wavelength(case.frequency_hz);
    let target_set = ScattererSet::from_disk_rcs(
        &s.target_points()?,
        s.target_disk_radius_m,
        lambda,
        s.radar_reference_gain_db,
        s.pathloss_reference_m,
        rng::derive_seed(s.seed, SEED_TARGET),
    )?;
    let target = target_response(&g, &target_set, WavefrontModel::NearField)?;
    let noise = s.noise_power();
    let clutter_points = s.clutter_points()?;
    let echo = if clutter_points.is_empty() {
        EchoModel::noise_only(noise)?
    } else {
        let set = ScattererSet::with_random_phases(&clutter_points, rng::derive_seed(s.seed, SEED_CLUTTER))?;
        EchoModel::with_clutter(&g, &set, db_to_linear(s.clutter_to_noise_db) * noise / p, noise)?
    };
    Ok((
        g,
        CaseSetup {
            truth,
            design_channels,
            reference,
            symbols,
            target,
            echo,
            pilot_length,
        },
    ))
}

fn evaluate(s: &Scenario, setup: &CaseSetup, waveform: &IsacWaveform, trials: u64, trial_seed: u64) -> Result<(f64, f64, PdEstimate, f64, usize, f64)> {
    let rates = achievable_rates(
        &setup.truth,
        waveform,
        &setup.symbols,
        s.noise_power(),
        setup.pilot_length,
        s.coherence_interval,
    )?;
    let mean_sinr = rates.sinr.iter().sum::<f64>() / rates.sinr.len() as f64;
    let source = ReducedTrials::new(&setup.target, waveform, &setup.echo)?;
    let threshold = analytic_threshold(source.dof, s.p_fa)?;
    let pd = estimate_pd(&source, threshold, trials, trial_seed)?;
    Ok((rates.mean_rate(), linear_to_db(mean_sinr), pd, threshold, source.dof, source.noncentrality))
}

fn run_case(s: &Scenario, case: &CaseSpec, index: usize, trials: u64) -> Result<Vec<TradeoffRow>> {
    let case_seed = rng::derive_seed(s.seed, 1000 + index as u64);
    // Shared across cases and ρ: every point sees the same noise draws.
    let trial_seed = rng::derive_seed(s.seed, SEED_TRIALS);
    let (_, setup) = setup_case(s, case, case_seed).map_err(|e| e.in_case(&case.id, None))?;
    let row = |rho: Option<f64>, waveform: &IsacWaveform| -> Result<TradeoffRow> {
        let (rate, sinr_db, pd, threshold, dof, nc) =
            evaluate(s, &setup, waveform, trials, trial_seed).map_err(|e| e.in_case(&case.id, rho))?;
        Ok(TradeoffRow {
            case: case.id.clone(),
            rho,
            rate_bps_hz: rate,
            pd,
            mean_sinr_db: sinr_db,
            threshold,
            dof,
            noncentrality: nc,
        })
    };
    match case.design {
        CaseDesign::Weighted => s
            .rho_grid()?
            .par_iter()
            .map(|&rho| {
                let d = design_weighted_waveform(&setup.design_channels, &setup.symbols, &setup.reference, rho, s.transmit_power)
                    .map_err(|e| e.in_case(&case.id, Some(rho)))?;
                row(Some(rho), &d.waveform)
            })
            .collect(),
        CaseDesign::MrtNearField | CaseDesign::MrtFarField => {
            let x = mrt_waveform(&setup.design_channels, &setup.symbols, s.transmit_power).map_err(|e| e.in_case(&case.id, None))?;
            Ok(vec![row(None, &x)?])
        }
    }
}

/// Runs every non-skipped case of the grid.
pub fn tradeoff_sweep(s: &Scenario, full: bool) -> Result<TradeoffCurve> {
    let cases = case_grid(s, full)?;
    let trials = if full { s.trials } else { s.trials.min(DESK_MAX_TRIALS) };
    let per_case: Vec<Vec<TradeoffRow>> = cases
        .par_iter()
        .enumerate()
        .map(|(i, c)| if c.skipped.is_some() { Ok(Vec::new()) } else { run_case(s, c, i, trials) })
        .collect::<Result<_>>()?;
    Ok(TradeoffCurve {
        cases,
        rows: per_case.into_iter().flatten().collect(),
    })
}

fn opt(rho: Option<f64>) -> String {
    rho.map(num).unwrap_or_default()
}

/// `tradeoff.csv`, `tradeoff_detail.csv`, `tradeoff_cases.csv` and a rate
/// against P_D plot.
pub fn tradeoff_output(curve: &TradeoffCurve) -> ExperimentOutput {
    let mut main = Table::new("tradeoff", &["case", "rho", "rate_bps_hz", "pd", "pd_ci95"]);
    let mut detail = Table::new(
        "tradeoff_detail",
        &["case", "rho", "mean_sinr_db", "threshold", "dof", "noncentrality", "detections", "trials"],
    );
    for r in &curve.rows {
        main.push(vec![r.case.clone(), opt(r.rho), num(r.rate_bps_hz), num(r.pd.p_hat), num(r.pd.ci95_halfwidth)]);
        detail.push(vec![
            r.case.clone(),
            opt(r.rho),
            num(r.mean_sinr_db),
            num(r.threshold),
            r.dof.to_string(),
            num(r.noncentrality),
            r.pd.detections.to_string(),
            r.pd.trials.to_string(),
        ]);
    }
    let mut manifest = Table::new("tradeoff_cases", &["case", "users", "n_antennas", "frequency_hz", "design", "status"]);
    for c in &curve.cases {
        manifest.push(vec![
            c.id.clone(),
            c.users.to_string(),
            c.n_antennas().to_string(),
            num(c.frequency_hz),
            c.design.label().to_string(),
            c.skipped.clone().unwrap_or_else(|| "run".into()),
        ]);
    }
    let series: Vec<Series> = curve
        .cases
        .iter()
        .filter(|c| c.skipped.is_none())
        .map(|c| Series {
            name: c.id.clone(),
            points: curve.case_rows(&c.id).iter().map(|r| (r.rate_bps_hz, r.pd.p_hat)).collect(),
        })
        .collect();
    let svg = line_plot("Rate against detection probability", "rate per user (bit/s/Hz)", "P_D", &series, false);
    ExperimentOutput {
        tables: vec![main, detail, manifest],
        plots: vec![("tradeoff".into(), svg)],
    }
}
