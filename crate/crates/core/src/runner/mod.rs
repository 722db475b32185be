//! Scenario configuration and experiment orchestration.

mod figures;
mod output;
mod scenario;
mod tradeoff;

use std::path::{Path, PathBuf};

pub use figures::{fig3a, fig3b, fig4, fig5, ExperimentOutput};
pub use output::{line_plot, write_svg, Series, Table};
pub use scenario::{load_scenario, ChannelSource, Scenario};
pub use tradeoff::{
    case_grid, tradeoff_output, tradeoff_sweep, CaseDesign, CaseSpec, TradeoffCurve, TradeoffRow, DESK_MAX_TRIALS,
};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Fig3a,
    Fig3b,
    Fig4,
    Fig5,
    Tradeoff,
}

impl Experiment {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "fig3a" => Ok(Self::Fig3a),
            "fig3b" => Ok(Self::Fig3b),
            "fig4" => Ok(Self::Fig4),
            "fig5" => Ok(Self::Fig5),
            "tradeoff" => Ok(Self::Tradeoff),
            other => Err(Error::InvalidArgument(format!("unknown experiment '{other}'"))),
        }
    }
}

/// Computes the tables (and plots) of one experiment.
pub fn run_experiment(experiment: Experiment, scenario: &Scenario, full: bool) -> Result<ExperimentOutput> {
    match experiment {
        Experiment::Fig3a => fig3a(scenario),
        Experiment::Fig3b => fig3b(scenario),
        Experiment::Fig4 => fig4(scenario),
        Experiment::Fig5 => fig5(scenario),
        Experiment::Tradeoff => Ok(tradeoff_output(&tradeoff_sweep(scenario, full)?)),
    }
}

/// Writes every table as CSV and, when `svg` is set, every plot. Returns the
/// written paths in order.
pub fn write_output(out: &ExperimentOutput, dir: &Path, svg: bool) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for t in &out.tables {
        paths.push(t.write_csv(dir)?);
    }
    if svg {
        for (name, text) in &out.plots {
            paths.push(write_svg(dir, name, text)?);
        }
    }
    Ok(paths)
}
