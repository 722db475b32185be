use super::output::{line_plot, num, Series, Table};
use super::scenario::Scenario;
use crate::analytics::{array_gain_curve, correlation_range_sweep, log_space};
use crate::error::Result;
use crate::geometry::{build_upa, build_upa_fixed_aperture, fraunhofer_distance, fraunhofer_element_formula, wavelength};
use crate::linear_to_db;
use crate::propagation::{AmplitudeModel, SourcePoint};
use crate::rcs::rcs_range_sweep;

/// Tables plus rendered plots of one experiment.
#[derive(Debug, Clone, Default)]
pub struct ExperimentOutput {
    pub tables: Vec<Table>,
    /// (file stem, SVG text)
    pub plots: Vec<(String, String)>,
}

fn ghz(f: f64) -> String {
    format!("{} GHz", f / 1e9)
}

/// Element-formula Fraunhofer distance 2N·d_a²/λ against aperture size for
/// square arrays of touching elements (aperture side √N·d_a).
pub fn fig3a(s: &Scenario) -> Result<ExperimentOutput> {
    let mut t = Table::new("fig3a", &["frequency_hz", "n_antennas", "aperture_side_m", "d_fa_m"]);
    let mut series = Vec::new();
    for &f in &s.carrier_frequencies_hz {
        let lambda = wavelength(f);
        let d_a = s.fig3a_element_size_frac * lambda;
        let mut pts = Vec::new();
        for side in 1..=s.fig3a_max_side_count {
            let n = side * side;
            let d = fraunhofer_element_formula(n, d_a, lambda)?;
            let aperture = side as f64 * d_a;
            t.push(vec![num(f), n.to_string(), num(aperture), num(d)]);
            pts.push((aperture, d));
        }
        series.push(Series { name: ghz(f), points: pts });
    }
    let svg = line_plot("Fraunhofer array distance", "aperture side (m)", "d_FA (m)", &series, false);
    Ok(ExperimentOutput {
        tables: vec![t],
        plots: vec![("fig3a".into(), svg)],
    })
}

/// Normalized array gain against boresight distance on the fixed-aperture
/// array, for the free-space and aperture-loss amplitude models.
pub fn fig3b(s: &Scenario) -> Result<ExperimentOutput> {
    let mut t = Table::new(
        "fig3b",
        &[
            "frequency_hz",
            "n_antennas",
            "distance_m",
            "distance_over_dfa",
            "gain_free_space_lin",
            "gain_free_space_db",
            "gain_aperture_loss_lin",
            "gain_aperture_loss_db",
        ],
    );
    let mut series = Vec::new();
    for &f in &s.carrier_frequencies_hz {
        let g = build_upa_fixed_aperture(f, s.aperture_side_m, s.element_size_frac, s.spacing_frac)?;
        let d_fa = fraunhofer_distance(&g);
        let distances = log_space(s.fig3b_min_distance_m, s.fig3b_max_dfa_multiple * d_fa, s.fig3b_points);
        let fs = array_gain_curve(&g, &distances, AmplitudeModel::FreeSpace)?;
        let al = array_gain_curve(&g, &distances, AmplitudeModel::ApertureLoss)?;
        for ((d, a), b) in distances.iter().zip(&fs).zip(&al) {
            t.push(vec![
                num(f),
                g.n_antennas().to_string(),
                num(*d),
                num(d / d_fa),
                num(a.value),
                num(a.db),
                num(b.value),
                num(b.db),
            ]);
        }
        series.push(Series {
            name: format!("{} aperture-loss", ghz(f)),
            points: distances.iter().zip(&al).map(|(d, p)| (*d, p.db)).collect(),
        });
    }
    let svg = line_plot("Normalized array gain", "distance (m)", "gain (dB)", &series, true);
    Ok(ExperimentOutput {
        tables: vec![t],
        plots: vec![("fig3b".into(), svg)],
    })
}

/// Correlation between a fixed UE and a second UE moved along the same
/// direction, on the fixed-aperture array and (when the frequency is in the
/// carrier list) on the λ/2-spaced array paired with it.
pub fn fig4(s: &Scenario) -> Result<ExperimentOutput> {
    let f = s.fig4_frequency_hz;
    let anchor = SourcePoint::new(s.fig4_anchor_range_m, 0.0, 0.0)?;
    let ranges = log_space(s.fig4_min_range_m, s.fig4_max_range_m, s.fig4_points);
    let aperture = build_upa_fixed_aperture(f, s.aperture_side_m, s.element_size_frac, s.spacing_frac)?;
    let mut curves = vec![("aperture", correlation_range_sweep(&aperture, &anchor, &ranges)?)];
    if let Some(i) = s.carrier_frequencies_hz.iter().position(|&c| c == f) {
        let upa = build_upa(f, s.side_counts[i], s.element_size_frac, s.spacing_frac)?;
        curves.push(("upa", correlation_range_sweep(&upa, &anchor, &ranges)?));
    }
    let mut headers = vec!["range_m".to_string()];
    for (name, _) in &curves {
        headers.push(format!("corr_{name}_lin"));
        headers.push(format!("corr_{name}_db"));
    }
    let header_refs: Vec<&str> = headers.iter().map(String::as_str).collect();
    let mut t = Table::new("fig4", &header_refs);
    for (i, r) in ranges.iter().enumerate() {
        let mut row = vec![num(*r)];
        for (_, c) in &curves {
            row.push(num(c[i].value));
            row.push(num(c[i].db));
        }
        t.push(row);
    }
    let series: Vec<Series> = curves
        .iter()
        .map(|(name, c)| Series {
            name: (*name).to_string(),
            points: c.iter().map(|p| (p.abscissa, p.db)).collect(),
        })
        .collect();
    let svg = line_plot(&format!("Correlation along range, {}", ghz(f)), "range (m)", "correlation (dB)", &series, true);
    Ok(ExperimentOutput {
        tables: vec![t],
        plots: vec![("fig4".into(), svg)],
    })
}

/// Near- and far-field disk RCS against range for each carrier.
pub fn fig5(s: &Scenario) -> Result<ExperimentOutput> {
    let mut t = Table::new("fig5", &["frequency_hz", "range_m", "rcs_nf_dbsm", "rcs_ff_dbsm"]);
    let ranges = log_space(s.fig5_min_range_m, s.fig5_max_range_m, s.fig5_points);
    let mut series = Vec::new();
    for &f in &s.carrier_frequencies_hz {
        let sweep = rcs_range_sweep(s.fig5_disk_radius_m, wavelength(f), &ranges)?;
        for p in &sweep {
            t.push(vec![num(f), num(p.range), num(linear_to_db(p.near_field)), num(linear_to_db(p.far_field))]);
        }
        series.push(Series {
            name: format!("{} NF", ghz(f)),
            points: sweep.iter().map(|p| (p.range, linear_to_db(p.near_field))).collect(),
        });
        series.push(Series {
            name: format!("{} FF", ghz(f)),
            points: sweep.iter().map(|p| (p.range, linear_to_db(p.far_field))).collect(),
        });
    }
    let svg = line_plot("Disk RCS against range", "range (m)", "RCS (dBsm)", &series, true);
    Ok(ExperimentOutput {
        tables: vec![t],
        plots: vec![("fig5".into(), svg)],
    })
}
