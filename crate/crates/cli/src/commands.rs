use std::path::{Path, PathBuf};

use dqdot::molecule::MolecularSpectrum;
use dqdot::spectroscopy::{BSweep, LSweep};
use dqdot::{calibrate_depths, fit_powerlaw, CalibrationTarget, PowerLawFit};

use crate::config::{RunConfig, TargetsFile};
use crate::error::CliError;
use crate::output::{fmt_f, write_file, Csv};
use crate::svg::{LinePlot, Series};

/// Settings shared by every subcommand after flags have been applied.
#[derive(Debug, Clone)]
pub struct Context {
    pub config: RunConfig,
    pub out: PathBuf,
    pub svg: bool,
}

/// One line per artifact, in the order written.
pub type Written = Vec<PathBuf>;

fn levels_csv(spectrum: &MolecularSpectrum) -> String {
    let mut csv = Csv::new(&["level_index", "label", "energy_meV"]);
    for (k, (label, e)) in spectrum.labels.iter().zip(&spectrum.energies).enumerate() {
        csv.row(&[k.to_string(), label.to_string(), fmt_f(*e)]);
    }
    csv.as_str().to_string()
}

pub fn solve(ctx: &Context) -> Result<Written, CliError> {
    let model = ctx.config.model()?;
    let field = ctx.config.field()?;
    let sweep = model.sweep_b(&[field])?;
    let lines = sweep.lines[0];

    let mut csv = Csv::new(&["line", "energy_meV"]);
    csv.row(&[lines.low.kind.name().to_string(), fmt_f(lines.low.energy)]);
    csv.row(&[lines.high.kind.name().to_string(), fmt_f(lines.high.energy)]);
    csv.row(&["gap".to_string(), fmt_f(lines.gap())]);

    Ok(vec![
        write_file(&ctx.out, "levels_electron.csv", &levels_csv(&sweep.electron[0]))?,
        write_file(&ctx.out, "levels_hole.csv", &levels_csv(&sweep.hole[0]))?,
        write_file(&ctx.out, "lines.csv", csv.as_str())?,
    ])
}

pub fn gap_vs_l_csv(sweep: &LSweep) -> String {
    let mut csv = Csv::new(&["L_nm", "gap_meV"]);
    for p in &sweep.points {
        csv.row(&[fmt_f(p.barrier), fmt_f(p.lines.gap())]);
    }
    csv.as_str().to_string()
}

pub fn sweep_l(ctx: &Context) -> Result<Written, CliError> {
    let model = ctx.config.model()?;
    let barriers = ctx.config.barriers()?;
    let sweep = model.sweep_l(&barriers)?;

    let mut levels = Csv::new(&["L_nm", "label", "energy_meV"]);
    for p in &sweep.points {
        for (label, e) in &p.electron_levels {
            levels.row(&[fmt_f(p.barrier), label.to_string(), fmt_f(*e)]);
        }
    }
    let mut written = vec![
        write_file(&ctx.out, "gap_vs_L.csv", &gap_vs_l_csv(&sweep))?,
        write_file(&ctx.out, "levels_vs_L.csv", levels.as_str())?,
    ];
    if ctx.svg {
        let plot = LinePlot {
            title: "s-shell emission gap at B = 0".into(),
            x_label: "L (nm)".into(),
            y_label: "gap (meV)".into(),
            series: vec![Series {
                name: "gap".into(),
                points: sweep.points.iter().map(|p| (p.barrier, p.lines.gap())).collect(),
            }],
        };
        written.push(write_file(&ctx.out, "gap_vs_L.svg", &plot.render())?);
    }
    Ok(written)
}

pub fn lines_vs_b_csv(sweep: &BSweep) -> String {
    let mut csv = Csv::new(&["B_T", "line_low_meV", "line_high_meV", "gap_meV"]);
    for p in &sweep.lines {
        csv.row(&[
            fmt_f(p.field().tesla()),
            fmt_f(p.low.energy),
            fmt_f(p.high.energy),
            fmt_f(p.gap()),
        ]);
    }
    csv.as_str().to_string()
}

pub fn sweep_b(ctx: &Context) -> Result<Written, CliError> {
    let model = ctx.config.model()?;
    let fields = ctx.config.fields()?;
    let sweep = model.sweep_b(&fields)?;
    let mut written = vec![write_file(&ctx.out, "lines_vs_B.csv", &lines_vs_b_csv(&sweep))?];
    if ctx.svg {
        let series = |name: &str, f: &dyn Fn(&dqdot::EmissionPair) -> f64| Series {
            name: name.into(),
            points: sweep.lines.iter().map(|p| (p.field().tesla(), f(p))).collect(),
        };
        let plot = LinePlot {
            title: format!("emission lines at L = {} nm", model.device.barrier),
            x_label: "B (T)".into(),
            y_label: "energy (meV)".into(),
            series: vec![series("low", &|p| p.low.energy), series("high", &|p| p.high.energy)],
        };
        written.push(write_file(&ctx.out, "lines_vs_B.svg", &plot.render())?);
    }
    Ok(written)
}

pub fn calibrate(ctx: &Context, targets: &Path) -> Result<Written, CliError> {
    let model = ctx.config.model()?;
    let t = TargetsFile::load(targets)?;
    let target = CalibrationTarget {
        emission_low: t.emission_low,
        emission_high: t.emission_high,
        barrier: t.barrier,
        hole_to_electron_depth_ratio: t.hole_to_electron_depth_ratio,
    };
    let cal = calibrate_depths(&target, &model)?;
    let mut csv = Csv::new(&["quantity", "value_meV"]);
    for (name, v) in [
        ("depth_e_dot1", cal.depth_e_dot1),
        ("depth_e_dot2", cal.depth_e_dot2),
        ("depth_h_dot1", cal.depth_h_dot1),
        ("depth_h_dot2", cal.depth_h_dot2),
        ("residual_low", cal.residuals.0),
        ("residual_high", cal.residuals.1),
    ] {
        csv.row(&[name.to_string(), fmt_f(v)]);
    }
    println!(
        "residuals: low {} meV, high {} meV",
        fmt_f(cal.residuals.0),
        fmt_f(cal.residuals.1)
    );
    Ok(vec![write_file(&ctx.out, "calibration.csv", csv.as_str())?])
}

/// Rows of a `L_nm,gap_meV` file.
pub fn read_points(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read points {}: {e}", path.display())))?;
    parse_points(&text)
}

pub fn parse_points(text: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    match lines.next() {
        Some("L_nm,gap_meV") => {}
        other => {
            return Err(CliError::config(format!(
                "points: expected header `L_nm,gap_meV`, found {:?}",
                other.unwrap_or("")
            )))
        }
    }
    lines
        .enumerate()
        .map(|(k, line)| {
            let bad = || CliError::config(format!("points: row {} is not two numbers: {line:?}", k + 1));
            let (a, b) = line.split_once(',').ok_or_else(bad)?;
            let l: f64 = a.trim().parse().map_err(|_| bad())?;
            let g: f64 = b.trim().parse().map_err(|_| bad())?;
            Ok((l, g))
        })
        .collect()
}

fn fit_report(fit: &PowerLawFit, points: &[(f64, f64)]) -> (String, String) {
    let p = fit.params;
    let mut params = Csv::new(&["parameter", "value"]);
    params.row(&["amplitude_meV_nm3".to_string(), fmt_f(p.amplitude)]);
    params.row(&["offset_length_nm".to_string(), fmt_f(p.offset_length)]);
    params.row(&["offset_energy_meV".to_string(), fmt_f(p.offset_energy)]);
    params.row(&["rms_residual_meV".to_string(), fmt_f(fit.rms())]);
    let mut res = Csv::new(&["L_nm", "gap_meV", "model_meV", "residual_meV"]);
    for (&(l, g), r) in points.iter().zip(&fit.residuals) {
        res.row(&[fmt_f(l), fmt_f(g), fmt_f(g + r), fmt_f(*r)]);
    }
    (params.as_str().to_string(), res.as_str().to_string())
}

pub fn fit_powerlaw_cmd(ctx: &Context, points_path: &Path) -> Result<Written, CliError> {
    let points = read_points(points_path)?;
    if points.len() < 3 {
        return Err(CliError::config(format!(
            "points: need at least 3 rows, found {}",
            points.len()
        )));
    }
    let fit = fit_powerlaw(&points, ctx.config.device.well_width)?;
    let (params, residuals) = fit_report(&fit, &points);
    print!("{params}");
    Ok(vec![
        write_file(&ctx.out, "powerlaw_fit.csv", &params)?,
        write_file(&ctx.out, "powerlaw_residuals.csv", &residuals)?,
    ])
}
