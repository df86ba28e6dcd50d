//! Acceptance suite. Prints one PASS/FAIL line per criterion with its
//! runtime and exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use dqdot::molecule::{hermiticity_defect, Label};
use dqdot::vertical::dz_matrix;
use dqdot::{
    build_potential, calibrate_depths, eval_powerlaw, fit_powerlaw, solve_double_well, solve_vertical,
    CalibrationTarget, Charge, DeviceSpec, DoubleWellSpec, ExcitonModel, Field, Grid1D, MoleculeSolver, PowerLawParams,
    SolverSettings, Species,
};

type Check = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Check);

fn ensure(ok: bool, what: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what)
    }
}

fn at(b: f64) -> Field {
    Field::new(b).unwrap()
}

fn field_grid() -> Vec<Field> {
    (0..=80).map(|k| at(0.1 * k as f64)).collect()
}

fn c1_powerlaw_eval() -> Check {
    let p = PowerLawParams::REFERENCE;
    let v = eval_powerlaw(&p, 7.0).map_err(|e| e.to_string())?;
    let far = eval_powerlaw(&p, 1e9).map_err(|e| e.to_string())?;
    ensure((v - 46.68).abs() < 0.005, format!("ΔE(7) = {v:.4} meV"))?;
    ensure((far - 27.0).abs() < 1e-9, format!("ΔE(∞) = {far}"))?;
    Ok(format!("ΔE(7) = {v:.4} meV, ΔE(1e9) = {far:.6} meV"))
}

fn c2_powerlaw_round_trip() -> Check {
    let p = PowerLawParams::REFERENCE;
    let points: Vec<(f64, f64)> = [3.0, 7.0, 9.5].iter().map(|&l| (l, p.eval(l).unwrap())).collect();
    let fit = fit_powerlaw(&points, 4.5).map_err(|e| e.to_string())?;
    let q = fit.params;
    let errs = [
        ((q.amplitude - p.amplitude) / p.amplitude).abs(),
        ((q.offset_length - p.offset_length) / p.offset_length).abs(),
        ((q.offset_energy - p.offset_energy) / p.offset_energy).abs(),
    ];
    let worst = errs.iter().fold(0.0f64, |a, &b| a.max(b));
    ensure(worst < 1e-3, format!("worst relative parameter error {worst:e}"))?;
    ensure(
        fit.max_abs_residual() < 1e-6,
        format!("residual {:e}", fit.max_abs_residual()),
    )?;
    Ok(format!(
        "worst parameter error {worst:.2e}, residual {:.2e} meV",
        fit.max_abs_residual()
    ))
}

fn finite_well_ground(depth: f64, width: f64, kinetic: f64) -> f64 {
    let a = width / 2.0;
    let f = |e: f64| {
        let k = ((depth + e) / kinetic).sqrt();
        let kappa = (-e / kinetic).sqrt();
        k * (k * a).tan() - kappa
    };
    let e_top = (PI / (2.0 * a)).powi(2) * kinetic - depth;
    let (mut lo, mut hi) = (-depth + 1e-12, e_top.min(-1e-12) - 1e-9);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn c3_vertical_oracles() -> Check {
    let mut slowest = Duration::ZERO;

    let free = Species::new(1.0, 1.0, Charge::Electron).unwrap();
    let width = 10.0;
    let grid = Grid1D::with_step(0.0, width, 0.02).unwrap();
    let shift = -1000.0;
    let t = Instant::now();
    let s = solve_vertical(&vec![shift; grid.n_points()], &grid, &free, 4).map_err(|e| e.to_string())?;
    slowest = slowest.max(t.elapsed());
    let mut worst_box = 0.0f64;
    for (k, e) in s.energies().iter().enumerate() {
        let n = (k + 1) as f64;
        let exact = n * n * PI * PI * free.kinetic_coefficient() / (width * width);
        worst_box = worst_box.max(((e - shift) - exact).abs() / exact);
    }
    ensure(worst_box < 1e-3, format!("box relative error {worst_box:e}"))?;

    let electron = Species::electron();
    let spec = DoubleWellSpec::new(4.5, 7.0, 239.0, 0.0).unwrap();
    let t = Instant::now();
    let s = solve_double_well(&spec, &electron, &SolverSettings::default()).map_err(|e| e.to_string())?;
    slowest = slowest.max(t.elapsed());
    let exact = finite_well_ground(239.0, 4.5, electron.kinetic_coefficient());
    let d = (s.energies()[0] - exact).abs();
    ensure(d < 0.05, format!("finite well off by {d} meV"))?;
    ensure(slowest < Duration::from_secs(1), format!("slowest solve {slowest:?}"))?;
    Ok(format!(
        "box error {:.2e}, finite well error {d:.4} meV, slowest solve {slowest:.0?}",
        worst_box
    ))
}

fn c4_calibration() -> Check {
    let model = ExcitonModel::default().with_barrier(50.0);
    let lines = model.lines_at(Field::ZERO).map_err(|e| e.to_string())?;
    let target = CalibrationTarget::new(lines.low.energy, lines.high.energy);
    let cal = calibrate_depths(&target, &ExcitonModel::default()).map_err(|e| e.to_string())?;
    ensure(
        (cal.depth_e_dot1 - 239.0).abs() < 0.1,
        format!("V1e = {}", cal.depth_e_dot1),
    )?;
    ensure(
        (cal.depth_e_dot2 - 203.0).abs() < 0.1,
        format!("V2e = {}", cal.depth_e_dot2),
    )?;
    ensure(
        cal.depth_h_dot1 == 0.5 * cal.depth_e_dot1 && cal.depth_h_dot2 == 0.5 * cal.depth_e_dot2,
        "hole depths not exactly half".to_string(),
    )?;
    Ok(format!(
        "V1e = {:.4}, V2e = {:.4}, V1h = {:.4}, V2h = {:.4} meV",
        cal.depth_e_dot1, cal.depth_e_dot2, cal.depth_h_dot1, cal.depth_h_dot2
    ))
}

fn c5_coupling_regime() -> Check {
    let model = ExcitonModel::default();
    let mut barriers: Vec<f64> = (0..=72).map(|k| 2.0 + 0.25 * k as f64).collect();
    barriers.push(50.0);
    let sweep = model.sweep_l(&barriers).map_err(|e| e.to_string())?;
    let curve = sweep.gap_curve();
    ensure(
        curve.is_strictly_decreasing(),
        "gap curve not strictly decreasing".to_string(),
    )?;
    let gap = |l: f64| {
        sweep
            .points
            .iter()
            .find(|p| p.barrier == l)
            .map(|p| p.lines.gap())
            .unwrap()
    };
    let g3 = gap(3.0);
    let g5 = gap(5.0);
    let g7 = gap(7.0);
    let g95 = gap(9.5);
    let g50 = gap(50.0);
    ensure(g5 - g50 > 5.0, format!("ΔE(5) − ΔE(50) = {}", g5 - g50))?;
    ensure(g3 > g7 && g7 > g95, format!("order {g3} {g7} {g95}"))?;
    ensure((g7 - 47.5).abs() <= 3.0, format!("ΔE(7) = {g7:.3} meV"))?;
    Ok(format!(
        "ΔE(3) = {g3:.3}, ΔE(7) = {g7:.3}, ΔE(9.5) = {g95:.3}, ΔE(5) − ΔE(50) = {:.3} meV",
        g5 - g50
    ))
}

fn gap_change(barrier: f64) -> Result<(f64, bool), String> {
    let sweep = ExcitonModel::default()
        .with_barrier(barrier)
        .sweep_b(&field_grid())
        .map_err(|e| e.to_string())?;
    let gaps: Vec<f64> = sweep.gap_curve().gaps().collect();
    let low_rises = sweep.lines.windows(2).all(|w| w[1].low.energy >= w[0].low.energy);
    Ok((gaps[gaps.len() - 1] - gaps[0], low_rises))
}

fn c6_field_decoupling() -> Check {
    let (d7, low7) = gap_change(7.0)?;
    let (d95, low95) = gap_change(9.5)?;
    let summary = format!("Δgap(L = 7) = {d7:+.3} meV, Δgap(L = 9.5) = {d95:+.3} meV");
    ensure(
        d7 < 0.0 && (d7.abs() - 1.5).abs() <= 0.75,
        format!("{summary}; need −1.5 ± 0.75 at L = 7"),
    )?;
    ensure(low7 && low95, format!("{summary}; lower line moved down"))?;
    ensure(d95.abs() < 0.5, format!("{summary}; need |Δ| < 0.5 at L = 9.5"))?;
    Ok(summary)
}

fn c7_effective_distance() -> Check {
    let model = ExcitonModel::default();
    let gap = model
        .with_barrier(7.0)
        .lines_at(at(8.0))
        .map_err(|e| e.to_string())?
        .gap();
    let l = model
        .effective_interdot_distance(gap, dqdot::spectroscopy::DEFAULT_INVERSION_RANGE)
        .map_err(|e| format!("gap(7 nm, 8 T) = {gap:.3} meV: {e}"))?;
    let summary = format!("gap(7 nm, 8 T) = {gap:.3} meV → L_eff = {l:.3} nm");
    ensure((l - 10.0).abs() <= 1.5, format!("{summary}; need 10 ± 1.5 nm"))?;
    Ok(summary)
}

fn c8_crossing() -> Check {
    let model = ExcitonModel::default();
    let mut found = Vec::new();
    for p in [
        Label::BONDING_PY,
        Label {
            orbital: dqdot::Orbital::PX,
            ..Label::BONDING_S
        },
    ] {
        let l = model
            .level_crossing(Charge::Electron, Label::ANTIBONDING_S, p, (2.0, 20.0), 0.5)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("no A-s/{p} crossing in [2, 20] nm"))?;
        ensure((5.0..=10.0).contains(&l), format!("A-s/{p} crossing at {l:.3} nm"))?;
        found.push(format!("A-s/{p} at {l:.3} nm"));
    }
    Ok(found.join(", "))
}

fn c9_numerical_properties() -> Check {
    let defaults = SolverSettings::default();
    let mut notes = Vec::new();
    let mut worst_herm = 0.0f64;
    let mut worst_ortho = 0.0f64;
    let mut worst_dz = 0.0f64;
    let mut worst_flip = 0.0f64;
    for barrier in [3.0, 7.0, 9.5] {
        for species in [Species::electron(), Species::hole()] {
            let device = DeviceSpec::default().with_barrier(barrier);
            let (d1, d2) = device.depths(species.charge());
            let well = DoubleWellSpec::new(4.5, barrier, d1, d2).unwrap();
            let s = solve_double_well(&well, &species, &defaults).map_err(|e| e.to_string())?;
            for i in 0..s.len() {
                worst_ortho = worst_ortho.max((s.overlap(i, i) - 1.0).abs());
                for j in 0..i {
                    worst_ortho = worst_ortho.max(s.overlap(i, j).abs());
                }
                ensure(s.node_count(i) == i, format!("state {i} has {} nodes", s.node_count(i)))?;
            }
            worst_dz = worst_dz.max(dz_matrix(&s, s.bound_count()).antisymmetry_defect());

            let solver = MoleculeSolver::new(species, &well, &defaults).map_err(|e| e.to_string())?;
            let flipped = MoleculeSolver::from_parts(
                species.with_charge(match species.charge() {
                    Charge::Electron => Charge::Hole,
                    Charge::Hole => Charge::Electron,
                }),
                solver.vertical().clone(),
                &defaults,
            );
            for b in [0.5, 4.0, 8.0] {
                worst_herm = worst_herm.max(hermiticity_defect(&solver.hamiltonian(at(b)).matrix));
                let a = solver.spectrum(at(b)).map_err(|e| e.to_string())?;
                let f = flipped.spectrum(at(b)).map_err(|e| e.to_string())?;
                for (x, y) in a.energies.iter().zip(&f.energies) {
                    worst_flip = worst_flip.max((x - y).abs());
                }
            }
        }
    }
    ensure(worst_herm < 1e-12, format!("Hermiticity defect {worst_herm:e}"))?;
    ensure(worst_ortho < 1e-8, format!("orthonormality defect {worst_ortho:e}"))?;
    ensure(worst_dz < 1e-8, format!("Dz antisymmetry defect {worst_dz:e}"))?;
    ensure(worst_flip < 1e-9, format!("sign-flip spectral change {worst_flip:e}"))?;
    notes.push(format!(
        "herm {worst_herm:.1e}, ortho {worst_ortho:.1e}, Dz {worst_dz:.1e}, flip {worst_flip:.1e}"
    ));

    // Second order in the y ∂/∂z coupling at 0.5 T; the exact diamagnetic
    // diagonal change is removed from both sides.
    let mut worst_pt = 0.0f64;
    for species in [Species::electron(), Species::hole()] {
        let (d1, d2) = DeviceSpec::default().depths(species.charge());
        let well = DoubleWellSpec::new(4.5, 9.5, d1, d2).unwrap();
        let s = MoleculeSolver::new(species, &well, &defaults).map_err(|e| e.to_string())?;
        let (h0, h) = (s.hamiltonian(Field::ZERO), s.hamiltonian(at(0.5)));
        let zero = s.spectrum(Field::ZERO).map_err(|e| e.to_string())?;
        let half = s.spectrum_continued(at(0.5)).map_err(|e| e.to_string())?;
        for label in [Label::BONDING_S, Label::ANTIBONDING_S] {
            let i = h.basis.index_of(label).unwrap();
            let dia = h.matrix[(i, i)].re - h0.matrix[(i, i)].re;
            let exact = half.energy_of(label).unwrap() - zero.energy_of(label).unwrap() - dia;
            let second = s.perturbative_shift(label, at(0.5)).map_err(|e| e.to_string())? - dia;
            worst_pt = worst_pt.max(((second - exact) / exact).abs());
        }
    }
    ensure(
        worst_pt < 0.01,
        format!("perturbation mismatch {:.2}%", 100.0 * worst_pt),
    )?;
    notes.push(format!("PT {:.2}%", 100.0 * worst_pt));

    // Grid: halving the step.
    let mut worst_grid = 0.0f64;
    let fine = SolverSettings {
        grid_step: defaults.grid_step / 2.0,
        ..defaults
    };
    for species in [Species::electron(), Species::hole()] {
        for barrier in [3.0, 7.0, 9.5] {
            let (d1, d2) = DeviceSpec::default().depths(species.charge());
            let well = DoubleWellSpec::new(4.5, barrier, d1, d2).unwrap();
            let a = solve_double_well(&well, &species, &defaults).map_err(|e| e.to_string())?;
            let b = solve_double_well(&well, &species, &fine).map_err(|e| e.to_string())?;
            for i in 0..a.bound_count() {
                worst_grid = worst_grid.max((a.energies()[i] - b.energies()[i]).abs());
            }
        }
    }
    ensure(
        worst_grid < 0.01,
        format!("grid halving moves a level by {worst_grid} meV"),
    )?;
    notes.push(format!("grid {worst_grid:.1e} meV"));

    // Basis: vertical cap 4 → 6 and N 6 → 8 at 8 T.
    let large = SolverSettings {
        max_vertical_states: 6,
        lateral_quanta: 8,
        ..defaults
    };
    let mut worst_basis = 0.0f64;
    for species in [Species::electron(), Species::hole()] {
        for barrier in [3.0, 7.0, 9.5] {
            let (d1, d2) = DeviceSpec::default().depths(species.charge());
            let well = DoubleWellSpec::new(4.5, barrier, d1, d2).unwrap();
            let a = MoleculeSolver::new(species, &well, &defaults)
                .and_then(|s| s.spectrum(at(8.0)))
                .map_err(|e| e.to_string())?;
            let b = MoleculeSolver::new(species, &well, &large)
                .and_then(|s| s.spectrum(at(8.0)))
                .map_err(|e| e.to_string())?;
            for k in 0..2 {
                worst_basis = worst_basis.max((a.energies[k] - b.energies[k]).abs());
            }
        }
    }
    ensure(
        worst_basis < 0.05,
        format!("basis enlargement moves a level by {worst_basis} meV"),
    )?;
    notes.push(format!("basis {worst_basis:.1e} meV"));

    // Potential sanity: the published geometry builds.
    let spec = DoubleWellSpec::new(4.5, 7.0, 239.0, 203.0).unwrap();
    build_potential(&spec, &spec.default_grid(&defaults).unwrap()).map_err(|e| e.to_string())?;
    Ok(notes.join(", "))
}

fn c10_determinism() -> Check {
    let tmp = std::env::temp_dir().join(format!("dqdot-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&tmp).map_err(|e| e.to_string())?;
    std::fs::write(tmp.join("c.toml"), "[device]\nbarrier = 7.0\n").map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for (dir, threads) in [("a", "1"), ("b", "4")] {
        let status = Command::new(env!("CARGO_BIN_EXE_dqdot"))
            .current_dir(&tmp)
            .args(["sweep-b", "--config", "c.toml", "--out", dir, "--threads", threads])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(
            status.status.success(),
            format!("sweep-b exited with {:?}", status.status.code()),
        )?;
        outputs.push(std::fs::read(tmp.join(dir).join("lines_vs_B.csv")).map_err(|e| e.to_string())?);
    }
    let _ = std::fs::remove_dir_all(&tmp);
    ensure(
        outputs[0] == outputs[1],
        "lines_vs_B.csv differs between runs".to_string(),
    )?;
    Ok(format!("{} identical bytes across two runs", outputs[0].len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 power-law evaluation", Duration::from_millis(1), c1_powerlaw_eval),
        ("2 power-law round trip", Duration::from_secs(1), c2_powerlaw_round_trip),
        ("3 vertical solver oracles", Duration::from_secs(2), c3_vertical_oracles),
        ("4 depth calibration", Duration::from_secs(10), c4_calibration),
        ("5 coupling regime", Duration::from_secs(60), c5_coupling_regime),
        (
            "6 field-induced decoupling",
            Duration::from_secs(120),
            c6_field_decoupling,
        ),
        ("7 effective distance", Duration::from_secs(60), c7_effective_distance),
        ("8 A-s/B-p crossing", Duration::from_secs(60), c8_crossing),
        (
            "9 numerical properties",
            Duration::from_secs(120),
            c9_numerical_properties,
        ),
        ("10 determinism", Duration::from_secs(120), c10_determinism),
    ];
    let mut failed = 0;
    for (name, limit, check) in criteria {
        let t = Instant::now();
        let result = check();
        let elapsed = t.elapsed();
        let (ok, detail) = match result {
            Ok(d) if elapsed <= limit => (true, d),
            Ok(d) => (false, format!("{d}; too slow ({elapsed:.2?} > {limit:?})")),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {name} [{elapsed:.2?}]: {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
