//! Dispatch of a validated [`RunConfig`] and the CSV / gnuplot writers.

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::central::{CflPolicy, KtSolver, NtSolver, SspOrder};
use crate::config::{Command, Initial, Method, RunConfig};
use crate::error::{Error, Result};
use crate::flux::{model_by_name, Euler, Model};
use crate::mesh::{CellAverages, Grid1D, Limiter};
use crate::oracles::battery::{edge_test_function, run_battery, sine_modes, step_modes};
use crate::oracles::{ConvergenceTable, ExactSolution, Scheme, SineBurgers, Study};
use crate::quadrature::gauss5;
use crate::spectral::{
    collocation_points, concentration_samples, distance_function, project, ConcentrationKernel, EdgeDetector,
    EdgeReport, FourierProjection, Mollifier, MollifierParams,
};
use crate::sv::{sv_evolve, SvConfig};
use crate::Complex64;

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// `Some(all passed)` for the battery.
    pub battery: Option<bool>,
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    Ok(csv::Writer::from_path(path)?)
}

fn write_script(path: &Path, body: &str) -> Result<()> {
    fs::write(path, body)?;
    Ok(())
}

/// Initial profile as a point function, with its discontinuities.
fn initial_profile(cfg: &RunConfig) -> (Box<dyn Fn(f64) -> f64>, Vec<f64>) {
    let (a, b) = (cfg.sine_a, cfg.sine_b);
    let (ul, ur, x0) = (cfg.u_left, cfg.u_right, cfg.x0);
    let len = cfg.x_max - cfg.x_min;
    let (lo, hi) = (cfg.x_min + 0.25 * len, cfg.x_min + 0.75 * len);
    match cfg.initial {
        Initial::Sine => (Box::new(move |x: f64| a + b * x.sin()), vec![]),
        Initial::Square => (Box::new(move |x| if x >= lo && x < hi { 1.0 } else { 0.0 }), vec![lo, hi]),
        Initial::Step => (Box::new(|x: f64| if x.abs() < 0.5 * PI { 1.0 } else { 0.0 }), vec![-0.5 * PI, 0.5 * PI]),
        Initial::EdgeTest => (Box::new(edge_test_function), vec![0.0]),
        Initial::Riemann | Initial::Sod => (Box::new(move |x| if x < x0 { ul } else { ur }), vec![x0]),
    }
}

/// Cell means with the quadrature split at the profile's jumps.
fn cell_means(f: &dyn Fn(f64) -> f64, breaks: &[f64], a: f64, b: f64) -> f64 {
    let mut cuts = vec![a, b];
    cuts.extend(breaks.iter().copied().filter(|x| *x > a && *x < b));
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2).map(|w| gauss5(w[0], w[1], f)).sum::<f64>() / (b - a)
}

pub fn initial_averages(cfg: &RunConfig, model: &Model) -> Result<CellAverages> {
    let grid = Grid1D::new(cfg.x_min, cfg.x_max, cfg.n_cells, cfg.boundary)?;
    let h = grid.h();
    if cfg.initial == Initial::Sod {
        let e = Euler { gamma: cfg.gamma };
        let left = e.conserved(1.0, 0.0, 1.0);
        let right = e.conserved(0.125, 0.0, 0.1);
        let mut data = Vec::with_capacity(3 * cfg.n_cells);
        for i in 0..cfg.n_cells {
            let w = ((cfg.x0 - grid.face(i)) / h).clamp(0.0, 1.0);
            data.extend((0..3).map(|c| w * left[c] + (1.0 - w) * right[c]));
        }
        return CellAverages::new(grid, 3, data);
    }
    if model.flux.components() != 1 {
        return Err(Error::InvalidParameter(format!("initial data {:?} is scalar; model {} is not", cfg.initial, cfg.model)));
    }
    let (f, breaks) = initial_profile(cfg);
    let data = (0..cfg.n_cells).map(|i| cell_means(&f, &breaks, grid.face(i), grid.face(i) + h)).collect();
    CellAverages::scalar(grid, data)
}

fn limiter(cfg: &RunConfig) -> Result<Limiter> {
    Limiter::minmod_theta(cfg.limiter_theta)
}

fn policy(cfg: &RunConfig) -> Result<CflPolicy> {
    let p = match cfg.method {
        Method::Nt => CflPolicy::nt(cfg.cfl_or_default())?,
        _ => CflPolicy::kt(cfg.cfl_or_default())?,
    };
    match cfg.dt {
        Some(dt) => p.with_fixed_dt(dt),
        None => Ok(p),
    }
}

/// Requested output times plus `t_final`, sorted and deduplicated.
fn output_times(cfg: &RunConfig) -> Vec<f64> {
    let mut t: Vec<f64> = cfg.output_times.iter().copied().chain([cfg.t_final]).collect();
    t.sort_by(f64::total_cmp);
    t.dedup();
    t
}

fn component_names(m: usize) -> Vec<&'static str> {
    if m == 3 {
        vec!["rho", "momentum", "energy"]
    } else {
        vec!["u"]
    }
}

fn solve_finite_volume(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let model = model_by_name(&cfg.model, cfg.advection_speed, cfg.gamma)?;
    let mut u = initial_averages(cfg, &model)?;
    let policy = policy(cfg)?;
    let lim = limiter(cfg)?;
    let mut frames = Vec::new();
    let mut t = 0.0;
    for target in output_times(cfg) {
        let span = target - t;
        if span > 0.0 {
            u = match cfg.method {
                Method::Nt => NtSolver::new(model.flux.as_ref(), policy).with_limiter(lim).evolve(&u, span, |_| {})?,
                _ => {
                    let mut s = KtSolver::new(model.flux.as_ref(), policy)
                        .with_order(SspOrder::from_int(cfg.rk_order)?)
                        .with_options(crate::central::KtOptions { limiter: lim, ..Default::default() });
                    if let Some(q) = model.diffusion.as_deref() {
                        s = s.with_diffusion(q);
                    }
                    s.evolve(&u, span, |_| {})?
                }
            };
        }
        t = target;
        frames.push((t, u.clone()));
    }
    let path = dir.join("solution.csv");
    let mut w = csv_writer(&path)?;
    let names = component_names(u.components());
    w.write_record(["t", "x"].iter().chain(names.iter()))?;
    for (t, state) in &frames {
        for i in 0..state.n_cells() {
            let mut row = vec![fmt(*t), fmt(state.grid().center(i))];
            row.extend(state.cell(i).iter().map(|v| fmt(*v)));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    let script = dir.join("solution.gp");
    let cols: Vec<String> = names
        .iter()
        .enumerate()
        .map(|(c, n)| format!("'solution.csv' skip 1 using 2:{} with lines title '{n}'", c + 3))
        .collect();
    write_script(
        &script,
        &format!("set datafile separator ','\nset xlabel 'x'\nset key outside\nplot {}\npause -1\n", cols.join(", \\\n     ")),
    )?;
    Ok(vec![path, script])
}

/// The initial data as a Fourier projection on `[-π, π)` with `N` modes.
pub fn spectral_initial(cfg: &RunConfig) -> Result<FourierProjection> {
    let n = cfg.modes;
    Ok(match cfg.initial {
        Initial::Sine => {
            let mut p = sine_modes(n);
            let scale = Complex64::new(cfg.sine_b, 0.0);
            for c in p.coeffs_mut() {
                *c *= scale;
            }
            p.coeffs_mut()[n] += Complex64::new(cfg.sine_a, 0.0);
            p
        }
        Initial::Step => step_modes(n),
        _ => {
            let (f, _) = initial_profile(cfg);
            project(&collocation_points(n).into_iter().map(f).collect::<Vec<_>>())?
        }
    })
}

fn sv_config(cfg: &RunConfig) -> SvConfig {
    SvConfig {
        enabled: cfg.method == Method::Sv,
        s: cfg.sv_s,
        beta: cfg.sv_beta,
        c1: cfg.sv_c1,
        c2: cfg.sv_c2,
        dt_fixed: cfg.dt,
    }
}

/// The projection the spectral post-processing acts on: the evolved state
/// for spectral methods, the initial data otherwise.
pub fn spectral_source(cfg: &RunConfig) -> Result<FourierProjection> {
    let p0 = spectral_initial(cfg)?;
    if cfg.method.is_spectral() && cfg.t_final > 0.0 {
        Ok(sv_evolve(&p0, &sv_config(cfg), cfg.t_final, &[])?.final_state)
    } else {
        Ok(p0)
    }
}

/// Exact values where an oracle exists for the configured problem.
fn exact_at(cfg: &RunConfig, x: f64) -> Option<f64> {
    let t = if cfg.method.is_spectral() { cfg.t_final } else { 0.0 };
    match cfg.initial {
        Initial::Sine if cfg.model == "burgers" => SineBurgers::new(cfg.sine_a, cfg.sine_b).evaluate(x, t).ok(),
        Initial::Step | Initial::EdgeTest if t == 0.0 => Some(initial_profile(cfg).0(x)),
        _ => None,
    }
}

fn solve_spectral(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let times = output_times(cfg);
    let run = sv_evolve(&spectral_initial(cfg)?, &sv_config(cfg), cfg.t_final, &times)?;
    let path = dir.join("solution.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["t", "x", "u"])?;
    let xs = collocation_points(cfg.modes);
    for (t, p) in &run.snapshots {
        for (x, v) in xs.iter().zip(p.samples()) {
            w.write_record([fmt(*t), fmt(*x), fmt(v)])?;
        }
    }
    w.flush()?;
    let script = dir.join("solution.gp");
    write_script(
        &script,
        "set datafile separator ','\nset xlabel 'x'\nplot 'solution.csv' skip 1 using 2:3 with lines title 'u'\npause -1\n",
    )?;
    Ok(vec![path, script])
}

fn detector(cfg: &RunConfig) -> Result<EdgeDetector> {
    EdgeDetector::with_threshold(cfg.edge_threshold)
}

fn detect_edges(cfg: &RunConfig, dir: &Path) -> Result<(Vec<PathBuf>, EdgeReport)> {
    let p = spectral_source(cfg)?;
    let det = detector(cfg)?;
    let report = det.detect(&p)?;
    let edges = dir.join("edges.csv");
    let mut w = csv_writer(&edges)?;
    w.write_record(["location", "amplitude"])?;
    for e in &report.edges {
        w.write_record([fmt(e.location), fmt(e.amplitude)])?;
    }
    w.flush()?;

    let jump = dir.join("jump.csv");
    let mut w = csv_writer(&jump)?;
    w.write_record(["x", "fejer", "exponential", "combined"])?;
    let fejer = concentration_samples(&p, &ConcentrationKernel::Fejer);
    let expo = concentration_samples(&p, &ConcentrationKernel::exponential(det.exp_beta)?);
    let combined = det.combined_samples(&p)?;
    for (j, x) in collocation_points(p.n()).into_iter().enumerate() {
        w.write_record([fmt(x), fmt(fejer[j]), fmt(expo[j]), fmt(combined[j])])?;
    }
    w.flush()?;
    let script = dir.join("edges.gp");
    write_script(
        &script,
        "set datafile separator ','\nset xlabel 'x'\nplot 'jump.csv' skip 1 using 1:2 with lines title 'fejer', \\\n     \
         'jump.csv' skip 1 using 1:3 with lines title 'exponential', \\\n     \
         'jump.csv' skip 1 using 1:4 with lines lw 2 title 'minmod', \\\n     \
         'edges.csv' skip 1 using 1:2 with points pt 7 title 'edges'\npause -1\n",
    )?;
    Ok((vec![edges, jump, script], report))
}

fn mollify(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let p = spectral_source(cfg)?;
    let report = detector(cfg)?.detect(&p)?;
    let d = distance_function(&report);
    let params = MollifierParams { beta: cfg.mollifier_beta, c_p: cfg.mollifier_cp, oversample: cfg.mollifier_oversample };
    let m = Mollifier::new(&p, params)?;
    let path = dir.join("mollified.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["x", "raw", "mollified", "distance", "exact"])?;
    for (x, raw) in collocation_points(p.n()).into_iter().zip(p.samples()) {
        let dx = d.eval(x);
        let smooth = if dx > 0.0 { m.at(x, dx)? } else { raw };
        let exact = exact_at(cfg, x).map(fmt).unwrap_or_else(|| "nan".into());
        w.write_record([fmt(x), fmt(raw), fmt(smooth), fmt(dx), exact])?;
    }
    w.flush()?;
    let script = dir.join("mollified.gp");
    write_script(
        &script,
        "set datafile separator ','\nset xlabel 'x'\nplot 'mollified.csv' skip 1 using 1:2 with lines title 'partial sum', \\\n     \
         'mollified.csv' skip 1 using 1:3 with lines lw 2 title 'mollified', \\\n     \
         'mollified.csv' skip 1 using 1:5 with lines dt 2 title 'exact'\npause -1\n",
    )?;
    Ok(vec![path, script])
}

pub fn convergence_table(cfg: &RunConfig) -> Result<ConvergenceTable> {
    if cfg.model != "burgers" || cfg.initial != Initial::Sine {
        return Err(Error::InvalidParameter("convergence studies need model = burgers with initial = sine".into()));
    }
    let f = crate::flux::burgers();
    let exact = SineBurgers::new(cfg.sine_a, cfg.sine_b);
    let scheme = match cfg.method {
        Method::Nt => Scheme::Nt { policy: policy(cfg)?, limiter: limiter(cfg)? },
        Method::Kt => Scheme::Kt { policy: policy(cfg)?, order: SspOrder::from_int(cfg.rk_order)? },
        m => return Err(Error::InvalidParameter(format!("convergence studies use nt or kt, not {m:?}"))),
    };
    let mut study = Study::new(scheme, &f, &exact, cfg.t_final);
    study.x_min = cfg.x_min;
    study.x_max = cfg.x_max;
    study.exclusion_cells = cfg.exclusion_cells;
    if let Some(r) = cfg.dt_over_h {
        study = study.with_dt_over_h(r);
    }
    if cfg.align_shock {
        study = study.aligned_to_shock();
    }
    study.run(&cfg.resolutions)
}

fn convergence(cfg: &RunConfig, dir: &Path, out: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let table = convergence_table(cfg)?;
    let path = dir.join("convergence.csv");
    table.write_csv(fs::File::create(&path)?)?;
    table.write_csv(&mut *out)?;
    let script = dir.join("convergence.gp");
    write_script(
        &script,
        "set datafile separator ','\nset logscale xy\nset xlabel 'n'\nset ylabel 'error'\n\
         plot 'convergence.csv' skip 1 using 1:2 with linespoints title 'L1', \\\n     \
         'convergence.csv' skip 1 using 1:3 with linespoints title 'L1 away from shocks', \\\n     \
         'convergence.csv' skip 1 using 1:4 with linespoints title 'max away from shocks'\npause -1\n",
    )?;
    Ok(vec![path, script])
}

fn battery(dir: &Path, out: &mut dyn Write) -> Result<(Vec<PathBuf>, bool)> {
    let results = run_battery();
    let path = dir.join("battery.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["id", "name", "passed", "detail"])?;
    for r in &results {
        writeln!(out, "{r}")?;
        w.write_record([r.id.to_string(), r.name.to_string(), r.passed.to_string(), r.detail.clone()])?;
    }
    w.flush()?;
    let passed = results.iter().all(|r| r.passed);
    writeln!(out, "{} of {} criteria passed", results.iter().filter(|r| r.passed).count(), results.len())?;
    Ok((vec![path], passed))
}

/// Runs `command` and writes its artifacts into `dir`.
pub fn run(cfg: &RunConfig, command: Command, dir: &Path, out: &mut dyn Write) -> Result<Outcome> {
    fs::create_dir_all(dir)?;
    let mut outcome = Outcome { files: Vec::new(), battery: None };
    match command {
        Command::Solve if cfg.method.is_spectral() => outcome.files = solve_spectral(cfg, dir)?,
        Command::Solve => outcome.files = solve_finite_volume(cfg, dir)?,
        Command::DetectEdges => {
            let (files, report) = detect_edges(cfg, dir)?;
            for e in &report.edges {
                writeln!(out, "edge at x = {:.6}, jump = {:.6}", e.location, e.amplitude)?;
            }
            outcome.files = files;
        }
        Command::Mollify => outcome.files = mollify(cfg, dir)?,
        Command::Convergence => outcome.files = convergence(cfg, dir, out)?,
        Command::Battery => {
            let (files, passed) = battery(dir, out)?;
            outcome.files = files;
            outcome.battery = Some(passed);
        }
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn sine_modes_match_samples() {
        let cfg = parse_config("method = galerkin\nN = 16\nsine_a = 0.25\nsine_b = -0.5").unwrap();
        let p = spectral_initial(&cfg).unwrap();
        for x in [-3.0, -1.0, 0.4, 2.2] {
            assert!((p.evaluate(x) - (0.25 - 0.5 * f64::sin(x))).abs() < 1e-14);
        }
    }

    #[test]
    fn sod_averages_split_the_diaphragm_cell() {
        let cfg = parse_config("model = euler\ninitial = sod\nmethod = kt\nboundary = zero_gradient\nx_min = 0\nx_max = 1\nx0 = 0.5\nn_cells = 5").unwrap();
        let m = model_by_name("euler", 1.0, 1.4).unwrap();
        let u = initial_averages(&cfg, &m).unwrap();
        assert_eq!(u.cell(0)[0], 1.0);
        assert!((u.cell(2)[0] - 0.5 * (1.0 + 0.125)).abs() < 1e-15);
        assert_eq!(u.cell(4)[0], 0.125);
    }

    #[test]
    fn square_means_are_exact() {
        let cfg = parse_config("initial = square\nn_cells = 8\nx_min = 0\nx_max = 1").unwrap();
        let m = model_by_name("burgers", 1.0, 1.4).unwrap();
        let u = initial_averages(&cfg, &m).unwrap();
        assert_eq!(u.values(), &[0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0]);
    }
}
