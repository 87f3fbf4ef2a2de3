//! Refinement studies against an exact solution.

use std::io::Write;

use rayon::prelude::*;

use super::exact::ExactSolution;
use super::norms::{cell_errors, ErrorNorms, PointErrors};
use crate::central::{CflPolicy, KtSolver, NtSolver, SspOrder};
use crate::error::{Error, Result};
use crate::flux::FluxModel;
use crate::mesh::{CellAverages, Grid1D, Limiter};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    Nt { policy: CflPolicy, limiter: Limiter },
    Kt { policy: CflPolicy, order: SspOrder },
    /// The oracle's own cell averages, for checking the harness.
    Exact,
}

impl Scheme {
    pub fn nt_default() -> Self {
        Scheme::Nt { policy: CflPolicy::nt_default(), limiter: Limiter::default() }
    }

    pub fn kt_default() -> Self {
        Scheme::Kt { policy: CflPolicy::kt_default(), order: SspOrder::Two }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub errors: ErrorNorms,
    /// `log2(e_l1(previous) / e_l1(this))`; `None` on the first row or when
    /// either error is at rounding level.
    pub order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

pub const CSV_HEADER: &str = "n,e_l1,e_l1loc,e_linf_smooth,order";

/// Errors below this are treated as exact and get no order.
const ROUNDING_FLOOR: f64 = 1e-13;

pub fn observed_order(coarse: f64, fine: f64) -> Option<f64> {
    if coarse > ROUNDING_FLOOR && fine > ROUNDING_FLOOR {
        Some((coarse / fine).log2())
    } else {
        None
    }
}

impl ConvergenceTable {
    pub fn from_errors(rows: Vec<(usize, ErrorNorms)>) -> Self {
        let mut out: Vec<ConvergenceRow> = Vec::with_capacity(rows.len());
        for (n, errors) in rows {
            let order = out.last().and_then(|prev| observed_order(prev.errors.l1, errors.l1));
            out.push(ConvergenceRow { n, errors, order });
        }
        Self { rows: out }
    }

    /// Order on the finest pair.
    pub fn final_order(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.order)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER.split(','))?;
        for r in &self.rows {
            w.write_record([
                r.n.to_string(),
                format!("{:.16e}", r.errors.l1),
                format!("{:.16e}", r.errors.l1_loc),
                format!("{:.16e}", r.errors.linf_smooth),
                r.order.map(|o| format!("{o:.16e}")).unwrap_or_else(|| "nan".into()),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// A scheme, flux and oracle on a periodic interval.
#[derive(Clone, Copy)]
pub struct Study<'a> {
    pub scheme: Scheme,
    pub flux: &'a dyn FluxModel,
    pub exact: &'a dyn ExactSolution,
    pub x_min: f64,
    pub x_max: f64,
    pub t_final: f64,
    /// Exclusion radius in cells around each shock.
    pub exclusion_cells: f64,
    /// Fixed `dt / h`. The step count is set on the coarsest resolution and
    /// doubled with `n`, so every run lands on `t_final` with the same ratio.
    pub dt_over_h: Option<f64>,
}

impl<'a> Study<'a> {
    pub fn new(scheme: Scheme, flux: &'a dyn FluxModel, exact: &'a dyn ExactSolution, t_final: f64) -> Self {
        Self {
            scheme,
            flux,
            exact,
            x_min: 0.0,
            x_max: 2.0 * std::f64::consts::PI,
            t_final,
            exclusion_cells: 5.0,
            dt_over_h: None,
        }
    }

    pub fn with_dt_over_h(self, ratio: f64) -> Self {
        Self { dt_over_h: Some(ratio), ..self }
    }

    /// Shifts the periodic domain so that the first shock at `t_final` sits
    /// on the left boundary face, and so on a cell face at every resolution.
    pub fn aligned_to_shock(self) -> Self {
        match self.exact.shock_locations(self.t_final).first() {
            Some(&s) => {
                let len = self.x_max - self.x_min;
                let x_min = self.x_min + (s - self.x_min).rem_euclid(len);
                Self { x_min, x_max: x_min + len, ..self }
            }
            None => self,
        }
    }

    /// Step count for `n` cells under a fixed `dt / h`, given the coarsest
    /// resolution `n0`. Staggered runs count pairs.
    fn step_count(&self, ratio: f64, n: usize, n0: usize) -> usize {
        let h0 = (self.x_max - self.x_min) / n0 as f64;
        let per_step = match self.scheme {
            Scheme::Nt { .. } => 2.0,
            _ => 1.0,
        };
        let base = (self.t_final / (per_step * ratio * h0)).ceil().max(1.0) as usize;
        base * n / n0
    }

    pub fn initial(&self, n: usize) -> Result<CellAverages> {
        let grid = Grid1D::periodic(self.x_min, self.x_max, n)?;
        let period = Some(grid.length());
        let h = grid.h();
        let data = (0..n)
            .map(|i| self.exact.cell_average(grid.face(i), grid.face(i) + h, 0.0, period))
            .collect::<Result<Vec<_>>>()?;
        CellAverages::scalar(grid, data)
    }

    /// Numerical solution at `t_final` on `n` cells.
    pub fn solve(&self, n: usize) -> Result<CellAverages> {
        self.solve_from(n, n)
    }

    /// As [`Study::solve`], with `n0` the coarsest resolution of the study.
    pub fn solve_from(&self, n: usize, n0: usize) -> Result<CellAverages> {
        let u0 = self.initial(n)?;
        let steps = self.dt_over_h.map(|r| self.step_count(r, n, n0));
        match (self.scheme, steps) {
            (Scheme::Nt { policy, limiter }, None) => {
                NtSolver::new(self.flux, policy).with_limiter(limiter).evolve(&u0, self.t_final, |_| {})
            }
            (Scheme::Nt { policy, limiter }, Some(pairs)) => {
                let policy = policy.with_fixed_dt(self.t_final / (2 * pairs) as f64)?;
                NtSolver::new(self.flux, policy).with_limiter(limiter).evolve_pairs(&u0, pairs, |_| {})
            }
            (Scheme::Kt { policy, order }, None) => {
                KtSolver::new(self.flux, policy).with_order(order).evolve(&u0, self.t_final, |_| {})
            }
            (Scheme::Kt { policy, order }, Some(steps)) => {
                let policy = policy.with_fixed_dt(self.t_final / steps as f64)?;
                KtSolver::new(self.flux, policy).with_order(order).evolve_steps(&u0, steps, |_| {})
            }
            (Scheme::Exact, _) => {
                let grid = *u0.grid();
                let period = Some(grid.length());
                let h = grid.h();
                let data = (0..n)
                    .map(|i| self.exact.cell_average(grid.face(i), grid.face(i) + h, self.t_final, period))
                    .collect::<Result<Vec<_>>>()?;
                CellAverages::scalar(grid, data)
            }
        }
    }

    pub fn errors(&self, n: usize) -> Result<PointErrors> {
        self.errors_from(n, n)
    }

    fn errors_from(&self, n: usize, n0: usize) -> Result<PointErrors> {
        cell_errors(&self.solve_from(n, n0)?, self.exact, self.t_final)
    }

    /// Runs every resolution (in parallel) and tabulates in input order.
    pub fn run(&self, resolutions: &[usize]) -> Result<ConvergenceTable> {
        Ok(ConvergenceTable::from_errors(
            self.run_errors(resolutions)?
                .into_iter()
                .map(|(n, e)| {
                    let h = (self.x_max - self.x_min) / n as f64;
                    (n, e.norms(self.exclusion_cells * h))
                })
                .collect(),
        ))
    }

    pub fn run_errors(&self, resolutions: &[usize]) -> Result<Vec<(usize, PointErrors)>> {
        if resolutions.len() < 3 {
            return Err(Error::InvalidParameter("a convergence study needs at least 3 resolutions".into()));
        }
        if resolutions.windows(2).any(|w| w[1] != 2 * w[0]) {
            return Err(Error::InvalidParameter("each resolution must double the previous one".into()));
        }
        resolutions.par_iter().map(|&n| Ok((n, self.errors_from(n, resolutions[0])?))).collect()
    }
}

/// [`Study::run`] as a free function.
pub fn convergence_study(study: &Study<'_>, resolutions: &[usize]) -> Result<ConvergenceTable> {
    study.run(resolutions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::burgers;
    use crate::oracles::exact::SineBurgers;
    use std::f64::consts::PI;

    #[test]
    fn exact_scheme_has_no_order() {
        let f = burgers();
        let s = SineBurgers::new(0.5, 0.3);
        let t = Study::new(Scheme::Exact, &f, &s, 0.8).run(&[16, 32, 64]).unwrap();
        assert!(t.rows.iter().all(|r| r.errors.l1 < 1e-13 && r.order.is_none()));
    }

    #[test]
    fn resolutions_must_double() {
        let f = burgers();
        let s = SineBurgers::new(0.5, 0.3);
        let st = Study::new(Scheme::Exact, &f, &s, 0.1);
        assert!(st.run(&[16, 32]).is_err());
        assert!(st.run(&[16, 32, 48]).is_err());
    }

    #[test]
    fn csv_layout() {
        let e = ErrorNorms { l1: 0.5, l1_loc: 0.25, linf_smooth: 1.0, weighted: 0.0 };
        let t = ConvergenceTable::from_errors(vec![(8, e), (16, ErrorNorms { l1: 0.125, ..e })]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].ends_with(",nan"));
        assert!(lines[2].ends_with(",2.0000000000000000e0"), "{}", lines[2]);
    }

    #[test]
    fn nt_is_second_order_on_smooth_data() {
        let f = burgers();
        let s = SineBurgers::new(0.5, 0.3);
        let t = Study::new(Scheme::nt_default(), &f, &s, 0.8).run(&[32, 64, 128]).unwrap();
        assert!(t.final_order().unwrap() > 1.6, "{t:?}");
    }

    #[test]
    fn fixed_ratio_doubles_the_steps() {
        let f = burgers();
        let s = SineBurgers::new(0.5, 0.3);
        let st = Study::new(Scheme::nt_default(), &f, &s, 1.0).with_dt_over_h(0.5);
        let p0 = st.step_count(0.5, 16, 16);
        assert_eq!(st.step_count(0.5, 64, 16), 4 * p0);
        assert!(2.0 * p0 as f64 * 0.5 * (2.0 * std::f64::consts::PI / 16.0) >= 1.0);
    }

    #[test]
    fn alignment_puts_the_shock_on_a_face() {
        let f = burgers();
        let s = SineBurgers::new(0.5, 0.3);
        let st = Study::new(Scheme::nt_default(), &f, &s, 5.0).aligned_to_shock();
        assert!((st.x_min - (PI + 2.5)).abs() < 1e-12);
        assert!((st.x_max - st.x_min - 2.0 * PI).abs() < 1e-12);
        let smooth = Study::new(Scheme::nt_default(), &f, &s, 1.0).aligned_to_shock();
        assert_eq!(smooth.x_min, 0.0);
    }
}
