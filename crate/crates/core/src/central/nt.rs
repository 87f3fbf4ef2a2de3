//! Staggered Nessyahu–Tadmor scheme.
//!
//! One step maps averages on `I_nu` to averages on the staggered cells
//! `I_{nu+1/2}` and the next step maps them back, so steps come in pairs.

use super::{check_cfl, max_speed, reached, CflPolicy, Snapshot, StaggerPhase, NT_CFL_LIMIT};
use crate::error::{Error, Result};
use crate::flux::FluxModel;
use crate::mesh::{limited_differences, reconstruct_with, Boundary, CellAverages, Limiter, PiecewiseLinear};

fn require_periodic(u: &CellAverages) -> Result<()> {
    if u.grid().boundary() != Boundary::Periodic {
        return Err(Error::UnsupportedBoundary("the staggered scheme"));
    }
    Ok(())
}

fn fluxes(u: &[f64], m: usize, f: &dyn FluxModel) -> Result<Vec<f64>> {
    let mut out = vec![0.0; u.len()];
    for (v, fv) in u.chunks_exact(m).zip(out.chunks_exact_mut(m)) {
        f.flux(v, fv)?;
    }
    Ok(out)
}

/// Midpoint values `v - (dt / 2h) f(v)'`, where `f(v)'` is the limited
/// derivative of the flux grid function.
pub fn nt_predictor(u: &CellAverages, f: &dyn FluxModel, dt: f64, limiter: Limiter) -> Result<Vec<f64>> {
    let h = u.grid().h();
    check_cfl(dt, max_speed(u, f)?, h, NT_CFL_LIMIT)?;
    let m = u.components();
    let fv = fluxes(u.values(), m, f)?;
    let fprime = limited_differences(u.grid(), m, &fv, limiter)?;
    let half_lambda = 0.5 * dt / h;
    Ok(u.values().iter().zip(&fprime).map(|(v, d)| v - half_lambda * d).collect())
}

/// Staggered averages from the reconstruction and the midpoint values.
///
/// From `OnGrid` the output cell `nu` covers `[x_nu, x_{nu+1}]`; from
/// `Staggered` it pairs input cells `nu - 1` and `nu`, landing back on the
/// original cells.
pub fn nt_corrector(
    u: &CellAverages,
    slopes: &PiecewiseLinear,
    midpoints: &[f64],
    f: &dyn FluxModel,
    dt: f64,
    phase: StaggerPhase,
) -> Result<CellAverages> {
    require_periodic(u)?;
    let grid = u.grid();
    let m = u.components();
    let n = grid.n_cells();
    if midpoints.len() != n * m || slopes.values().len() != n * m {
        return Err(Error::InvalidData("predictor or slope data does not match the grid".into()));
    }
    let h = grid.h();
    check_cfl(dt, max_speed(u, f)?, h, NT_CFL_LIMIT)?;
    let lam = dt / h;
    let fm = fluxes(midpoints, m, f)?;
    let v = u.values();
    let s = slopes.slopes();
    let (first, shift) = match phase {
        StaggerPhase::OnGrid => (0, 0.5 * h),
        StaggerPhase::Staggered => (n - 1, -0.5 * h),
    };
    let mut out = vec![0.0; n * m];
    for i in 0..n {
        let a = (i + first) % n;
        let b = (a + 1) % n;
        for c in 0..m {
            let (ia, ib) = (a * m + c, b * m + c);
            out[i * m + c] = 0.5 * (v[ia] + v[ib]) + 0.125 * (s[ia] - s[ib]) - lam * (fm[ib] - fm[ia]);
        }
    }
    CellAverages::new(grid.shifted(shift), m, out)
}

/// First-order staggered Lax–Friedrichs step; the staggered scheme with all
/// derivatives switched off.
pub fn staggered_lax_friedrichs(u: &CellAverages, f: &dyn FluxModel, dt: f64, phase: StaggerPhase) -> Result<CellAverages> {
    require_periodic(u)?;
    let grid = u.grid();
    let m = u.components();
    let n = grid.n_cells();
    let h = grid.h();
    check_cfl(dt, max_speed(u, f)?, h, NT_CFL_LIMIT)?;
    let lam = dt / h;
    let v = u.values();
    let fv = fluxes(v, m, f)?;
    let (first, shift) = match phase {
        StaggerPhase::OnGrid => (0, 0.5 * h),
        StaggerPhase::Staggered => (n - 1, -0.5 * h),
    };
    let mut out = vec![0.0; n * m];
    for i in 0..n {
        let a = (i + first) % n;
        let b = (a + 1) % n;
        for c in 0..m {
            let (ia, ib) = (a * m + c, b * m + c);
            out[i * m + c] = 0.5 * (v[ia] + v[ib]) - lam * (fv[ib] - fv[ia]);
        }
    }
    CellAverages::new(grid.shifted(shift), m, out)
}

/// Staggered solver. Each call of [`NtSolver::step`] toggles the phase;
/// [`NtSolver::evolve`] always returns on the original grid.
#[derive(Clone, Copy)]
pub struct NtSolver<'a> {
    pub flux: &'a dyn FluxModel,
    pub policy: CflPolicy,
    pub limiter: Limiter,
}

impl<'a> NtSolver<'a> {
    pub fn new(flux: &'a dyn FluxModel, policy: CflPolicy) -> Self {
        Self { flux, policy, limiter: Limiter::default() }
    }

    pub fn with_limiter(self, limiter: Limiter) -> Self {
        Self { limiter, ..self }
    }

    pub fn step(&self, u: &CellAverages, phase: StaggerPhase, dt: f64) -> Result<CellAverages> {
        let mid = nt_predictor(u, self.flux, dt, self.limiter)?;
        let r = reconstruct_with(u, self.limiter)?;
        nt_corrector(u, &r, &mid, self.flux, dt, phase)
    }

    /// Two steps with a common `dt` chosen from the policy, capped so the pair
    /// does not overshoot `t_remaining`.
    pub fn double_step(&self, u: &CellAverages, t_remaining: Option<f64>) -> Result<(CellAverages, f64)> {
        let mut dt = self.policy.dt(max_speed(u, self.flux)?, u.grid().h());
        if let Some(rem) = t_remaining {
            dt = dt.min(0.5 * rem);
        }
        let half = self.step(u, StaggerPhase::OnGrid, dt)?;
        let back = self.step(&half, StaggerPhase::Staggered, dt)?;
        Ok((back.with_grid(*u.grid()), dt))
    }

    /// Advances to `t_final`, calling `observer` after every single
    /// (staggered or unstaggered) step.
    pub fn evolve(
        &self,
        u: &CellAverages,
        t_final: f64,
        mut observer: impl FnMut(&Snapshot<'_>),
    ) -> Result<CellAverages> {
        require_periodic(u)?;
        if !(t_final >= 0.0 && t_final.is_finite()) {
            return Err(Error::InvalidParameter(format!("t_final = {t_final} must be nonnegative")));
        }
        let mut state = u.clone();
        let mut t = 0.0;
        let mut step = 0;
        while !reached(t, t_final) {
            let dt = self.policy.dt(max_speed(&state, self.flux)?, state.grid().h()).min(0.5 * (t_final - t));
            state = self.pair(state, u, dt, &mut t, &mut step, &mut observer)?;
        }
        Ok(state)
    }

    /// Advances by `pairs` double steps with policy-chosen `dt`.
    pub fn evolve_pairs(
        &self,
        u: &CellAverages,
        pairs: usize,
        mut observer: impl FnMut(&Snapshot<'_>),
    ) -> Result<CellAverages> {
        require_periodic(u)?;
        let mut state = u.clone();
        let mut t = 0.0;
        let mut step = 0;
        for _ in 0..pairs {
            let dt = self.policy.dt(max_speed(&state, self.flux)?, state.grid().h());
            state = self.pair(state, u, dt, &mut t, &mut step, &mut observer)?;
        }
        Ok(state)
    }

    fn pair(
        &self,
        state: CellAverages,
        origin: &CellAverages,
        dt: f64,
        t: &mut f64,
        step: &mut usize,
        observer: &mut impl FnMut(&Snapshot<'_>),
    ) -> Result<CellAverages> {
        let half = self.step(&state, StaggerPhase::OnGrid, dt)?;
        *t += dt;
        *step += 1;
        observer(&Snapshot { step: *step, time: *t, dt, phase: StaggerPhase::Staggered, state: &half });
        let back = self.step(&half, StaggerPhase::Staggered, dt)?.with_grid(*origin.grid());
        *t += dt;
        *step += 1;
        observer(&Snapshot { step: *step, time: *t, dt, phase: StaggerPhase::OnGrid, state: &back });
        Ok(back)
    }
}

/// One staggered-and-back pair with the default minmod limiter.
pub fn nt_double_step(u: &CellAverages, f: &dyn FluxModel, policy: CflPolicy) -> Result<CellAverages> {
    Ok(NtSolver::new(f, policy).double_step(u, None)?.0)
}
