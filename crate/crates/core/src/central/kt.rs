//! Semi-discrete central scheme with one-sided local speeds.

use super::ssp::{ssp_rk_step, SspOrder};
use super::{check_cfl, max_speed, reached, CflPolicy, Snapshot, StaggerPhase, KT_CFL_LIMIT};
use crate::error::{Error, Result};
use crate::flux::{DiffusionModel, FluxModel};
use crate::mesh::{reconstruct_with, Boundary, CellAverages, Limiter};

/// `(a_minus <= 0, a_plus >= 0)` bounding the wave speeds of both interface
/// states.
pub fn local_speeds(v_minus: &[f64], v_plus: &[f64], f: &dyn FluxModel) -> Result<(f64, f64)> {
    let (lo_m, hi_m) = f.wave_speeds(v_minus)?;
    let (lo_p, hi_p) = f.wave_speeds(v_plus)?;
    Ok((lo_m.min(lo_p).min(0.0), hi_m.max(hi_p).max(0.0)))
}

/// How the interface speeds enter the numerical flux.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpeedEstimate {
    /// Separate one-sided speeds `a-`, `a+`.
    #[default]
    OneSided,
    /// Symmetric `a = max(a+, -a-)`, giving a local Lax–Friedrichs type flux.
    Symmetric,
}

/// Numerical flux at one interface. `scratch` holds `2m` values.
fn flux_into(
    v_minus: &[f64],
    v_plus: &[f64],
    f: &dyn FluxModel,
    speeds: SpeedEstimate,
    scratch: &mut [f64],
    out: &mut [f64],
) -> Result<f64> {
    let m = v_minus.len();
    let (f_m, f_p) = scratch.split_at_mut(m);
    f.flux(v_minus, f_m)?;
    f.flux(v_plus, f_p)?;
    let (mut am, mut ap) = local_speeds(v_minus, v_plus, f)?;
    if speeds == SpeedEstimate::Symmetric {
        ap = ap.max(-am);
        am = -ap;
    }
    let width = ap - am;
    if width == 0.0 {
        for c in 0..m {
            out[c] = 0.5 * (f_m[c] + f_p[c]);
        }
        return Ok(0.0);
    }
    // algebraically equal to (a+ f- - a- f+)/(a+ - a-) + a+ a- (v+ - v-)/(a+ - a-),
    // arranged so that equal states give f(u) exactly
    let skew = 0.5 * (ap + am) / width;
    let visc = ap * am / width;
    for c in 0..m {
        out[c] = 0.5 * (f_m[c] + f_p[c]) + skew * (f_m[c] - f_p[c]) + visc * (v_plus[c] - v_minus[c]);
    }
    Ok(ap.max(-am))
}

pub fn kt_flux(v_minus: &[f64], v_plus: &[f64], f: &dyn FluxModel) -> Result<Vec<f64>> {
    kt_flux_with(v_minus, v_plus, f, SpeedEstimate::OneSided)
}

pub fn kt_flux_with(v_minus: &[f64], v_plus: &[f64], f: &dyn FluxModel, speeds: SpeedEstimate) -> Result<Vec<f64>> {
    let m = f.components();
    if v_minus.len() != m || v_plus.len() != m {
        return Err(Error::InvalidData(format!("interface states must have {m} components")));
    }
    let mut scratch = vec![0.0; 2 * m];
    let mut out = vec![0.0; m];
    flux_into(v_minus, v_plus, f, speeds, &mut scratch, &mut out)?;
    Ok(out)
}

/// `(f(ul) + f(ur))/2 - a/2 (ur - ul)` with `a` the largest local speed.
pub fn local_lax_friedrichs_flux(ul: &[f64], ur: &[f64], f: &dyn FluxModel) -> Result<Vec<f64>> {
    let fl = f.flux_vec(ul)?;
    let fr = f.flux_vec(ur)?;
    let (am, ap) = local_speeds(ul, ur, f)?;
    let a = ap.max(-am);
    Ok((0..fl.len()).map(|c| 0.5 * (fl[c] + fr[c]) - 0.5 * a * (ur[c] - ul[c])).collect())
}

/// Scheme options besides the flux itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KtOptions {
    pub limiter: Limiter,
    pub speeds: SpeedEstimate,
}

impl Default for KtOptions {
    fn default() -> Self {
        Self { limiter: Limiter::default(), speeds: SpeedEstimate::OneSided }
    }
}

/// Semi-discrete right-hand side plus the largest interface speed seen.
fn rhs_and_speed(
    u: &CellAverages,
    f: &dyn FluxModel,
    diffusion: Option<&dyn DiffusionModel>,
    opts: KtOptions,
) -> Result<(Vec<f64>, f64)> {
    let r = reconstruct_with(u, opts.limiter)?;
    let grid = u.grid();
    let n = grid.n_cells();
    let m = u.components();
    let h = grid.h();
    let faces = match grid.boundary() {
        Boundary::Periodic => n,
        Boundary::ZeroGradient => n + 1,
    };
    let mut h_face = vec![0.0; faces * m];
    let mut vm = vec![0.0; m];
    let mut vp = vec![0.0; m];
    let mut scratch = vec![0.0; 2 * m];
    let mut a_max = 0.0f64;
    for j in 0..faces {
        r.face_states_into(j, &mut vm, &mut vp);
        let a = flux_into(&vm, &vp, f, opts.speeds, &mut scratch, &mut h_face[j * m..(j + 1) * m])?;
        a_max = a_max.max(a);
    }
    if let Some(q) = diffusion {
        let v = u.values();
        for j in 0..faces {
            // ghost cells copy the boundary cell, so boundary gradients vanish
            let (l, rr) = match grid.boundary() {
                Boundary::Periodic => ((j + n - 1) % n, j),
                Boundary::ZeroGradient => (j.saturating_sub(1), j.min(n - 1)),
            };
            for c in 0..m {
                h_face[j * m + c] -= q.q((v[rr * m + c] - v[l * m + c]) / h);
            }
        }
    }
    let mut out = vec![0.0; n * m];
    for i in 0..n {
        let right = match grid.boundary() {
            Boundary::Periodic => (i + 1) % n,
            Boundary::ZeroGradient => i + 1,
        };
        for c in 0..m {
            out[i * m + c] = -(h_face[right * m + c] - h_face[i * m + c]) / h;
        }
    }
    Ok((out, a_max))
}

/// `-(H_{nu+1/2} - H_{nu-1/2})/h`, plus `(Q_{nu+1/2} - Q_{nu-1/2})/h` when a
/// diffusion model is given.
pub fn kt_rhs(u: &CellAverages, f: &dyn FluxModel, diffusion: Option<&dyn DiffusionModel>) -> Result<Vec<f64>> {
    Ok(rhs_and_speed(u, f, diffusion, KtOptions::default())?.0)
}

pub fn kt_rhs_with(
    u: &CellAverages,
    f: &dyn FluxModel,
    diffusion: Option<&dyn DiffusionModel>,
    opts: KtOptions,
) -> Result<Vec<f64>> {
    Ok(rhs_and_speed(u, f, diffusion, opts)?.0)
}

#[derive(Clone, Copy)]
pub struct KtSolver<'a> {
    pub flux: &'a dyn FluxModel,
    pub diffusion: Option<&'a dyn DiffusionModel>,
    pub policy: CflPolicy,
    pub order: SspOrder,
    pub options: KtOptions,
}

impl<'a> KtSolver<'a> {
    pub fn new(flux: &'a dyn FluxModel, policy: CflPolicy) -> Self {
        Self { flux, diffusion: None, policy, order: SspOrder::Two, options: KtOptions::default() }
    }

    pub fn with_diffusion(self, diffusion: &'a dyn DiffusionModel) -> Self {
        Self { diffusion: Some(diffusion), ..self }
    }

    pub fn with_order(self, order: SspOrder) -> Self {
        Self { order, ..self }
    }

    pub fn with_options(self, options: KtOptions) -> Self {
        Self { options, ..self }
    }

    pub fn rhs(&self, u: &CellAverages) -> Result<Vec<f64>> {
        Ok(rhs_and_speed(u, self.flux, self.diffusion, self.options)?.0)
    }

    /// Largest stable step for the current state: hyperbolic CFL and, with
    /// diffusion, `dt <= 0.25 h^2 / max q'`.
    pub fn stable_dt(&self, u: &CellAverages) -> Result<f64> {
        let h = u.grid().h();
        let mut dt = self.policy.dt(max_speed(u, self.flux)?, h);
        if let (Some(q), None) = (self.diffusion, self.policy.dt_fixed) {
            dt = dt.min(0.25 * h * h / q.max_derivative());
        }
        Ok(dt)
    }

    pub fn step(&self, u: &CellAverages, dt: f64) -> Result<CellAverages> {
        let h = u.grid().h();
        check_cfl(dt, max_speed(u, self.flux)?, h, KT_CFL_LIMIT)?;
        let m = u.components();
        let grid = *u.grid();
        let values = ssp_rk_step(u.values(), dt, self.order, |v: &[f64]| {
            let stage = CellAverages::new(grid, m, v.to_vec())?;
            self.rhs(&stage)
        })?;
        CellAverages::new(grid, m, values)
    }

    pub fn evolve(
        &self,
        u: &CellAverages,
        t_final: f64,
        mut observer: impl FnMut(&Snapshot<'_>),
    ) -> Result<CellAverages> {
        if !(t_final >= 0.0 && t_final.is_finite()) {
            return Err(Error::InvalidParameter(format!("t_final = {t_final} must be nonnegative")));
        }
        let mut state = u.clone();
        let mut t = 0.0;
        let mut step = 0;
        while !reached(t, t_final) {
            let dt = self.stable_dt(&state)?.min(t_final - t);
            state = self.step(&state, dt)?;
            t += dt;
            step += 1;
            observer(&Snapshot { step, time: t, dt, phase: StaggerPhase::OnGrid, state: &state });
        }
        Ok(state)
    }

    pub fn evolve_steps(
        &self,
        u: &CellAverages,
        steps: usize,
        mut observer: impl FnMut(&Snapshot<'_>),
    ) -> Result<CellAverages> {
        let mut state = u.clone();
        let mut t = 0.0;
        for step in 1..=steps {
            let dt = self.stable_dt(&state)?;
            state = self.step(&state, dt)?;
            t += dt;
            observer(&Snapshot { step, time: t, dt, phase: StaggerPhase::OnGrid, state: &state });
        }
        Ok(state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::{burgers, euler_1d, linear_advection, saturating_diffusion};
    use crate::mesh::Grid1D;
    use proptest::prelude::*;

    #[test]
    fn local_speed_examples() {
        let b = burgers();
        assert_eq!(local_speeds(&[1.0], &[-1.0], &b).unwrap(), (-1.0, 1.0));
        assert_eq!(local_speeds(&[0.0], &[0.0], &b).unwrap(), (0.0, 0.0));
        let a = linear_advection(1.0).unwrap();
        assert_eq!(local_speeds(&[3.0], &[-8.0], &a).unwrap(), (0.0, 1.0));
    }

    #[test]
    fn flux_examples() {
        let b = burgers();
        assert_eq!(kt_flux(&[1.0], &[-1.0], &b).unwrap(), vec![1.5]);
        assert_eq!(kt_flux(&[0.0], &[0.0], &b).unwrap(), vec![0.0]);
        let a = linear_advection(1.0).unwrap();
        assert_eq!(kt_flux(&[0.0], &[5.0], &a).unwrap(), vec![0.0]);
        assert!(kt_flux(&[1.0, 0.0, -1.0], &[1.0, 0.0, 2.5], &euler_1d(1.4).unwrap()).is_err());
    }

    #[test]
    fn constant_state_has_zero_rhs() {
        let g = Grid1D::periodic(0.0, 1.0, 8).unwrap();
        let e = euler_1d(1.4).unwrap();
        let state: Vec<f64> = (0..8).flat_map(|_| e.conserved(1.0, 0.3, 2.0)).collect();
        let u = CellAverages::new(g, 3, state).unwrap();
        assert!(kt_rhs(&u, &e, None).unwrap().iter().all(|r| r.abs() < 1e-13));
    }

    #[test]
    fn zero_gradient_boundaries_keep_constants() {
        let g = Grid1D::new(0.0, 1.0, 5, Boundary::ZeroGradient).unwrap();
        let u = CellAverages::scalar(g, vec![2.0; 5]).unwrap();
        let q = saturating_diffusion();
        assert!(kt_rhs(&u, &burgers(), Some(&q)).unwrap().iter().all(|r| *r == 0.0));
    }

    #[test]
    fn diffusion_restricts_the_step() {
        let g = Grid1D::periodic(0.0, 1.0, 100).unwrap();
        let u = CellAverages::scalar(g, vec![0.1; 100]).unwrap();
        let b = burgers();
        let q = saturating_diffusion();
        let s = KtSolver::new(&b, CflPolicy::kt_default()).with_diffusion(&q);
        assert_eq!(s.stable_dt(&u).unwrap(), 0.25 * 1e-4);
    }

    proptest! {
        #[test]
        fn consistency(u in -5.0f64..5.0, rho in 0.1f64..5.0, vel in -2.0f64..2.0, p in 0.1f64..5.0) {
            prop_assert_eq!(kt_flux(&[u], &[u], &burgers()).unwrap(), vec![0.5 * u * u]);
            let a = linear_advection(-1.3).unwrap();
            prop_assert_eq!(kt_flux(&[u], &[u], &a).unwrap(), vec![-1.3 * u]);
            let e = euler_1d(1.4).unwrap();
            let s = e.conserved(rho, vel, p);
            let got = kt_flux(&s, &s, &e).unwrap();
            let exact = e.flux_vec(&s).unwrap();
            for (g, x) in got.iter().zip(&exact) {
                prop_assert!((g - x).abs() <= 1e-15 * x.abs().max(1.0));
            }
        }

        #[test]
        fn rhs_sums_to_zero(data in prop::collection::vec(-2.0f64..2.0, 3..40)) {
            let n = data.len();
            let g = Grid1D::periodic(0.0, 1.0, n).unwrap();
            let u = CellAverages::scalar(g, data).unwrap();
            let r = kt_rhs(&u, &burgers(), Some(&saturating_diffusion())).unwrap();
            let scale: f64 = r.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
            prop_assert!(r.iter().sum::<f64>().abs() <= 1e-13 * scale);
        }
    }
}
