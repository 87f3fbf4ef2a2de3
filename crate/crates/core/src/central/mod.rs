//! Central schemes: the staggered Nessyahu–Tadmor predictor-corrector and the
//! semi-discrete Kurganov–Tadmor flux with SSP Runge–Kutta time stepping.

pub mod kt;
pub mod nt;
pub mod ssp;

pub use kt::{kt_flux, kt_flux_with, kt_rhs, kt_rhs_with, KtOptions, local_lax_friedrichs_flux, local_speeds, KtSolver, SpeedEstimate};
pub use nt::{nt_corrector, nt_double_step, nt_predictor, staggered_lax_friedrichs, NtSolver};
pub use ssp::{ssp_rk_step, ssp_rk_step_cells, SspOrder};

use crate::error::{Error, Result};
use crate::flux::FluxModel;
use crate::mesh::CellAverages;

/// Hard stability bound of the staggered scheme: the half-cell cone must stay
/// inside the staggered cell.
pub const NT_CFL_LIMIT: f64 = 0.5;
pub const KT_CFL_LIMIT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CflPolicy {
    pub cfl: f64,
    pub dt_fixed: Option<f64>,
}

impl CflPolicy {
    pub fn nt(cfl: f64) -> Result<Self> {
        Self::checked(cfl, NT_CFL_LIMIT, "NT")
    }

    pub fn kt(cfl: f64) -> Result<Self> {
        Self::checked(cfl, KT_CFL_LIMIT, "KT")
    }

    pub fn nt_default() -> Self {
        Self { cfl: 0.45, dt_fixed: None }
    }

    pub fn kt_default() -> Self {
        Self { cfl: 0.9, dt_fixed: None }
    }

    pub fn with_fixed_dt(self, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("fixed dt = {dt} must be positive")));
        }
        Ok(Self { dt_fixed: Some(dt), ..self })
    }

    fn checked(cfl: f64, limit: f64, scheme: &str) -> Result<Self> {
        if !(cfl > 0.0 && cfl < limit) {
            return Err(Error::InvalidParameter(format!("{scheme} requires 0 < cfl < {limit}, got {cfl}")));
        }
        Ok(Self { cfl, dt_fixed: None })
    }

    /// `dt` with `dt * max_speed <= cfl * h`, or the fixed override.
    pub fn dt(&self, max_speed: f64, h: f64) -> f64 {
        match self.dt_fixed {
            Some(dt) => dt,
            None if max_speed > 0.0 => self.cfl * h / max_speed,
            // nothing moves; any step is stable for the hyperbolic part
            None => self.cfl * h,
        }
    }
}

/// Whether the cells of a state are the original `I_nu` or the staggered
/// `I_{nu+1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StaggerPhase {
    OnGrid,
    Staggered,
}

impl StaggerPhase {
    pub fn toggled(self) -> Self {
        match self {
            StaggerPhase::OnGrid => StaggerPhase::Staggered,
            StaggerPhase::Staggered => StaggerPhase::OnGrid,
        }
    }
}

/// Passed to solver observers after every accepted step.
#[derive(Debug, Clone, Copy)]
pub struct Snapshot<'a> {
    pub step: usize,
    pub time: f64,
    pub dt: f64,
    pub phase: StaggerPhase,
    pub state: &'a CellAverages,
}

/// Largest spectral radius over all cells.
pub fn max_speed(u: &CellAverages, f: &dyn FluxModel) -> Result<f64> {
    let mut a = 0.0f64;
    for i in 0..u.n_cells() {
        a = a.max(f.max_speed(u.cell(i))?);
    }
    Ok(a)
}

/// Rejects `dt` if `dt * a > limit * h` beyond rounding.
pub(crate) fn check_cfl(dt: f64, a: f64, h: f64, limit: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("time step {dt} must be positive")));
    }
    if a > 0.0 && dt * a > limit * h * (1.0 + 1e-12) {
        return Err(Error::CflViolation { dt, limit: limit * h / a });
    }
    Ok(())
}

/// True when `t` is within rounding of `t_final`.
pub(crate) fn reached(t: f64, t_final: f64) -> bool {
    t_final - t <= 1e-13 * t_final.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_bounds() {
        assert!(CflPolicy::nt(0.9).is_err());
        assert!(CflPolicy::nt(0.5).is_err());
        assert!(CflPolicy::nt(0.45).is_ok());
        assert!(CflPolicy::kt(0.9).is_ok());
        assert!(CflPolicy::kt(0.0).is_err());
        let p = CflPolicy::nt_default();
        assert_eq!(p.dt(2.0, 0.1), 0.45 * 0.05);
        assert_eq!(p.with_fixed_dt(1e-3).unwrap().dt(100.0, 0.1), 1e-3);
    }

    #[test]
    fn cfl_check() {
        assert!(check_cfl(0.05, 1.0, 0.1, 0.5).is_ok());
        assert!(matches!(check_cfl(0.06, 1.0, 0.1, 0.5), Err(Error::CflViolation { .. })));
        assert!(check_cfl(-1.0, 1.0, 0.1, 0.5).is_err());
    }
}
