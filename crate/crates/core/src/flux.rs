//! Flux functions, wave-speed bounds and the saturating diffusion term.

use crate::error::{Error, Result};

pub trait FluxModel: Send + Sync {
    fn name(&self) -> &'static str;

    fn components(&self) -> usize;

    /// Writes `f(u)` into `out`. Fails on inadmissible states.
    fn flux(&self, u: &[f64], out: &mut [f64]) -> Result<()>;

    /// `(lambda_min, lambda_max)` of the flux Jacobian at `u`.
    fn wave_speeds(&self, u: &[f64]) -> Result<(f64, f64)>;

    fn lambda_min(&self, u: &[f64]) -> Result<f64> {
        Ok(self.wave_speeds(u)?.0)
    }

    fn lambda_max(&self, u: &[f64]) -> Result<f64> {
        Ok(self.wave_speeds(u)?.1)
    }

    /// Spectral radius `max(|lambda_min|, |lambda_max|)`.
    fn max_speed(&self, u: &[f64]) -> Result<f64> {
        let (lo, hi) = self.wave_speeds(u)?;
        Ok(lo.abs().max(hi.abs()))
    }

    /// Convenience allocation wrapper around [`FluxModel::flux`].
    fn flux_vec(&self, u: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.components()];
        self.flux(u, &mut out)?;
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Burgers;

pub fn burgers() -> Burgers {
    Burgers
}

impl FluxModel for Burgers {
    fn name(&self) -> &'static str {
        "burgers"
    }

    fn components(&self) -> usize {
        1
    }

    fn flux(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        out[0] = 0.5 * u[0] * u[0];
        Ok(())
    }

    fn wave_speeds(&self, u: &[f64]) -> Result<(f64, f64)> {
        Ok((u[0], u[0]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearAdvection {
    pub a: f64,
}

pub fn linear_advection(a: f64) -> Result<LinearAdvection> {
    if !a.is_finite() {
        return Err(Error::InvalidParameter(format!("advection speed {a} is not finite")));
    }
    Ok(LinearAdvection { a })
}

impl FluxModel for LinearAdvection {
    fn name(&self) -> &'static str {
        "advection"
    }

    fn components(&self) -> usize {
        1
    }

    fn flux(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        out[0] = self.a * u[0];
        Ok(())
    }

    fn wave_speeds(&self, _u: &[f64]) -> Result<(f64, f64)> {
        Ok((self.a, self.a))
    }
}

/// 1D Euler equations in conserved variables `(rho, rho*u, E)` with an ideal
/// gas law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Euler {
    pub gamma: f64,
}

pub fn euler_1d(gamma: f64) -> Result<Euler> {
    if !(gamma > 1.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} must be > 1")));
    }
    Ok(Euler { gamma })
}

impl Euler {
    /// `(rho, velocity, pressure)` from a conserved state, checking positivity.
    pub fn primitive(&self, u: &[f64]) -> Result<(f64, f64, f64)> {
        let rho = u[0];
        if !(rho > 0.0) {
            return Err(Error::Inadmissible { model: "euler", reason: format!("density {rho} is not positive") });
        }
        let vel = u[1] / rho;
        let p = (self.gamma - 1.0) * (u[2] - 0.5 * rho * vel * vel);
        if !(p > 0.0) {
            return Err(Error::Inadmissible { model: "euler", reason: format!("pressure {p} is not positive") });
        }
        Ok((rho, vel, p))
    }

    pub fn conserved(&self, rho: f64, vel: f64, p: f64) -> [f64; 3] {
        [rho, rho * vel, p / (self.gamma - 1.0) + 0.5 * rho * vel * vel]
    }

    pub fn pressure(&self, u: &[f64]) -> f64 {
        (self.gamma - 1.0) * (u[2] - 0.5 * u[1] * u[1] / u[0])
    }

    pub fn sound_speed(&self, rho: f64, p: f64) -> f64 {
        (self.gamma * p / rho).sqrt()
    }
}

impl FluxModel for Euler {
    fn name(&self) -> &'static str {
        "euler"
    }

    fn components(&self) -> usize {
        3
    }

    fn flux(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        let (_, vel, p) = self.primitive(u)?;
        out[0] = u[1];
        out[1] = u[1] * vel + p;
        out[2] = vel * (u[2] + p);
        Ok(())
    }

    fn wave_speeds(&self, u: &[f64]) -> Result<(f64, f64)> {
        let (rho, vel, p) = self.primitive(u)?;
        let c = self.sound_speed(rho, p);
        Ok((vel - c, vel + c))
    }
}

/// Diffusive flux `q(u_x)` for `u_t + f(u)_x = q(u_x)_x`.
pub trait DiffusionModel: Send + Sync {
    fn q(&self, s: f64) -> f64;

    /// Upper bound on `q'`, for the parabolic time-step restriction.
    fn max_derivative(&self) -> f64;
}

/// `q(s) = s / sqrt(1 + s^2)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SaturatingDiffusion;

pub fn saturating_diffusion() -> SaturatingDiffusion {
    SaturatingDiffusion
}

impl DiffusionModel for SaturatingDiffusion {
    fn q(&self, s: f64) -> f64 {
        if s.abs() > 1e150 {
            // s*s would overflow
            return s.signum();
        }
        s / (1.0 + s * s).sqrt()
    }

    fn max_derivative(&self) -> f64 {
        1.0
    }
}

/// A named flux with optional diffusion, as selected from a run config.
pub struct Model {
    pub flux: Box<dyn FluxModel>,
    pub diffusion: Option<Box<dyn DiffusionModel>>,
}

impl std::fmt::Debug for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Model")
            .field("flux", &self.flux.name())
            .field("diffusion", &self.diffusion.is_some())
            .finish()
    }
}

/// Looks up `burgers | advection | euler | burgers_diffusion`.
pub fn model_by_name(name: &str, advection_speed: f64, gamma: f64) -> Result<Model> {
    let (flux, diffusion): (Box<dyn FluxModel>, Option<Box<dyn DiffusionModel>>) = match name {
        "burgers" => (Box::new(Burgers), None),
        "advection" => (Box::new(linear_advection(advection_speed)?), None),
        "euler" => (Box::new(euler_1d(gamma)?), None),
        "burgers_diffusion" => (Box::new(Burgers), Some(Box::new(SaturatingDiffusion))),
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown model '{other}' (expected burgers, advection, euler or burgers_diffusion)"
            )))
        }
    };
    Ok(Model { flux, diffusion })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn burgers_examples() {
        let f = burgers();
        assert_eq!(f.flux_vec(&[2.0]).unwrap(), vec![2.0]);
        assert_eq!(f.flux_vec(&[0.0]).unwrap(), vec![0.0]);
        assert_eq!(f.lambda_max(&[-3.0]).unwrap(), -3.0);
    }

    #[test]
    fn advection_examples() {
        assert_eq!(linear_advection(1.0).unwrap().flux_vec(&[5.0]).unwrap(), vec![5.0]);
        assert_eq!(linear_advection(0.0).unwrap().flux_vec(&[-7.5]).unwrap(), vec![0.0]);
        assert_eq!(linear_advection(-2.0).unwrap().lambda_min(&[7.0]).unwrap(), -2.0);
        assert!(linear_advection(f64::NAN).is_err());
    }

    #[test]
    fn euler_rest_state() {
        let e = euler_1d(1.4).unwrap();
        let u = e.conserved(1.0, 0.0, 1.0);
        assert_relative_eq!(u[2], 2.5, epsilon = 1e-15);
        let f = e.flux_vec(&u).unwrap();
        assert_relative_eq!(f[0], 0.0);
        assert_relative_eq!(f[1], 1.0, epsilon = 1e-15);
        assert_relative_eq!(f[2], 0.0);
        assert_relative_eq!(e.lambda_max(&u).unwrap(), 1.4f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(e.lambda_max(&u).unwrap(), 1.18322, epsilon = 1e-5);
    }

    #[test]
    fn euler_rejects_bad_states() {
        let e = euler_1d(1.4).unwrap();
        assert!(matches!(e.flux_vec(&[0.0, 0.0, 1.0]), Err(Error::Inadmissible { .. })));
        assert!(matches!(e.flux_vec(&[-1.0, 0.0, 1.0]), Err(Error::Inadmissible { .. })));
        // kinetic energy exceeds total energy
        assert!(e.wave_speeds(&[1.0, 3.0, 1.0]).is_err());
        assert!(euler_1d(1.0).is_err());
    }

    #[test]
    fn saturating_diffusion_examples() {
        let q = saturating_diffusion();
        assert_eq!(q.q(0.0), 0.0);
        assert_relative_eq!(q.q(1.0), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        assert!(q.q(1e6) < 1.0);
        assert_eq!(q.q(1e200), 1.0);
    }

    #[test]
    fn lookup_by_name() {
        for name in ["burgers", "advection", "euler", "burgers_diffusion"] {
            let m = model_by_name(name, 1.0, 1.4).unwrap();
            assert_eq!(m.diffusion.is_some(), name == "burgers_diffusion");
        }
        assert!(model_by_name("mhd", 1.0, 1.4).is_err());
    }

    proptest! {
        #[test]
        fn q_is_odd_and_bounded(s in -1e6f64..1e6) {
            let q = saturating_diffusion();
            prop_assert_eq!(q.q(-s), -q.q(s));
            prop_assert!(q.q(s).abs() < 1.0);
        }

        #[test]
        fn euler_speeds_bracket_velocity(rho in 0.01f64..10.0, vel in -5.0f64..5.0, p in 0.01f64..10.0) {
            let e = euler_1d(1.4).unwrap();
            let u = e.conserved(rho, vel, p);
            let (lo, hi) = e.wave_speeds(&u).unwrap();
            let v = u[1] / u[0];
            prop_assert!(lo <= v && v <= hi);
        }
    }
}
