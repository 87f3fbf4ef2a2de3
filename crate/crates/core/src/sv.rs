//! Fourier Galerkin solver for 2π-periodic Burgers, `v_t + (v^2/2)_x = 0`,
//! with optional spectral viscosity on the high modes.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::central::{ssp_rk_step, SspOrder};
use crate::error::{Error, Result};
use crate::spectral::{analyze_with, synthesize_with, CoeffOrigin, FourierProjection};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvConfig {
    pub enabled: bool,
    /// Dissipation order.
    pub s: u32,
    pub beta: f64,
    /// Advective step constant: `dt <= c1 / (N max(1, max|v|))`.
    pub c1: f64,
    /// Viscous step constant: `dt <= c2 / (N^2 max sigma)`.
    pub c2: f64,
    pub dt_fixed: Option<f64>,
}

impl Default for SvConfig {
    fn default() -> Self {
        Self { enabled: true, s: 1, beta: 16.0, c1: 1.0, c2: 0.5, dt_fixed: None }
    }
}

impl SvConfig {
    /// Plain Fourier Galerkin, no added viscosity.
    pub fn galerkin() -> Self {
        Self { enabled: false, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.s == 0 {
            return Err(Error::InvalidParameter("dissipation order s must be positive".into()));
        }
        for (name, v) in [("beta", self.beta), ("c1", self.c1), ("c2", self.c2)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
            }
        }
        if let Some(dt) = self.dt_fixed {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::InvalidParameter(format!("fixed dt = {dt} must be positive")));
            }
        }
        Ok(())
    }

    /// Activation threshold `m_N = floor((beta N^(2s-1))^(1/(2s)))`.
    pub fn activation(&self, n: usize) -> usize {
        let two_s = 2.0 * self.s as f64;
        let m = (self.beta * (n as f64).powf(two_s - 1.0)).powf(1.0 / two_s);
        // guard against pow rounding just below an integer
        (m + 1e-9).floor() as usize
    }

    /// `sigma(|k|/N)`: `(|k|/N)^(2s)` above the threshold, 0 below.
    pub fn sigma(&self, n: usize, k: i64) -> f64 {
        if !self.enabled || n == 0 || k.unsigned_abs() as usize <= self.activation(n) {
            0.0
        } else {
            (k.unsigned_abs() as f64 / n as f64).powi(2 * self.s as i32)
        }
    }

    /// `-N sigma(|k|/N)` for each stored mode.
    fn damping(&self, n: usize) -> Vec<f64> {
        (-(n as i64)..=n as i64).map(|k| -(n as f64) * self.sigma(n, k)).collect()
    }
}

/// Dealiased transforms and the damping table for one mode count.
struct Operator {
    n: usize,
    inverse: Arc<dyn Fft<f64>>,
    forward: Arc<dyn Fft<f64>>,
    collocation: Arc<dyn Fft<f64>>,
    damping: Vec<f64>,
}

impl Operator {
    fn new(n: usize, cfg: &SvConfig) -> Self {
        // 3N+1 points keep the quadratic term alias-free on |k| <= N
        let len = 3 * n + 1;
        let mut planner = FftPlanner::new();
        Self {
            n,
            inverse: planner.plan_fft_inverse(len),
            forward: planner.plan_fft_forward(len),
            collocation: planner.plan_fft_inverse(2 * n + 1),
            damping: cfg.damping(n),
        }
    }

    fn galerkin(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let squares: Vec<Complex64> = synthesize_with(self.inverse.as_ref(), n, coeffs)
            .into_iter()
            .map(|z| Complex64::new(z.re * z.re, 0.0))
            .collect();
        analyze_with(self.forward.as_ref(), squares, n)
            .iter()
            .enumerate()
            .map(|(i, wk)| wk * Complex64::new(0.0, -0.5 * (i as f64 - n as f64)))
            .collect()
    }

    fn viscosity(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        coeffs.iter().zip(&self.damping).map(|(c, d)| c * *d).collect()
    }

    fn full(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut g = self.galerkin(coeffs);
        for ((gk, c), d) in g.iter_mut().zip(coeffs).zip(&self.damping) {
            *gk += c * *d;
        }
        g
    }
}

fn as_projection(n: usize, coeffs: Vec<Complex64>) -> FourierProjection {
    FourierProjection::from_coefficients(n, coeffs, CoeffOrigin::Modal).expect("length preserved")
}

/// `-(ik/2)` times the dealiased modes of `v^2`.
pub fn galerkin_rhs(p: &FourierProjection) -> FourierProjection {
    let op = Operator::new(p.n(), &SvConfig::galerkin());
    as_projection(p.n(), op.galerkin(p.coeffs()))
}

/// Galerkin term minus `N sigma(|k|/N) v_k`.
pub fn sv_rhs(p: &FourierProjection, cfg: &SvConfig) -> FourierProjection {
    as_projection(p.n(), Operator::new(p.n(), cfg).full(p.coeffs()))
}

/// The viscosity term alone.
pub fn sv_term(p: &FourierProjection, cfg: &SvConfig) -> FourierProjection {
    as_projection(p.n(), Operator::new(p.n(), cfg).viscosity(p.coeffs()))
}

/// `d/dt sum |v_k|^2` due to a given time derivative.
pub fn l2_rate(v: &[Complex64], dv: &[Complex64]) -> f64 {
    2.0 * v.iter().zip(dv).map(|(a, b)| (a.conj() * b).re).sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvStep {
    pub step: usize,
    pub time: f64,
    pub dt: f64,
    pub l2: f64,
    /// Contribution of the viscosity term to `d/dt sum |v_k|^2`.
    pub sv_l2_rate: f64,
}

#[derive(Debug, Clone)]
pub struct SvRun {
    pub final_state: FourierProjection,
    /// `(time, state)` at each requested output time.
    pub snapshots: Vec<(f64, FourierProjection)>,
    pub steps: usize,
    pub l2_initial: f64,
    pub max_l2_deviation: f64,
    /// Largest viscosity contribution to the L2 rate over all accepted steps.
    pub max_sv_l2_rate: f64,
}

pub fn sv_evolve(initial: &FourierProjection, cfg: &SvConfig, t_final: f64, output_times: &[f64]) -> Result<SvRun> {
    sv_evolve_with(initial, cfg, t_final, output_times, |_| {})
}

/// SSP-RK3 march to `t_final`, landing exactly on each output time.
pub fn sv_evolve_with(
    initial: &FourierProjection,
    cfg: &SvConfig,
    t_final: f64,
    output_times: &[f64],
    mut observer: impl FnMut(&SvStep),
) -> Result<SvRun> {
    cfg.validate()?;
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_final = {t_final} must be nonnegative")));
    }
    let mut outputs: Vec<f64> = output_times.iter().copied().filter(|t| *t <= t_final).collect();
    if outputs.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::InvalidParameter("output times must be nonnegative".into()));
    }
    outputs.sort_by(f64::total_cmp);
    outputs.dedup();

    let n = initial.n();
    let nf = n.max(1) as f64;
    let mut v = initial.coeffs().to_vec();
    let l2_initial = initial.l2_norm();
    let op = Operator::new(n, cfg);
    let max_sigma = op.damping.iter().fold(0.0f64, |a, d| a.max(-d)) / nf;
    let mut snapshots = Vec::new();
    let mut next_out = 0;
    let mut t = 0.0;
    let mut steps = 0;
    let mut max_dev = 0.0f64;
    let mut max_rate = f64::NEG_INFINITY;
    let snapshot = |v: &[Complex64]| FourierProjection::from_coefficients(n, v.to_vec(), CoeffOrigin::Modal);

    while next_out < outputs.len() && outputs[next_out] <= t {
        snapshots.push((outputs[next_out], snapshot(&v)?));
        next_out += 1;
    }
    while t_final - t > 1e-13 * t_final.max(1.0) {
        let mut dt = match cfg.dt_fixed {
            Some(dt) => dt,
            None => {
                let vmax = synthesize_with(op.collocation.as_ref(), n, &v)
                    .iter()
                    .map(|z| z.re.abs())
                    .fold(0.0, f64::max);
                let mut dt = cfg.c1 / (nf * vmax.max(1.0));
                if max_sigma > 0.0 {
                    dt = dt.min(cfg.c2 / (nf * nf * max_sigma));
                }
                dt
            }
        };
        let stop = if next_out < outputs.len() { outputs[next_out] } else { t_final };
        dt = dt.min(stop - t);

        let rate = l2_rate(&v, &op.viscosity(&v));
        max_rate = max_rate.max(rate);

        v = ssp_rk_step(&v, dt, SspOrder::Three, |w: &[Complex64]| Ok(op.full(w)))?;
        t = if (stop - (t + dt)).abs() <= 1e-13 * stop.max(1.0) { stop } else { t + dt };
        steps += 1;

        let current = snapshot(&v)?;
        let l2 = current.l2_norm();
        if !l2.is_finite() || (l2_initial > 0.0 && l2 > 10.0 * l2_initial) {
            return Err(Error::Instability { time: t, norm: l2, initial: l2_initial });
        }
        max_dev = max_dev.max((l2 - l2_initial).abs());
        observer(&SvStep { step: steps, time: t, dt, l2, sv_l2_rate: rate });
        while next_out < outputs.len() && outputs[next_out] <= t {
            snapshots.push((outputs[next_out], current.clone()));
            next_out += 1;
        }
    }
    Ok(SvRun {
        final_state: snapshot(&v)?,
        snapshots,
        steps,
        l2_initial,
        max_l2_deviation: max_dev,
        max_sv_l2_rate: if steps == 0 { 0.0 } else { max_rate },
    })
}
