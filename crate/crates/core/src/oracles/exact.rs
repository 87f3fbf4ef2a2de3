//! Exact Burgers solutions used as oracles.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{gauss5, NeumaierSum};

pub trait ExactSolution: Send + Sync {
    fn evaluate(&self, x: f64, t: f64) -> Result<f64>;

    /// Discontinuity positions at time `t` (unwrapped; callers reduce them
    /// modulo the domain period when needed).
    fn shock_locations(&self, t: f64) -> Vec<f64>;

    /// End of the classical (smooth) branch, if the solution has one.
    fn valid_until(&self) -> Option<f64> {
        None
    }

    /// Mean over `[a, b]`, with the quadrature split at shocks.
    fn cell_average(&self, a: f64, b: f64, t: f64, period: Option<f64>) -> Result<f64> {
        let mut cuts = vec![a, b];
        for s in self.shock_locations(t) {
            let mut candidates = vec![s];
            if let Some(p) = period {
                let k = ((a - s) / p).ceil();
                candidates = vec![s + k * p, s + (k - 1.0) * p, s + (k + 1.0) * p];
            }
            cuts.extend(candidates.into_iter().filter(|c| *c > a && *c < b));
        }
        cuts.sort_by(f64::total_cmp);
        let mut acc = NeumaierSum::default();
        let mut err = None;
        for w in cuts.windows(2) {
            acc.add(gauss5(w[0], w[1], |x| match self.evaluate(x, t) {
                Ok(v) => v,
                Err(e) => {
                    err.get_or_insert(e);
                    f64::NAN
                }
            }));
        }
        match err {
            Some(e) => Err(e),
            None => Ok(acc.value() / (b - a)),
        }
    }
}

/// Smooth initial profile with the bounds the characteristics solver needs.
pub trait Profile: Send + Sync {
    fn value(&self, x: f64) -> f64;
    fn slope(&self, x: f64) -> f64;
    /// `(min u0, max u0)`.
    fn range(&self) -> (f64, f64);
    fn min_slope(&self) -> f64;

    /// `t* = -1 / min u0'`, infinite when no characteristics cross.
    fn breakdown_time(&self) -> f64 {
        let m = self.min_slope();
        if m < 0.0 {
            -1.0 / m
        } else {
            f64::INFINITY
        }
    }
}

/// `u0(x) = a + b sin x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineProfile {
    pub a: f64,
    pub b: f64,
}

impl Profile for SineProfile {
    fn value(&self, x: f64) -> f64 {
        self.a + self.b * x.sin()
    }

    fn slope(&self, x: f64) -> f64 {
        self.b * x.cos()
    }

    fn range(&self) -> (f64, f64) {
        (self.a - self.b.abs(), self.a + self.b.abs())
    }

    fn min_slope(&self) -> f64 {
        -self.b.abs()
    }
}

/// Solves `u = u0(x - u t)` by Newton's method safeguarded with bisection.
pub fn burgers_characteristics(u0: &dyn Profile, x: f64, t: f64) -> Result<f64> {
    let breakdown = u0.breakdown_time();
    if t >= breakdown {
        return Err(Error::Breakdown { t, breakdown });
    }
    if t == 0.0 {
        return Ok(u0.value(x));
    }
    let g = |u: f64| u - u0.value(x - u * t);
    let (mut lo, mut hi) = u0.range();
    if lo == hi {
        return Ok(lo);
    }
    // g is increasing for t < t*, and g(lo) <= 0 <= g(hi)
    let mut u = 0.5 * (lo + hi);
    for _ in 0..200 {
        let r = g(u);
        if r.abs() <= 1e-13 {
            return Ok(u);
        }
        if r < 0.0 {
            lo = u;
        } else {
            hi = u;
        }
        let dg = 1.0 + t * u0.slope(x - u * t);
        let newton = u - r / dg;
        u = if dg > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo <= 1e-15 * hi.abs().max(1.0) {
            return Ok(u);
        }
    }
    Err(Error::OracleFailure(format!("characteristics at x = {x}, t = {t} did not converge")))
}

/// Smooth solution through characteristics; fails past breakdown.
pub struct Characteristics<P: Profile> {
    pub profile: P,
}

impl<P: Profile> ExactSolution for Characteristics<P> {
    fn evaluate(&self, x: f64, t: f64) -> Result<f64> {
        burgers_characteristics(&self.profile, x, t)
    }

    fn shock_locations(&self, _t: f64) -> Vec<f64> {
        Vec::new()
    }

    fn valid_until(&self) -> Option<f64> {
        Some(self.profile.breakdown_time())
    }
}

/// Entropy solution for `u0 = a + b sin x`, valid before and after the shock
/// forms. A Galilean shift reduces it to `b sin x`, whose shock sits at `π`
/// by symmetry once `|b| t > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineBurgers {
    pub a: f64,
    pub b: f64,
}

impl SineBurgers {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    pub fn breakdown_time(&self) -> f64 {
        SineProfile { a: self.a, b: self.b }.breakdown_time()
    }

    /// Solution of `w_t + w w_x = 0`, `w(y, 0) = sin y`.
    fn unit_wave(y: f64, tau: f64) -> f64 {
        let y = (y + PI).rem_euclid(2.0 * PI) - PI;
        if tau == 0.0 {
            return y.sin();
        }
        let target = y.abs();
        if target >= PI {
            // on the shock itself; by symmetry the average of the two sides
            return 0.0;
        }
        let mut lo = 0.0;
        let mut hi = if tau <= 1.0 { PI } else { (-1.0 / tau).acos() };
        // xi + tau sin xi is increasing on [lo, hi] and brackets target
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid + tau * mid.sin() < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-16 {
                break;
            }
        }
        y.signum() * (0.5 * (lo + hi)).sin()
    }
}

impl ExactSolution for SineBurgers {
    fn evaluate(&self, x: f64, t: f64) -> Result<f64> {
        if self.b == 0.0 {
            return Ok(self.a);
        }
        // b sin y = |b| sin(y + π) for b < 0
        let shift = if self.b < 0.0 { PI } else { 0.0 };
        Ok(self.a + self.b.abs() * Self::unit_wave(x - self.a * t + shift, self.b.abs() * t))
    }

    fn shock_locations(&self, t: f64) -> Vec<f64> {
        if self.b == 0.0 || self.b.abs() * t <= 1.0 {
            return Vec::new();
        }
        let base = if self.b > 0.0 { PI } else { 0.0 };
        vec![base + self.a * t]
    }
}

/// Entropy solution of the Riemann problem centered at `x = 0`.
pub fn burgers_riemann(u_left: f64, u_right: f64, x: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("Riemann solution needs t > 0, got {t}")));
    }
    let xi = x / t;
    if u_left > u_right {
        let s = 0.5 * (u_left + u_right);
        Ok(if xi < s { u_left } else { u_right })
    } else if xi <= u_left {
        Ok(u_left)
    } else if xi >= u_right {
        Ok(u_right)
    } else {
        Ok(xi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannBurgers {
    pub u_left: f64,
    pub u_right: f64,
    pub x0: f64,
}

impl ExactSolution for RiemannBurgers {
    fn evaluate(&self, x: f64, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(if x < self.x0 { self.u_left } else { self.u_right });
        }
        burgers_riemann(self.u_left, self.u_right, x - self.x0, t)
    }

    fn shock_locations(&self, t: f64) -> Vec<f64> {
        if self.u_left > self.u_right {
            vec![self.x0 + 0.5 * (self.u_left + self.u_right) * t]
        } else {
            Vec::new()
        }
    }
}
