//! Reconstruction of piecewise-smooth data from its Fourier modes: the
//! adaptive mollifier and the adaptive filter, both driven by the distance to
//! the nearest detected edge.

use std::f64::consts::PI;

use super::{wrap, CoeffOrigin, EdgeReport, FourierProjection};
use crate::error::{Error, Result};

/// Periodic distance to the nearest edge, capped.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceFunction {
    edges: Vec<f64>,
    cap: f64,
}

impl DistanceFunction {
    pub fn new(edges: Vec<f64>, cap: f64) -> Result<Self> {
        if !(cap > 0.0 && cap <= PI) {
            return Err(Error::InvalidParameter(format!("distance cap {cap} must lie in (0, π]")));
        }
        if edges.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidData("edge locations must be finite".into()));
        }
        Ok(Self { edges: edges.into_iter().map(wrap).collect(), cap })
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.edges.iter().map(|e| wrap(x - e).abs()).fold(self.cap, f64::min)
    }
}

pub fn distance_function(report: &EdgeReport) -> DistanceFunction {
    DistanceFunction { edges: report.locations(), cap: PI }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifierParams {
    /// Localizer `rho(y) = exp(beta y^2 / (y^2 - 1))`.
    pub beta: f64,
    /// Dirichlet degree `p = max(1, floor(c_p d N))`.
    pub c_p: f64,
    /// Quadrature oversampling for exact modes.
    pub oversample: usize,
}

impl Default for MollifierParams {
    fn default() -> Self {
        Self { beta: 4.0, c_p: 0.15, oversample: 16 }
    }
}

impl MollifierParams {
    /// Narrower passband for viscous spectral solutions, whose high modes are
    /// damped rather than exact.
    pub fn viscous() -> Self {
        Self { c_p: 0.05, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("mollifier beta = {} must be positive", self.beta)));
        }
        if !(self.c_p > 0.0 && self.c_p.is_finite()) {
            return Err(Error::InvalidParameter(format!("mollifier c_p = {} must be positive", self.c_p)));
        }
        if self.oversample == 0 {
            return Err(Error::InvalidParameter("mollifier oversampling must be at least 1".into()));
        }
        Ok(())
    }
}

fn localizer(beta: f64, y: f64) -> f64 {
    let y2 = y * y;
    if y2 >= 1.0 {
        0.0
    } else {
        (beta * y2 / (y2 - 1.0)).exp()
    }
}

/// `sin((p + 1/2) π y) / (2 sin(π y / 2))`, equal to `p + 1/2` at `y = 0`.
fn dirichlet(p: usize, y: f64) -> f64 {
    let s = (0.5 * PI * y).sin();
    if s.abs() < 1e-14 {
        p as f64 + 0.5
    } else {
        ((p as f64 + 0.5) * PI * y).sin() / (2.0 * s)
    }
}

/// Mollifier bound to one projection, holding its quadrature samples.
#[derive(Debug, Clone)]
pub struct Mollifier<'a> {
    projection: &'a FourierProjection,
    params: MollifierParams,
    samples: Vec<f64>,
    spacing: f64,
}

impl<'a> Mollifier<'a> {
    /// Sampled data is integrated on its own collocation points; exact modes
    /// are first evaluated on an oversampled grid.
    pub fn new(projection: &'a FourierProjection, params: MollifierParams) -> Result<Self> {
        params.validate()?;
        let factor = match projection.origin() {
            CoeffOrigin::Collocation => 1,
            CoeffOrigin::Modal => params.oversample,
        };
        let samples = projection.oversampled(factor);
        let spacing = 2.0 * PI / samples.len() as f64;
        Ok(Self { projection, params, samples, spacing })
    }

    /// `<Psi(x - .), v>` with `Psi(y) = rho(y/d) D_p(y/d)` normalized to unit
    /// mass on the quadrature grid.
    pub fn at(&self, x: f64, d: f64) -> Result<f64> {
        if !(d > 0.0) {
            return Err(Error::AtEdge(x));
        }
        let theta = d.min(PI);
        let p = ((self.params.c_p * d * self.projection.n() as f64).floor() as usize).max(1);
        let len = self.samples.len() as i64;
        let j0 = ((x - theta + PI) / self.spacing).ceil() as i64;
        let j1 = ((x + theta + PI) / self.spacing).floor() as i64;
        let (mut num, mut mass) = (0.0, 0.0);
        for j in j0..=j1 {
            let y = (x - (-PI + j as f64 * self.spacing)) / theta;
            let w = localizer(self.params.beta, y) * dirichlet(p, y);
            if w != 0.0 {
                num += w * self.samples[j.rem_euclid(len) as usize];
                mass += w;
            }
        }
        if mass == 0.0 {
            // support narrower than the quadrature spacing
            return Ok(self.projection.evaluate(x));
        }
        Ok(num / mass)
    }

    pub fn apply(&self, xs: &[f64], d: &DistanceFunction) -> Result<Vec<f64>> {
        xs.iter().map(|&x| self.at(x, d.eval(x))).collect()
    }
}

pub fn adaptive_mollify(p: &FourierProjection, d: &DistanceFunction, x: f64, params: MollifierParams) -> Result<f64> {
    Mollifier::new(p, params)?.at(x, d.eval(x))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterParams {
    pub beta: f64,
    /// Degree exponent: `p ~ (c_f d N)^(r/(r+1))`.
    pub r: f64,
    pub c_f: f64,
}

impl Default for FilterParams {
    fn default() -> Self {
        Self { beta: 1.0, r: 2.0, c_f: 1.0 }
    }
}

/// `exp(beta xi^p / (xi^2 - 1))`, 1 at the origin and 0 from `xi = 1` on.
pub fn filter_profile(beta: f64, p: i32, xi: f64) -> f64 {
    if xi >= 1.0 {
        0.0
    } else {
        (beta * xi.powi(p) / (xi * xi - 1.0)).exp()
    }
}

pub fn filter_degree(params: &FilterParams, d: f64, n: usize) -> i32 {
    let e = params.r / (params.r + 1.0);
    ((params.c_f * d * n as f64).powf(e).round() as i32).max(2)
}

/// `sum_k sigma_p(|k|/N) v_k e^{ikx}` with the degree chosen from `d(x)`.
pub fn adaptive_filter(p: &FourierProjection, d: &DistanceFunction, x: f64, params: FilterParams) -> Result<f64> {
    if !(params.beta > 0.0 && params.r > 0.0 && params.c_f > 0.0) {
        return Err(Error::InvalidParameter("filter beta, r and c_f must be positive".into()));
    }
    let dist = d.eval(x);
    if !(dist > 0.0) {
        return Err(Error::AtEdge(x));
    }
    let n = p.n();
    if n == 0 {
        return Ok(p.coeff(0).re);
    }
    let deg = filter_degree(&params, dist, n);
    let nf = n as f64;
    let mut acc = 0.0;
    for (k, c) in p.modes() {
        let s = filter_profile(params.beta, deg, k.unsigned_abs() as f64 / nf);
        if s != 0.0 {
            acc += s * (c * rustfft::num_complex::Complex64::from_polar(1.0, k as f64 * x)).re;
        }
    }
    Ok(acc)
}
