//! `key = value` run configuration.
//!
//! Lines are `key = value`; `#` starts a comment. Unknown keys, malformed
//! values and violated constraints are reported with the offending line.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::str::FromStr;

use crate::central::{KT_CFL_LIMIT, NT_CFL_LIMIT};
use crate::error::{Error, Result};
use crate::mesh::Boundary;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    DetectEdges,
    Mollify,
    Convergence,
    Battery,
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "solve" => Command::Solve,
            "detect-edges" => Command::DetectEdges,
            "mollify" => Command::Mollify,
            "convergence" => Command::Convergence,
            "battery" => Command::Battery,
            _ => return Err(format!("unknown subcommand '{s}'")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Nt,
    Kt,
    Sv,
    Galerkin,
}

impl Method {
    pub fn is_spectral(self) -> bool {
        matches!(self, Method::Sv | Method::Galerkin)
    }

    pub fn default_cfl(self) -> f64 {
        match self {
            Method::Nt => 0.45,
            _ => 0.9,
        }
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "nt" => Method::Nt,
            "kt" => Method::Kt,
            "sv" => Method::Sv,
            "galerkin" => Method::Galerkin,
            _ => return Err(format!("unknown method '{s}' (expected nt, kt, sv or galerkin)")),
        })
    }
}

/// Initial data families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Initial {
    /// `sine_a + sine_b sin x`.
    Sine,
    /// 1 on the middle half of the domain, 0 elsewhere.
    Square,
    /// Indicator of `|x| < π/2` on `[-π, π)`.
    Step,
    /// `-sgn(x) cos(x + x sgn(x)/2)` on `[-π, π)`.
    EdgeTest,
    /// `u_left` / `u_right` split at `x0`.
    Riemann,
    /// Sod shock tube, Euler only.
    Sod,
}

impl FromStr for Initial {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "sine" => Initial::Sine,
            "square" => Initial::Square,
            "step" => Initial::Step,
            "edge_test" => Initial::EdgeTest,
            "riemann" => Initial::Riemann,
            "sod" => Initial::Sod,
            _ => return Err(format!("unknown initial data '{s}' (expected sine, square, step, edge_test, riemann or sod)")),
        })
    }
}

fn parse_boundary(s: &str) -> std::result::Result<Boundary, String> {
    match s {
        "periodic" => Ok(Boundary::Periodic),
        "zero_gradient" => Ok(Boundary::ZeroGradient),
        _ => Err(format!("unknown boundary '{s}' (expected periodic or zero_gradient)")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Origin {
    Line(usize),
    Override,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub model: String,
    pub method: Method,
    pub advection_speed: f64,
    pub gamma: f64,
    pub n_cells: usize,
    /// Fourier modes `N` for the spectral commands.
    pub modes: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub boundary: Boundary,
    pub initial: Initial,
    pub sine_a: f64,
    pub sine_b: f64,
    pub u_left: f64,
    pub u_right: f64,
    pub x0: f64,
    pub t_final: f64,
    pub cfl: Option<f64>,
    pub dt: Option<f64>,
    pub limiter_theta: f64,
    pub rk_order: u32,
    pub output_times: Vec<f64>,
    pub sv_beta: f64,
    pub sv_s: u32,
    pub sv_c1: f64,
    pub sv_c2: f64,
    pub edge_threshold: f64,
    pub mollifier_beta: f64,
    pub mollifier_cp: f64,
    pub mollifier_oversample: usize,
    pub resolutions: Vec<usize>,
    pub exclusion_cells: f64,
    pub dt_over_h: Option<f64>,
    pub align_shock: bool,
    pub output: Option<PathBuf>,
    origins: HashMap<&'static str, Origin>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            model: "burgers".into(),
            method: Method::Nt,
            advection_speed: 1.0,
            gamma: 1.4,
            n_cells: 400,
            modes: 128,
            x_min: 0.0,
            x_max: 2.0 * PI,
            boundary: Boundary::Periodic,
            initial: Initial::Sine,
            sine_a: 0.5,
            sine_b: 0.3,
            u_left: 1.0,
            u_right: 0.0,
            x0: PI,
            t_final: 1.0,
            cfl: None,
            dt: None,
            limiter_theta: 1.0,
            rk_order: 2,
            output_times: Vec::new(),
            sv_beta: 16.0,
            sv_s: 1,
            sv_c1: 1.0,
            sv_c2: 0.5,
            edge_threshold: 0.1,
            mollifier_beta: 4.0,
            mollifier_cp: 0.15,
            mollifier_oversample: 16,
            resolutions: vec![64, 128, 256, 512],
            exclusion_cells: 5.0,
            dt_over_h: None,
            align_shock: false,
            output: None,
            origins: HashMap::new(),
        }
    }
}

/// Every accepted key, in the order shown by `--help`.
pub const KEYS: &[&str] = &[
    "subcommand",
    "model",
    "method",
    "advection_speed",
    "gamma",
    "n_cells",
    "N",
    "x_min",
    "x_max",
    "boundary",
    "initial",
    "sine_a",
    "sine_b",
    "u_left",
    "u_right",
    "x0",
    "t_final",
    "cfl",
    "dt",
    "limiter_theta",
    "rk_order",
    "output_times",
    "sv_beta",
    "sv_s",
    "sv_c1",
    "sv_c2",
    "edge_threshold",
    "mollifier_beta",
    "mollifier_cp",
    "mollifier_oversample",
    "resolutions",
    "exclusion_cells",
    "dt_over_h",
    "align_shock",
    "output",
];

fn num<T: FromStr>(v: &str) -> std::result::Result<T, String> {
    v.parse().map_err(|_| format!("cannot parse '{v}' as a number"))
}

fn real(v: &str) -> std::result::Result<f64, String> {
    let x: f64 = num(v)?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("'{v}' is not finite"))
    }
}

fn list<T: FromStr>(v: &str) -> std::result::Result<Vec<T>, String> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(num).collect()
}

fn flag(v: &str) -> std::result::Result<bool, String> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected true or false, got '{v}'")),
    }
}

impl RunConfig {
    /// Sets one key; the message names the problem without the location.
    fn set(&mut self, key: &str, value: &str) -> std::result::Result<&'static str, String> {
        let key: &'static str = KEYS.iter().copied().find(|k| *k == key).ok_or_else(|| format!("unknown key '{key}'"))?;
        match key {
            "subcommand" => self.command = Some(value.parse()?),
            "model" => self.model = value.to_string(),
            "method" => self.method = value.parse()?,
            "advection_speed" => self.advection_speed = real(value)?,
            "gamma" => self.gamma = real(value)?,
            "n_cells" => self.n_cells = num(value)?,
            "N" => self.modes = num(value)?,
            "x_min" => self.x_min = real(value)?,
            "x_max" => self.x_max = real(value)?,
            "boundary" => self.boundary = parse_boundary(value)?,
            "initial" => self.initial = value.parse()?,
            "sine_a" => self.sine_a = real(value)?,
            "sine_b" => self.sine_b = real(value)?,
            "u_left" => self.u_left = real(value)?,
            "u_right" => self.u_right = real(value)?,
            "x0" => self.x0 = real(value)?,
            "t_final" => self.t_final = real(value)?,
            "cfl" => self.cfl = Some(real(value)?),
            "dt" => self.dt = Some(real(value)?),
            "limiter_theta" => self.limiter_theta = real(value)?,
            "rk_order" => self.rk_order = num(value)?,
            "output_times" => self.output_times = list(value)?,
            "sv_beta" => self.sv_beta = real(value)?,
            "sv_s" => self.sv_s = num(value)?,
            "sv_c1" => self.sv_c1 = real(value)?,
            "sv_c2" => self.sv_c2 = real(value)?,
            "edge_threshold" => self.edge_threshold = real(value)?,
            "mollifier_beta" => self.mollifier_beta = real(value)?,
            "mollifier_cp" => self.mollifier_cp = real(value)?,
            "mollifier_oversample" => self.mollifier_oversample = num(value)?,
            "resolutions" => self.resolutions = list(value)?,
            "exclusion_cells" => self.exclusion_cells = real(value)?,
            "dt_over_h" => self.dt_over_h = Some(real(value)?),
            "align_shock" => self.align_shock = flag(value)?,
            "output" => self.output = Some(PathBuf::from(value)),
            _ => unreachable!("every listed key is handled"),
        }
        Ok(key)
    }

    fn error_for(&self, key: &str, message: String) -> Error {
        match self.origins.get(key) {
            Some(Origin::Line(line)) => Error::Config { line: *line, message },
            Some(Origin::Override) => Error::InvalidParameter(format!("override of {key}: {message}")),
            None => Error::InvalidParameter(format!("{key}: {message}")),
        }
    }

    /// Applies a `key=value` override and revalidates.
    pub fn apply_override(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("override '{kv}' is not key=value")))?;
        let key = self.set(k.trim(), v.trim()).map_err(|m| Error::InvalidParameter(format!("override '{kv}': {m}")))?;
        self.origins.insert(key, Origin::Override);
        self.validate()
    }

    pub fn cfl_or_default(&self) -> f64 {
        self.cfl.unwrap_or_else(|| self.method.default_cfl())
    }

    /// Cross-field checks against the solver preconditions.
    pub fn validate(&self) -> Result<()> {
        let fail = |key: &str, msg: String| Err(self.error_for(key, msg));
        if let Some(cfl) = self.cfl {
            match self.method {
                Method::Nt if !(cfl > 0.0 && cfl < NT_CFL_LIMIT) => {
                    return fail("cfl", format!("method nt requires 0 < cfl < {NT_CFL_LIMIT}, got {cfl}"));
                }
                Method::Kt if !(cfl > 0.0 && cfl < KT_CFL_LIMIT) => {
                    return fail("cfl", format!("method kt requires 0 < cfl < {KT_CFL_LIMIT}, got {cfl}"));
                }
                _ => {}
            }
        }
        if !["burgers", "advection", "euler", "burgers_diffusion"].contains(&self.model.as_str()) {
            return fail(
                "model",
                format!("unknown model '{}' (expected burgers, advection, euler or burgers_diffusion)", self.model),
            );
        }
        if self.method.is_spectral() && self.model != "burgers" {
            return fail("method", format!("spectral methods solve burgers only, not {}", self.model));
        }
        if self.method == Method::Nt && self.boundary != Boundary::Periodic {
            return fail("boundary", "method nt supports periodic boundaries only".into());
        }
        if (self.initial == Initial::Sod) != (self.model == "euler") {
            return fail("initial", "sod data goes with the euler model and only with it".into());
        }
        if self.n_cells < 3 {
            return fail("n_cells", format!("need at least 3 cells, got {}", self.n_cells));
        }
        if self.modes == 0 {
            return fail("N", "need at least one mode".into());
        }
        if !(self.x_max > self.x_min) {
            return fail("x_max", format!("x_max = {} must exceed x_min = {}", self.x_max, self.x_min));
        }
        if !(self.t_final >= 0.0) {
            return fail("t_final", format!("t_final = {} must be nonnegative", self.t_final));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) {
                return fail("dt", format!("dt = {dt} must be positive"));
            }
        }
        if !(1.0..=2.0).contains(&self.limiter_theta) {
            return fail("limiter_theta", format!("limiter_theta = {} must lie in [1, 2]", self.limiter_theta));
        }
        if !(self.rk_order == 2 || self.rk_order == 3) {
            return fail("rk_order", format!("rk_order must be 2 or 3, got {}", self.rk_order));
        }
        if self.output_times.iter().any(|t| !(*t >= 0.0 && *t <= self.t_final)) {
            return fail("output_times", format!("output times must lie in [0, t_final = {}]", self.t_final));
        }
        if self.sv_s == 0 {
            return fail("sv_s", "sv_s must be positive".into());
        }
        for (key, v) in [
            ("sv_beta", self.sv_beta),
            ("sv_c1", self.sv_c1),
            ("sv_c2", self.sv_c2),
            ("edge_threshold", self.edge_threshold),
            ("mollifier_beta", self.mollifier_beta),
            ("mollifier_cp", self.mollifier_cp),
            ("exclusion_cells", self.exclusion_cells),
            ("gamma", self.gamma - 1.0),
        ] {
            if !(v > 0.0) {
                return fail(key, format!("{key} out of range"));
            }
        }
        if self.mollifier_oversample == 0 {
            return fail("mollifier_oversample", "mollifier_oversample must be positive".into());
        }
        if let Some(r) = self.dt_over_h {
            if !(r > 0.0) {
                return fail("dt_over_h", format!("dt_over_h = {r} must be positive"));
            }
        }
        if self.resolutions.len() < 3 || self.resolutions.windows(2).any(|w| w[1] != 2 * w[0]) || self.resolutions[0] < 3
        {
            return fail("resolutions", "need at least 3 resolutions, each double the last".into());
        }
        Ok(())
    }
}

/// Parses and validates a configuration file.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (k, v) = body
            .split_once('=')
            .ok_or_else(|| Error::Config { line, message: format!("expected 'key = value', got '{body}'") })?;
        let key = cfg.set(k.trim(), v.trim()).map_err(|message| Error::Config { line, message })?;
        if let Some(Origin::Line(first)) = cfg.origins.insert(key, Origin::Line(line)) {
            return Err(Error::Config { line, message: format!("duplicate key '{key}' (first set on line {first})") });
        }
    }
    cfg.validate()?;
    Ok(cfg)
}
