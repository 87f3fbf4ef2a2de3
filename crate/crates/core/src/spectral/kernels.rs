//! Concentration kernels and the minmod-combined edge detector.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use super::{collocation_points, synthesize, wrap, CoeffOrigin, FourierProjection};
use crate::error::{Error, Result};
use crate::mesh::minmod;
use crate::quadrature::composite_gauss5;

pub const DEFAULT_EXP_BETA: f64 = 6.0;

/// Concentration factor `eta` on `[0, 1]` with unit mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConcentrationKernel {
    Fejer,
    /// `eta(xi) = C exp(beta / (xi (xi - 1)))` with `C` fixing the mass to 1.
    Exponential { beta: f64, scale: f64 },
}

fn exp_profile(beta: f64, xi: f64) -> f64 {
    if xi <= 0.0 || xi >= 1.0 {
        0.0
    } else {
        (beta / (xi * (xi - 1.0))).exp()
    }
}

impl ConcentrationKernel {
    pub fn fejer() -> Self {
        ConcentrationKernel::Fejer
    }

    pub fn exponential(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("exponential kernel beta = {beta} must be positive")));
        }
        let mass = composite_gauss5(0.0, 1.0, 400, |xi| exp_profile(beta, xi));
        Ok(ConcentrationKernel::Exponential { beta, scale: 1.0 / mass })
    }

    pub fn eta(&self, xi: f64) -> f64 {
        match *self {
            ConcentrationKernel::Fejer => 1.0,
            ConcentrationKernel::Exponential { beta, scale } => scale * exp_profile(beta, xi),
        }
    }

    /// Fourier multipliers of `K v` for every mode `|k| <= N` of `p`.
    fn multipliers(&self, p: &FourierProjection) -> Vec<Complex64> {
        let n = p.n();
        let nf = n as f64;
        let h = 2.0 * PI / (2 * n + 1) as f64;
        p.modes()
            .map(|(k, c)| {
                let kf = k as f64;
                // sampled data: the discrete derivative symbol undoes the
                // aliasing of the jump's 1/k tail
                let sym = match p.origin() {
                    CoeffOrigin::Modal => kf,
                    CoeffOrigin::Collocation => 2.0 / h * (0.5 * kf * h).sin(),
                };
                c * Complex64::new(0.0, PI / nf * self.eta(kf.abs() / nf) * sym)
            })
            .collect()
    }
}

/// `(π/N) sum_k eta(|k|/N) v_k (i k) e^{ikx}`, real part. Approximates the
/// jump `[v](x) = v(x+) - v(x-)`, and is small where `v` is smooth.
pub fn concentration_detect(p: &FourierProjection, kernel: &ConcentrationKernel, x: f64) -> f64 {
    let n = p.n();
    if n == 0 {
        return 0.0;
    }
    let c = kernel.multipliers(p);
    FourierProjection { n, coeffs: c, origin: p.origin() }.evaluate(x)
}

/// Kernel values at the `2N+1` collocation points.
pub fn concentration_samples(p: &FourierProjection, kernel: &ConcentrationKernel) -> Vec<f64> {
    if p.n() == 0 {
        return vec![0.0];
    }
    let c = kernel.multipliers(p);
    synthesize(p.n(), &c, 2 * p.n() + 1).into_iter().map(|z| z.re).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub location: f64,
    /// Detected `v(x+) - v(x-)`.
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeReport {
    pub edges: Vec<Edge>,
    pub threshold: f64,
    pub n_used: usize,
}

impl EdgeReport {
    pub fn locations(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.location).collect()
    }
}

/// Minmod of the Fejér and exponential kernels, thresholded, with
/// non-maximum suppression and a local sub-cell search for the peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeDetector {
    pub threshold: f64,
    pub exp_beta: f64,
    /// A candidate must dominate this many collocation cells on each side.
    pub suppression_radius: usize,
    /// Samples per side in the `±h` peak search; 0 disables it.
    pub refine_samples: usize,
}

impl Default for EdgeDetector {
    fn default() -> Self {
        Self { threshold: 0.1, exp_beta: DEFAULT_EXP_BETA, suppression_radius: 6, refine_samples: 64 }
    }
}

impl EdgeDetector {
    pub fn with_threshold(threshold: f64) -> Result<Self> {
        if !(threshold > 0.0 && threshold.is_finite()) {
            return Err(Error::InvalidParameter(format!("edge threshold {threshold} must be positive")));
        }
        Ok(Self { threshold, ..Self::default() })
    }

    /// `mm(K_fejer, K_exp)` at the collocation points.
    pub fn combined_samples(&self, p: &FourierProjection) -> Result<Vec<f64>> {
        let exp = ConcentrationKernel::exponential(self.exp_beta)?;
        let a = concentration_samples(p, &ConcentrationKernel::Fejer);
        let b = concentration_samples(p, &exp);
        Ok(a.iter().zip(&b).map(|(x, y)| minmod(*x, *y)).collect())
    }

    pub fn combined_at(&self, p: &FourierProjection, exp: &ConcentrationKernel, x: f64) -> f64 {
        minmod(concentration_detect(p, &ConcentrationKernel::Fejer, x), concentration_detect(p, exp, x))
    }

    pub fn detect(&self, p: &FourierProjection) -> Result<EdgeReport> {
        if !(self.threshold > 0.0) {
            return Err(Error::InvalidParameter(format!("edge threshold {} must be positive", self.threshold)));
        }
        let n = p.n();
        let exp = ConcentrationKernel::exponential(self.exp_beta)?;
        let combined = self.combined_samples(p)?;
        let mag: Vec<f64> = combined.iter().map(|v| v.abs()).collect();
        let m = mag.len();
        let xs = collocation_points(n);
        let h = 2.0 * PI / m as f64;
        let r = self.suppression_radius.min((m - 1) / 2) as i64;
        let mut edges = Vec::new();
        for j in 0..m {
            if mag[j] <= self.threshold {
                continue;
            }
            // ties go to the first index so a plateau yields one edge
            let dominant = (1..=r).all(|o| {
                let before = mag[(j as i64 - o).rem_euclid(m as i64) as usize];
                let after = mag[(j as i64 + o).rem_euclid(m as i64) as usize];
                mag[j] > before && mag[j] >= after
            });
            if !dominant {
                continue;
            }
            let (mut location, mut amplitude) = (xs[j], combined[j]);
            let s = self.refine_samples;
            for i in 1..=s {
                for sign in [-1.0, 1.0] {
                    let x = xs[j] + sign * h * i as f64 / s as f64;
                    let v = self.combined_at(p, &exp, x);
                    if v.abs() > amplitude.abs() {
                        location = x;
                        amplitude = v;
                    }
                }
            }
            edges.push(Edge { location: wrap(location), amplitude });
        }
        edges.sort_by(|a, b| a.location.total_cmp(&b.location));
        Ok(EdgeReport { edges, threshold: self.threshold, n_used: n })
    }
}

/// Edge detection with the default detector settings.
pub fn minmod_edge_detect(p: &FourierProjection, threshold: f64) -> Result<EdgeReport> {
    EdgeDetector::with_threshold(threshold)?.detect(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::project;
    use proptest::prelude::*;

    fn sampled(n: usize, f: impl Fn(f64) -> f64) -> FourierProjection {
        project(&collocation_points(n).into_iter().map(f).collect::<Vec<_>>()).unwrap()
    }

    /// `v(x) = x` on `(-π, π)`: `v_k = i(-1)^k / k`.
    fn sawtooth(n: usize) -> FourierProjection {
        FourierProjection::from_fn(n, |k| {
            if k == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, if k % 2 == 0 { 1.0 } else { -1.0 } / k as f64)
            }
        })
    }

    #[test]
    fn exponential_kernel_has_unit_mass() {
        let k = ConcentrationKernel::exponential(6.0).unwrap();
        // independent midpoint rule
        let m = 200_000;
        let mass: f64 = (0..m).map(|i| k.eta((i as f64 + 0.5) / m as f64)).sum::<f64>() / m as f64;
        assert!((mass - 1.0).abs() < 1e-10, "{mass}");
        assert_eq!(k.eta(0.0), 0.0);
        assert_eq!(k.eta(1.0), 0.0);
        assert!(ConcentrationKernel::exponential(0.0).is_err());
    }

    #[test]
    fn smooth_data_gives_small_response() {
        let p = sampled(64, f64::cos);
        for x in collocation_points(64).into_iter().step_by(7) {
            assert!(concentration_detect(&p, &ConcentrationKernel::Fejer, x).abs() <= 0.2);
        }
        let exact = FourierProjection::from_fn(16, |k| Complex64::new(if k == 0 { 2.5 } else { 0.0 }, 0.0));
        assert_eq!(concentration_detect(&exact, &ConcentrationKernel::Fejer, 0.3), 0.0);
        let c = sampled(16, |_| 2.5);
        assert!(concentration_detect(&c, &ConcentrationKernel::Fejer, 0.3).abs() < 1e-14);
    }

    #[test]
    fn sawtooth_jump() {
        let p = sawtooth(128);
        let v = concentration_detect(&p, &ConcentrationKernel::Fejer, PI);
        assert!((v + 2.0 * PI).abs() < 0.1 * 2.0 * PI, "{v}");
        let exp = ConcentrationKernel::exponential(DEFAULT_EXP_BETA).unwrap();
        let at_jump = concentration_detect(&p, &exp, PI);
        assert!((at_jump + 2.0 * PI).abs() < 0.1 * 2.0 * PI);
        let far = concentration_samples(&p, &exp)
            .into_iter()
            .zip(collocation_points(128))
            .filter(|(_, x)| PI - x.abs() >= 0.5)
            .map(|(v, _)| v.abs())
            .fold(0.0, f64::max);
        assert!(far <= 0.05 * 2.0 * PI, "{far}");
    }

    #[test]
    fn cosine_has_no_edges() {
        assert!(minmod_edge_detect(&sampled(128, f64::cos), 0.1).unwrap().edges.is_empty());
    }

    #[test]
    fn unit_step_is_found() {
        let x0 = 0.7;
        let p = sampled(64, |x| if x >= x0 { 1.0 } else { 0.0 });
        let r = minmod_edge_detect(&p, 0.1).unwrap();
        // the step also drops back to 0 at the periodic seam
        assert_eq!(r.edges.len(), 2, "{r:?}");
        let up = r.edges.iter().find(|e| e.amplitude > 0.0).unwrap();
        assert!((up.location - x0).abs() <= PI / 64.0);
        assert!((up.amplitude - 1.0).abs() <= 0.1, "{up:?}");
    }

    #[test]
    fn bad_threshold() {
        assert!(minmod_edge_detect(&sampled(8, f64::sin), 0.0).is_err());
    }

    proptest! {
        #[test]
        fn linear_in_the_data(a in -3.0f64..3.0, b in -3.0f64..3.0, x in -PI..PI) {
            let u = sampled(16, |x| (2.0 * x).sin() + if x > 0.0 { 1.0 } else { 0.0 });
            let v = sampled(16, |x| x.cos() * x);
            let w = FourierProjection::from_coefficients(
                16,
                u.coeffs().iter().zip(v.coeffs()).map(|(p, q)| p * a + q * b).collect(),
                CoeffOrigin::Collocation,
            ).unwrap();
            let k = ConcentrationKernel::exponential(6.0).unwrap();
            let lhs = concentration_detect(&w, &k, x);
            let rhs = a * concentration_detect(&u, &k, x) + b * concentration_detect(&v, &k, x);
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }

        #[test]
        fn minmod_never_exceeds_either_kernel(shift in -1.0f64..1.0) {
            let p = sampled(32, |x| if (x - shift).abs() < 1.0 { x.sin() + 1.0 } else { 0.0 });
            let det = EdgeDetector::default();
            let c = det.combined_samples(&p).unwrap();
            let a = concentration_samples(&p, &ConcentrationKernel::Fejer);
            let b = concentration_samples(&p, &ConcentrationKernel::exponential(6.0).unwrap());
            for i in 0..c.len() {
                prop_assert!(c[i].abs() <= a[i].abs() && c[i].abs() <= b[i].abs());
            }
        }
    }
}
