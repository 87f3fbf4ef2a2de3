//! Fourier projection of 2π-periodic data on `[-π, π)` and the tools built on
//! it: concentration-kernel edge detection and adaptive reconstruction.

pub mod kernels;
pub mod reconstruct;

pub use kernels::{concentration_detect, concentration_samples, minmod_edge_detect, ConcentrationKernel, Edge, EdgeDetector, EdgeReport};
pub use reconstruct::{
    adaptive_filter, adaptive_mollify, distance_function, DistanceFunction, FilterParams, Mollifier, MollifierParams,
};

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Where a set of coefficients came from. Sampled data carries aliasing that
/// the edge detector and the mollifier quadrature treat differently from
/// exact Fourier coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffOrigin {
    /// Exact (or evolved Galerkin) Fourier coefficients.
    Modal,
    /// Discrete transform of `2N+1` equispaced samples.
    Collocation,
}

/// Modes `v_k`, `|k| <= N`, stored at index `k + N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierProjection {
    n: usize,
    coeffs: Vec<Complex64>,
    origin: CoeffOrigin,
}

/// `x_j = -π + 2πj/(2N+1)`.
pub fn collocation_points(n: usize) -> Vec<f64> {
    let m = 2 * n + 1;
    (0..m).map(|j| -PI + 2.0 * PI * j as f64 / m as f64).collect()
}

/// Wraps `x` into `[-π, π)`.
pub fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y >= PI {
        -PI
    } else {
        y
    }
}

#[inline]
fn alternating(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Values of `sum_k c_k e^{ikx}` on `len >= 2N+1` equispaced points starting at `-π`.
pub(crate) fn synthesize(n: usize, coeffs: &[Complex64], len: usize) -> Vec<Complex64> {
    synthesize_with(FftPlanner::new().plan_fft_inverse(len).as_ref(), n, coeffs)
}

/// [`synthesize`] with a prepared inverse plan whose length sets the grid.
pub(crate) fn synthesize_with(plan: &dyn Fft<f64>, n: usize, coeffs: &[Complex64]) -> Vec<Complex64> {
    let len = plan.len();
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for (i, c) in coeffs.iter().enumerate() {
        let k = i as i64 - n as i64;
        buf[k.rem_euclid(len as i64) as usize] = c * alternating(k);
    }
    plan.process(&mut buf);
    buf
}

/// Forward transform of `len` samples on the `-π`-anchored grid, returning
/// modes `|k| <= n` (requires `len >= 2n+1`).
pub(crate) fn analyze(samples: &[Complex64], n: usize) -> Vec<Complex64> {
    analyze_with(FftPlanner::new().plan_fft_forward(samples.len()).as_ref(), samples.to_vec(), n)
}

pub(crate) fn analyze_with(plan: &dyn Fft<f64>, mut buf: Vec<Complex64>, n: usize) -> Vec<Complex64> {
    let len = buf.len();
    plan.process(&mut buf);
    let scale = 1.0 / len as f64;
    (-(n as i64)..=n as i64)
        .map(|k| buf[k.rem_euclid(len as i64) as usize] * (alternating(k) * scale))
        .collect()
}

/// Discrete projection of `2N+1` samples taken at [`collocation_points`].
pub fn project(samples: &[f64]) -> Result<FourierProjection> {
    let m = samples.len();
    if m == 0 || m % 2 == 0 {
        return Err(Error::SampleCount { expected: "an odd count 2N+1".into(), got: m });
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidData("samples must be finite".into()));
    }
    let n = (m - 1) / 2;
    let buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Ok(FourierProjection { n, coeffs: analyze(&buf, n), origin: CoeffOrigin::Collocation })
}

impl FourierProjection {
    pub fn from_coefficients(n: usize, coeffs: Vec<Complex64>, origin: CoeffOrigin) -> Result<Self> {
        if coeffs.len() != 2 * n + 1 {
            return Err(Error::SampleCount { expected: format!("2N+1 = {} coefficients", 2 * n + 1), got: coeffs.len() });
        }
        Ok(Self { n, coeffs, origin })
    }

    /// Exact modes from a coefficient function `k -> v_k`.
    pub fn from_fn(n: usize, f: impl Fn(i64) -> Complex64) -> Self {
        let coeffs = (-(n as i64)..=n as i64).map(f).collect();
        Self { n, coeffs, origin: CoeffOrigin::Modal }
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, coeffs: vec![Complex64::new(0.0, 0.0); 2 * n + 1], origin: CoeffOrigin::Modal }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn origin(&self) -> CoeffOrigin {
        self.origin
    }

    pub fn with_origin(self, origin: CoeffOrigin) -> Self {
        Self { origin, ..self }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// `v_k` for `|k| <= N`, zero beyond.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let n = self.n as i64;
        if k.abs() > n {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + n) as usize]
        }
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let n = self.n as i64;
        self.coeffs.iter().enumerate().map(move |(i, &c)| (i as i64 - n, c))
    }

    /// Largest `|v_{-k} - conj(v_k)|`.
    pub fn symmetry_defect(&self) -> f64 {
        (1..=self.n as i64).map(|k| (self.coeff(-k) - self.coeff(k).conj()).norm()).fold(0.0, f64::max)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.symmetry_defect() <= tol && self.coeff(0).im.abs() <= tol
    }

    /// `Re sum_k v_k e^{ikx}`.
    pub fn evaluate(&self, x: f64) -> f64 {
        let e1 = Complex64::from_polar(1.0, x);
        let mut e = Complex64::from_polar(1.0, -(self.n as f64) * x);
        let mut acc = 0.0;
        for c in &self.coeffs {
            acc += (c * e).re;
            e *= e1;
        }
        acc
    }

    /// Real part of the partial sum at the `2N+1` collocation points.
    pub fn samples(&self) -> Vec<f64> {
        self.oversampled(1)
    }

    /// Real part of the partial sum on `factor * (2N+1)` equispaced points
    /// starting at `-π`.
    pub fn oversampled(&self, factor: usize) -> Vec<f64> {
        let len = factor.max(1) * (2 * self.n + 1);
        synthesize(self.n, &self.coeffs, len).into_iter().map(|z| z.re).collect()
    }

    /// `||P_N v||` in `L2(-π, π)`, by Parseval.
    pub fn l2_norm(&self) -> f64 {
        (2.0 * PI * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample(n: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
        collocation_points(n).into_iter().map(f).collect()
    }

    #[test]
    fn cosine_has_two_modes() {
        let p = project(&sample(8, f64::cos)).unwrap();
        for (k, c) in p.modes() {
            let expected = if k.abs() == 1 { 0.5 } else { 0.0 };
            assert!((c - Complex64::new(expected, 0.0)).norm() < 1e-14, "k = {k}: {c}");
        }
    }

    #[test]
    fn constant_is_the_mean_mode() {
        let p = project(&[3.0; 11]).unwrap();
        assert!((p.coeff(0).re - 3.0).abs() < 1e-14);
        assert!(p.modes().filter(|(k, _)| *k != 0).all(|(_, c)| c.norm() < 1e-14));
    }

    #[test]
    fn highest_mode_is_exact() {
        let n = 6;
        let buf: Vec<Complex64> =
            collocation_points(n).into_iter().map(|x| Complex64::from_polar(1.0, n as f64 * x)).collect();
        let c = analyze(&buf, n);
        for (i, ci) in c.iter().enumerate() {
            let expected = if i == 2 * n { 1.0 } else { 0.0 };
            assert!((ci - Complex64::new(expected, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn wrong_sample_counts() {
        assert!(matches!(project(&[1.0, 2.0]), Err(Error::SampleCount { .. })));
        assert!(project(&[]).is_err());
        assert!(FourierProjection::from_coefficients(2, vec![Complex64::new(0.0, 0.0); 4], CoeffOrigin::Modal).is_err());
    }

    #[test]
    fn wrap_range() {
        assert_eq!(wrap(PI), -PI);
        assert!((wrap(3.0 * PI + 0.5) - (-PI + 0.5)).abs() < 1e-14);
        assert_eq!(wrap(0.25), 0.25);
    }

    #[test]
    fn oversampling_interpolates() {
        let p = project(&sample(5, |x| (2.0 * x).sin() + 0.25)).unwrap();
        let fine = p.oversampled(4);
        let m = fine.len();
        for (j, v) in fine.iter().enumerate() {
            let x = -PI + 2.0 * PI * j as f64 / m as f64;
            assert!((v - ((2.0 * x).sin() + 0.25)).abs() < 1e-13);
            assert!((p.evaluate(x) - v).abs() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn round_trip(data in prop::collection::vec(-5.0f64..5.0, 1..20)) {
            let mut data = data;
            if data.len() % 2 == 0 {
                data.pop();
            }
            prop_assume!(!data.is_empty());
            let p = project(&data).unwrap();
            prop_assert!(p.is_real(1e-12));
            for (a, b) in p.samples().iter().zip(&data) {
                prop_assert!((a - b).abs() < 1e-12);
            }
            let parseval = (data.iter().map(|v| v * v).sum::<f64>() * 2.0 * PI / data.len() as f64).sqrt();
            prop_assert!((p.l2_norm() - parseval).abs() < 1e-10);
        }
    }
}
