//! Strong-stability-preserving Runge–Kutta steps built from forward-Euler
//! stages. Generic over the state scalar so the spectral solver can reuse it
//! on complex modes.

use std::ops::{Add, Mul};

use crate::error::{Error, Result};
use crate::mesh::CellAverages;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SspOrder {
    #[default]
    Two,
    Three,
}

impl SspOrder {
    pub fn from_int(order: u32) -> Result<Self> {
        match order {
            2 => Ok(SspOrder::Two),
            3 => Ok(SspOrder::Three),
            o => Err(Error::InvalidParameter(format!("SSP-RK order must be 2 or 3, got {o}"))),
        }
    }
}

fn euler_stage<T>(u: &[T], dt: f64, l: &[T]) -> Result<Vec<T>>
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
{
    if l.len() != u.len() {
        return Err(Error::InvalidData(format!("rhs returned {} values for a state of {}", l.len(), u.len())));
    }
    Ok(u.iter().zip(l).map(|(&a, &b)| a + b * dt).collect())
}

fn combine<T>(u: &[T], wu: f64, v: &[T], wv: f64) -> Vec<T>
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
{
    u.iter().zip(v).map(|(&a, &b)| a * wu + b * wv).collect()
}

/// One SSP-RK step of `u' = L(u)`.
pub fn ssp_rk_step<T, F>(u: &[T], dt: f64, order: SspOrder, mut rhs: F) -> Result<Vec<T>>
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
    F: FnMut(&[T]) -> Result<Vec<T>>,
{
    match order {
        SspOrder::Two => {
            let u1 = euler_stage(u, dt, &rhs(u)?)?;
            let u2 = euler_stage(&u1, dt, &rhs(&u1)?)?;
            Ok(combine(u, 0.5, &u2, 0.5))
        }
        SspOrder::Three => {
            let u1 = euler_stage(u, dt, &rhs(u)?)?;
            let u2 = combine(u, 0.75, &euler_stage(&u1, dt, &rhs(&u1)?)?, 0.25);
            let u3 = euler_stage(&u2, dt, &rhs(&u2)?)?;
            Ok(combine(u, 1.0 / 3.0, &u3, 2.0 / 3.0))
        }
    }
}

/// [`ssp_rk_step`] on cell averages.
pub fn ssp_rk_step_cells<F>(u: &CellAverages, dt: f64, order: SspOrder, mut rhs: F) -> Result<CellAverages>
where
    F: FnMut(&CellAverages) -> Result<Vec<f64>>,
{
    let grid = *u.grid();
    let m = u.components();
    let values = ssp_rk_step(u.values(), dt, order, |v: &[f64]| rhs(&CellAverages::new(grid, m, v.to_vec())?))?;
    CellAverages::new(grid, m, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Grid1D;
    use rustfft::num_complex::Complex64;

    fn decay(u: &[f64]) -> Result<Vec<f64>> {
        Ok(u.iter().map(|v| -v).collect())
    }

    #[test]
    fn zero_rhs_is_identity() {
        let g = Grid1D::periodic(0.0, 1.0, 4).unwrap();
        let u = CellAverages::scalar(g, vec![1.0, -2.0, 3.0, 0.5]).unwrap();
        for order in [SspOrder::Two, SspOrder::Three] {
            let out = ssp_rk_step_cells(&u, 0.3, order, |c| Ok(vec![0.0; c.n_cells()])).unwrap();
            assert_eq!(out, u);
        }
    }

    #[test]
    fn rk2_matches_taylor_polynomial() {
        let dt = 0.1;
        let out = ssp_rk_step(&[1.0], dt, SspOrder::Two, decay).unwrap();
        assert!((out[0] - (1.0 - dt + dt * dt / 2.0)).abs() < 1e-15);
        let out = ssp_rk_step(&[1.0], dt, SspOrder::Three, decay).unwrap();
        assert!((out[0] - (1.0 - dt + dt * dt / 2.0 - dt * dt * dt / 6.0)).abs() < 1e-15);
    }

    fn integrate(order: SspOrder, steps: usize) -> f64 {
        let dt = 1.0 / steps as f64;
        let mut u = vec![1.0];
        for _ in 0..steps {
            u = ssp_rk_step(&u, dt, order, decay).unwrap();
        }
        (u[0] - (-1.0f64).exp()).abs()
    }

    #[test]
    fn observed_orders() {
        let r2 = (integrate(SspOrder::Two, 20) / integrate(SspOrder::Two, 40)).log2();
        let r3 = (integrate(SspOrder::Three, 20) / integrate(SspOrder::Three, 40)).log2();
        assert!((r2 - 2.0).abs() < 0.1, "rk2 order {r2}");
        assert!((r3 - 3.0).abs() < 0.1, "rk3 order {r3}");
    }

    #[test]
    fn works_on_complex_states() {
        // u' = i u rotates without growth at second order
        let out = ssp_rk_step(&[Complex64::new(1.0, 0.0)], 0.01, SspOrder::Three, |u| {
            Ok(u.iter().map(|z| z * Complex64::i()).collect())
        })
        .unwrap();
        assert!((out[0] - Complex64::new(0.0, 0.01).exp()).norm() < 1e-9);
    }

    #[test]
    fn bad_orders_and_lengths() {
        assert!(SspOrder::from_int(4).is_err());
        assert!(ssp_rk_step(&[1.0, 2.0], 0.1, SspOrder::Two, |_| Ok(vec![0.0])).is_err());
    }
}
