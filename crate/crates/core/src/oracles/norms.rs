//! Error norms against an exact solution, with shock neighborhoods excluded
//! for the local and pointwise measures.

use super::exact::ExactSolution;
use crate::error::Result;
use crate::mesh::{Boundary, CellAverages};
use crate::quadrature::NeumaierSum;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorNorms {
    /// `sum |e| h` over the whole domain.
    pub l1: f64,
    /// Same, skipping cells within the exclusion radius of a shock.
    pub l1_loc: f64,
    /// Largest `|e|` outside the exclusion radius.
    pub linf_smooth: f64,
    /// Largest `|e| d / h` outside the exclusion radius, `d` the distance to
    /// the nearest shock.
    pub weighted: f64,
}

/// Distance from `x` to the nearest shock, periodic when `period` is given.
pub fn shock_distance(x: f64, shocks: &[f64], period: Option<f64>) -> f64 {
    shocks
        .iter()
        .map(|s| {
            let d = x - s;
            match period {
                Some(p) => {
                    let r = d.rem_euclid(p);
                    r.min(p - r)
                }
                None => d.abs(),
            }
        })
        .fold(f64::INFINITY, f64::min)
}

/// Per-point errors with weights and shock distances.
#[derive(Debug, Clone, PartialEq)]
pub struct PointErrors {
    pub errors: Vec<f64>,
    pub distances: Vec<f64>,
    pub h: f64,
}

impl PointErrors {
    pub fn norms(&self, exclusion_radius: f64) -> ErrorNorms {
        let mut l1 = NeumaierSum::default();
        let mut l1_loc = NeumaierSum::default();
        let mut linf = 0.0f64;
        let mut weighted = 0.0f64;
        for (e, d) in self.errors.iter().zip(&self.distances) {
            l1.add(e * self.h);
            if *d > exclusion_radius {
                l1_loc.add(e * self.h);
                linf = linf.max(*e);
                if d.is_finite() {
                    weighted = weighted.max(e * d / self.h);
                }
            }
        }
        ErrorNorms { l1: l1.value(), l1_loc: l1_loc.value(), linf_smooth: linf, weighted }
    }

    /// Largest `|e| d / h` over points with `d >= d_min`.
    pub fn weighted_max(&self, d_min: f64) -> f64 {
        self.errors
            .iter()
            .zip(&self.distances)
            .filter(|(_, d)| **d >= d_min && d.is_finite())
            .map(|(e, d)| e * d / self.h)
            .fold(0.0, f64::max)
    }
}

/// Cellwise errors of averages against exact cell means.
pub fn cell_errors(numeric: &CellAverages, exact: &dyn ExactSolution, t: f64) -> Result<PointErrors> {
    let grid = numeric.grid();
    let period = match grid.boundary() {
        Boundary::Periodic => Some(grid.length()),
        Boundary::ZeroGradient => None,
    };
    let shocks = exact.shock_locations(t);
    let h = grid.h();
    let mut errors = Vec::with_capacity(grid.n_cells());
    let mut distances = Vec::with_capacity(grid.n_cells());
    for i in 0..grid.n_cells() {
        let a = grid.face(i);
        let mean = exact.cell_average(a, a + h, t, period)?;
        errors.push((numeric.cell(i)[0] - mean).abs());
        distances.push(shock_distance(grid.center(i), &shocks, period));
    }
    Ok(PointErrors { errors, distances, h })
}

pub fn error_norms(
    numeric: &CellAverages,
    exact: &dyn ExactSolution,
    t: f64,
    exclusion_radius: f64,
) -> Result<ErrorNorms> {
    Ok(cell_errors(numeric, exact, t)?.norms(exclusion_radius))
}

/// Errors of point samples (spacing `h`) on a periodic domain.
pub fn sample_errors(
    xs: &[f64],
    values: &[f64],
    h: f64,
    period: f64,
    exact: &dyn ExactSolution,
    t: f64,
) -> Result<PointErrors> {
    let shocks = exact.shock_locations(t);
    let mut errors = Vec::with_capacity(xs.len());
    let mut distances = Vec::with_capacity(xs.len());
    for (x, v) in xs.iter().zip(values) {
        errors.push((v - exact.evaluate(*x, t)?).abs());
        distances.push(shock_distance(*x, &shocks, Some(period)));
    }
    Ok(PointErrors { errors, distances, h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Grid1D;
    use crate::oracles::exact::{RiemannBurgers, SineBurgers};
    use std::f64::consts::PI;

    #[test]
    fn exact_data_has_zero_error() {
        let s = SineBurgers::new(0.5, 0.3);
        let g = Grid1D::periodic(0.0, 2.0 * PI, 32).unwrap();
        let u = CellAverages::from_averages(g, 1, |x| vec![s.evaluate(x, 0.0).unwrap()]).unwrap();
        let n = error_norms(&u, &s, 0.0, 0.1).unwrap();
        assert!(n.l1 < 1e-14 && n.linf_smooth < 1e-14);
    }

    #[test]
    fn constant_offset() {
        let s = SineBurgers::new(0.25, 0.0);
        let g = Grid1D::periodic(0.0, 2.0 * PI, 16).unwrap();
        let u = CellAverages::scalar(g, vec![0.25 + 1e-3; 16]).unwrap();
        let n = error_norms(&u, &s, 1.0, 0.0).unwrap();
        assert!((n.l1 - 2.0 * PI * 1e-3).abs() < 1e-12);
    }

    #[test]
    fn single_cell_error_inside_exclusion() {
        let r = RiemannBurgers { u_left: 1.0, u_right: 1.0, x0: 0.0 };
        let e = PointErrors { errors: vec![0.0, 1.0, 0.0, 0.0], distances: vec![1.0, 0.01, 1.0, 2.0], h: 0.25 };
        let n = e.norms(0.05);
        assert_eq!(n.l1, 0.25);
        assert_eq!(n.l1_loc, 0.0);
        assert!(n.l1_loc <= n.l1);
        assert!(r.shock_locations(1.0).is_empty());
    }

    #[test]
    fn periodic_distance() {
        assert!((shock_distance(0.1, &[2.0 * PI - 0.1], Some(2.0 * PI)) - 0.2).abs() < 1e-12);
        assert_eq!(shock_distance(0.1, &[], None), f64::INFINITY);
    }
}
