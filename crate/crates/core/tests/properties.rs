//! Cross-module invariants as property tests.

use std::f64::consts::PI;

use centralkit::central::{CflPolicy, KtSolver, SspOrder};
use centralkit::flux::{burgers, linear_advection, saturating_diffusion, FluxModel};
use centralkit::mesh::{total_variation, CellAverages, Grid1D};
use centralkit::oracles::{burgers_characteristics, burgers_riemann, ExactSolution, PointErrors, Profile, SineBurgers};
use centralkit::spectral::{
    collocation_points, project, CoeffOrigin, DistanceFunction, FourierProjection, Mollifier, MollifierParams,
};
use centralkit::sv::{l2_rate, sv_evolve, sv_term, SvConfig};
use centralkit::Complex64;
use proptest::prelude::*;

fn periodic_data() -> impl Strategy<Value = CellAverages> {
    prop::collection::vec(-1.5f64..1.5, 8..48)
        .prop_map(|v| CellAverages::scalar(Grid1D::periodic(0.0, 1.0, v.len()).unwrap(), v).unwrap())
}

fn sum_abs(u: &CellAverages) -> f64 {
    u.values().iter().map(|v| v.abs()).sum::<f64>() * u.grid().h()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kt_steps_are_tvd_and_conservative(u in periodic_data(), rk3 in any::<bool>(), advect in any::<bool>()) {
        let b = burgers();
        let a = linear_advection(-0.7).unwrap();
        let f: &dyn FluxModel = if advect { &a } else { &b };
        let order = if rk3 { SspOrder::Three } else { SspOrder::Two };
        let mass = u.total(0);
        let scale = sum_abs(&u).max(1.0);
        let mut tv = total_variation(&u);
        let mut ok = true;
        let mut drift = 0.0f64;
        KtSolver::new(f, CflPolicy::kt_default()).with_order(order).evolve_steps(&u, 40, |s| {
            let now = total_variation(s.state);
            ok &= now <= tv + 1e-12;
            tv = now;
            drift = drift.max((s.state.total(0) - mass).abs());
        }).unwrap();
        prop_assert!(ok);
        prop_assert!(drift <= 1e-12 * scale, "drift {drift}");
    }

    #[test]
    fn convection_diffusion_keeps_extrema(u in periodic_data()) {
        let f = burgers();
        let q = saturating_diffusion();
        let (lo, hi) = u.min_max(0);
        let mut worst = 0.0f64;
        KtSolver::new(&f, CflPolicy::kt_default()).with_diffusion(&q).evolve(&u, 0.05, |s| {
            let (a, b) = s.state.min_max(0);
            worst = worst.max(lo - a).max(b - hi);
        }).unwrap();
        prop_assert!(worst <= 1e-10, "new extremum {worst}");
    }

    #[test]
    fn galerkin_conserves_l2(c in prop::collection::vec((-0.3f64..0.3, -0.3f64..0.3), 4)) {
        let n = 24;
        let p = FourierProjection::from_fn(n, |k| {
            let k = k as usize;
            match k {
                0 => Complex64::new(c[0].0, 0.0),
                1..=3 => Complex64::new(c[k].0, c[k].1),
                _ => Complex64::new(0.0, 0.0),
            }
        });
        // fill the negative modes by conjugate symmetry
        let mut coeffs = p.coeffs().to_vec();
        for k in 1..=3usize {
            coeffs[n - k] = coeffs[n + k].conj();
        }
        let p = FourierProjection::from_coefficients(n, coeffs, CoeffOrigin::Modal).unwrap();
        let cfg = SvConfig { c1: 0.02, ..SvConfig::galerkin() };
        let run = sv_evolve(&p, &cfg, 0.5, &[]).unwrap();
        prop_assert!(run.max_l2_deviation <= 1e-8, "{}", run.max_l2_deviation);
    }

    #[test]
    fn sv_term_never_adds_energy(v in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 33), beta in 1.0f64..32.0) {
        let n = 16;
        let p = FourierProjection::from_coefficients(
            n,
            v.iter().map(|(a, b)| Complex64::new(*a, *b)).collect(),
            CoeffOrigin::Modal,
        ).unwrap();
        let cfg = SvConfig { beta, ..SvConfig::default() };
        let dv = sv_term(&p, &cfg);
        prop_assert!(l2_rate(p.coeffs(), dv.coeffs()) <= 0.0);
    }

    #[test]
    fn characteristics_agree_with_the_fan(ul in -1.0f64..1.0, spread in 0.1f64..2.0, t in 0.2f64..2.0, s in -0.2f64..1.2) {
        let ur = ul + spread;
        let ramp = Ramp { ul, ur, width: 1e-11 };
        // sample inside and just outside the fan
        let x = t * (ul + s * spread);
        let a = burgers_characteristics(&ramp, x, t).unwrap();
        let b = burgers_riemann(ul, ur, x, t).unwrap();
        prop_assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }

    #[test]
    fn localized_norms_are_dominated(e in prop::collection::vec((0.0f64..1.0, 0.0f64..3.0), 1..60), r in 0.0f64..2.0) {
        let pe = PointErrors { errors: e.iter().map(|p| p.0).collect(), distances: e.iter().map(|p| p.1).collect(), h: 0.1 };
        let n = pe.norms(r);
        prop_assert!(n.l1_loc <= n.l1 + 1e-15);
        let outside = e.iter().filter(|p| p.1 > r).map(|p| p.0).fold(0.0, f64::max);
        prop_assert_eq!(n.linf_smooth, outside);
    }

    #[test]
    fn mollifier_reproduces_trig_polynomials(c in prop::collection::vec(-1.0f64..1.0, 9), x in -PI..PI) {
        let f = |x: f64| {
            c[0] + (1..=4).map(|k| c[2 * k - 1] * (k as f64 * x).cos() + c[2 * k] * (k as f64 * x).sin()).sum::<f64>()
        };
        // at N = 64 the error is about 2e-9 per unit amplitude, too close to
        // the bound for nine random coefficients
        let p = project(&collocation_points(128).into_iter().map(f).collect::<Vec<_>>()).unwrap();
        let m = Mollifier::new(&p, MollifierParams::default()).unwrap();
        let none = DistanceFunction::new(vec![], PI).unwrap();
        prop_assert!((m.at(x, none.eval(x)).unwrap() - f(x)).abs() < 1e-8);
    }
}

/// Linear ramp from `ul` to `ur` over `width` around the origin.
struct Ramp {
    ul: f64,
    ur: f64,
    width: f64,
}

impl Profile for Ramp {
    fn value(&self, x: f64) -> f64 {
        self.ul + (self.ur - self.ul) * ((x + 0.5 * self.width) / self.width).clamp(0.0, 1.0)
    }

    fn slope(&self, x: f64) -> f64 {
        if x.abs() < 0.5 * self.width {
            (self.ur - self.ul) / self.width
        } else {
            0.0
        }
    }

    fn range(&self) -> (f64, f64) {
        (self.ul, self.ur)
    }

    fn min_slope(&self) -> f64 {
        0.0
    }
}

#[test]
fn spectral_accuracy_before_the_shock() {
    let exact = SineBurgers::new(0.0, 1.0);
    let err = |n: usize| {
        let p0 = FourierProjection::from_fn(n, |k| match k {
            1 => Complex64::new(0.0, -0.5),
            -1 => Complex64::new(0.0, 0.5),
            _ => Complex64::new(0.0, 0.0),
        });
        // small enough that the time error sits below the N = 64 spatial error
        let cfg = SvConfig { dt_fixed: Some(1e-4), ..SvConfig::galerkin() };
        let p = sv_evolve(&p0, &cfg, 0.5, &[]).unwrap().final_state;
        collocation_points(n)
            .into_iter()
            .zip(p.samples())
            .map(|(x, v)| (v - exact.evaluate(x, 0.5).unwrap()).abs())
            .fold(0.0, f64::max)
    };
    let (e32, e64) = (err(32), err(64));
    assert!(e64 <= e32 / 16.0, "N=32: {e32:e}, N=64: {e64:e}");
}
