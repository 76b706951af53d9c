use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;

use crosspoly::direct::{to_c64, DirectContext};
use crosspoly::geometry::{Builtin, CrossGeometry, WeightSpec};
use crosspoly::harness::fit_decay;
use crosspoly::surface::{compute_periods, eval_phi, eval_w, SurfacePoint};
use crosspoly::szego::SzegoData;
use crosspoly::C64;

fn off_cross() -> impl Strategy<Value = C64> {
    (0.05f64..4.0, 0.0f64..2.0 * PI)
        .prop_map(|(r, t)| C64::from_polar(r, t))
        .prop_filter("away from the axes", |z| z.re.abs() > 1e-3 && z.im.abs() > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn w_squares_to_quartic(a in 0.3f64..3.0, b in 0.3f64..3.0, z in off_cross()) {
        let g = CrossGeometry::new(a, b).unwrap();
        let w = eval_w(&g, z).unwrap();
        let q = (z * z - a * a) * (z * z + b * b);
        prop_assert!((w * w - q).norm() <= 1e-12 * (1.0 + q.norm()));
    }

    #[test]
    fn phi_sheets_are_reciprocal(a in 0.3f64..3.0, b in 0.3f64..3.0, z in off_cross()) {
        let g = CrossGeometry::new(a, b).unwrap();
        let p0 = eval_phi(&g, &SurfacePoint::sheet0(z)).unwrap();
        let p1 = eval_phi(&g, &SurfacePoint::sheet1(z)).unwrap();
        prop_assert!(p0.norm() > 1.0);
        prop_assert!((p0 * p1 - 1.0).norm() < 1e-12);
    }

    #[test]
    fn decay_fit_recovers_exponent(p in 0.2f64..3.0, c in 0.1f64..10.0) {
        let n: Vec<usize> = (4..=40).step_by(4).collect();
        let e: Vec<f64> = n.iter().map(|&k| c * (k as f64).powf(-p)).collect();
        let fit = fit_decay("power", &n, &e).unwrap();
        assert_relative_eq!(fit.exponent, p, max_relative = 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn theta_is_quasi_periodic(a in 0.4f64..2.5, b in 0.4f64..2.5, x in -0.5f64..0.5, y in -0.3f64..0.3) {
        let g = CrossGeometry::new(a, b).unwrap();
        let ctx = compute_periods(&g).unwrap();
        let zeta = C64::new(x, 0.0) + ctx.b * y;
        let t = ctx.theta(zeta);
        let i = C64::i();
        prop_assert!((ctx.theta(zeta + 1.0) - t).norm() < 1e-10 * (1.0 + t.norm()));
        prop_assert!((ctx.theta(-zeta) - t).norm() < 1e-10 * (1.0 + t.norm()));
        let shifted = ctx.theta(zeta + ctx.b);
        let want = t * (-PI * i * ctx.b - 2.0 * PI * i * zeta).exp();
        prop_assert!((shifted - want).norm() < 1e-9 * (1.0 + want.norm()));
    }

    #[test]
    fn szego_sheets_are_reciprocal(a in 0.4f64..2.5, b in 0.4f64..2.5, z in off_cross(), k in 0usize..3) {
        let g = CrossGeometry::new(a, b).unwrap();
        prop_assume!(g.distance_to_cross(z) > 0.05);
        let builtin = [Builtin::Chebyshev, Builtin::Legendre, Builtin::JacobiQuarter][k];
        let ctx = compute_periods(&g).unwrap();
        let s = SzegoData::new(&WeightSpec::builtin(g, builtin).unwrap(), &ctx).unwrap();
        let s0 = s.eval_s(&SurfacePoint::sheet0(z)).unwrap();
        let s1 = s.eval_s(&SurfacePoint::sheet1(z)).unwrap();
        prop_assert!((s0 * s1 - 1.0).norm() < 1e-8);
    }

    #[test]
    fn chebyshev_polynomials_scale_with_the_cross(
        a in 0.5f64..2.0, b in 0.5f64..2.0, lambda in 0.5f64..2.0, m in 1usize..4,
    ) {
        let n = 2 * m;
        let solve = |s: f64| {
            let g = CrossGeometry::new(a * s, b * s).unwrap();
            let spec = WeightSpec::builtin(g, Builtin::Chebyshev).unwrap();
            DirectContext::new(&spec, n, 128).unwrap().solve(n).unwrap()
        };
        let base = solve(1.0);
        let scaled = solve(lambda);
        prop_assert_eq!(base.effective_degree, scaled.effective_degree);
        let d = base.effective_degree;
        for k in 0..=d {
            let want = to_c64(&base.coeffs[k]) * lambda.powi((d - k) as i32);
            let got = to_c64(&scaled.coeffs[k]);
            prop_assert!((got - want).norm() <= 1e-20 + 1e-12 * want.norm(), "k = {}: {} vs {}", k, got, want);
        }
    }
}
