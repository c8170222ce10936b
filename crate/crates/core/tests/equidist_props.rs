//! Properties of orbits, Weyl sums, discrepancy and twisted heights.

use arakelov_core::equidist::{
    arc_discrepancy_exact, galois_orbit_cyclotomic, galois_orbit_minpoly, star_discrepancy, twisted_height, weyl_sum,
    weyl_sum_cyclotomic_exact, EmpiricalMeasure, DEFAULT_TORUS_TOLERANCE,
};
use arakelov_core::heights::{AlgebraicP1Point, CyclotomicTorusPoint};
use arakelov_core::numkernel::arith::rational_to_f64;
use arakelov_core::numkernel::Precision;
use num_complex::Complex64;
use proptest::prelude::*;

/// Sup over closed arcs of (mass - length) and open arcs of (length - mass),
/// with endpoints at sample positions; cubic in the sample size.
fn brute_force_discrepancy(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let ccw = |a: f64, b: f64| (b - a).rem_euclid(1.0);
    let inside = |a: f64, len: f64, t: f64, closed: bool| {
        let d = ccw(a, t);
        if closed {
            d <= len
        } else {
            d > 0.0 && d < len
        }
    };
    let mut best: f64 = 0.0;
    for &a in x {
        for &b in x {
            let len = ccw(a, b);
            let closed = x.iter().filter(|&&t| inside(a, len, t, true)).count() as f64 / n;
            best = best.max(closed - len);
            let open_len = if len == 0.0 { 1.0 } else { len };
            let open = x.iter().filter(|&&t| inside(a, open_len, t, false)).count() as f64 / n;
            best = best.max(open_len - open);
        }
    }
    best
}

fn circle(x: &[f64]) -> Vec<Complex64> {
    x.iter().map(|t| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn discrepancy_matches_brute_force(m in 1u64..200, e in prop::collection::vec(0u64..200, 1..40)) {
        let e: Vec<u64> = e.into_iter().map(|a| a % m).collect();
        let exact = rational_to_f64(&arc_discrepancy_exact(m, &e));
        let x: Vec<f64> = e.iter().map(|&a| a as f64 / m as f64).collect();
        let brute = brute_force_discrepancy(&x);
        prop_assert!((exact - brute).abs() < 1e-12, "{exact} vs {brute}");
        let mu = EmpiricalMeasure::uniform_p1(&circle(&x)).unwrap();
        let float = star_discrepancy(&mu, DEFAULT_TORUS_TOLERANCE).unwrap();
        prop_assert!((float - exact).abs() < 1e-9);
        prop_assert!(exact > 0.0 && exact <= 1.0);
    }

    #[test]
    fn weyl_bounded_and_conjugate_symmetric(x in prop::collection::vec(0.0f64..1.0, 1..50), k in -20i64..20) {
        let mu = EmpiricalMeasure::uniform_p1(&circle(&x)).unwrap();
        let a = weyl_sum(&mu, &[k], DEFAULT_TORUS_TOLERANCE).unwrap();
        let b = weyl_sum(&mu, &[-k], DEFAULT_TORUS_TOLERANCE).unwrap();
        prop_assert!(a.norm() <= 1.0 + 1e-12);
        prop_assert!((a - b.conj()).norm() < 1e-12);
    }

    #[test]
    fn cyclotomic_weyl_matches_exact(m in 1u64..120, a in prop::collection::vec(-50i64..50, 1..3), k in prop::collection::vec(-9i64..9, 2)) {
        let x = CyclotomicTorusPoint::new(m, &a).unwrap();
        let k = &k[..a.len()];
        let mu = galois_orbit_cyclotomic(&x).measure();
        let w = weyl_sum(&mu, k, DEFAULT_TORUS_TOLERANCE).unwrap();
        let exact = rational_to_f64(&weyl_sum_cyclotomic_exact(&x, k).unwrap());
        prop_assert!((w - Complex64::new(exact, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn minpoly_orbits_are_conjugation_closed(c in prop::collection::vec(-9i64..9, 2..7), lead in 1i64..5) {
        let mut c = c;
        c.push(lead);
        let Ok(x) = AlgebraicP1Point::from_i64(&c) else { return Ok(()) };
        let o = galois_orbit_minpoly(&x, 1e-20, Precision::DEFAULT).unwrap();
        prop_assert_eq!(o.degree(), c.len() - 1);
        for z in o.points() {
            let scale = z[0].norm().max(1.0);
            prop_assert!(o.points().iter().any(|w| (w[0] - z[0].conj()).norm() <= 1e-12 * scale));
        }
    }

    #[test]
    fn twisted_height_is_affine_in_eps(x in prop::collection::vec(0.0f64..1.0, 1..30), h in -5.0f64..5.0, eps in -1.0f64..1.0) {
        let mu = EmpiricalMeasure::uniform_p1(&circle(&x)).unwrap();
        let f = |z: &[Complex64]| z[0].re * 2.0 + z[0].im.powi(2);
        let mean = mu.integrate(f);
        prop_assert!((twisted_height(h, &mu, f, eps) - (h + eps * mean)).abs() <= 1e-12);
        let d = 1e-3;
        let slope = (twisted_height(h, &mu, f, eps + d) - twisted_height(h, &mu, f, eps - d)) / (2.0 * d);
        prop_assert!((slope - mean).abs() <= 1e-10);
    }
}
