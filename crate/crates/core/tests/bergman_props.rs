//! Bergman-module invariants, with brute-force two-dimensional quadrature as
//! the independent oracle.

use arakelov_core::bergman::{
    closed_form_c_gram, default_grid, distortion, intersection, l2_gram, mixed_arithmetic_intersection, sup_norm,
    twisted_gram, Chart, CurvatureMeasure, DistortionEvaluator, GramData, MetricFamily, P1Coord, Quadrature,
    Section, SectionSpace,
};
use num_complex::Complex64;
use proptest::prelude::*;

/// Simpson in `s = sqrt(r)` times the trapezoid rule in angle, on both charts;
/// `f` receives the point and the measure weight of the node.
fn brute_force(mu: &CurvatureMeasure, radial: usize, angular: usize, mut f: impl FnMut(P1Coord, f64)) {
    for chart in [Chart::Zero, Chart::Infinity] {
        for i in 0..=2 * radial {
            let s = i as f64 / (2 * radial) as f64;
            let simpson = if i == 0 || i == 2 * radial { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            let r = s * s;
            let z = |a: usize| Complex64::from_polar(r, 2.0 * std::f64::consts::PI * a as f64 / angular as f64);
            // area density in the chart: the curvature density in z, or in w
            let dens = match chart {
                Chart::Zero => mu.density(z(0)),
                // density in w is |z|^4 times the density in z = 1 / w
                Chart::Infinity if r == 0.0 => {
                    // limit as w -> 0 of density(1/w) / |w|^4
                    let eps = 1e-7;
                    mu.density(Complex64::new(1.0 / eps, 0.0)) / eps.powi(4)
                }
                Chart::Infinity => mu.density(Complex64::new(1.0 / r, 0.0)) / r.powi(4),
            };
            // dA = r dr dtheta, dr = 2 s ds
            let w = simpson / (6.0 * radial as f64) * 2.0 * s * r * dens * 2.0 * std::f64::consts::PI / angular as f64;
            if w == 0.0 {
                continue;
            }
            for a in 0..angular {
                f(P1Coord { chart, u: z(a) }, w);
            }
        }
    }
}

/// Gram of monomials under `|twist|^2 |t|^2`, by brute force.
fn brute_gram(d: usize, metric: &MetricFamily, twist: Option<(&Section, &MetricFamily)>, mu: &CurvatureMeasure) -> Vec<Vec<f64>> {
    let mut g = vec![vec![0.0; d + 1]; d + 1];
    let monos: Vec<Section> = (0..=d).map(|k| Section::monomial(d, k)).collect();
    brute_force(mu, 1000, 120, |p, w| {
        let tw = twist.map_or(1.0, |(s, m)| s.pointwise_norm(m, p).powi(2));
        let v: Vec<Complex64> = monos
            .iter()
            .map(|s| {
                let val = match p.chart {
                    Chart::Zero => p.u.powu(s.coeffs().iter().position(|&c| c != 0.0).unwrap() as u32),
                    Chart::Infinity => p.u.powu((d - s.coeffs().iter().position(|&c| c != 0.0).unwrap()) as u32),
                };
                let norm = s.pointwise_norm(metric, p);
                if val.norm() == 0.0 {
                    Complex64::new(norm, 0.0)
                } else {
                    val / val.norm() * norm
                }
            })
            .collect();
        for k in 0..=d {
            for l in 0..=d {
                g[k][l] += w * tw * (v[k] * v[l].conj()).re;
            }
        }
    });
    g
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

fn matrix_close(g: &GramData, h: &[Vec<f64>], tol: f64) -> bool {
    let n = g.dim();
    (0..n).all(|k| {
        (0..n).all(|l| {
            let scale = (g.entry(k, k) * g.entry(l, l)).sqrt();
            (g.entry(k, l) - h[k][l]).abs() <= tol * scale
        })
    })
}

#[test]
fn gram_matches_brute_force_c_half() {
    let q = Quadrature::default();
    let c = MetricFamily::c(0.5).unwrap();
    let mu = CurvatureMeasure::induced_by(&c).unwrap();
    let g = l2_gram(SectionSpace { degree: 2 }, &c.scale(2), &mu, &q).unwrap();
    let h = brute_gram(2, &c.scale(2), None, &mu);
    assert!(matrix_close(&g, &h, 1e-8));
    let exact = closed_form_c_gram(2, 0.5).unwrap();
    for k in 0..3 {
        assert!(rel_close(g.entry(k, k), exact.entry(k, k), 1e-12));
    }
}

#[test]
fn twisted_gram_matches_brute_force() {
    let q = Quadrature::default();
    let l = MetricFamily::c(0.6).unwrap().scale(2);
    let m = MetricFamily::c(1.5).unwrap();
    let mu = CurvatureMeasure::induced_by(&l).unwrap();
    let s = Section::new(vec![0.8, -0.3]).unwrap();
    let metric = l.scale(3).minus(&m.scale(2));
    let g = twisted_gram(&s, &m, SectionSpace { degree: 4 }, &metric, &mu, &q).unwrap();
    let h = brute_gram(4, &metric, Some((&s, &m)), &mu);
    assert!(matrix_close(&g, &h, 1e-8));
}

#[test]
fn difference_profile_matches_brute_force() {
    // N = 10, j = 5 with L = O(2), M = O(1): sections of O(15)
    let q = Quadrature::default();
    let l = MetricFamily::c(0.7).unwrap().scale(2);
    let m = MetricFamily::c(1.3).unwrap();
    let metric = l.scale(10).minus(&m.scale(5));
    let mu = CurvatureMeasure::induced_by(&l).unwrap();
    let g = l2_gram(SectionSpace { degree: 15 }, &metric, &mu, &q).unwrap();
    let ev = DistortionEvaluator::new(&g, &metric).unwrap();
    let h = brute_gram(15, &metric, None, &mu);
    // invert the brute-force Gram (diagonal up to quadrature noise) through its diagonal
    for p in default_grid(6, 5) {
        let want: f64 = (0..=15).map(|k| Section::monomial(15, k).pointwise_norm(&metric, p).powi(2) / h[k][k]).sum();
        assert!(rel_close(ev.eval(p), want, 1e-7), "{p:?}");
    }
}

#[test]
fn volume_comparison_determinants_match_brute_force() {
    use arakelov_core::bergman::volume_comparison;
    let q = Quadrature::default();
    let l = MetricFamily::c(0.8).unwrap().scale(2);
    let m = MetricFamily::c(1.2).unwrap();
    let s = Section::monomial(1, 0);
    let r = volume_comparison(8, 4, &s, &l, &m, &q).unwrap();
    let metric = l.scale(8).minus(&m.scale(4));
    let mu = CurvatureMeasure::induced_by(&l).unwrap();
    let ln_det = |g: Vec<Vec<f64>>| {
        // Cholesky on the Jacobi-scaled matrix
        let n = g.len();
        let d: Vec<f64> = (0..n).map(|i| g[i][i]).collect();
        let mut a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| g[i][j] / (d[i] * d[j]).sqrt()).collect()).collect();
        let mut acc: f64 = d.iter().map(|x| x.ln()).sum();
        for k in 0..n {
            let p = a[k][k];
            acc += p.ln();
            for i in k + 1..n {
                let f = a[i][k] / p;
                let (top, bottom) = a.split_at_mut(i);
                for (x, y) in bottom[0][k..].iter_mut().zip(&top[k][k..]) {
                    *x -= f * y;
                }
            }
        }
        acc
    };
    let want_l2 = ln_det(brute_gram(12, &metric, None, &mu));
    let want_s = ln_det(brute_gram(12, &metric, Some((&s, &m)), &mu));
    assert!((r.ln_det_l2 - want_l2).abs() < 1e-7 * want_l2.abs());
    assert!((r.ln_det_s - want_s).abs() < 1e-7 * want_s.abs());
}

#[test]
fn sup_norm_matches_dense_grid() {
    let s = Section::new(vec![1.0, 1.0]).unwrap();
    let fs = MetricFamily::fs();
    let v = sup_norm(&s, &fs).unwrap();
    let mut dense: f64 = 0.0;
    for p in default_grid(400, 400) {
        dense = dense.max(s.pointwise_norm(&fs, p));
    }
    assert!(v >= dense && v <= dense * (1.0 + 1e-4));
    assert!((v - std::f64::consts::SQRT_2).abs() < 1e-9);
}

#[test]
fn gromov_monomials_match_beta_oracle() {
    // FS: sup of |z|^(2k) / (1 + |z|^2)^d is (k/d)^k ((d-k)/d)^(d-k);
    // the squared L2 norm is k! (d-k)! / (d+1)!
    let q = Quadrature::default();
    let d = 9;
    let fs = MetricFamily::fs();
    let g = l2_gram(SectionSpace { degree: d }, &fs.scale(d as i64), &CurvatureMeasure::fs(), &q).unwrap();
    for k in 0..=d {
        let (kf, df) = (k as f64, d as f64);
        let sup_sq = if k == 0 || k == d { 1.0 } else { (kf / df).powf(kf) * ((df - kf) / df).powf(df - kf) };
        let lf = |n: usize| (1..=n).map(|i| (i as f64).ln()).sum::<f64>();
        let l2_sq = (lf(k) + lf(d - k) - lf(d + 1)).exp();
        let s = Section::monomial(d, k);
        let ratio = sup_norm(&s, &fs.scale(d as i64)).unwrap() / g.entry(k, k).sqrt();
        assert!(rel_close(ratio, (sup_sq / l2_sq).sqrt(), 1e-9), "{k}");
    }
}

#[test]
fn chi_additivity_in_the_fs_case() {
    // the FS Gram is diagonal, so chi from the full determinant equals the
    // sum over the orthogonal lines
    let q = Quadrature::default();
    for n in [3usize, 10, 25] {
        let g = l2_gram(SectionSpace { degree: n }, &MetricFamily::fs().scale(n as i64), &CurvatureMeasure::fs(), &q)
            .unwrap();
        let full = g.ln_det().unwrap();
        let split: f64 = (0..=n).map(|k| g.entry(k, k).ln()).sum();
        assert!((full - split).abs() < 1e-9);
    }
}

fn c_param() -> impl Strategy<Value = f64> {
    (-2.0f64..1.5).prop_map(f64::exp)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trace_identity(c in c_param(), c2 in c_param(), d in 0usize..12, t in 1u32..4) {
        let q = Quadrature::default();
        let base = MetricFamily::c(c).unwrap();
        let mu = CurvatureMeasure::induced_by(&base.plus(&MetricFamily::t(t).unwrap())).unwrap();
        let metric = MetricFamily::c(c2).unwrap().scale(d as i64);
        let g = l2_gram(SectionSpace { degree: d }, &metric, &mu, &q).unwrap();
        let ev = DistortionEvaluator::new(&g, &metric).unwrap();
        prop_assert!((ev.trace_integral(&mu, &q).unwrap() - (d + 1) as f64).abs() < 1e-8);
    }

    #[test]
    fn basis_independence(c in c_param(), cm in c_param(), d in 1usize..8, a in -1.0f64..1.0) {
        let q = Quadrature::default();
        let l = MetricFamily::c(c).unwrap();
        let m = MetricFamily::c(cm).unwrap();
        let mu = CurvatureMeasure::induced_by(&l).unwrap();
        let s = Section::new(vec![1.0, a]).unwrap();
        let metric = l.scale(d as i64);
        // a non-diagonal Gram: twist by a section of M
        let g = twisted_gram(&s, &m, SectionSpace { degree: d }, &metric, &mu, &q).unwrap();
        let ev = DistortionEvaluator::new(&g, &metric).unwrap();
        let eig = ev.eigen();
        for p in default_grid(4, 6) {
            let (x, y) = (ev.eval(p), eig.eval(p));
            prop_assert!((x - y).abs() <= 1e-9 * x.max(1.0), "{x} {y}");
        }
    }

    #[test]
    fn fs_constancy(d in 0usize..25) {
        let q = Quadrature::default();
        let p = distortion(SectionSpace { degree: d }, &MetricFamily::fs().scale(d as i64), &CurvatureMeasure::fs(), default_grid(6, 6), &q).unwrap();
        prop_assert!(p.sup - p.inf <= 1e-8);
        prop_assert!((p.sup - (d + 1) as f64).abs() <= 1e-8);
    }

    #[test]
    fn refinement_stays_within_certificate(c in c_param(), d in 1usize..30) {
        let coarse = Quadrature::default();
        let fine = Quadrature { tolerance: 1e-14, budget: 1 << 18 };
        let m = MetricFamily::c(c).unwrap();
        let mu = CurvatureMeasure::fs();
        let a = l2_gram(SectionSpace { degree: d }, &m.scale(d as i64), &mu, &coarse).unwrap();
        let b = l2_gram(SectionSpace { degree: d }, &m.scale(d as i64), &mu, &fine).unwrap();
        prop_assert!(a.error_estimate() <= 1e-10);
        for k in 0..=d {
            prop_assert!(rel_close(a.entry(k, k), b.entry(k, k), a.error_estimate().max(1e-13) * 10.0));
        }
    }

    #[test]
    fn intersection_symmetry_and_closed_form(c1 in c_param(), c2 in c_param()) {
        let q = Quadrature::default();
        let a = MetricFamily::c(c1).unwrap();
        let b = MetricFamily::c(c2).unwrap();
        let ab = mixed_arithmetic_intersection(&a, &b, &q).unwrap();
        let ba = mixed_arithmetic_intersection(&b, &a, &q).unwrap();
        prop_assert!((ab - ba).abs() < 1e-8);
        // with u = c2 |z|^2 and a = c1 / c2 the integral is a log a / (2 (a - 1))
        let r = c1 / c2;
        let tail = if (r - 1.0).abs() < 1e-9 { 0.5 } else { 0.5 * r * r.ln() / (r - 1.0) };
        prop_assert!((ab - (0.5 * c2.ln() + tail)).abs() < 1e-8);
        let _ = intersection(&a.scale(2), &b, &q).unwrap();
    }

    #[test]
    fn l2_never_exceeds_sup(seed in any::<u64>(), k in 0u32..6, j in 1u32..6, c in c_param()) {
        use arakelov_core::rng;
        let q = Quadrature::default();
        let l = MetricFamily::c(c).unwrap();
        let m = MetricFamily::fs();
        let metric = l.scale(k as i64).plus(&m.scale(j as i64));
        let d = (k + j) as usize;
        let g = l2_gram(SectionSpace { degree: d }, &metric, &CurvatureMeasure::induced_by(&l).unwrap(), &q).unwrap();
        let mut r = rng::stream(seed, 1 << 40);
        let coeffs: Vec<f64> = (0..=d).map(|_| rng::normal(&mut r)).collect();
        let s = Section::new(coeffs.clone()).unwrap();
        prop_assert!(g.quadratic_form(&coeffs).sqrt() <= sup_norm(&s, &metric).unwrap() * (1.0 + 1e-9));
    }
}
