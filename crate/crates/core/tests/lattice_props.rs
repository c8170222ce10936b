use arakelov_core::lattice::{
    induced_sub_quotient, saturate, sequence_identity_holds, trace_det_bound_holds, Boundary, BallCounter,
    NormedLattice, SublatticeEmbedding,
};
use arakelov_core::numkernel::matrix;
use arakelov_core::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

/// `B^T B + I` for a random integer `B`, divided by `scale`.
fn gram_strategy(max_rank: usize) -> impl Strategy<Value = Vec<Vec<BigRational>>> {
    (1..=max_rank)
        .prop_flat_map(|r| (Just(r), prop::collection::vec(-3i64..=3, r * r), 1i64..=40))
        .prop_map(|(r, b, scale)| {
            (0..r)
                .map(|i| {
                    (0..r)
                        .map(|j| {
                            let mut s: i64 = (0..r).map(|k| b[k * r + i] * b[k * r + j]).sum();
                            if i == j {
                                s += 1;
                            }
                            BigRational::new(s.into(), scale.into())
                        })
                        .collect()
                })
                .collect()
        })
}

fn lattice(g: Vec<Vec<BigRational>>) -> NormedLattice {
    NormedLattice::new(g, 1u32.into()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn exact_sequence_identity(
        g in gram_strategy(6),
        raw in prop::collection::vec(prop::collection::vec(-4i64..=4, 6), 0..=6),
        tor in 1u32..=12,
    ) {
        let r = g.len();
        let m = NormedLattice::new(g, tor.into()).unwrap();
        let gens: Vec<Vec<i64>> = raw.into_iter().map(|v| v[..r].to_vec()).take(r).collect();
        let s = SublatticeEmbedding::from_i64(&gens);
        // dependent generator sets are rejected; skip them
        let Ok(sat) = saturate(&s, r) else { return Ok(()) };
        let (sub, quot) = induced_sub_quotient(&m, &sat).unwrap();
        prop_assert!(sequence_identity_holds(&m, &sub, &quot));
        prop_assert_eq!(sub.rank() + quot.rank(), r);
    }

    #[test]
    fn trace_bounded_matrices_have_det_at_most_one(g in gram_strategy(6)) {
        // normalize to trace exactly r
        let r = g.len();
        let tr: BigRational = (0..r).map(|i| g[i][i].clone()).sum();
        let f = BigRational::from_integer(BigInt::from(r)) / tr;
        let n: Vec<Vec<BigRational>> = g.iter().map(|row| row.iter().map(|x| x * &f).collect()).collect();
        prop_assert!(trace_det_bound_holds(&n));
        prop_assert!(matrix::det(&n) <= BigRational::one());
    }

    #[test]
    fn shrinking_the_norm_never_loses_points(g in gram_strategy(4), alpha in 2i64..=5) {
        let m = lattice(g);
        prop_assume!(m.chi() < 8.0);
        let shrunk = m.scaled(&BigRational::new(1.into(), alpha.into()));
        prop_assume!(shrunk.chi() < 10.0);
        prop_assert!(shrunk.h0().unwrap() >= m.h0().unwrap());
    }

    #[test]
    fn minkowski_lower_bound(g in gram_strategy(6)) {
        let m = lattice(g);
        prop_assume!(m.chi() < 9.0);
        let r = m.rank() as f64;
        prop_assert!(m.h0().unwrap() >= m.chi() - r * core::f64::consts::LN_2 - 1e-12);
    }

    #[test]
    fn h1_matches_box_scan(g in gram_strategy(3)) {
        let m = lattice(g);
        let inv = matrix::inverse(m.gram()).unwrap();
        let counter = BallCounter::new(&inv, Boundary::Closed).unwrap();
        // a^T G^-1 a <= 1 implies |a_i| <= sqrt(G_ii)
        let r = m.rank();
        let bound: Vec<i64> = (0..r)
            .map(|i| {
                let gi = arakelov_core::numkernel::arith::rational_to_f64(&m.gram()[i][i]);
                gi.sqrt().floor() as i64 + 1
            })
            .collect();
        prop_assume!(bound.iter().product::<i64>() < 20_000);
        let mut n = 0u64;
        let mut a = vec![0i64; r];
        fn rec(i: usize, a: &mut Vec<i64>, bound: &[i64], inv: &[Vec<BigRational>], n: &mut u64) {
            if i == a.len() {
                let mut s = BigRational::zero();
                for p in 0..a.len() {
                    for q in 0..a.len() {
                        s += &inv[p][q] * BigRational::from_integer((a[p] * a[q]).into());
                    }
                }
                if s <= BigRational::one() {
                    *n += 1;
                }
                return;
            }
            for v in -bound[i]..=bound[i] {
                a[i] = v;
                rec(i + 1, a, bound, inv, n);
            }
        }
        rec(0, &mut a, &bound, &inv, &mut n);
        prop_assert_eq!(counter.count(), n);
        prop_assert!((m.h1().unwrap() - (n as f64).ln()).abs() < 1e-15);
    }
}
