use arakelov_core::heights::{
    naive_height_minpoly, naive_height_rational, AlgebraicP1Point, RationalProjectivePoint,
};
use arakelov_core::numkernel::{IntPolynomial, Precision};
use num_rational::BigRational;
use proptest::prelude::*;

const TOL: f64 = 1e-20;

fn height(p: &IntPolynomial) -> f64 {
    naive_height_minpoly(&AlgebraicP1Point::new(p).unwrap(), TOL, Precision::DEFAULT).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn projective_invariance(
        coords in prop::collection::vec(-10_000i64..=10_000, 2..=5),
        num in prop::sample::select(vec![-7i64, -3, -1, 1, 2, 5, 12]),
        den in 1i64..=9,
    ) {
        prop_assume!(coords.iter().any(|&c| c != 0));
        let x = RationalProjectivePoint::from_i64(&coords).unwrap();
        let s = BigRational::new(num.into(), den.into());
        let scaled: Vec<BigRational> = coords.iter().map(|&c| BigRational::from_integer(c.into()) * &s).collect();
        let y = RationalProjectivePoint::from_rationals(&scaled).unwrap();
        prop_assert_eq!(&x, &y);
        prop_assert_eq!(naive_height_rational(&x), naive_height_rational(&y));
    }

    #[test]
    fn linear_minpoly_agrees_with_rational_height(a in -100_000i64..=100_000, b in 1i64..=100_000) {
        let x = RationalProjectivePoint::from_i64(&[b, a]).unwrap();
        let p = IntPolynomial::from_i64(&[-a, b]);
        prop_assert!((height(&p) - naive_height_rational(&x)).abs() <= 1e-12);
    }
}

#[test]
fn kronecker_corpus() {
    // zero exactly on cyclotomic polynomials and z
    for m in 1..=40u64 {
        assert!(height(&IntPolynomial::cyclotomic(m)).abs() <= 1e-12, "Phi_{m}");
    }
    assert!(height(&IntPolynomial::from_i64(&[0, 1])).abs() <= 1e-12);
    // positive otherwise; Lehmer's polynomial is the smallest known case
    let non_cyclotomic: [&[i64]; 7] = [
        &[-2, 0, 1],
        &[-1, -1, 1],
        &[1, -1, 0, 1],
        &[-1, 1, 0, 0, 0, 1, 0, 0, 1],
        &[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1],
        &[3, 0, 0, 0, 0, 1],
        &[1, 0, 0, 0, 0, 0, 2],
    ];
    for c in non_cyclotomic {
        let p = IntPolynomial::from_i64(c);
        if AlgebraicP1Point::new(&p).is_ok() {
            assert!(height(&p) > 1e-3, "{p}");
        }
    }
}
