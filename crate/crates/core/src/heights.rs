//! Naive heights of algebraic points.
//!
//! Rational points of `P^n` use the gcd-1 integer representative, where the
//! sum over all places collapses to `log max |z_i|`. Points of `P^1` over
//! `Qbar` go through the Mahler measure of the minimal polynomial, so no
//! number field place is ever enumerated. Torsion points of the torus have
//! height zero.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::numkernel::arith::ln_bigint;
use crate::numkernel::modp::irreducibility_certificate;
use crate::numkernel::mp::modulus;
use crate::numkernel::{poly_roots, IntPolynomial, NumError, Precision};

/// Primes tried by the modular irreducibility certificate.
const CERTIFICATE_PRIMES: usize = 60;

#[derive(Clone, Debug, PartialEq)]
pub enum HeightError {
    AllZero,
    ZeroPolynomial,
    ConstantPolynomial,
    NotSquarefree,
    /// A proper rational factor was found.
    Reducible,
    ZeroOrder,
    Num(NumError),
}

impl From<NumError> for HeightError {
    fn from(e: NumError) -> Self {
        HeightError::Num(e)
    }
}

impl fmt::Display for HeightError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeightError::AllZero => f.write_str("projective point with all coordinates zero"),
            HeightError::ZeroPolynomial => f.write_str("zero polynomial"),
            HeightError::ConstantPolynomial => f.write_str("constant polynomial defines no point"),
            HeightError::NotSquarefree => f.write_str("minimal polynomial is not squarefree"),
            HeightError::Reducible => f.write_str("minimal polynomial has a rational factor"),
            HeightError::ZeroOrder => f.write_str("cyclotomic order must be positive"),
            HeightError::Num(e) => write!(f, "{e}"),
        }
    }
}

/// Point of `P^n(Q)` as coprime integers, first nonzero coordinate positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalProjectivePoint {
    coords: Vec<BigInt>,
}

impl RationalProjectivePoint {
    pub fn new(mut coords: Vec<BigInt>) -> Result<Self, HeightError> {
        let g = coords.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if g.is_zero() {
            return Err(HeightError::AllZero);
        }
        let first_negative = coords.iter().find(|c| !c.is_zero()).is_some_and(Signed::is_negative);
        let g = if first_negative { -g } else { g };
        for c in coords.iter_mut() {
            *c = &*c / &g;
        }
        Ok(RationalProjectivePoint { coords })
    }

    pub fn from_i64(coords: &[i64]) -> Result<Self, HeightError> {
        Self::new(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Clears denominators of rational coordinates.
    pub fn from_rationals(coords: &[BigRational]) -> Result<Self, HeightError> {
        let l = coords.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        Self::new(coords.iter().map(|c| c.numer() * (&l / c.denom())).collect())
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn dimension(&self) -> usize {
        self.coords.len() - 1
    }
}

/// How irreducibility of a minimal polynomial was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Irreducibility {
    /// Degree `<= 3` with no rational root.
    RationalRootTest,
    /// Recognized as the `m`-th cyclotomic polynomial.
    Cyclotomic(u64),
    /// Factor degrees modulo small primes leave no room for a proper factor.
    ModularDegrees,
    /// No certificate found; treated as irreducible.
    Assumed,
}

impl Irreducibility {
    pub fn is_certified(self) -> bool {
        self != Irreducibility::Assumed
    }
}

/// Point of `P^1(Qbar)` given by its minimal polynomial in the affine
/// coordinate `z = x1/x0`, or the point at infinity.
#[derive(Clone, Debug, PartialEq)]
pub enum AlgebraicP1Point {
    Infinity,
    Finite { minpoly: IntPolynomial, irreducibility: Irreducibility },
}

impl AlgebraicP1Point {
    /// Validates and normalizes (primitive, positive leading coefficient).
    pub fn new(p: &IntPolynomial) -> Result<Self, HeightError> {
        let d = p.degree().ok_or(HeightError::ZeroPolynomial)?;
        if d == 0 {
            return Err(HeightError::ConstantPolynomial);
        }
        let minpoly = p.primitive_part();
        if !minpoly.is_squarefree() {
            return Err(HeightError::NotSquarefree);
        }
        if d == 1 {
            return Ok(AlgebraicP1Point::Finite { minpoly, irreducibility: Irreducibility::RationalRootTest });
        }
        let roots = minpoly.rational_roots();
        if roots.as_ref().is_some_and(|r| !r.is_empty()) {
            return Err(HeightError::Reducible);
        }
        let irreducibility = if d <= 3 && roots.is_some() {
            Irreducibility::RationalRootTest
        } else if let Some(m) = minpoly.cyclotomic_index() {
            Irreducibility::Cyclotomic(m)
        } else if irreducibility_certificate(&minpoly, CERTIFICATE_PRIMES) {
            Irreducibility::ModularDegrees
        } else {
            Irreducibility::Assumed
        };
        Ok(AlgebraicP1Point::Finite { minpoly, irreducibility })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self, HeightError> {
        Self::new(&IntPolynomial::from_i64(coeffs))
    }

    /// Rational point `(x0 : x1)`.
    pub fn from_rational(x: &RationalProjectivePoint) -> Self {
        assert_eq!(x.dimension(), 1, "a point of P^1 is required");
        let (x0, x1) = (&x.coords()[0], &x.coords()[1]);
        if x0.is_zero() {
            return AlgebraicP1Point::Infinity;
        }
        let minpoly = IntPolynomial::linear(x0.clone(), x1.clone()).primitive_part();
        AlgebraicP1Point::Finite { minpoly, irreducibility: Irreducibility::RationalRootTest }
    }

    pub fn degree(&self) -> usize {
        match self {
            AlgebraicP1Point::Infinity => 1,
            AlgebraicP1Point::Finite { minpoly, .. } => minpoly.degree().unwrap_or(0),
        }
    }

    pub fn minpoly(&self) -> Option<&IntPolynomial> {
        match self {
            AlgebraicP1Point::Infinity => None,
            AlgebraicP1Point::Finite { minpoly, .. } => Some(minpoly),
        }
    }

    pub fn irreducibility(&self) -> Irreducibility {
        match self {
            AlgebraicP1Point::Infinity => Irreducibility::RationalRootTest,
            AlgebraicP1Point::Finite { irreducibility, .. } => *irreducibility,
        }
    }
}

/// Torsion point `(zeta_m^{a_1}, ..., zeta_m^{a_n})` of `G_m^n`, embedded in
/// `P^n` as `(1 : z_1 : ... : z_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclotomicTorusPoint {
    m: u64,
    exponents: Vec<u64>,
}

impl CyclotomicTorusPoint {
    pub fn new(m: u64, exponents: &[i64]) -> Result<Self, HeightError> {
        if m == 0 {
            return Err(HeightError::ZeroOrder);
        }
        let exponents = exponents.iter().map(|&a| a.rem_euclid(m as i64) as u64).collect();
        Ok(CyclotomicTorusPoint { m, exponents })
    }

    pub fn order(&self) -> u64 {
        self.m
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn dimension(&self) -> usize {
        self.exponents.len()
    }
}

/// `log max |z_i|` of the coprime integer representative.
pub fn naive_height_rational(x: &RationalProjectivePoint) -> f64 {
    let max = x.coords().iter().map(|c| c.magnitude()).max().expect("nonempty point");
    if max.is_one() {
        0.0
    } else {
        ln_bigint(&BigInt::from(max.clone()))
    }
}

/// `(1/d) (log |a_d| + sum log max(1, |alpha_i|))`, the logarithmic Mahler
/// measure divided by the degree.
pub fn naive_height_minpoly(x: &AlgebraicP1Point, tol: f64, precision: Precision) -> Result<f64, HeightError> {
    let (minpoly, irr) = match x {
        AlgebraicP1Point::Infinity => return Ok(0.0),
        AlgebraicP1Point::Finite { minpoly, irreducibility } => (minpoly, irreducibility),
    };
    if matches!(irr, Irreducibility::Cyclotomic(_)) {
        return Ok(0.0);
    }
    let d = minpoly.degree().ok_or(HeightError::ZeroPolynomial)?;
    let roots = poly_roots(minpoly, tol, precision)?;
    let mut s = ln_bigint(minpoly.leading().expect("nonzero"));
    for r in &roots {
        let l = modulus(r).ln_abs();
        if l > 0.0 {
            s += l;
        }
    }
    Ok(s / d as f64)
}

/// Torsion points of the torus have height exactly zero.
pub fn height_cyclotomic(_x: &CyclotomicTorusPoint) -> f64 {
    0.0
}

/// A place of `Q` with the local exponent of a rational number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalValuation {
    /// A prime, or an unfactored cofactor (treated as one block).
    pub base: BigUint,
    /// `v_base(num) - v_base(den)`
    pub exponent: i64,
}

const TRIAL_LIMIT: u64 = 100_000;

fn factor_trial(n: &BigUint) -> Vec<(BigUint, i64)> {
    let mut n = n.clone();
    let mut out = Vec::new();
    let mut p = 2u64;
    while p <= TRIAL_LIMIT && n > BigUint::one() {
        let bp = BigUint::from(p);
        if &bp * &bp > n {
            break;
        }
        let mut e = 0;
        while (&n % &bp).is_zero() {
            n /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((bp, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > BigUint::one() {
        out.push((n, 1));
    }
    out
}

/// Finite-place exponents of a nonzero rational (trial division; any
/// cofactor left after trial division is reported as a single block).
pub fn valuations(q: &BigRational) -> Vec<LocalValuation> {
    let mut out: Vec<LocalValuation> = factor_trial(q.numer().magnitude())
        .into_iter()
        .map(|(base, exponent)| LocalValuation { base, exponent })
        .collect();
    for (base, e) in factor_trial(q.denom().magnitude()) {
        out.push(LocalValuation { base, exponent: -e });
    }
    out.sort_by(|a, b| a.base.cmp(&b.base));
    out
}

/// `sum_v log |q|_v` over all places of `Q`.
///
/// The product `|q|_inf * prod_p p^(-v_p(q))` is formed exactly as a
/// rational number before the single logarithm, so the result is exactly 0
/// for every nonzero input; anything else would expose a bookkeeping bug.
pub fn product_formula_check(q: &BigRational) -> f64 {
    assert!(!q.is_zero(), "product formula needs a nonzero rational");
    let mut prod = q.abs();
    for v in valuations(q) {
        let b = BigRational::from_integer(BigInt::from(v.base));
        let e = v.exponent.unsigned_abs() as u32;
        let factor = num_traits::Pow::pow(&b, e);
        if v.exponent > 0 {
            prod /= factor;
        } else {
            prod *= factor;
        }
    }
    if prod.is_one() {
        0.0
    } else {
        let n = prod.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = prod.denom().to_f64().unwrap_or(f64::INFINITY);
        libm::log(n) - libm::log(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const TOL: f64 = 1e-20;

    fn h_poly(c: &[i64]) -> f64 {
        naive_height_minpoly(&AlgebraicP1Point::from_i64(c).unwrap(), TOL, Precision::DEFAULT).unwrap()
    }

    #[test]
    fn rational_heights() {
        let ones = RationalProjectivePoint::from_i64(&[1, 1, 1, 1]).unwrap();
        assert_eq!(naive_height_rational(&ones), 0.0);
        let a = RationalProjectivePoint::from_i64(&[1, 2]).unwrap();
        let b = RationalProjectivePoint::from_i64(&[2, 4]).unwrap();
        assert_eq!(a, b);
        assert_eq!(naive_height_rational(&a), libm::log(2.0));
        assert_eq!(naive_height_rational(&b), libm::log(2.0));
        let c = RationalProjectivePoint::from_i64(&[0, -3, 6]).unwrap();
        assert_eq!(c.coords(), &[BigInt::from(0), BigInt::from(1), BigInt::from(-2)]);
        assert_eq!(RationalProjectivePoint::from_i64(&[0, 0]), Err(HeightError::AllZero));
        let r = RationalProjectivePoint::from_rationals(&[
            BigRational::new(1.into(), 2.into()),
            BigRational::new(1.into(), 3.into()),
        ])
        .unwrap();
        assert_eq!(r.coords(), &[BigInt::from(3), BigInt::from(2)]);
    }

    #[test]
    fn minpoly_heights() {
        assert!((h_poly(&[-2, 1]) - libm::log(2.0)).abs() < 1e-15);
        // Mahler measure of z^2 - 2 is 2
        assert!((h_poly(&[-2, 0, 1]) - 0.5 * libm::log(2.0)).abs() < 1e-15);
        for m in [1u64, 2, 3, 5, 12, 30] {
            let p = AlgebraicP1Point::new(&IntPolynomial::cyclotomic(m)).unwrap();
            assert_eq!(naive_height_minpoly(&p, TOL, Precision::DEFAULT).unwrap(), 0.0);
        }
        assert_eq!(naive_height_minpoly(&AlgebraicP1Point::Infinity, TOL, Precision::DEFAULT).unwrap(), 0.0);
        // Lehmer's polynomial: log(1.17628081826...) / 10
        let lehmer = [1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1];
        assert!((h_poly(&lehmer) - libm::log(1.176_280_818_259_917_5) / 10.0).abs() < 1e-13);
        // 3 z^2 - 2 z + 5, roots of modulus sqrt(5/3)
        let want = 0.5 * (libm::log(3.0) + libm::log(5.0 / 3.0));
        assert!((h_poly(&[5, -2, 3]) - want).abs() < 1e-15);
    }

    #[test]
    fn construction_certificates() {
        assert_eq!(AlgebraicP1Point::from_i64(&[7]), Err(HeightError::ConstantPolynomial));
        assert_eq!(AlgebraicP1Point::from_i64(&[1, 2, 1]), Err(HeightError::NotSquarefree));
        assert_eq!(AlgebraicP1Point::from_i64(&[-2, 1, 1]), Err(HeightError::Reducible));
        let p = AlgebraicP1Point::from_i64(&[-2, 0, 1]).unwrap();
        assert_eq!(p.irreducibility(), Irreducibility::RationalRootTest);
        let p = AlgebraicP1Point::new(&IntPolynomial::cyclotomic(5)).unwrap();
        assert_eq!(p.irreducibility(), Irreducibility::Cyclotomic(5));
        let p = AlgebraicP1Point::from_i64(&[-2, 0, 0, 0, 1]).unwrap();
        assert_eq!(p.irreducibility(), Irreducibility::ModularDegrees);
        // (z^2 - 2)(z^2 - 3): no rational root, no certificate
        let p = AlgebraicP1Point::from_i64(&[6, 0, -5, 0, 1]).unwrap();
        assert_eq!(p.irreducibility(), Irreducibility::Assumed);
        // normalization: content and sign removed
        let p = AlgebraicP1Point::from_i64(&[4, 0, -2]).unwrap();
        assert_eq!(p.minpoly(), Some(&IntPolynomial::from_i64(&[-2, 0, 1])));
    }

    #[test]
    fn cyclotomic_points() {
        for (m, e) in [(5u64, vec![1i64, 2]), (1, vec![0]), (12, vec![7])] {
            let x = CyclotomicTorusPoint::new(m, &e).unwrap();
            assert_eq!(height_cyclotomic(&x), 0.0);
        }
        assert_eq!(CyclotomicTorusPoint::new(0, &[1]), Err(HeightError::ZeroOrder));
        assert_eq!(CyclotomicTorusPoint::new(5, &[-1]).unwrap().exponents(), &[4]);
    }

    #[test]
    fn product_formula() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(product_formula_check(&q(6, 5)), 0.0);
        assert_eq!(product_formula_check(&q(-1, 1)), 0.0);
        let two100 = BigRational::from_integer(BigInt::one() << 100usize);
        assert_eq!(product_formula_check(&two100), 0.0);
        let v = valuations(&two100);
        assert_eq!(v, vec![LocalValuation { base: BigUint::from(2u8), exponent: 100 }]);
        // a large prime cofactor survives trial division as one block
        let big = BigRational::new(BigInt::from(1_000_000_007u64) * 12, 35.into());
        assert_eq!(product_formula_check(&big), 0.0);
    }
}
