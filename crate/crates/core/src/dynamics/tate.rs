//! Canonical heights by Tate's telescoping limit, and preperiodicity.
//!
//! Write `x_k` for the coprime integer representative of `phi^k(x)` and
//! `F` for the pair of forms. Then `F(x_k) = g_k x_(k+1)` with
//! `g_k = gcd(F(x_k))` dividing the resultant, and
//!
//! `h(x_(k+1)) - q h(x_k) = log max|F(u_k)| - log g_k =: t_k`
//!
//! where `u_k = x_k / max|x_k|` is the archimedean direction. Hence
//! `h_hat(x) = h(x) + sum_k t_k / q^(k+1)` and stopping after `N` terms costs
//! at most `C q^-N / (q - 1)` since `|t_k| <= C`.
//!
//! Neither term needs the exponentially large `x_k`: `u_k` is iterated in
//! floating point at a precision raised until two runs agree, and `g_k` only
//! depends on `x_k` modulo the resultant. Division by `g_k` loses one factor
//! of `g_k` of modulus per step, so starting from `|Res|^(N+1)` suffices.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{eval_form, DynError, Endomorphism, MapKind};
use crate::heights::{
    naive_height_minpoly, naive_height_rational, AlgebraicP1Point, CyclotomicTorusPoint, RationalProjectivePoint,
};
use crate::numkernel::arith::ln_bigint;
use crate::numkernel::{MpReal, Precision};

/// Hard cap on the number of telescoping terms.
pub const MAX_TATE_ITERATIONS: usize = 2000;
const MAX_PRECISION_BITS: usize = 1 << 14;

/// A point accepted by [`canonical_height`].
#[derive(Clone, Debug, PartialEq)]
pub enum DynPoint {
    Rational(RationalProjectivePoint),
    Algebraic(AlgebraicP1Point),
    Cyclotomic(CyclotomicTorusPoint),
}

/// Truncated Tate limit with its certified error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TateEstimate {
    pub value: f64,
    /// `C q^-N / (q - 1)`
    pub error_bound: f64,
    pub iterations: usize,
    pub transform_constant: f64,
    /// Working precision of the archimedean orbit (0 when none was needed).
    pub precision_bits: usize,
}

impl TateEstimate {
    fn exact(value: f64) -> Self {
        TateEstimate { value, error_bound: 0.0, iterations: 0, transform_constant: 0.0, precision_bits: 0 }
    }
}

/// Smallest `N >= 0` with `C q^-N / (q - 1) <= eps`.
pub fn iterations_for(c: f64, q: usize, eps: f64) -> usize {
    if c <= 0.0 {
        return 0;
    }
    let qf = q as f64;
    let n = libm::ceil(libm::log(c / (eps * (qf - 1.0))) / libm::log(qf));
    let mut n = if n > 0.0 { n as usize } else { 0 };
    // guard the float rounding of the logarithms
    while c * libm::pow(qf, -(n as f64)) / (qf - 1.0) > eps {
        n += 1;
    }
    n
}

/// `h_hat_phi(x)` within `eps`.
pub fn canonical_height(
    phi: &Endomorphism,
    x: &DynPoint,
    eps: f64,
    precision: Precision,
) -> Result<TateEstimate, DynError> {
    if !(eps > 0.0) {
        return Err(DynError::NonPositiveTolerance);
    }
    if phi.kind() == MapKind::Power {
        // h(x^q) = q h(x) exactly, so the limit is the naive height.
        return match x {
            DynPoint::Rational(p) if p.dimension() == phi.dimension() => Ok(TateEstimate::exact(naive_height_rational(p))),
            DynPoint::Algebraic(p) if phi.dimension() == 1 => {
                let tol = libm::sqrt(precision.epsilon());
                Ok(TateEstimate::exact(naive_height_minpoly(p, tol, precision)?))
            }
            DynPoint::Cyclotomic(p) if p.dimension() == phi.dimension() => Ok(TateEstimate::exact(0.0)),
            _ => Err(DynError::UnsupportedPoint),
        };
    }
    let start = match x {
        DynPoint::Rational(p) if p.dimension() == 1 => p.clone(),
        DynPoint::Algebraic(AlgebraicP1Point::Infinity) => RationalProjectivePoint::from_i64(&[0, 1])?,
        DynPoint::Algebraic(AlgebraicP1Point::Finite { minpoly, .. }) if minpoly.degree() == Some(1) => {
            // a z - b  <->  (a : b)
            RationalProjectivePoint::new(alloc::vec![minpoly.coeff(1), -minpoly.coeff(0)])?
        }
        _ => return Err(DynError::UnsupportedPoint),
    };
    let c = phi.height_transform_bound();
    let q = phi.degree();
    let needed = iterations_for(c, q, eps);
    let n = needed.min(MAX_TATE_ITERATIONS);
    let mut bits = precision.get().max(64);
    loop {
        let a = telescope(phi, &start, n, Precision::bits(bits));
        let b = telescope(phi, &start, n, Precision::bits(bits + 64));
        if (a - b).abs() <= eps / 16.0 {
            let est = TateEstimate {
                value: b,
                error_bound: c * libm::pow(q as f64, -(n as f64)) / (q as f64 - 1.0),
                iterations: n,
                transform_constant: c,
                precision_bits: bits + 64,
            };
            if needed > n {
                return Err(DynError::OrbitOverflow { partial: est });
            }
            return Ok(est);
        }
        bits *= 2;
        if bits > MAX_PRECISION_BITS {
            return Err(DynError::PrecisionExhausted);
        }
    }
}

fn eval_form_mp(f: &[BigInt], u0: &MpReal, u1: &MpReal, prec: Precision) -> MpReal {
    let q = f.len() - 1;
    let mut p0 = Vec::with_capacity(q + 1);
    let mut acc = MpReal::one().with_precision(prec);
    for _ in 0..=q {
        p0.push(acc.clone());
        acc = &acc * u0;
    }
    let mut sum = MpReal::zero_at(prec);
    let mut x1k = MpReal::one().with_precision(prec);
    for (k, a) in f.iter().enumerate() {
        if !a.is_zero() {
            sum = sum + MpReal::from_bigint(a, prec) * p0[q - k].clone() * x1k.clone();
        }
        x1k = &x1k * u1;
    }
    sum
}

/// `h(x) + sum_{k < n} t_k / q^(k+1)` at the given working precision.
fn telescope(phi: &Endomorphism, x: &RationalProjectivePoint, n: usize, prec: Precision) -> f64 {
    let forms = phi.forms();
    let q = phi.degree() as f64;
    let res = phi.resultant().abs();
    let track = !res.is_one();
    let mut modulus = if track { num_traits::Pow::pow(&res, (n + 1) as u32) } else { BigInt::one() };
    let mut xm: Vec<BigInt> = x.coords().iter().map(|c| c.mod_floor(&modulus)).collect();

    let c = x.coords();
    let big = if c[0].magnitude() >= c[1].magnitude() { &c[0] } else { &c[1] };
    let scale = MpReal::from_bigint(big, prec).abs();
    let mut u0 = MpReal::from_bigint(&c[0], prec) / scale.clone();
    let mut u1 = MpReal::from_bigint(&c[1], prec) / scale.clone();

    let mut value = naive_height_rational(x);
    let mut weight = 1.0;
    for _ in 0..n {
        weight /= q;
        let f0 = eval_form_mp(&forms[0], &u0, &u1, prec);
        let f1 = eval_form_mp(&forms[1], &u0, &u1, prec);
        let m = if f0.abs() >= f1.abs() { f0.abs() } else { f1.abs() };
        let mut t = m.ln_abs();
        if track {
            let y0 = eval_form(&forms[0], &xm[0], &xm[1]).mod_floor(&modulus);
            let y1 = eval_form(&forms[1], &xm[0], &xm[1]).mod_floor(&modulus);
            let g = y0.gcd(&y1).gcd(&res);
            if !g.is_one() {
                t -= ln_bigint(&g);
                modulus = &modulus / &g;
            }
            xm = alloc::vec![(y0 / &g).mod_floor(&modulus), (y1 / &g).mod_floor(&modulus)];
        }
        value += t * weight;
        u0 = f0 / m.clone();
        u1 = f1 / m.clone();
    }
    value
}

/// Exact orbit search. Terminates because preperiodic points satisfy
/// `h <= C/(q-1)`, so an orbit passing `h(x) + 2C/(q-1) + 1` escapes.
pub fn is_preperiodic(phi: &Endomorphism, x: &RationalProjectivePoint) -> Result<bool, DynError> {
    if x.dimension() != phi.dimension() {
        return Err(DynError::UnsupportedPoint);
    }
    let c = phi.height_transform_bound();
    let cutoff = naive_height_rational(x) + 2.0 * c / (phi.degree() as f64 - 1.0) + 1.0;
    let mut seen = BTreeSet::new();
    let mut y = x.clone();
    loop {
        if seen.contains(&y) {
            return Ok(true);
        }
        if naive_height_rational(&y) > cutoff {
            return Ok(false);
        }
        let next = phi.apply(&y)?;
        seen.insert(y);
        y = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::IntPolynomial;

    fn rat(c: &[i64]) -> RationalProjectivePoint {
        RationalProjectivePoint::from_i64(c).unwrap()
    }

    #[test]
    fn power_map_examples() {
        let z2 = Endomorphism::power(1, 2).unwrap();
        let e = canonical_height(&z2, &DynPoint::Rational(rat(&[1, 2])), 1e-8, Precision::DEFAULT).unwrap();
        assert_eq!(e.value, libm::log(2.0));
        assert_eq!((e.error_bound, e.iterations), (0.0, 0));
        for m in [3u64, 5, 12] {
            let p = AlgebraicP1Point::new(&IntPolynomial::cyclotomic(m)).unwrap();
            let e = canonical_height(&z2, &DynPoint::Algebraic(p), 1e-8, Precision::DEFAULT).unwrap();
            assert!(e.value.abs() <= 1e-10);
        }
        let torus = CyclotomicTorusPoint::new(7, &[1, 3]).unwrap();
        let p2 = Endomorphism::power(2, 2).unwrap();
        assert_eq!(canonical_height(&p2, &DynPoint::Cyclotomic(torus), 1e-8, Precision::DEFAULT).unwrap().value, 0.0);
    }

    /// Direct Tate iteration with exact integers: h(phi^N x) / q^N.
    fn brute(phi: &Endomorphism, x: &RationalProjectivePoint, n: usize) -> f64 {
        let mut y = x.clone();
        for _ in 0..n {
            y = phi.apply(&y).unwrap();
        }
        naive_height_rational(&y) / libm::pow(phi.degree() as f64, n as f64)
    }

    #[test]
    fn telescope_matches_exact_iteration() {
        // resultant 1 for z^2 + 1; z^2 + 2 z over 3 has a nontrivial resultant
        let maps = [
            Endomorphism::unicritical(2, 1).unwrap(),
            Endomorphism::validate_i64(&[3, 0, 0], &[0, 2, 1]).unwrap(),
            Endomorphism::validate_i64(&[2, 0, 1], &[0, 0, 6]).unwrap(),
        ];
        for phi in &maps {
            assert!(phi.resultant().abs() >= BigInt::one());
            for x in [rat(&[1, 0]), rat(&[3, 7]), rat(&[5, -2])] {
                for n in [0usize, 1, 4, 9] {
                    let t = telescope(phi, &x, n, Precision::DEFAULT);
                    let b = brute(phi, &x, n);
                    assert!((t - b).abs() <= 1e-12 * (1.0 + b.abs()), "{phi:?} {x:?} n={n}: {t} vs {b}");
                }
            }
        }
    }

    #[test]
    fn general_map_estimate() {
        let phi = Endomorphism::unicritical(2, 1).unwrap();
        let x = DynPoint::Rational(rat(&[1, 0]));
        let e = canonical_height(&phi, &x, 1e-8, Precision::DEFAULT).unwrap();
        assert!(e.error_bound <= 1e-8 && e.iterations > 0);
        let b = brute(&phi, &rat(&[1, 0]), 14);
        // brute force at depth 14 is itself within C 2^-14 of the limit
        assert!((e.value - b).abs() <= e.error_bound + e.transform_constant * libm::pow(2.0, -14.0));
        assert_eq!(iterations_for(0.0, 2, 1e-8), 0);
        assert!(matches!(canonical_height(&phi, &x, 0.0, Precision::DEFAULT), Err(DynError::NonPositiveTolerance)));
    }

    #[test]
    fn preperiodicity_examples() {
        let z2 = Endomorphism::power(1, 2).unwrap();
        assert!(is_preperiodic(&z2, &rat(&[1, 1])).unwrap());
        assert!(!is_preperiodic(&z2, &rat(&[1, 2])).unwrap());
        assert!(is_preperiodic(&z2, &rat(&[1, -1])).unwrap());
        let basilica = Endomorphism::unicritical(2, -1).unwrap();
        assert!(is_preperiodic(&basilica, &rat(&[1, 0])).unwrap());
        assert!(is_preperiodic(&basilica, &rat(&[0, 1])).unwrap());
        assert!(!is_preperiodic(&basilica, &rat(&[2, 1])).unwrap());
        // z^2 - 2: 2 -> 2, -2 -> 2
        let cheb = Endomorphism::unicritical(2, -2).unwrap();
        assert!(is_preperiodic(&cheb, &rat(&[1, -2])).unwrap());
        assert!(!is_preperiodic(&cheb, &rat(&[1, 3])).unwrap());
    }
}
