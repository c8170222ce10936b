//! Univariate polynomials with big-integer coefficients.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::arith;

/// Integer polynomial, coefficients stored lowest degree first.
///
/// Trailing zero coefficients are never stored; the zero polynomial has an
/// empty coefficient list and no degree.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    /// `z^n - 1`
    pub fn x_pow_minus_one(n: usize) -> Self {
        let mut c = vec![BigInt::zero(); n + 1];
        c[0] = BigInt::from(-1);
        c[n] = BigInt::one();
        Self::new(c)
    }

    /// `a*z - b`, the minimal polynomial of `b/a` up to sign and content.
    pub fn linear(a: BigInt, b: BigInt) -> Self {
        Self::new(vec![-b, a])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    /// Sum of absolute values of the coefficients.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY)).sum()
    }

    /// Nonnegative gcd of the coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divide out the content and make the leading coefficient positive.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading().is_some_and(Signed::is_negative) {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
    }

    /// Homogenized value `sum a_i p^i q^(d-i)`, zero iff `p/q` is a root.
    pub fn eval_homogeneous(&self, p: &BigInt, q: &BigInt) -> BigInt {
        let Some(d) = self.degree() else { return BigInt::zero() };
        let mut acc = BigInt::zero();
        let mut pp = BigInt::one();
        let mut qpows = Vec::with_capacity(d + 1);
        let mut qq = BigInt::one();
        for _ in 0..=d {
            qpows.push(qq.clone());
            qq *= q;
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            acc += c * &pp * &qpows[d - i];
            pp *= p;
        }
        acc
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// `p(z^k)`
    pub fn compose_power(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); (self.coeffs.len() - 1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i * k] = c.clone();
        }
        Self::new(out)
    }

    /// Quotient when `divisor` divides `self` in `Z[z]`, otherwise `None`.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        let dd = divisor.degree()?;
        if self.is_zero() {
            return Some(Self::zero());
        }
        let nd = self.degree()?;
        if nd < dd {
            return None;
        }
        let lead = divisor.leading()?.clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let (q, r) = rem[k + dd].div_rem(&lead);
            if !r.is_zero() {
                return None;
            }
            for (j, c) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &q * c;
            }
            quot[k] = q;
        }
        if rem.iter().all(Zero::is_zero) {
            Some(Self::new(quot))
        } else {
            None
        }
    }

    /// Pseudo-remainder `lc(b)^(deg a - deg b + 1) * a mod b`.
    fn pseudo_rem(&self, b: &Self) -> Self {
        let db = b.degree().expect("pseudo_rem by zero");
        let lb = b.leading().unwrap().clone();
        let mut r = self.coeffs.clone();
        while r.len() > db && !r.is_empty() {
            let dr = r.len() - 1;
            let lr = r[dr].clone();
            for c in r.iter_mut() {
                *c *= &lb;
            }
            for (j, c) in b.coeffs.iter().enumerate() {
                r[dr - db + j] -= &lr * c;
            }
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        Self::new(r)
    }

    /// Greatest common divisor over `Q[z]`, returned primitive with positive
    /// leading coefficient. `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.degree() < b.degree() {
            core::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        a.primitive_part()
    }

    /// No repeated complex roots.
    pub fn is_squarefree(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => self.gcd(&self.derivative()).degree() == Some(0),
        }
    }

    /// All rational roots, or `None` when the leading or constant coefficient
    /// is too large to enumerate divisors by trial division.
    pub fn rational_roots(&self) -> Option<Vec<BigRational>> {
        let d = self.degree()?;
        if d == 0 {
            return Some(Vec::new());
        }
        // Strip the root at zero first.
        let low = self.coeffs.iter().position(|c| !c.is_zero()).unwrap();
        let mut roots = Vec::new();
        if low > 0 {
            roots.push(BigRational::zero());
        }
        let a0 = self.coeffs[low].abs().to_u64()?;
        let ad = self.leading()?.abs().to_u64()?;
        const LIMIT: u64 = 1_000_000_000_000;
        if a0 > LIMIT || ad > LIMIT {
            return None;
        }
        let reduced = Self::new(self.coeffs[low..].to_vec());
        for p in arith::divisors(a0) {
            for q in arith::divisors(ad) {
                if arith::gcd_u64(p, q) != 1 {
                    continue;
                }
                for s in [1i64, -1] {
                    let pn = BigInt::from(p) * s;
                    let qn = BigInt::from(q);
                    if reduced.eval_homogeneous(&pn, &qn).is_zero() {
                        roots.push(BigRational::new(pn, qn));
                    }
                }
            }
        }
        Some(roots)
    }

    /// The `m`-th cyclotomic polynomial.
    pub fn cyclotomic(m: u64) -> Self {
        assert!(m >= 1);
        let factors = arith::factor_u64(m);
        let mut phi = Self::from_i64(&[-1, 1]);
        let mut rad = 1u64;
        for &(p, _) in &factors {
            phi = phi.compose_power(p as usize).div_exact(&phi).expect("cyclotomic recursion");
            rad *= p;
        }
        phi.compose_power((m / rad) as usize)
    }

    /// `Some(m)` when `self` is `+-Phi_m`.
    pub fn cyclotomic_index(&self) -> Option<u64> {
        let d = self.degree()? as u64;
        if d == 0 || !self.leading()?.abs().is_one() || !self.coeffs[0].abs().is_one() {
            return None;
        }
        let p = self.primitive_part();
        arith::inverse_totient(d).into_iter().find(|&m| Self::cyclotomic(m) == p)
    }
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPolynomial({})", self)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{}", a)?,
                _ if a.is_one() => {}
                _ => write!(f, "{}*", a)?,
            }
            match i {
                0 => {}
                1 => f.write_str("z")?,
                _ => write!(f, "z^{}", i)?,
            }
        }
        Ok(())
    }
}
