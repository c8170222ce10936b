//! Polarized endomorphisms of projective space.
//!
//! General maps are supported on `P^1` only; on `P^n` with `n > 1` only the
//! power maps `(x_0^q : ... : x_n^q)` are accepted. Binary forms are stored
//! as coefficient lists indexed by the exponent of `x_1`, so
//! `f(x_0, x_1) = sum_k a_k x_0^(q-k) x_1^k`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::heights::{HeightError, RationalProjectivePoint};
use crate::numkernel::arith::ln_bigint;
use crate::numkernel::resultant::{adjugate_rows, formal_resultant, sylvester};
use crate::numkernel::NumError;

mod brolin;
mod tate;

pub use brolin::{brolin_sample, CanonicalMeasureSample, DEFAULT_BURN_IN};
pub use tate::{canonical_height, is_preperiodic, DynPoint, TateEstimate, MAX_TATE_ITERATIONS};

#[derive(Clone, Debug, PartialEq)]
pub enum DynError {
    DegenerateMap,
    UnsupportedShape,
    DegreeTooSmall,
    MismatchedDegrees,
    /// The point type cannot be iterated exactly under this map.
    UnsupportedPoint,
    NonPositiveTolerance,
    /// The iteration count needed for the requested tolerance exceeds the cap;
    /// the partial estimate carries an honest error bound.
    OrbitOverflow { partial: TateEstimate },
    PrecisionExhausted,
    EmptySample,
    Height(HeightError),
    Num(NumError),
}

impl From<HeightError> for DynError {
    fn from(e: HeightError) -> Self {
        DynError::Height(e)
    }
}

impl From<NumError> for DynError {
    fn from(e: NumError) -> Self {
        DynError::Num(e)
    }
}

impl fmt::Display for DynError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynError::DegenerateMap => f.write_str("forms have a common zero (resultant 0)"),
            DynError::UnsupportedShape => f.write_str("only power maps are supported in dimension > 1"),
            DynError::DegreeTooSmall => f.write_str("degree must be at least 2"),
            DynError::MismatchedDegrees => f.write_str("forms must share one degree"),
            DynError::UnsupportedPoint => f.write_str("point cannot be iterated exactly under this map"),
            DynError::NonPositiveTolerance => f.write_str("tolerance must be positive"),
            DynError::OrbitOverflow { partial } => {
                write!(f, "iteration cap reached; partial estimate {} +- {}", partial.value, partial.error_bound)
            }
            DynError::PrecisionExhausted => f.write_str("archimedean orbit did not stabilize within the precision cap"),
            DynError::EmptySample => f.write_str("sample count must be positive"),
            DynError::Height(e) => write!(f, "{e}"),
            DynError::Num(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapKind {
    General,
    Power,
}

/// Validated self-map of `P^n` of degree `q >= 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Endomorphism {
    n: usize,
    q: usize,
    kind: MapKind,
    /// Binary forms for `n = 1`; empty for higher-dimensional power maps.
    forms: Vec<Vec<BigInt>>,
    resultant: BigInt,
}

impl Endomorphism {
    /// Validates a pair of binary forms of the same degree.
    pub fn validate(f0: &[BigInt], f1: &[BigInt]) -> Result<Self, DynError> {
        if f0.len() != f1.len() {
            return Err(DynError::MismatchedDegrees);
        }
        if f0.len() < 3 {
            return Err(DynError::DegreeTooSmall);
        }
        let q = f0.len() - 1;
        let res = formal_resultant(f0, q, f1, q);
        if res.is_zero() {
            return Err(DynError::DegenerateMap);
        }
        let unit = |k: usize, c: &[BigInt]| c.iter().enumerate().all(|(i, a)| if i == k { a.is_one() } else { a.is_zero() });
        let kind = if unit(0, f0) && unit(q, f1) { MapKind::Power } else { MapKind::General };
        Ok(Endomorphism { n: 1, q, kind, forms: vec![f0.to_vec(), f1.to_vec()], resultant: res })
    }

    pub fn validate_i64(f0: &[i64], f1: &[i64]) -> Result<Self, DynError> {
        let c = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        Self::validate(&c(f0), &c(f1))
    }

    /// `(x_0^q : ... : x_n^q)`.
    pub fn power(n: usize, q: usize) -> Result<Self, DynError> {
        if q < 2 {
            return Err(DynError::DegreeTooSmall);
        }
        if n == 0 {
            return Err(DynError::UnsupportedShape);
        }
        if n == 1 {
            let mut f0 = vec![BigInt::zero(); q + 1];
            let mut f1 = f0.clone();
            f0[0] = BigInt::one();
            f1[q] = BigInt::one();
            return Self::validate(&f0, &f1);
        }
        Ok(Endomorphism { n, q, kind: MapKind::Power, forms: Vec::new(), resultant: BigInt::one() })
    }

    /// `(x_0^q : x_1^q + c x_0^q)`, i.e. `z -> z^q + c`.
    pub fn unicritical(q: usize, c: i64) -> Result<Self, DynError> {
        let mut f0 = vec![0i64; q + 1];
        let mut f1 = f0.clone();
        f0[0] = 1;
        f1[0] = c;
        f1[q] = 1;
        Self::validate_i64(&f0, &f1)
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.q
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn forms(&self) -> &[Vec<BigInt>] {
        &self.forms
    }

    /// Resultant of the two forms (1 for higher-dimensional power maps).
    pub fn resultant(&self) -> &BigInt {
        &self.resultant
    }

    /// `phi(x)` with coprime coordinates.
    pub fn apply(&self, x: &RationalProjectivePoint) -> Result<RationalProjectivePoint, DynError> {
        if x.dimension() != self.n {
            return Err(DynError::UnsupportedPoint);
        }
        let c = x.coords();
        if self.n > 1 {
            let q = self.q as u32;
            return Ok(RationalProjectivePoint::new(c.iter().map(|v| num_traits::Pow::pow(v, q)).collect())?);
        }
        let y = self.forms.iter().map(|f| eval_form(f, &c[0], &c[1])).collect();
        Ok(RationalProjectivePoint::new(y)?)
    }

    /// `C` with `|h(phi(x)) - q h(x)| <= C` on all of `P^1(Qbar)`.
    ///
    /// Upper side: `|f_i(x)| <= sum |a_k| max|x|^q` gives
    /// `C+ = log((q+1) max_i sum |coeffs f_i|)`. Lower side: the first and last
    /// rows of the adjugate of the Sylvester matrix express
    /// `Res x_0^(2q-1)` and `Res x_1^(2q-1)` as `A_0 f_0 + A_1 f_1` with forms
    /// of degree `q - 1`, which gives `C- = log|Res| + log(2 q G)` where `G`
    /// bounds those adjugate entries. Power maps return exactly 0.
    pub fn height_transform_bound(&self) -> f64 {
        if self.kind == MapKind::Power {
            return 0.0;
        }
        let q = self.q;
        let l1 = |f: &[BigInt]| f.iter().fold(BigInt::zero(), |s, a| s + a.abs());
        let max_l1 = self.forms.iter().map(|f| l1(f)).max().expect("two forms");
        let c_plus = ln_bigint(&(max_l1 * BigInt::from(q + 1)));
        let s = sylvester(&self.forms[0], q, &self.forms[1], q);
        let adj = adjugate_rows(&s, &[0, 2 * q - 1]);
        let g = adj.iter().flatten().map(|a| a.abs()).max().unwrap_or_else(BigInt::one).max(BigInt::one());
        let c_minus = ln_bigint(&self.resultant) + ln_bigint(&(g * BigInt::from(2 * q)));
        c_plus.max(c_minus)
    }
}

/// `f(x0, x1) = sum_k a_k x0^(q-k) x1^k` over the integers.
pub fn eval_form(f: &[BigInt], x0: &BigInt, x1: &BigInt) -> BigInt {
    // Horner in x1 with x0 powers folded in.
    let q = f.len() - 1;
    let mut acc = BigInt::zero();
    let mut p0 = BigInt::one();
    let mut pows = Vec::with_capacity(q + 1);
    for _ in 0..=q {
        pows.push(p0.clone());
        p0 *= x0;
    }
    let mut x1k = BigInt::one();
    for (k, a) in f.iter().enumerate() {
        if !a.is_zero() {
            acc += a * &pows[q - k] * &x1k;
        }
        x1k *= x1;
    }
    acc
}
