//! Precision-carrying binary floating point.
//!
//! [`MpReal`] wraps an `astro_float::BigFloat` together with its working
//! precision. Binary operations run at the larger of the two operand
//! precisions, so a computation seeded at `p` bits stays at `p` bits without
//! an ambient global context. [`RootReal`] abstracts over `f64` and
//! [`MpReal`] so the root finder can run a fast double pass and a
//! high-precision polish with the same code.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Rem, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{Num, One, ToPrimitive, Zero};

const RM: RoundingMode = RoundingMode::ToEven;
const EXACT_BITS: usize = 64;

/// Significand width of a computation context, in bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Precision(usize);

impl Precision {
    pub const DEFAULT: Precision = Precision(128);
    pub const DOUBLE: Precision = Precision(53);

    /// Values below 53 bits are raised to 53.
    pub fn bits(bits: usize) -> Self {
        Precision(bits.max(53))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// `true` when plain `f64` arithmetic satisfies this precision.
    pub fn is_double(self) -> bool {
        self.0 <= 53
    }

    /// Unit roundoff `2^-bits`, flushed to the smallest normal double.
    pub fn epsilon(self) -> f64 {
        libm::ldexp(1.0, -(self.0.min(1000) as i32))
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::DEFAULT
    }
}

/// Arbitrary-precision real number with an attached working precision.
#[derive(Clone)]
pub struct MpReal {
    v: BigFloat,
    p: usize,
}

impl MpReal {
    pub fn from_f64(x: f64, prec: Precision) -> Self {
        MpReal { v: BigFloat::from_f64(x, prec.get()), p: prec.get() }
    }

    pub fn from_bigint(x: &BigInt, prec: Precision) -> Self {
        let (sign, digits) = x.to_u64_digits();
        if digits.is_empty() {
            return MpReal::zero_at(prec);
        }
        let s = if sign == num_bigint::Sign::Minus { Sign::Neg } else { Sign::Pos };
        let mut v = BigFloat::from_words(&digits, s, (64 * digits.len()) as i32);
        // Coefficient rounding at `prec` bits is intended.
        if v.mantissa_max_bit_len().unwrap_or(0) > prec.get() {
            let _ = v.set_precision(prec.get(), RM);
        }
        MpReal { v, p: prec.get() }
    }

    pub fn zero_at(prec: Precision) -> Self {
        MpReal { v: BigFloat::from_word(0, EXACT_BITS), p: prec.get() }
    }

    pub fn precision(&self) -> Precision {
        Precision(self.p)
    }

    /// Re-target the working precision (the stored value is rounded when it shrinks).
    pub fn with_precision(mut self, prec: Precision) -> Self {
        if self.v.mantissa_max_bit_len().unwrap_or(0) > prec.get() {
            let _ = self.v.set_precision(prec.get(), RM);
        }
        self.p = prec.get();
        self
    }

    pub fn is_finite(&self) -> bool {
        !self.v.is_nan() && !self.v.is_inf()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.v.is_negative()
    }

    pub fn abs(&self) -> Self {
        MpReal { v: self.v.abs(), p: self.p }
    }

    pub fn sqrt(&self) -> Self {
        MpReal { v: self.v.sqrt(self.p, RM), p: self.p }
    }

    /// Nearest double (saturating to +-inf outside the double range).
    pub fn to_f64(&self) -> f64 {
        if self.v.is_nan() {
            return f64::NAN;
        }
        if self.v.is_inf() {
            return if self.v.is_inf_neg() { f64::NEG_INFINITY } else { f64::INFINITY };
        }
        match self.v.as_raw_parts() {
            None => f64::NAN,
            Some((words, _, sign, exp, _)) => {
                let n = words.len();
                if n == 0 || words[n - 1] == 0 {
                    return 0.0;
                }
                let hi = words[n - 1] as f64;
                let lo = if n > 1 { words[n - 2] as f64 } else { 0.0 };
                let mag = libm::ldexp(hi, exp - 64) + libm::ldexp(lo, exp - 128);
                if sign == Sign::Neg {
                    -mag
                } else {
                    mag
                }
            }
        }
    }

    /// `ln |x|`, valid far outside the double exponent range. `-inf` at zero.
    pub fn ln_abs(&self) -> f64 {
        match self.v.as_raw_parts() {
            Some((words, _, _, exp, _)) if !words.is_empty() && words[words.len() - 1] != 0 => {
                let hi = words[words.len() - 1] as f64 / 18_446_744_073_709_551_616.0;
                libm::log(hi) + exp as f64 * core::f64::consts::LN_2
            }
            _ if self.v.is_inf() => f64::INFINITY,
            _ => f64::NEG_INFINITY,
        }
    }

    fn binop(&self, rhs: &Self, op: fn(&BigFloat, &BigFloat, usize, RoundingMode) -> BigFloat) -> Self {
        let p = self.p.max(rhs.p);
        MpReal { v: op(&self.v, &rhs.v, p, RM), p }
    }
}

impl fmt::Debug for MpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MpReal({:e}@{})", self.to_f64(), self.p)
    }
}

impl fmt::Display for MpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

impl PartialEq for MpReal {
    fn eq(&self, other: &Self) -> bool {
        self.v.cmp(&other.v) == Some(0)
    }
}

impl PartialOrd for MpReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.v.cmp(&other.v).map(|c| c.cmp(&0))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $inner:ident) => {
        impl $tr for MpReal {
            type Output = MpReal;
            fn $m(self, rhs: MpReal) -> MpReal {
                self.binop(&rhs, BigFloat::$inner)
            }
        }
        impl<'a> $tr<&'a MpReal> for &'a MpReal {
            type Output = MpReal;
            fn $m(self, rhs: &'a MpReal) -> MpReal {
                self.binop(rhs, BigFloat::$inner)
            }
        }
    };
}

forward_binop!(Add, add, add);
forward_binop!(Sub, sub, sub);
forward_binop!(Mul, mul, mul);
forward_binop!(Div, div, div);

impl Rem for MpReal {
    type Output = MpReal;
    fn rem(self, rhs: MpReal) -> MpReal {
        let p = self.p.max(rhs.p);
        MpReal { v: self.v.rem(&rhs.v), p }
    }
}

impl Neg for MpReal {
    type Output = MpReal;
    fn neg(self) -> MpReal {
        MpReal { v: self.v.neg(), p: self.p }
    }
}

impl Zero for MpReal {
    fn zero() -> Self {
        MpReal { v: BigFloat::from_word(0, EXACT_BITS), p: EXACT_BITS }
    }
    fn is_zero(&self) -> bool {
        self.v.is_zero()
    }
}

impl One for MpReal {
    fn one() -> Self {
        MpReal { v: BigFloat::from_word(1, EXACT_BITS), p: EXACT_BITS }
    }
}

/// Decimal literal could not be parsed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParseMpError;

impl fmt::Display for ParseMpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("invalid decimal literal")
    }
}

impl Num for MpReal {
    type FromStrRadixErr = ParseMpError;

    /// Decimal only, parsed at the default precision.
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, ParseMpError> {
        if radix != 10 {
            return Err(ParseMpError);
        }
        let mut cc = Consts::new().map_err(|_| ParseMpError)?;
        let p = Precision::DEFAULT.get();
        let v = BigFloat::parse(s, Radix::Dec, p, RM, &mut cc);
        if v.is_nan() {
            Err(ParseMpError)
        } else {
            Ok(MpReal { v, p })
        }
    }
}

/// Real scalar usable by the polynomial root finder.
pub trait RootReal: Clone + Num + Neg<Output = Self> + PartialOrd + fmt::Debug {
    fn from_f64_at(x: f64, prec: Precision) -> Self;
    fn from_bigint_at(x: &BigInt, prec: Precision) -> Self;
    fn to_f64(&self) -> f64;
    fn ln_abs(&self) -> f64;
    fn sqrt(&self) -> Self;
    fn abs(&self) -> Self;
    fn is_finite(&self) -> bool;
}

impl RootReal for f64 {
    fn from_f64_at(x: f64, _: Precision) -> Self {
        x
    }
    fn from_bigint_at(x: &BigInt, _: Precision) -> Self {
        x.to_f64().unwrap_or(f64::NAN)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn ln_abs(&self) -> f64 {
        libm::log(libm::fabs(*self))
    }
    fn sqrt(&self) -> Self {
        libm::sqrt(*self)
    }
    fn abs(&self) -> Self {
        libm::fabs(*self)
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl RootReal for MpReal {
    fn from_f64_at(x: f64, prec: Precision) -> Self {
        MpReal::from_f64(x, prec)
    }
    fn from_bigint_at(x: &BigInt, prec: Precision) -> Self {
        MpReal::from_bigint(x, prec)
    }
    fn to_f64(&self) -> f64 {
        MpReal::to_f64(self)
    }
    fn ln_abs(&self) -> f64 {
        MpReal::ln_abs(self)
    }
    fn sqrt(&self) -> Self {
        MpReal::sqrt(self)
    }
    fn abs(&self) -> Self {
        MpReal::abs(self)
    }
    fn is_finite(&self) -> bool {
        MpReal::is_finite(self)
    }
}

/// Complex number at a configurable precision.
pub type PrecComplex = Complex<MpReal>;

/// Modulus of a complex number over any [`RootReal`].
pub fn modulus<T: RootReal>(z: &Complex<T>) -> T {
    z.norm_sqr().sqrt()
}

/// Lossy conversion of a [`PrecComplex`] to a double complex.
pub fn to_c64<T: RootReal>(z: &Complex<T>) -> num_complex::Complex64 {
    num_complex::Complex64::new(z.re.to_f64(), z.im.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_keeps_the_larger_precision() {
        let p = Precision::bits(192);
        let a = MpReal::from_f64(2.0, p);
        let b = MpReal::from_f64(3.0, Precision::DOUBLE);
        let c = &a * &b;
        assert_eq!(c.precision(), p);
        assert_eq!(c.to_f64(), 6.0);
    }

    #[test]
    fn sqrt_two_to_many_digits() {
        let p = Precision::bits(256);
        let two = MpReal::from_f64(2.0, p);
        let r = two.sqrt();
        let back = &r * &r;
        let err = (&back - &two).abs();
        assert!(err.ln_abs() < -170.0, "{:?}", err);
    }

    #[test]
    fn bigint_conversion_and_log() {
        let x: BigInt = BigInt::from(1u8) << 3000usize;
        let m = MpReal::from_bigint(&x, Precision::DEFAULT);
        assert!(m.to_f64().is_infinite());
        assert!((m.ln_abs() - 3000.0 * core::f64::consts::LN_2).abs() < 1e-9);
        let y = MpReal::from_bigint(&BigInt::from(-12345), Precision::DEFAULT);
        assert_eq!(y.to_f64(), -12345.0);
    }

    #[test]
    fn division_by_zero_is_detected() {
        let one = MpReal::one();
        let q = one / MpReal::zero();
        assert!(!q.is_finite());
    }

    #[test]
    fn parses_decimal() {
        let x = MpReal::from_str_radix("0.125", 10).unwrap();
        assert_eq!(x.to_f64(), 0.125);
        assert!(MpReal::from_str_radix("ff", 16).is_err());
    }
}
