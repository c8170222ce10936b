//! Counting integer points in an ellipsoid `x^T Q x < 1` (or `<= 1`).
//!
//! Fincke-Pohst traversal: with the exact `Q = L D L^T`, coordinates are fixed
//! from the last one down and each range comes from the remaining radius.
//! The float bounds are widened by a relative slack so no point is ever
//! pruned, and every leaf is accepted or rejected by an exact integer
//! evaluation of `x^T (den Q) x` against `den`. The traversal therefore never
//! depends on rounding at the boundary.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::LatticeError;
use crate::numkernel::arith::rational_to_f64;
use crate::numkernel::matrix;

const SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// `x^T Q x < 1`
    Open,
    /// `x^T Q x <= 1`
    Closed,
}

/// Precomputed enumeration data for one ellipsoid.
#[derive(Clone, Debug)]
pub struct BallCounter {
    r: usize,
    boundary: Boundary,
    diag: Vec<f64>,
    /// `mu[i][j] = L[j][i]` for `j > i`
    mu: Vec<Vec<f64>>,
    int_form: Vec<Vec<BigInt>>,
    small_form: Option<Vec<Vec<i128>>>,
    den: BigInt,
}

impl BallCounter {
    pub fn new(q: &[Vec<BigRational>], boundary: Boundary) -> Result<Self, LatticeError> {
        let r = q.len();
        let (l, d) = matrix::ldl(q).ok_or(LatticeError::NotPositiveDefinite)?;
        let diag: Vec<f64> = d.iter().map(rational_to_f64).collect();
        if diag.iter().any(|&x| x <= 0.0) {
            return Err(LatticeError::NotPositiveDefinite);
        }
        let mu = (0..r).map(|i| (0..r).map(|j| if j > i { rational_to_f64(&l[j][i]) } else { 0.0 }).collect()).collect();
        let mut den = BigInt::one();
        for row in q {
            for x in row {
                den = den.lcm(x.denom());
            }
        }
        let int_form: Vec<Vec<BigInt>> =
            q.iter().map(|row| row.iter().map(|x| x.numer() * (&den / x.denom())).collect()).collect();
        let small_form = int_form.iter().map(|row| row.iter().map(|x| x.to_i64().map(i128::from)).collect()).collect();
        Ok(BallCounter { r, boundary, diag, mu, int_form, small_form, den })
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    /// Range of the last coordinate; every point has its last coordinate here.
    pub fn top_range(&self) -> RangeInclusive<i64> {
        if self.r == 0 {
            return 0..=0;
        }
        let b = libm::floor(libm::sqrt((1.0 + SLACK) / self.diag[self.r - 1]) + SLACK) as i64;
        -b..=b
    }

    /// Number of points with last coordinate `t`.
    pub fn count_with_top(&self, t: i64) -> u64 {
        if self.r == 0 {
            return 1;
        }
        let mut x = vec![0i64; self.r];
        x[self.r - 1] = t;
        let top = self.r - 1;
        let used = self.diag[top] * (t as f64) * (t as f64);
        if used > 1.0 + SLACK {
            return 0;
        }
        let mut count = 0;
        self.descend(top, used, &mut x, &mut count);
        count
    }

    pub fn count(&self) -> u64 {
        self.top_range().map(|t| self.count_with_top(t)).sum()
    }

    /// All points (for tests and small reports).
    pub fn points(&self) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        if self.r == 0 {
            out.push(Vec::new());
            return out;
        }
        for t in self.top_range() {
            let mut x = vec![0i64; self.r];
            x[self.r - 1] = t;
            let used = self.diag[self.r - 1] * (t as f64) * (t as f64);
            if used <= 1.0 + SLACK {
                self.collect(self.r - 1, used, &mut x, &mut out);
            }
        }
        out
    }

    fn center(&self, i: usize, x: &[i64]) -> f64 {
        -(i + 1..self.r).map(|j| self.mu[i][j] * x[j] as f64).sum::<f64>()
    }

    fn range_at(&self, i: usize, used: f64, x: &[i64]) -> Option<(i64, i64, f64)> {
        let rest = 1.0 + SLACK - used;
        if rest < 0.0 {
            return None;
        }
        let c = self.center(i, x);
        let w = libm::sqrt(rest / self.diag[i]) * (1.0 + SLACK) + SLACK;
        Some((libm::ceil(c - w) as i64, libm::floor(c + w) as i64, c))
    }

    // `level` is the index already fixed; fill `level - 1` down to 0.
    fn descend(&self, level: usize, used: f64, x: &mut [i64], count: &mut u64) {
        if level == 0 {
            if self.accepts(x) {
                *count += 1;
            }
            return;
        }
        let i = level - 1;
        let Some((lo, hi, c)) = self.range_at(i, used, x) else { return };
        for v in lo..=hi {
            x[i] = v;
            let dv = v as f64 - c;
            self.descend(i, used + self.diag[i] * dv * dv, x, count);
        }
        x[i] = 0;
    }

    fn collect(&self, level: usize, used: f64, x: &mut [i64], out: &mut Vec<Vec<i64>>) {
        if level == 0 {
            if self.accepts(x) {
                out.push(x.to_vec());
            }
            return;
        }
        let i = level - 1;
        let Some((lo, hi, c)) = self.range_at(i, used, x) else { return };
        for v in lo..=hi {
            x[i] = v;
            let dv = v as f64 - c;
            self.collect(i, used + self.diag[i] * dv * dv, x, out);
        }
        x[i] = 0;
    }

    /// Exact membership test.
    fn accepts(&self, x: &[i64]) -> bool {
        let value = self.small_value(x).map(BigInt::from).unwrap_or_else(|| self.big_value(x));
        match self.boundary {
            Boundary::Open => value < self.den,
            Boundary::Closed => value <= self.den,
        }
    }

    fn small_value(&self, x: &[i64]) -> Option<i128> {
        let a = self.small_form.as_ref()?;
        let mut s: i128 = 0;
        for i in 0..self.r {
            if x[i] == 0 {
                continue;
            }
            let mut row: i128 = 0;
            for j in 0..self.r {
                row = row.checked_add(a[i][j].checked_mul(x[j] as i128)?)?;
            }
            s = s.checked_add(row.checked_mul(x[i] as i128)?)?;
        }
        Some(s)
    }

    fn big_value(&self, x: &[i64]) -> BigInt {
        let mut s = BigInt::zero();
        for i in 0..self.r {
            if x[i] == 0 {
                continue;
            }
            let mut row = BigInt::zero();
            for j in 0..self.r {
                row += &self.int_form[i][j] * x[j];
            }
            s += row * x[i];
        }
        s
    }
}
