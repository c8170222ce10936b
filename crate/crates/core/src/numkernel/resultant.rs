//! Sylvester resultants over the integers.
//!
//! The sign convention is the determinant of the Sylvester matrix with the
//! `deg g` shifted copies of `f` as the first rows, coefficients written from
//! the highest degree down.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;

use super::matrix::{self, IntMatrix};
use super::poly::IntPolynomial;

/// Sylvester matrix of `f` and `g` viewed as forms of formal degrees `m` and
/// `n`. Coefficient slices are lowest degree first; missing entries are zero.
pub fn sylvester(f: &[BigInt], m: usize, g: &[BigInt], n: usize) -> IntMatrix {
    let size = m + n;
    let coeff = |c: &[BigInt], i: usize| c.get(i).cloned().unwrap_or_default();
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![BigInt::zero(); size];
        for k in 0..=m {
            row[i + k] = coeff(f, m - k);
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![BigInt::zero(); size];
        for k in 0..=n {
            row[i + k] = coeff(g, n - k);
        }
        rows.push(row);
    }
    rows
}

/// Resultant of two binary forms of formal degrees `m`, `n`.
///
/// Vanishes exactly when the forms share a zero on `P^1` (including the
/// point at infinity when both leading coefficients vanish).
pub fn formal_resultant(f: &[BigInt], m: usize, g: &[BigInt], n: usize) -> BigInt {
    matrix::det_int(&sylvester(f, m, g, n))
}

/// Resultant of two polynomials using their actual degrees. Zero when either
/// argument is the zero polynomial.
pub fn resultant(f: &IntPolynomial, g: &IntPolynomial) -> BigInt {
    match (f.degree(), g.degree()) {
        (Some(m), Some(n)) => formal_resultant(f.coeffs(), m, g.coeffs(), n),
        _ => BigInt::zero(),
    }
}

/// Selected rows of the adjugate of a square integer matrix, so that
/// `adj(A) * A = det(A) * I`.
pub fn adjugate_rows(a: &[Vec<BigInt>], rows: &[usize]) -> IntMatrix {
    let n = a.len();
    rows.iter()
        .map(|&i| {
            (0..n)
                .map(|j| {
                    // adj[i][j] = (-1)^(i+j) * minor with row j and column i removed
                    let minor: IntMatrix = (0..n)
                        .filter(|&r| r != j)
                        .map(|r| (0..n).filter(|&c| c != i).map(|c| a[r][c].clone()).collect())
                        .collect();
                    let d = matrix::det_int(&minor);
                    if (i + j) % 2 == 0 {
                        d
                    } else {
                        -d
                    }
                })
                .collect()
        })
        .collect()
}
