//! Exact dense linear algebra over `Z` and `Q`.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;
pub type RatMatrix = Vec<Vec<BigRational>>;

pub fn int_to_rat(m: &[Vec<BigInt>]) -> RatMatrix {
    m.iter().map(|row| row.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect()
}

pub fn identity(n: usize) -> RatMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>], cols: usize) -> Vec<Vec<T>> {
    (0..cols).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn mul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> RatMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = BigRational::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            s += &row[k] * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Determinant of a square integer matrix (fraction-free Bareiss elimination).
pub fn det_int(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Determinant over `Q` by Gaussian elimination.
pub fn det(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a: RatMatrix = m.to_vec();
    let mut d = BigRational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return BigRational::zero();
        };
        if p != k {
            a.swap(p, k);
            d = -d;
        }
        let piv = a[k][k].clone();
        d *= &piv;
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &piv;
            for j in k..n {
                let t = &f * &a[k][j];
                a[i][j] -= t;
            }
        }
    }
    d
}

/// Inverse over `Q`, `None` when singular.
pub fn inverse(m: &[Vec<BigRational>]) -> Option<RatMatrix> {
    let n = m.len();
    let mut a: RatMatrix = m.to_vec();
    let mut inv = identity(n);
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero())?;
        a.swap(p, k);
        inv.swap(p, k);
        let piv = a[k][k].clone();
        for j in 0..n {
            a[k][j] /= &piv;
            inv[k][j] /= &piv;
        }
        for i in 0..n {
            if i == k || a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k].clone();
            for j in 0..n {
                let t = &f * &a[k][j];
                a[i][j] -= t;
                let t = &f * &inv[k][j];
                inv[i][j] -= t;
            }
        }
    }
    Some(inv)
}

/// Rank over `Q` of an `rows x cols` matrix.
pub fn rank(m: &[Vec<BigRational>]) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut a: RatMatrix = m.to_vec();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(p, r);
        for i in r + 1..rows {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &a[r][c];
            for j in c..cols {
                let t = &f * &a[r][j];
                a[i][j] -= t;
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Exact `G = L D L^T` for a symmetric matrix with nonzero leading minors.
/// Returns `(L, d)` with `L` unit lower triangular, or `None` when some
/// leading minor vanishes.
pub fn ldl(g: &[Vec<BigRational>]) -> Option<(RatMatrix, Vec<BigRational>)> {
    let n = g.len();
    let mut l = identity(n);
    let mut d = vec![BigRational::zero(); n];
    for j in 0..n {
        let mut s = g[j][j].clone();
        for k in 0..j {
            s -= &l[j][k] * &l[j][k] * &d[k];
        }
        if s.is_zero() {
            return None;
        }
        d[j] = s;
        for i in j + 1..n {
            let mut t = g[i][j].clone();
            for k in 0..j {
                t -= &l[i][k] * &l[j][k] * &d[k];
            }
            l[i][j] = t / &d[j];
        }
    }
    Some((l, d))
}

/// Symmetric and positive definite (all LDL pivots positive).
pub fn is_positive_definite(g: &[Vec<BigRational>]) -> bool {
    let n = g.len();
    if g.iter().any(|row| row.len() != n) {
        return false;
    }
    for i in 0..n {
        for j in 0..i {
            if g[i][j] != g[j][i] {
                return false;
            }
        }
    }
    matches!(ldl(g), Some((_, d)) if d.iter().all(Signed::is_positive))
}
