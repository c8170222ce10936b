//! Sublattices, quotients and generator bounds.
//!
//! Integral bases come from a unimodular row reduction `V A = H` with `H` in
//! Hermite normal form; the inverse `W = V^-1` is tracked alongside so the
//! complement of a saturated sublattice can be read off its columns.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use super::{ln_unit_ball_volume, LatticeError, NormedLattice};
use crate::numkernel::matrix::{self, IntMatrix, RatMatrix};

/// Result of a unimodular row reduction of an `m x n` integer matrix.
#[derive(Clone, Debug)]
pub struct Echelon {
    /// `V A`, in row Hermite normal form (positive pivots, reduced above).
    pub h: IntMatrix,
    pub v: IntMatrix,
    /// `V^-1`
    pub w: IntMatrix,
    /// Pivot columns in row order; their count is the rank.
    pub pivots: Vec<usize>,
}

struct Reducer {
    a: IntMatrix,
    v: IntMatrix,
    w: IntMatrix,
}

impl Reducer {
    fn add_row(&mut self, k: usize, src: usize, m: &BigInt) {
        for j in 0..self.a[k].len() {
            let t = &self.a[src][j] * m;
            self.a[k][j] += t;
        }
        for j in 0..self.v[k].len() {
            let t = &self.v[src][j] * m;
            self.v[k][j] += t;
        }
        for row in self.w.iter_mut() {
            let t = &row[k] * m;
            row[src] -= t;
        }
    }

    fn swap(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.v.swap(i, j);
        for row in self.w.iter_mut() {
            row.swap(i, j);
        }
    }

    fn negate(&mut self, i: usize) {
        for x in self.a[i].iter_mut().chain(self.v[i].iter_mut()) {
            *x = -core::mem::take(x);
        }
        for row in self.w.iter_mut() {
            row[i] = -core::mem::take(&mut row[i]);
        }
    }

    /// Rows `(i, j)` replaced by `[[x, y], [u, v]]` times them, determinant 1.
    fn combine(&mut self, i: usize, j: usize, x: &BigInt, y: &BigInt, u: &BigInt, v: &BigInt) {
        fn mix(rows: &mut IntMatrix, i: usize, j: usize, x: &BigInt, y: &BigInt, u: &BigInt, v: &BigInt) {
            for c in 0..rows[i].len() {
                let ri = rows[i][c].clone();
                let rj = rows[j][c].clone();
                rows[i][c] = x * &ri + y * &rj;
                rows[j][c] = u * &ri + v * &rj;
            }
        }
        mix(&mut self.a, i, j, x, y, u, v);
        mix(&mut self.v, i, j, x, y, u, v);
        for row in self.w.iter_mut() {
            let wi = row[i].clone();
            let wj = row[j].clone();
            row[i] = v * &wi - u * &wj;
            row[j] = -(y * &wi) + x * &wj;
        }
    }
}

fn int_identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

/// Row Hermite normal form with the transforming matrix and its inverse.
pub fn row_echelon(a: &[Vec<BigInt>]) -> Echelon {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut red = Reducer { a: a.to_vec(), v: int_identity(m), w: int_identity(m) };
    let mut pivots = Vec::new();
    let mut pr = 0;
    for c in 0..n {
        if pr == m {
            break;
        }
        for i in pr + 1..m {
            if red.a[i][c].is_zero() {
                continue;
            }
            if red.a[pr][c].is_zero() {
                red.swap(pr, i);
                continue;
            }
            let p = red.a[pr][c].clone();
            let q = red.a[i][c].clone();
            let e = p.extended_gcd(&q);
            let g = e.gcd;
            // [[x, y], [-q/g, p/g]] has determinant (x p + y q)/g = 1
            let u = -(&q / &g);
            let v = &p / &g;
            red.combine(pr, i, &e.x, &e.y, &u, &v);
        }
        if red.a[pr][c].is_zero() {
            continue;
        }
        if red.a[pr][c].is_negative() {
            red.negate(pr);
        }
        let piv = red.a[pr][c].clone();
        for k in 0..pr {
            let f = red.a[k][c].div_floor(&piv);
            if !f.is_zero() {
                red.add_row(k, pr, &-f);
            }
        }
        pivots.push(c);
        pr += 1;
    }
    Echelon { h: red.a, v: red.v, w: red.w, pivots }
}

/// Sublattice of an ambient lattice given by generators in ambient coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SublatticeEmbedding {
    generators: Vec<Vec<BigInt>>,
}

impl SublatticeEmbedding {
    pub fn new(generators: Vec<Vec<BigInt>>) -> Self {
        SublatticeEmbedding { generators }
    }

    pub fn from_i64(generators: &[Vec<i64>]) -> Self {
        Self::new(generators.iter().map(|g| g.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn generators(&self) -> &[Vec<BigInt>] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// `r x r'` basis matrix (generators as columns).
    fn columns(&self, r: usize) -> IntMatrix {
        (0..r).map(|i| self.generators.iter().map(|g| g[i].clone()).collect()).collect()
    }

    fn echelon(&self, r: usize) -> Result<Echelon, LatticeError> {
        if self.generators.iter().any(|g| g.len() != r) {
            return Err(LatticeError::DimensionMismatch);
        }
        let e = row_echelon(&self.columns(r));
        if e.pivots.len() != self.rank() {
            return Err(LatticeError::NotFullRank);
        }
        Ok(e)
    }

    /// Saturated iff the index `[M' tensor Q intersect M : M']` is 1.
    pub fn is_saturated(&self, r: usize) -> Result<bool, LatticeError> {
        let e = self.echelon(r)?;
        Ok((0..self.rank()).all(|k| e.h[k][k].is_one()))
    }
}

/// The saturation `(M' tensor Q) intersect Z^r` with a canonical basis.
pub fn saturate(s: &SublatticeEmbedding, r: usize) -> Result<SublatticeEmbedding, LatticeError> {
    let e = s.echelon(r)?;
    let k = s.rank();
    // B = W[:, :k] T with T invertible over Q, so W[:, :k] spans the saturation.
    let cols: Vec<Vec<BigInt>> = (0..k).map(|j| (0..r).map(|i| e.w[i][j].clone()).collect()).collect();
    // Canonicalize: HNF of the basis rows.
    let h = row_echelon(&cols).h;
    Ok(SublatticeEmbedding::new(h))
}

fn quad(a: &[Vec<BigInt>], g: &RatMatrix, b: &[Vec<BigInt>]) -> RatMatrix {
    // a, b are lists of vectors; returns a_i^T G b_j
    let gb: Vec<Vec<BigRational>> = b
        .iter()
        .map(|v| {
            (0..g.len())
                .map(|i| {
                    let mut s = BigRational::zero();
                    for (j, x) in v.iter().enumerate() {
                        if !x.is_zero() {
                            s += &g[i][j] * BigRational::from_integer(x.clone());
                        }
                    }
                    s
                })
                .collect()
        })
        .collect();
    a.iter()
        .map(|u| {
            gb.iter()
                .map(|w| {
                    let mut s = BigRational::zero();
                    for (i, x) in u.iter().enumerate() {
                        if !x.is_zero() {
                            s += &w[i] * BigRational::from_integer(x.clone());
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Subspace norm on `M'` and quotient norm on `M/M'`.
///
/// The quotient basis is the complement read off the unimodular reduction,
/// and its Gram matrix is the Schur complement
/// `C^T G C - C^T G B (B^T G B)^-1 B^T G C`, i.e. the norm of the orthogonal
/// projection away from `M'_R`. The quotient keeps the torsion of `M`.
pub fn induced_sub_quotient(
    m: &NormedLattice,
    s: &SublatticeEmbedding,
) -> Result<(NormedLattice, NormedLattice), LatticeError> {
    let r = m.rank();
    let e = s.echelon(r)?;
    let k = s.rank();
    if !(0..k).all(|i| e.h[i][i].is_one()) {
        return Err(LatticeError::NotSaturated);
    }
    let b = s.generators();
    let c: Vec<Vec<BigInt>> = (k..r).map(|j| (0..r).map(|i| e.w[i][j].clone()).collect()).collect();
    let g = m.gram();
    let gbb = quad(b, g, b);
    let gcc = quad(&c, g, &c);
    let gcb = quad(&c, g, b);
    let quotient_gram = if k == 0 {
        gcc
    } else {
        let inv = matrix::inverse(&gbb).ok_or(LatticeError::NotPositiveDefinite)?;
        let t = matrix::mul(&matrix::mul(&gcb, &inv), &matrix::transpose(&gcb, k));
        (0..r - k).map(|i| (0..r - k).map(|j| &gcc[i][j] - &t[i][j]).collect()).collect()
    };
    let sub = NormedLattice::new(gbb, BigUint::one())?;
    let quot = NormedLattice::new(quotient_gram, m.torsion().clone())?;
    Ok((sub, quot))
}

/// The exact identity behind the additivity of `chi` on a short exact
/// sequence: ranks add, torsion orders multiply and
/// `det G = det G' * det G''`.
pub fn sequence_identity_holds(m: &NormedLattice, sub: &NormedLattice, quot: &NormedLattice) -> bool {
    m.rank() == sub.rank() + quot.rank()
        && *m.torsion() == sub.torsion() * quot.torsion()
        && m.det() == sub.det() * quot.det()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorBound {
    /// `chi(M) >= log V(r) - r log c`, decided exactly.
    pub holds: bool,
    /// `chi(M) - (log V(r) - r log c)`
    pub slack: f64,
}

/// Checks `chi(M) >= log V(r) - r log c` for a lattice generated by vectors of
/// norm at most `c`.
pub fn generator_bound_check(
    m: &NormedLattice,
    c: f64,
    gens: &[Vec<BigInt>],
) -> Result<GeneratorBound, LatticeError> {
    let r = m.rank();
    if !(c > 0.0) || !c.is_finite() {
        return Err(LatticeError::NonPositiveBound);
    }
    if gens.iter().any(|g| g.len() != r) {
        return Err(LatticeError::DimensionMismatch);
    }
    let c_exact = BigRational::from_float(c).ok_or(LatticeError::NonPositiveBound)?;
    let c2 = &c_exact * &c_exact;
    if gens.iter().any(|g| m.norm_sq(g) > c2) {
        return Err(LatticeError::GeneratorTooLong);
    }
    if r > 0 {
        let e = row_echelon(gens);
        let unit_pivots = e.pivots.iter().enumerate().all(|(row, &col)| e.h[row][col].is_one());
        if e.pivots.len() != r || !unit_pivots {
            return Err(LatticeError::GeneratorsDoNotSpan);
        }
    }
    // chi >= log V - r log c  <=>  tor^2 c^(2r) >= det
    let tor = BigRational::from_integer(BigInt::from(m.torsion().clone()));
    let lhs = &tor * &tor * Pow::pow(&c2, r as u32);
    let holds = lhs >= m.det();
    let slack = m.chi() - (ln_unit_ball_volume(r) - r as f64 * libm::log(c));
    Ok(GeneratorBound { holds, slack })
}

/// Integer matrix helper for callers: generators as rows from `i64`.
pub fn int_rows(rows: &[Vec<i64>]) -> IntMatrix {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}
