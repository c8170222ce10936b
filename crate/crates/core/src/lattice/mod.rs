//! Quadratically normed `Z`-modules.
//!
//! A [`NormedLattice`] is a free part given by an exact rational Gram matrix
//! in a chosen basis plus a torsion order. Everything that can be exact is
//! exact: determinants, sub/quotient Gram matrices and lattice point counts.
//! Only the final logarithms are floating point.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::numkernel::arith::{ln_biguint, ln_rational};
use crate::numkernel::matrix::{self, RatMatrix};

mod enumerate;
mod sublattice;

pub use enumerate::{BallCounter, Boundary};
pub use sublattice::{
    generator_bound_check, induced_sub_quotient, int_rows, row_echelon, saturate, sequence_identity_holds, Echelon,
    GeneratorBound, SublatticeEmbedding,
};

/// Default rank cap for `h0`/`h1` enumeration.
pub const DEFAULT_RANK_CAP: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeError {
    NotSymmetric,
    NotPositiveDefinite,
    ZeroTorsion,
    RankTooLarge { rank: usize, cap: usize },
    DimensionMismatch,
    /// Sublattice generators are linearly dependent.
    NotFullRank,
    NotSaturated,
    GeneratorsDoNotSpan,
    GeneratorTooLong,
    NonPositiveBound,
}

impl fmt::Display for LatticeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeError::NotSymmetric => f.write_str("gram matrix is not symmetric"),
            LatticeError::NotPositiveDefinite => f.write_str("gram matrix is not positive definite"),
            LatticeError::ZeroTorsion => f.write_str("torsion order must be at least 1"),
            LatticeError::RankTooLarge { rank, cap } => write!(f, "rank {rank} exceeds enumeration cap {cap}"),
            LatticeError::DimensionMismatch => f.write_str("dimension mismatch"),
            LatticeError::NotFullRank => f.write_str("sublattice generators are linearly dependent"),
            LatticeError::NotSaturated => f.write_str("sublattice is not saturated; saturate it first"),
            LatticeError::GeneratorsDoNotSpan => f.write_str("generators do not span the lattice"),
            LatticeError::GeneratorTooLong => f.write_str("a generator has norm above the bound"),
            LatticeError::NonPositiveBound => f.write_str("norm bound must be positive"),
        }
    }
}

/// Free `Z`-module of rank `r` with a positive definite rational Gram matrix,
/// plus a finite torsion part of the given order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormedLattice {
    gram: RatMatrix,
    torsion: BigUint,
}

impl NormedLattice {
    pub fn new(gram: RatMatrix, torsion: BigUint) -> Result<Self, LatticeError> {
        let r = gram.len();
        if gram.iter().any(|row| row.len() != r) {
            return Err(LatticeError::DimensionMismatch);
        }
        for i in 0..r {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(LatticeError::NotSymmetric);
                }
            }
        }
        if !matrix::is_positive_definite(&gram) {
            return Err(LatticeError::NotPositiveDefinite);
        }
        if torsion.is_zero() {
            return Err(LatticeError::ZeroTorsion);
        }
        Ok(NormedLattice { gram, torsion })
    }

    /// Torsion-free lattice from an integer Gram matrix.
    pub fn from_int_gram(gram: &[Vec<i64>]) -> Result<Self, LatticeError> {
        let g = gram.iter().map(|row| row.iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect();
        Self::new(g, BigUint::one())
    }

    /// Rank-0 lattice with only torsion.
    pub fn torsion_only(torsion: BigUint) -> Result<Self, LatticeError> {
        Self::new(Vec::new(), torsion)
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &RatMatrix {
        &self.gram
    }

    pub fn torsion(&self) -> &BigUint {
        &self.torsion
    }

    pub fn det(&self) -> BigRational {
        matrix::det(&self.gram)
    }

    /// Norm squared of an integer coordinate vector, exactly.
    pub fn norm_sq(&self, v: &[BigInt]) -> BigRational {
        let mut s = BigRational::zero();
        for i in 0..v.len() {
            for j in 0..v.len() {
                if !v[i].is_zero() && !v[j].is_zero() {
                    s += &self.gram[i][j] * BigRational::from_integer(&v[i] * &v[j]);
                }
            }
        }
        s
    }

    /// Same module with every norm multiplied by `factor` (Gram times factor^2).
    pub fn scaled(&self, factor: &BigRational) -> Self {
        let f2 = factor * factor;
        let gram = self.gram.iter().map(|row| row.iter().map(|x| x * &f2).collect()).collect();
        NormedLattice { gram, torsion: self.torsion.clone() }
    }

    /// The dual module with the inverse Gram matrix (torsion dropped).
    pub fn dual(&self) -> Self {
        let gram = matrix::inverse(&self.gram).expect("positive definite gram is invertible");
        NormedLattice { gram, torsion: BigUint::one() }
    }

    /// `chi(M) = log V(r) - 1/2 log det(gram) + log #M_tor`.
    pub fn chi(&self) -> f64 {
        let r = self.rank();
        let mut chi = ln_biguint(&self.torsion);
        if r > 0 {
            chi += ln_unit_ball_volume(r) - 0.5 * ln_rational(&self.det());
        }
        chi
    }

    /// Counter for `{m : |m| < 1}` in the free part.
    pub fn h0_counter(&self, cap: usize) -> Result<BallCounter, LatticeError> {
        self.check_cap(cap)?;
        BallCounter::new(&self.gram, Boundary::Open)
    }

    /// Counter for `{a : a^T gram^-1 a <= 1}`.
    pub fn h1_counter(&self, cap: usize) -> Result<BallCounter, LatticeError> {
        self.check_cap(cap)?;
        BallCounter::new(&self.dual().gram, Boundary::Closed)
    }

    fn check_cap(&self, cap: usize) -> Result<(), LatticeError> {
        if self.rank() > cap {
            Err(LatticeError::RankTooLarge { rank: self.rank(), cap })
        } else {
            Ok(())
        }
    }

    /// `log #{m in M : |m| < 1}`, torsion elements included.
    pub fn h0(&self) -> Result<f64, LatticeError> {
        self.h0_with_cap(DEFAULT_RANK_CAP)
    }

    pub fn h0_with_cap(&self, cap: usize) -> Result<f64, LatticeError> {
        let n = self.h0_counter(cap)?.count();
        Ok(libm::log(n as f64) + ln_biguint(&self.torsion))
    }

    /// `log #{a in Z^r : a^T gram^-1 a <= 1}`.
    pub fn h1(&self) -> Result<f64, LatticeError> {
        self.h1_with_cap(DEFAULT_RANK_CAP)
    }

    pub fn h1_with_cap(&self, cap: usize) -> Result<f64, LatticeError> {
        let n = self.h1_counter(cap)?.count();
        Ok(libm::log(n as f64))
    }

    /// `h0 - h1 - chi`.
    pub fn riemann_roch_defect(&self) -> Result<f64, LatticeError> {
        Ok(self.h0()? - self.h1()? - self.chi())
    }
}

/// `log` of the volume of the Euclidean unit ball in `R^r`.
pub fn ln_unit_ball_volume(r: usize) -> f64 {
    use core::f64::consts::PI;
    if r > 200 {
        let h = r as f64 / 2.0;
        return h * libm::log(PI) - libm::lgamma(h + 1.0);
    }
    // V(r) = 2 pi / r * V(r - 2), V(0) = 1, V(1) = 2
    let mut acc = if r % 2 == 0 { 0.0 } else { libm::log(2.0) };
    let mut k = if r % 2 == 0 { 2 } else { 3 };
    while k <= r {
        acc += libm::log(2.0 * PI / k as f64);
        k += 2;
    }
    acc
}

/// `V(r) = pi^(r/2) / Gamma(r/2 + 1)`.
pub fn unit_ball_volume(r: usize) -> f64 {
    use core::f64::consts::PI;
    match r {
        0 => 1.0,
        1 => 2.0,
        2 => PI,
        _ => libm::exp(ln_unit_ball_volume(r)),
    }
}

/// Arithmetic-geometric mean check used inside the generator bound: a
/// positive definite matrix with trace `<= r` has determinant `<= 1`.
pub fn trace_det_bound_holds(g: &[Vec<BigRational>]) -> bool {
    let r = g.len();
    let trace: BigRational = (0..r).map(|i| g[i][i].clone()).sum();
    if trace > BigRational::from_integer(BigInt::from(r)) {
        return true;
    }
    let d = matrix::det(g);
    !d.is_positive() || d <= BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::PI;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn lat(g: Vec<Vec<BigRational>>) -> NormedLattice {
        NormedLattice::new(g, BigUint::one()).unwrap()
    }

    #[test]
    fn ball_volumes() {
        assert_eq!(unit_ball_volume(0), 1.0);
        assert_eq!(unit_ball_volume(1), 2.0);
        assert_eq!(unit_ball_volume(2), PI);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        // recurrence and lgamma branches agree where they meet
        let h = 100.0;
        let direct = h * libm::log(PI) - libm::lgamma(h + 1.0);
        assert!((ln_unit_ball_volume(200) - direct).abs() < 1e-10);
    }

    #[test]
    fn chi_examples() {
        assert!((lat(vec![vec![q(1, 1)]]).chi() - libm::log(2.0)).abs() < 1e-15);
        let i2 = lat(vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]]);
        assert!((i2.chi() - libm::log(PI)).abs() < 1e-15);
        assert!(lat(vec![vec![q(4, 1)]]).chi().abs() < 1e-15);
        let t = NormedLattice::torsion_only(BigUint::from(6u8)).unwrap();
        assert!((t.chi() - libm::log(6.0)).abs() < 1e-15);
    }

    #[test]
    fn h0_h1_examples() {
        let one = lat(vec![vec![q(1, 1)]]);
        assert_eq!(one.h0().unwrap(), 0.0);
        assert!((one.h1().unwrap() - libm::log(3.0)).abs() < 1e-15);
        // norm 0.3|m|: |m| <= 3
        assert!((lat(vec![vec![q(9, 100)]]).h0().unwrap() - libm::log(7.0)).abs() < 1e-15);
        assert_eq!(lat(vec![vec![q(1, 4)]]).h1().unwrap(), 0.0);
        let i2 = lat(vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]]);
        assert_eq!(i2.h0().unwrap(), 0.0);
        assert!((i2.h1().unwrap() - libm::log(5.0)).abs() < 1e-15);
    }

    #[test]
    fn defect_examples() {
        let one = lat(vec![vec![q(1, 1)]]);
        let want = 0.0 - libm::log(3.0) - libm::log(2.0);
        assert!((one.riemann_roch_defect().unwrap() - want).abs() < 1e-14);
        let t = NormedLattice::torsion_only(BigUint::from(7u8)).unwrap();
        assert!(t.riemann_roch_defect().unwrap().abs() < 1e-15);
        let i2 = lat(vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]]);
        let want = -libm::log(5.0) - libm::log(PI);
        assert!((i2.riemann_roch_defect().unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn validation() {
        assert_eq!(
            NormedLattice::new(vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(1, 1)]], BigUint::one()),
            Err(LatticeError::NotPositiveDefinite)
        );
        assert_eq!(
            NormedLattice::new(vec![vec![q(1, 1), q(0, 1)], vec![q(1, 2), q(1, 1)]], BigUint::one()),
            Err(LatticeError::NotSymmetric)
        );
        assert_eq!(NormedLattice::new(vec![vec![q(1, 1)]], BigUint::zero()), Err(LatticeError::ZeroTorsion));
        let big = lat((0..13).map(|i| (0..13).map(|j| q((i == j) as i64, 1)).collect()).collect());
        assert_eq!(big.h0(), Err(LatticeError::RankTooLarge { rank: 13, cap: 12 }));
    }
}
