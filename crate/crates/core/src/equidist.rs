//! Galois orbits as empirical measures and equidistribution diagnostics.
//!
//! Orbits of algebraic points of `P^1` are the complex roots of the minimal
//! polynomial. Orbits of torsion points of `G_m^n` use the Galois action
//! `a -> t a` for `t` a unit mod `m`, which keeps everything exact: angles are
//! rationals `e/m`, and character sums over an orbit are Ramanujan sums.
//!
//! Discrepancy is measured over arcs of the circle (intervals allowed to
//! wrap around), so it does not depend on where the angle origin sits. For
//! sorted angle fractions `x_i` with cumulative weights `F_i` it equals
//! `max_i (F_i - x_i) - min_i (F_(i-1) - x_i)`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::heights::{AlgebraicP1Point, CyclotomicTorusPoint};
use crate::numkernel::arith::{gcd_u64, moebius, totient};
use crate::numkernel::mp::to_c64;
use crate::numkernel::{poly_roots, NumError, Precision};

/// Radial tolerance separating root-finder noise from points off the torus.
pub const DEFAULT_TORUS_TOLERANCE: f64 = 1e-9;
/// Tolerance on the total mass of an [`EmpiricalMeasure`].
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum EquidistError {
    Num(NumError),
    PointAtInfinity,
    /// A point sits farther than the tolerance from the unit torus.
    OffTorus { deviation: f64 },
    DimensionMismatch,
    EmptyMeasure,
    InvalidWeights,
    OrderTooSmall,
}

impl From<NumError> for EquidistError {
    fn from(e: NumError) -> Self {
        EquidistError::Num(e)
    }
}

impl fmt::Display for EquidistError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquidistError::Num(e) => write!(f, "{e}"),
            EquidistError::PointAtInfinity => f.write_str("the point at infinity has no affine orbit"),
            EquidistError::OffTorus { deviation } => write!(f, "point off the unit torus by {deviation:e}"),
            EquidistError::DimensionMismatch => f.write_str("dimension mismatch"),
            EquidistError::EmptyMeasure => f.write_str("measure has no points"),
            EquidistError::InvalidWeights => f.write_str("weights must be positive and sum to 1"),
            EquidistError::OrderTooSmall => f.write_str("order must be at least 2"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OrbitSource {
    Algebraic(AlgebraicP1Point),
    Cyclotomic(CyclotomicTorusPoint),
}

/// All Galois conjugates of a point, each with weight `1 / degree`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaloisOrbit {
    points: Vec<Vec<Complex64>>,
    source: OrbitSource,
    /// Exponent tuples mod `m` for cyclotomic orbits.
    exponents: Option<Vec<Vec<u64>>>,
}

impl GaloisOrbit {
    pub fn degree(&self) -> usize {
        self.points.len()
    }

    pub fn dimension(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    pub fn points(&self) -> &[Vec<Complex64>] {
        &self.points
    }

    pub fn source(&self) -> &OrbitSource {
        &self.source
    }

    /// `(m, exponent tuples)` when every point is `zeta_m^e` coordinatewise.
    pub fn exact_exponents(&self) -> Option<(u64, &[Vec<u64>])> {
        match (&self.source, &self.exponents) {
            (OrbitSource::Cyclotomic(x), Some(e)) => Some((x.order(), e)),
            _ => None,
        }
    }

    pub fn measure(&self) -> EmpiricalMeasure {
        EmpiricalMeasure::uniform(self.points.clone()).expect("orbits are nonempty")
    }
}

/// Finitely supported probability measure on `C^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalMeasure {
    points: Vec<Vec<Complex64>>,
    weights: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn new(points: Vec<Vec<Complex64>>, weights: Vec<f64>) -> Result<Self, EquidistError> {
        if points.is_empty() {
            return Err(EquidistError::EmptyMeasure);
        }
        if weights.len() != points.len() || points.iter().any(|p| p.len() != points[0].len()) {
            return Err(EquidistError::DimensionMismatch);
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|&w| !(w > 0.0)) || (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(EquidistError::InvalidWeights);
        }
        Ok(EmpiricalMeasure { points, weights })
    }

    pub fn uniform(points: Vec<Vec<Complex64>>) -> Result<Self, EquidistError> {
        let w = 1.0 / points.len() as f64;
        let n = points.len();
        Self::new(points, vec![w; n])
    }

    /// Uniform measure on points of `P^1` given in the affine chart.
    pub fn uniform_p1(points: &[Complex64]) -> Result<Self, EquidistError> {
        Self::uniform(points.iter().map(|&z| vec![z]).collect())
    }

    pub fn points(&self) -> &[Vec<Complex64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dimension(&self) -> usize {
        self.points[0].len()
    }

    /// `sum_j w_j f(z_j)`.
    pub fn integrate(&self, f: impl Fn(&[Complex64]) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(z, w)| w * f(z)).sum()
    }

    fn check_torus(&self, tol: f64) -> Result<(), EquidistError> {
        let worst = self.points.iter().flatten().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
        if worst > tol {
            return Err(EquidistError::OffTorus { deviation: worst });
        }
        Ok(())
    }
}

/// Characters `z -> z^k` with `0 < max|k_i| <= cutoff`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestFunctionBank {
    pub dimension: usize,
    pub cutoff: u32,
}

impl TestFunctionBank {
    pub fn characters(&self) -> Vec<Vec<i64>> {
        let k = self.cutoff as i64;
        let mut out: Vec<Vec<i64>> = vec![Vec::new()];
        for _ in 0..self.dimension {
            out = out.into_iter().flat_map(|v| (-k..=k).map(move |c| [v.as_slice(), &[c]].concat())).collect();
        }
        out.retain(|v| v.iter().any(|&c| c != 0));
        out
    }
}

/// Complex roots of the minimal polynomial.
pub fn galois_orbit_minpoly(x: &AlgebraicP1Point, tol: f64, precision: Precision) -> Result<GaloisOrbit, EquidistError> {
    let p = x.minpoly().ok_or(EquidistError::PointAtInfinity)?;
    let roots = poly_roots(p, tol, precision)?;
    Ok(GaloisOrbit {
        points: roots.iter().map(|z| vec![to_c64(z)]).collect(),
        source: OrbitSource::Algebraic(x.clone()),
        exponents: None,
    })
}

/// `{ (zeta_m^(t a_1), ..., zeta_m^(t a_n)) : gcd(t, m) = 1 }` without repeats,
/// ordered by the exponent tuple.
pub fn galois_orbit_cyclotomic(x: &CyclotomicTorusPoint) -> GaloisOrbit {
    let m = x.order();
    let mut tuples: Vec<Vec<u64>> = (1..=m)
        .filter(|&t| gcd_u64(t, m) == 1)
        .map(|t| x.exponents().iter().map(|&a| ((t as u128 * a as u128) % m as u128) as u64).collect())
        .collect();
    tuples.sort_unstable();
    tuples.dedup();
    let points = tuples.iter().map(|e| e.iter().map(|&a| root_of_unity(a, m)).collect()).collect();
    GaloisOrbit { points, source: OrbitSource::Cyclotomic(x.clone()), exponents: Some(tuples) }
}

fn root_of_unity(a: u64, m: u64) -> Complex64 {
    let theta = 2.0 * core::f64::consts::PI * (a as f64 / m as f64);
    Complex64::new(libm::cos(theta), libm::sin(theta))
}

fn pow_i64(z: Complex64, k: i64) -> Complex64 {
    let mut base = if k < 0 { z.inv() } else { z };
    let mut e = k.unsigned_abs();
    let mut acc = Complex64::new(1.0, 0.0);
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// `sum_j w_j prod_i z_(j,i)^(k_i)`.
pub fn weyl_sum(mu: &EmpiricalMeasure, k: &[i64], tol: f64) -> Result<Complex64, EquidistError> {
    if k.len() != mu.dimension() {
        return Err(EquidistError::DimensionMismatch);
    }
    mu.check_torus(tol)?;
    if k.iter().all(|&c| c == 0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let mut s = Complex64::new(0.0, 0.0);
    for (z, w) in mu.points.iter().zip(&mu.weights) {
        let term = z.iter().zip(k).fold(Complex64::new(1.0, 0.0), |acc, (&zi, &ki)| acc * pow_i64(zi, ki));
        s += term * *w;
    }
    Ok(s)
}

/// Weyl sum of a cyclotomic orbit, exactly.
///
/// The character sends the orbit of `a` to `zeta_m^(t s)` with
/// `s = k . a mod m`, each value hit equally often, so the sum is the
/// Ramanujan sum `c_m(s) / phi(m) = mu(m/g) / phi(m/g)` with `g = gcd(s, m)`.
pub fn weyl_sum_cyclotomic_exact(x: &CyclotomicTorusPoint, k: &[i64]) -> Result<BigRational, EquidistError> {
    if k.len() != x.dimension() {
        return Err(EquidistError::DimensionMismatch);
    }
    let m = x.order() as i128;
    let s = k.iter().zip(x.exponents()).fold(0i128, |acc, (&ki, &ai)| (acc + ki as i128 * ai as i128).rem_euclid(m));
    let g = s.gcd(&m) as u64;
    let n = x.order() / g;
    Ok(BigRational::new(BigInt::from(moebius(n)), BigInt::from(totient(n))))
}

fn angle_fraction(z: Complex64) -> f64 {
    let t = libm::atan2(z.im, z.re) / (2.0 * core::f64::consts::PI);
    let t = if t < 0.0 { t + 1.0 } else { t };
    if t >= 1.0 {
        0.0
    } else {
        t
    }
}

/// Arc discrepancy of the angles of a measure on the circle, in `(0, 1]`.
pub fn star_discrepancy(mu: &EmpiricalMeasure, tol: f64) -> Result<f64, EquidistError> {
    if mu.dimension() != 1 {
        return Err(EquidistError::DimensionMismatch);
    }
    mu.check_torus(tol)?;
    let mut pts: Vec<(f64, f64)> = mu.points.iter().zip(&mu.weights).map(|(z, &w)| (angle_fraction(z[0]), w)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(arc_discrepancy_sorted(&pts))
}

/// Arc discrepancy of sorted `(fraction, weight)` pairs.
pub fn arc_discrepancy_sorted(pts: &[(f64, f64)]) -> f64 {
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    let mut cum = 0.0;
    for &(x, w) in pts {
        lo = lo.min(cum - x);
        cum += w;
        hi = hi.max(cum - x);
    }
    hi - lo
}

/// Exact arc discrepancy of the uniform measure on angles `e_i / m`.
pub fn arc_discrepancy_exact(m: u64, numerators: &[u64]) -> BigRational {
    let mut e = numerators.to_vec();
    e.sort_unstable();
    let n = e.len() as i128;
    let m = m as i128;
    // F_i - x_i = (i m - e_i n) / (n m)
    let mut hi = i128::MIN;
    let mut lo = i128::MAX;
    for (i, &ei) in e.iter().enumerate() {
        let x = ei as i128 * n;
        lo = lo.min(i as i128 * m - x);
        hi = hi.max((i as i128 + 1) * m - x);
    }
    BigRational::new(BigInt::from(hi - lo), BigInt::from(n * m))
}

/// Exact discrepancy of a one-dimensional cyclotomic orbit.
pub fn orbit_discrepancy_exact(orbit: &GaloisOrbit) -> Option<BigRational> {
    let (m, e) = orbit.exact_exponents()?;
    if orbit.dimension() != 1 {
        return None;
    }
    let num: Vec<u64> = e.iter().map(|t| t[0]).collect();
    Some(arc_discrepancy_exact(m, &num))
}

/// `h + eps * integral of f against mu`: the height of the orbit for the
/// metric multiplied by `exp(-eps f)`.
pub fn twisted_height(h: f64, mu: &EmpiricalMeasure, f: impl Fn(&[Complex64]) -> f64, eps: f64) -> f64 {
    h + eps * mu.integrate(f)
}

/// One row of [`bilu_experiment`].
#[derive(Clone, Debug, PartialEq)]
pub struct BiluRow {
    pub m: u64,
    pub degree: usize,
    /// `max |weyl_sum|` over the bank, from the floating point orbit.
    pub max_weyl: f64,
    pub max_weyl_exact: BigRational,
    pub discrepancy: f64,
    pub discrepancy_exact: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BiluReport {
    pub cutoff: u32,
    pub rows: Vec<BiluRow>,
    /// Whether the exact statistics are nonincreasing in the order given.
    pub weyl_nonincreasing: bool,
    pub discrepancy_nonincreasing: bool,
}

/// Orbits of primitive `m`-th roots of unity for each `m` in `orders`.
pub fn bilu_experiment(orders: &[u64], cutoff: u32) -> Result<BiluReport, EquidistError> {
    let bank = TestFunctionBank { dimension: 1, cutoff };
    let chars = bank.characters();
    let mut rows = Vec::with_capacity(orders.len());
    for &m in orders {
        if m < 2 {
            return Err(EquidistError::OrderTooSmall);
        }
        let x = CyclotomicTorusPoint::new(m, &[1]).expect("m >= 2");
        let orbit = galois_orbit_cyclotomic(&x);
        let mu = orbit.measure();
        let mut max_weyl: f64 = 0.0;
        let mut max_exact = BigRational::zero();
        for k in &chars {
            max_weyl = max_weyl.max(weyl_sum(&mu, k, DEFAULT_TORUS_TOLERANCE)?.norm());
            let e = weyl_sum_cyclotomic_exact(&x, k)?.abs();
            if e > max_exact {
                max_exact = e;
            }
        }
        rows.push(BiluRow {
            m,
            degree: orbit.degree(),
            max_weyl,
            max_weyl_exact: max_exact,
            discrepancy: star_discrepancy(&mu, DEFAULT_TORUS_TOLERANCE)?,
            discrepancy_exact: orbit_discrepancy_exact(&orbit).expect("cyclotomic orbit"),
        });
    }
    let weyl_nonincreasing = rows.windows(2).all(|w| w[1].max_weyl_exact <= w[0].max_weyl_exact);
    let discrepancy_nonincreasing = rows.windows(2).all(|w| w[1].discrepancy_exact <= w[0].discrepancy_exact);
    Ok(BiluReport { cutoff, rows, weyl_nonincreasing, discrepancy_nonincreasing })
}
