//! Distortion functions `b(z) = sum |s_i(z)|^2` over an orthonormal basis.
//!
//! With `v(z)` the vector of pointwise monomial norms (with phases),
//! `b = v^H G^(-1) v`, computed by a forward solve against the Cholesky
//! factor. A second route through the eigendecomposition of the Gram is kept
//! for the basis-independence check.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{BergmanError, CurvatureMeasure, GramData, MetricFamily, Quadrature, SectionSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Chart {
    /// `z = x1 / x0`, used for `|z| <= 1`.
    Zero,
    /// `w = x0 / x1`, used for `|w| <= 1`.
    Infinity,
}

/// A point of `P^1(C)` in one of the two charts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct P1Coord {
    pub chart: Chart,
    pub u: Complex64,
}

impl P1Coord {
    /// The point with affine coordinate `z`, in the chart where it has modulus at most 1.
    pub fn from_affine(z: Complex64) -> Self {
        if z.norm() <= 1.0 {
            P1Coord { chart: Chart::Zero, u: z }
        } else {
            P1Coord { chart: Chart::Infinity, u: z.inv() }
        }
    }

    pub fn infinity() -> Self {
        P1Coord { chart: Chart::Infinity, u: Complex64::new(0.0, 0.0) }
    }

    /// Same point, moved to the chart where `|u| <= 1`.
    pub fn canonical(self) -> Self {
        if self.u.norm() <= 1.0 {
            return self;
        }
        let other = match self.chart {
            Chart::Zero => Chart::Infinity,
            Chart::Infinity => Chart::Zero,
        };
        P1Coord { chart: other, u: self.u.inv() }
    }
}

/// Polar grid on both charts; the circle `|z| = 1` appears once.
pub fn default_grid(radii: usize, angles: usize) -> Vec<P1Coord> {
    let mut out = Vec::new();
    for chart in [Chart::Zero, Chart::Infinity] {
        let top = if chart == Chart::Zero { radii } else { radii - 1 };
        for i in 0..=top {
            let r = i as f64 / radii as f64;
            let n = if i == 0 { 1 } else { angles };
            for j in 0..n {
                let u = Complex64::from_polar(r, 2.0 * core::f64::consts::PI * j as f64 / angles as f64);
                out.push(P1Coord { chart, u });
            }
        }
    }
    out
}

/// Maximizes `f` over `P^1` from a grid by compass search in chart
/// coordinates.
pub(crate) fn maximize(f: impl Fn(P1Coord) -> f64, grid: &[P1Coord], step: f64) -> (f64, P1Coord) {
    let mut scored: Vec<(f64, P1Coord)> = grid.iter().map(|&p| (f(p), p)).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = scored[0];
    for &(v0, p0) in scored.iter().take(3) {
        let (mut v, mut p) = (v0, p0);
        let mut h = step;
        while h > 1e-10 {
            let mut moved = false;
            for d in [Complex64::new(h, 0.0), Complex64::new(-h, 0.0), Complex64::new(0.0, h), Complex64::new(0.0, -h)] {
                let q = P1Coord { chart: p.chart, u: p.u + d }.canonical();
                let fq = f(q);
                if fq > v {
                    v = fq;
                    p = q;
                    moved = true;
                    break;
                }
            }
            if !moved {
                h *= 0.5;
            }
        }
        if v > best.0 {
            best = (v, p);
        }
    }
    best
}

/// Evaluates the distortion function of one Gram matrix.
#[derive(Clone, Debug)]
pub struct DistortionEvaluator {
    metric: MetricFamily,
    ln_diag: Vec<f64>,
    chol: Vec<Vec<f64>>,
    scaled: Vec<Vec<f64>>,
}

impl DistortionEvaluator {
    pub fn new(gram: &GramData, metric: &MetricFamily) -> Result<Self, BergmanError> {
        if metric.degree() + 1 != gram.dim() as i64 {
            return Err(BergmanError::DegreeMismatch);
        }
        Ok(DistortionEvaluator {
            metric: metric.clone(),
            ln_diag: gram.ln_diag().to_vec(),
            chol: gram.cholesky()?,
            scaled: gram.scaled().to_vec(),
        })
    }

    fn degree(&self) -> usize {
        self.ln_diag.len() - 1
    }

    /// `v_k / sqrt(G_kk)` split into real and imaginary parts.
    fn scaled_vector(&self, p: P1Coord) -> (Vec<f64>, Vec<f64>) {
        let d = self.degree();
        let r = p.u.norm();
        let theta = p.u.arg();
        let w = self.metric.log_phi(p.chart, r);
        let lr = libm::log(r);
        let mut re = vec![0.0; d + 1];
        let mut im = vec![0.0; d + 1];
        for k in 0..=d {
            let e = match p.chart {
                super::Chart::Zero => k,
                super::Chart::Infinity => d - k,
            };
            if r == 0.0 && e > 0 {
                continue;
            }
            let lead = if e == 0 { 0.0 } else { e as f64 * lr };
            let m = libm::exp(lead - w - 0.5 * self.ln_diag[k]);
            let a = e as f64 * theta;
            re[k] = m * libm::cos(a);
            im[k] = m * libm::sin(a);
        }
        (re, im)
    }

    fn forward(&self, v: &[f64]) -> f64 {
        let n = v.len();
        let mut y = vec![0.0; n];
        let mut s = 0.0;
        for i in 0..n {
            let t = v[i] - (0..i).map(|k| self.chol[i][k] * y[k]).sum::<f64>();
            y[i] = t / self.chol[i][i];
            s += y[i] * y[i];
        }
        s
    }

    pub fn eval(&self, p: P1Coord) -> f64 {
        let (re, im) = self.scaled_vector(p);
        self.forward(&re) + self.forward(&im)
    }

    /// Orthonormal basis from the eigenvectors of the Gram instead.
    pub fn eigen(&self) -> EigenDistortion {
        let (vals, vecs) = jacobi_eigen(&self.scaled);
        EigenDistortion { inner: self.clone(), vals, vecs }
    }

    /// Angle average of `b` on the circle of radius `r`. Cross terms between
    /// distinct monomials average out, leaving `sum (G^-1)_kk |v_k|^2`.
    fn circle_mean(&self, inv_diag: &[f64], chart: Chart, r: f64) -> f64 {
        let (re, _) = self.scaled_vector(P1Coord { chart, u: Complex64::new(r, 0.0) });
        re.iter().zip(inv_diag).map(|(v, a)| a * v * v).sum()
    }

    /// `int b dmu`, which should equal the dimension.
    pub fn trace_integral(&self, mu: &CurvatureMeasure, quad: &Quadrature) -> Result<f64, BergmanError> {
        let n = self.ln_diag.len();
        // diagonal of H^-1 from the Cholesky factor
        let mut inv_diag = vec![0.0; n];
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let mut y = vec![0.0; n];
            for i in 0..n {
                y[i] = (e[i] - (0..i).map(|k| self.chol[i][k] * y[k]).sum::<f64>()) / self.chol[i][i];
            }
            inv_diag = inv_diag.iter().zip(&y).map(|(a, b)| a + b * b).collect();
        }
        let mut total = 0.0;
        for chart in [Chart::Zero, Chart::Infinity] {
            let f = |r: f64| self.circle_mean(&inv_diag, chart, r) * libm::exp(mu.ln_mass_density(chart, r));
            total += quad.radial(f, &[])?.0;
        }
        Ok(total)
    }

    /// Maximum over `P^1`: grid then compass search.
    pub fn sup(&self) -> (f64, P1Coord) {
        maximize(|p| self.eval(p), &default_grid(32, 16), 1.0 / 32.0)
    }
}

/// Distortion through `H = Q diag(lambda) Q^T`.
#[derive(Clone, Debug)]
pub struct EigenDistortion {
    inner: DistortionEvaluator,
    vals: Vec<f64>,
    vecs: Vec<Vec<f64>>,
}

impl EigenDistortion {
    pub fn eval(&self, p: P1Coord) -> f64 {
        let (re, im) = self.inner.scaled_vector(p);
        let n = re.len();
        (0..n)
            .map(|j| {
                let a: f64 = (0..n).map(|i| self.vecs[i][j] * re[i]).sum();
                let b: f64 = (0..n).map(|i| self.vecs[i][j] * im[i]).sum();
                (a * a + b * b) / self.vals[j]
            })
            .sum()
    }
}

/// Cyclic Jacobi on a real symmetric matrix; columns of the second result are
/// eigenvectors.
fn jacobi_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut a = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k][p], v[k][q]);
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

/// Values of `b` on a grid, with the grid extremes and the refined maximum.
#[derive(Clone, Debug, PartialEq)]
pub struct DistortionProfile {
    pub grid: Vec<P1Coord>,
    pub values: Vec<f64>,
    pub sup: f64,
    pub inf: f64,
    /// Maximum after local refinement (at least `sup`).
    pub sup_refined: f64,
    pub argmax: P1Coord,
}

fn profile(ev: &DistortionEvaluator, grid: Vec<P1Coord>) -> DistortionProfile {
    let values: Vec<f64> = grid.iter().map(|&p| ev.eval(p)).collect();
    let sup = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let inf = values.iter().copied().fold(f64::INFINITY, f64::min);
    let (refined, argmax) = ev.sup();
    DistortionProfile { grid, values, sup, inf, sup_refined: refined.max(sup), argmax }
}

/// Distortion function of `space` with `metric` against `mu`.
pub fn distortion(
    space: SectionSpace,
    metric: &MetricFamily,
    mu: &CurvatureMeasure,
    grid: Vec<P1Coord>,
    quad: &Quadrature,
) -> Result<DistortionProfile, BergmanError> {
    let g = super::l2_gram(space, metric, mu, quad)?;
    let ev = DistortionEvaluator::new(&g, metric)?;
    Ok(profile(&ev, grid))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DifferenceReport {
    pub profile: DistortionProfile,
    /// `N a - j b`.
    pub degree: usize,
    /// `dim Gamma(N L) = N a + 1`.
    pub dim_nl: usize,
    /// `sup b / dim Gamma(N L)`.
    pub ratio: f64,
}

/// Distortion of `N L - j M` against the measure induced by `L`.
pub fn distortion_difference(
    n: u32,
    j: u32,
    l: &MetricFamily,
    m: &MetricFamily,
    grid: Vec<P1Coord>,
    quad: &Quadrature,
) -> Result<DifferenceReport, BergmanError> {
    let metric = l.scale(n as i64).minus(&m.scale(j as i64));
    let space = SectionSpace::new(metric.degree())?;
    let mu = CurvatureMeasure::induced_by(l)?;
    if !m.is_positive() {
        return Err(BergmanError::NonPositiveCurvature);
    }
    let profile = distortion(space, &metric, &mu, grid, quad)?;
    let dim_nl = (n as i64 * l.degree() + 1) as usize;
    let ratio = profile.sup_refined / dim_nl as f64;
    Ok(DifferenceReport { profile, degree: space.degree, dim_nl, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bergman::l2_gram;

    #[test]
    fn fubini_study_distortion_is_constant() {
        let q = Quadrature::default();
        for d in [0usize, 1, 4, 13] {
            let p = distortion(
                SectionSpace { degree: d },
                &MetricFamily::fs().scale(d as i64),
                &CurvatureMeasure::fs(),
                default_grid(8, 8),
                &q,
            )
            .unwrap();
            let want = (d + 1) as f64;
            assert!((p.sup - want).abs() < 2e-10 && (p.inf - want).abs() < 2e-10, "{d}: {} {}", p.sup, p.inf);
        }
    }

    #[test]
    fn trace_identity_and_basis_independence() {
        let q = Quadrature::default();
        let m = MetricFamily::c(0.3).unwrap().scale(7).plus(&MetricFamily::t(3).unwrap());
        let mu = CurvatureMeasure::induced_by(&MetricFamily::c(0.3).unwrap()).unwrap();
        let g = l2_gram(SectionSpace { degree: 8 }, &m, &mu, &q).unwrap();
        let ev = DistortionEvaluator::new(&g, &m).unwrap();
        assert!((ev.trace_integral(&mu, &q).unwrap() - 9.0).abs() < 1e-8);
        let eig = ev.eigen();
        for p in default_grid(5, 7) {
            assert!((ev.eval(p) - eig.eval(p)).abs() < 1e-9);
        }
    }

    #[test]
    fn difference_with_j_zero_is_plain_distortion() {
        let q = Quadrature::default();
        let l = MetricFamily::c(0.5).unwrap();
        let m = MetricFamily::fs();
        let a = distortion_difference(6, 0, &l, &m, default_grid(6, 4), &q).unwrap();
        let mu = CurvatureMeasure::induced_by(&l).unwrap();
        let b = distortion(SectionSpace { degree: 6 }, &l.scale(6), &mu, default_grid(6, 4), &q).unwrap();
        assert_eq!(a.profile.values, b.values);
        assert_eq!(
            distortion_difference(1, 3, &l, &m, default_grid(6, 4), &q).unwrap_err(),
            BergmanError::NegativeDegree
        );
    }
}
