//! Hermitian metrics on `O(d)` over `P^1(C)` and the analysis built on them.
//!
//! Every metric here is an integer combination of two radial families on
//! `O(1)`:
//!
//! * `c`: `||s|| = |s| / sqrt(|x0|^2 + c |x1|^2)`,
//! * `t`: `||s|| = |s| / (|x0|^t + |x1|^t)^(1/t)`.
//!
//! Radiality is what keeps the numerics small. Write `z = x1/x0` on the chart
//! `|z| <= 1` and `w = x0/x1` on the chart `|w| <= 1`. Then the integral of
//! `z^k conj(z)^l` against a radial density only sees the Fourier mode
//! `k = l`, so every Gram entry is a finite sum of one-dimensional radial
//! moments. Those are computed by composite Gauss-Legendre in `s = sqrt(r)` on
//! each chart, in the log domain, doubling panels until two passes agree.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

mod distortion;
mod gram;
mod intersect;
mod quad;
mod sup;

pub use distortion::{
    default_grid, distortion, distortion_difference, Chart, DifferenceReport, DistortionEvaluator, DistortionProfile,
    P1Coord,
};
pub use gram::{closed_form_c_gram, l2_gram, twisted_gram, GramData};
pub use intersect::{
    arithmetic_self_intersection_c, chi_l2, chi_l2_series, intersection, mixed_arithmetic_intersection,
    siu_growth_experiment, ChiPoint, SiuReport,
};
pub use quad::Quadrature;
pub use sup::{gromov_ratio, integral_log_norm, sup_norm, volume_comparison, VolumeComparison};

#[derive(Clone, Debug, PartialEq)]
pub enum BergmanError {
    InvalidParameter,
    /// A measure was requested from a metric with some negative part.
    NonPositiveCurvature,
    DegreeMismatch,
    NegativeDegree,
    ZeroSection,
    QuadratureBudgetExceeded { nodes: usize, error: f64 },
    IllConditioned { condition: f64 },
    NotEffective { sup: f64 },
    EmptyRange,
}

impl fmt::Display for BergmanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BergmanError::InvalidParameter => f.write_str("metric parameter out of range"),
            BergmanError::NonPositiveCurvature => f.write_str("metric has a negative part; decompose it first"),
            BergmanError::DegreeMismatch => f.write_str("section degree does not match the metric"),
            BergmanError::NegativeDegree => f.write_str("line bundle of negative degree has no sections"),
            BergmanError::ZeroSection => f.write_str("section is zero"),
            BergmanError::QuadratureBudgetExceeded { nodes, error } => {
                write!(f, "quadrature not converged after {nodes} nodes (error {error:e})")
            }
            BergmanError::IllConditioned { condition } => write!(f, "Gram matrix ill-conditioned ({condition:e})"),
            BergmanError::NotEffective { sup } => write!(f, "section has sup norm {sup} > 1"),
            BergmanError::EmptyRange => f.write_str("empty parameter range"),
        }
    }
}

/// Metric on `O(1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BaseWeight {
    C(f64),
    T(u32),
}

impl BaseWeight {
    pub fn validate(self) -> Result<Self, BergmanError> {
        match self {
            BaseWeight::C(c) if c > 0.0 && c.is_finite() => Ok(self),
            BaseWeight::T(t) if t >= 1 => Ok(self),
            _ => Err(BergmanError::InvalidParameter),
        }
    }

    /// `log phi` on the chart at radius `r`, where `phi(1, z)` or `phi(w, 1)`
    /// is the weight with `||s|| = |s| / phi`.
    pub(crate) fn log_phi(self, chart: Chart, r: f64) -> f64 {
        match (self, chart) {
            (BaseWeight::C(c), Chart::Zero) => 0.5 * libm::log1p(c * r * r),
            (BaseWeight::C(c), Chart::Infinity) => 0.5 * libm::log(r * r + c),
            (BaseWeight::T(t), _) => libm::log1p(libm::pow(r, t as f64)) / t as f64,
        }
    }

    /// Log of the curvature mass density in `r`, angle integrated.
    pub(crate) fn ln_mass_density(self, chart: Chart, r: f64) -> f64 {
        match (self, chart) {
            (BaseWeight::C(c), Chart::Zero) => libm::log(2.0 * c * r) - 2.0 * libm::log1p(c * r * r),
            (BaseWeight::C(c), Chart::Infinity) => libm::log(2.0 * c * r) - 2.0 * libm::log(r * r + c),
            (BaseWeight::T(t), _) => {
                let tf = t as f64;
                let lead = if t == 1 { 0.0 } else { (tf - 1.0) * libm::log(r) };
                libm::log(tf) + lead - 2.0 * libm::log1p(libm::pow(r, tf))
            }
        }
    }

    /// `log phi(0, 1)`, i.e. `-log ||x1||` at the point `(0 : 1)`.
    pub(crate) fn log_phi_at_infinity(self) -> f64 {
        match self {
            BaseWeight::C(c) => 0.5 * libm::log(c),
            BaseWeight::T(_) => 0.0,
        }
    }
}

/// `sum n_i [w_i]`: a metric on `O(sum n_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricFamily {
    terms: Vec<(BaseWeight, i64)>,
}

impl MetricFamily {
    pub fn new(terms: Vec<(BaseWeight, i64)>) -> Result<Self, BergmanError> {
        let mut out: Vec<(BaseWeight, i64)> = Vec::new();
        for (w, n) in terms {
            let w = w.validate()?;
            match out.iter_mut().find(|(v, _)| *v == w) {
                Some(slot) => slot.1 += n,
                None => out.push((w, n)),
            }
        }
        out.retain(|&(_, n)| n != 0);
        Ok(MetricFamily { terms: out })
    }

    pub fn c(c: f64) -> Result<Self, BergmanError> {
        Self::new(vec![(BaseWeight::C(c), 1)])
    }

    pub fn t(t: u32) -> Result<Self, BergmanError> {
        Self::new(vec![(BaseWeight::T(t), 1)])
    }

    /// Fubini-Study, `c = 1`.
    pub fn fs() -> Self {
        Self::c(1.0).expect("c = 1 is valid")
    }

    /// Trivial metric on `O(0)`.
    pub fn trivial() -> Self {
        MetricFamily { terms: Vec::new() }
    }

    pub fn terms(&self) -> &[(BaseWeight, i64)] {
        &self.terms
    }

    pub fn degree(&self) -> i64 {
        self.terms.iter().map(|&(_, n)| n).sum()
    }

    /// Tensor power (or its dual for negative `k`).
    pub fn scale(&self, k: i64) -> Self {
        Self::new(self.terms.iter().map(|&(w, n)| (w, n * k)).collect()).expect("already validated")
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self::new(self.terms.iter().chain(&other.terms).copied().collect()).expect("already validated")
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scale(-1))
    }

    pub fn is_positive(&self) -> bool {
        !self.terms.is_empty() && self.terms.iter().all(|&(_, n)| n > 0)
    }

    /// `sum n_i log phi_i`.
    pub(crate) fn log_phi(&self, chart: Chart, r: f64) -> f64 {
        self.terms.iter().map(|&(w, n)| n as f64 * w.log_phi(chart, r)).sum()
    }
}

/// Probability measure `c_1(L) / deg L` for a positive metric `L`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureMeasure {
    parts: Vec<(BaseWeight, f64)>,
}

impl CurvatureMeasure {
    pub fn induced_by(metric: &MetricFamily) -> Result<Self, BergmanError> {
        if !metric.is_positive() {
            return Err(BergmanError::NonPositiveCurvature);
        }
        let d = metric.degree() as f64;
        Ok(CurvatureMeasure { parts: metric.terms.iter().map(|&(w, n)| (w, n as f64 / d)).collect() })
    }

    pub fn fs() -> Self {
        Self::induced_by(&MetricFamily::fs()).expect("positive")
    }

    pub fn parts(&self) -> &[(BaseWeight, f64)] {
        &self.parts
    }

    pub(crate) fn ln_mass_density(&self, chart: Chart, r: f64) -> f64 {
        logsumexp(self.parts.iter().map(|&(w, a)| libm::log(a) + w.ln_mass_density(chart, r)))
    }

    /// Density against Lebesgue area in the affine coordinate `z`.
    pub fn density(&self, z: num_complex::Complex64) -> f64 {
        let r = z.norm();
        let per_area = |w: BaseWeight| match w {
            BaseWeight::C(c) => c / (core::f64::consts::PI * (1.0 + c * r * r) * (1.0 + c * r * r)),
            BaseWeight::T(t) => {
                let tf = t as f64;
                let rt = libm::pow(r, tf);
                tf * libm::pow(r, tf - 2.0) / (2.0 * core::f64::consts::PI * (1.0 + rt) * (1.0 + rt))
            }
        };
        self.parts.iter().map(|&(w, a)| a * per_area(w)).sum()
    }

    /// Total mass by quadrature over both charts (1 up to quadrature error).
    pub fn total_mass(&self, quad: &Quadrature) -> Result<f64, BergmanError> {
        let mut total = 0.0;
        for chart in [Chart::Zero, Chart::Infinity] {
            let (v, _, _) = quad.ln_radial(|r| self.ln_mass_density(chart, r))?;
            total += libm::exp(v);
        }
        Ok(total)
    }
}

pub(crate) fn logsumexp(it: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = it.collect();
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + libm::log(v.iter().map(|x| libm::exp(x - m)).sum::<f64>())
}

/// Real section `sum a_k x0^(d-k) x1^k` of `O(d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    coeffs: Vec<f64>,
}

impl Section {
    pub fn new(coeffs: Vec<f64>) -> Result<Self, BergmanError> {
        if coeffs.is_empty() || coeffs.iter().all(|&a| a == 0.0) {
            return Err(BergmanError::ZeroSection);
        }
        if coeffs.iter().any(|a| !a.is_finite()) {
            return Err(BergmanError::InvalidParameter);
        }
        Ok(Section { coeffs })
    }

    /// The monomial `x0^(d-k) x1^k`.
    pub fn monomial(d: usize, k: usize) -> Self {
        let mut c = vec![0.0; d + 1];
        c[k] = 1.0;
        Section { coeffs: c }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Value of the dehomogenized polynomial in a chart.
    pub(crate) fn eval_chart(&self, chart: Chart, u: num_complex::Complex64) -> num_complex::Complex64 {
        let it: &mut dyn Iterator<Item = &f64> = match chart {
            Chart::Zero => &mut self.coeffs.iter().rev(),
            Chart::Infinity => &mut self.coeffs.iter(),
        };
        it.fold(num_complex::Complex64::new(0.0, 0.0), |acc, &a| acc * u + a)
    }

    /// Pointwise norm `|s| / phi^d`.
    pub fn pointwise_norm(&self, metric: &MetricFamily, p: P1Coord) -> f64 {
        let v = self.eval_chart(p.chart, p.u).norm();
        v * libm::exp(-metric.log_phi(p.chart, p.u.norm()))
    }
}

/// Sections of `O(d)` in the monomial basis `x0^(d-k) x1^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SectionSpace {
    pub degree: usize,
}

impl SectionSpace {
    pub fn new(degree: i64) -> Result<Self, BergmanError> {
        if degree < 0 {
            return Err(BergmanError::NegativeDegree);
        }
        Ok(SectionSpace { degree: degree as usize })
    }

    pub fn dim(&self) -> usize {
        self.degree + 1
    }
}

/// `log V(r)` of the Euclidean unit ball, shared with the lattice module.
pub fn ln_ball_volume(r: usize) -> f64 {
    crate::lattice::ln_unit_ball_volume(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn curvature_density_examples() {
        let fs = CurvatureMeasure::fs();
        assert!((fs.density(Complex64::new(0.0, 0.0)) - 1.0 / core::f64::consts::PI).abs() < 1e-15);
        let q = Quadrature::default();
        let m = CurvatureMeasure::induced_by(&MetricFamily::c(0.2).unwrap()).unwrap();
        assert!((m.total_mass(&q).unwrap() - 1.0).abs() < 1e-8);
        for t in 1..5 {
            let m = CurvatureMeasure::induced_by(&MetricFamily::t(t).unwrap()).unwrap();
            assert!((m.total_mass(&q).unwrap() - 1.0).abs() < 1e-8);
        }
        // density = (1 / pi) d dbar of log phi^2 = Laplacian(log phi^2) / (4 pi)
        let c = 4.0;
        let m = CurvatureMeasure::induced_by(&MetricFamily::c(c).unwrap()).unwrap();
        let psi = |x: f64, y: f64| libm::log1p(c * (x * x + y * y));
        for &(x, y) in &[(0.3, -0.2), (1.1, 0.4), (0.0, 2.0)] {
            let h = 1e-4;
            let lap = (psi(x + h, y) + psi(x - h, y) + psi(x, y + h) + psi(x, y - h) - 4.0 * psi(x, y)) / (h * h);
            let fd = lap / (4.0 * core::f64::consts::PI);
            assert!((fd - m.density(Complex64::new(x, y))).abs() < 1e-6);
        }
    }

    #[test]
    fn family_arithmetic() {
        let a = MetricFamily::c(0.5).unwrap();
        let b = MetricFamily::fs();
        let l = a.scale(3).minus(&b.scale(2));
        assert_eq!(l.degree(), 1);
        assert!(!l.is_positive());
        assert_eq!(CurvatureMeasure::induced_by(&l), Err(BergmanError::NonPositiveCurvature));
        assert_eq!(a.minus(&a), MetricFamily::trivial());
        assert_eq!(MetricFamily::c(0.0), Err(BergmanError::InvalidParameter));
        assert_eq!(MetricFamily::t(0), Err(BergmanError::InvalidParameter));
    }

    #[test]
    fn chart_evaluation_is_consistent() {
        let s = Section::new(vec![1.0, -2.0, 0.5]).unwrap();
        let m = MetricFamily::c(0.7).unwrap().scale(2);
        let z = Complex64::new(1.7, -0.4);
        let a = s.pointwise_norm(&m, P1Coord { chart: Chart::Zero, u: z });
        let b = s.pointwise_norm(&m, P1Coord { chart: Chart::Infinity, u: z.inv() });
        assert!((a - b).abs() < 1e-14 * a.max(1.0));
    }
}
