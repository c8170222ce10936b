//! Arithmetic intersection numbers on `P^1_Z` and `chi_L2` growth.
//!
//! For metrics `A`, `B` on `O(1)` take the section `x0` of `A`, whose divisor
//! is the point `(0 : 1)`. Then
//!
//! `A . B = -log ||x1||_B(0 : 1) - int log ||x0||_A c_1(B)`,
//!
//! the finite places contributing nothing because `div x0` and `div x1` are
//! disjoint horizontal divisors. The pairing is extended bilinearly to
//! integer combinations.

use alloc::vec::Vec;

use super::gram::closed_form_c_gram;
use super::{
    l2_gram, ln_ball_volume, BaseWeight, BergmanError, Chart, CurvatureMeasure, MetricFamily, Quadrature,
    SectionSpace,
};

fn mixed_base(a: BaseWeight, b: BaseWeight, quad: &Quadrature) -> Result<f64, BergmanError> {
    // -log ||x0||_A = log phi_A(1, z); on the chart at infinity that is
    // log phi_A(w, 1) - log |w|.
    let near = quad.radial(|r| a.log_phi(Chart::Zero, r) * libm::exp(b.ln_mass_density(Chart::Zero, r)), &[])?;
    // The density of t = 1 does not vanish at the pole, so -log r is
    // integrated against rho(r) - rho(0) and rho(0) * int -log r = rho(0)
    // is added back.
    let rho = |r: f64| libm::exp(b.ln_mass_density(Chart::Infinity, r));
    let rho0 = rho(0.0);
    let far = quad.radial(|r| a.log_phi(Chart::Infinity, r) * rho(r) - libm::log(r) * (rho(r) - rho0), &[])?;
    Ok(b.log_phi_at_infinity() + near.0 + far.0 + rho0)
}

/// `c_1(A) . c_1(B)` for integer combinations of base metrics.
pub fn intersection(a: &MetricFamily, b: &MetricFamily, quad: &Quadrature) -> Result<f64, BergmanError> {
    let mut total = 0.0;
    for &(wa, na) in a.terms() {
        for &(wb, nb) in b.terms() {
            total += (na * nb) as f64 * mixed_base(wa, wb, quad)?;
        }
    }
    Ok(total)
}

/// `c_1(L) . c_1(M)` for two metrics on `O(1)`.
pub fn mixed_arithmetic_intersection(
    l: &MetricFamily,
    m: &MetricFamily,
    quad: &Quadrature,
) -> Result<f64, BergmanError> {
    if l.degree() != 1 || m.degree() != 1 {
        return Err(BergmanError::DegreeMismatch);
    }
    intersection(l, m, quad)
}

/// `c_1(T_c)^2` for the `c` metric on `O(1)`.
pub fn arithmetic_self_intersection_c(c: f64, quad: &Quadrature) -> Result<f64, BergmanError> {
    let t = MetricFamily::c(c)?;
    intersection(&t, &t, quad)
}

/// `chi` of the integer lattice of monomials with the `L^2` Gram.
pub fn chi_l2(metric: &MetricFamily, mu: &CurvatureMeasure, quad: &Quadrature) -> Result<f64, BergmanError> {
    let space = SectionSpace::new(metric.degree())?;
    let g = l2_gram(space, metric, mu, quad)?;
    Ok(ln_ball_volume(space.dim()) - 0.5 * g.ln_det()?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiPoint {
    pub n: usize,
    pub chi: f64,
    /// `chi / (N^2 / 2)` in a series, `chi / N^2` in the Siu report; absent at `N = 0`.
    pub normalized: Option<f64>,
}

/// `chi_L2(N M)` for each `N`, measured against the curvature of `M`.
///
/// A single `c` metric uses the closed-form Beta-integral Gram; anything else
/// goes through quadrature.
pub fn chi_l2_series(m: &MetricFamily, ns: &[usize], quad: &Quadrature) -> Result<Vec<ChiPoint>, BergmanError> {
    if m.degree() != 1 {
        return Err(BergmanError::DegreeMismatch);
    }
    let mu = CurvatureMeasure::induced_by(m)?;
    let single_c = match m.terms() {
        [(BaseWeight::C(c), 1)] => Some(*c),
        _ => None,
    };
    ns.iter()
        .map(|&n| {
            let chi = match single_c {
                Some(c) => ln_ball_volume(n + 1) - 0.5 * closed_form_c_gram(n, c)?.ln_det()?,
                None => chi_l2(&m.scale(n as i64), &mu, quad)?,
            };
            let normalized = (n > 0).then(|| chi / (n as f64 * n as f64 / 2.0));
            Ok(ChiPoint { n, chi, normalized })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SiuReport {
    pub l_squared: f64,
    pub l_dot_m: f64,
    /// `(L^2 - 2 L.M) / 2`.
    pub coefficient: f64,
    /// `chi_L2(N (L - M))` with `normalized = chi / N^2`.
    pub points: Vec<ChiPoint>,
    /// Smallest `chi / N^2` over the range (a liminf proxy).
    pub measured_min: f64,
    /// `chi / N^2` at the largest `N`.
    pub measured_last: f64,
}

/// `chi_L2(N (L - M))` for `L` on `O(2)` and `M` on `O(1)`, both positive,
/// against the measure of `L`.
pub fn siu_growth_experiment(
    l: &MetricFamily,
    m: &MetricFamily,
    ns: &[usize],
    quad: &Quadrature,
) -> Result<SiuReport, BergmanError> {
    if ns.is_empty() || ns.contains(&0) {
        return Err(BergmanError::EmptyRange);
    }
    if l.degree() != 2 || m.degree() != 1 {
        return Err(BergmanError::DegreeMismatch);
    }
    if !l.is_positive() || !m.is_positive() {
        return Err(BergmanError::NonPositiveCurvature);
    }
    let mu = CurvatureMeasure::induced_by(l)?;
    let l_squared = intersection(l, l, quad)?;
    let l_dot_m = intersection(l, m, quad)?;
    let diff = l.minus(m);
    let mut points = Vec::with_capacity(ns.len());
    for &n in ns {
        let chi = chi_l2(&diff.scale(n as i64), &mu, quad)?;
        points.push(ChiPoint { n, chi, normalized: Some(chi / (n as f64 * n as f64)) });
    }
    let measured_min = points.iter().filter_map(|p| p.normalized).fold(f64::INFINITY, f64::min);
    let last = *ns.iter().max().expect("nonempty");
    let measured_last = points.iter().find(|p| p.n == last).and_then(|p| p.normalized).expect("present");
    Ok(SiuReport { l_squared, l_dot_m, coefficient: 0.5 * (l_squared - 2.0 * l_dot_m), points, measured_min, measured_last })
}
