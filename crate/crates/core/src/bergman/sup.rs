//! Sup norms, the Gromov ratio and the volume comparison of twisted norms.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::distortion::maximize;
use super::{
    default_grid, l2_gram, twisted_gram, BergmanError, Chart, CurvatureMeasure, MetricFamily, Quadrature, Section,
    SectionSpace,
};
use crate::numkernel::roots::{complex_roots, RootOptions};
use crate::numkernel::Precision;
use crate::rng;

/// Slack allowed on `||s||_sup <= 1` before a section counts as not effective.
const EFFECTIVE_SLACK: f64 = 1e-12;

/// `sup_{P^1} |t| / phi^d`.
pub fn sup_norm(t: &Section, metric: &MetricFamily) -> Result<f64, BergmanError> {
    if metric.degree() != t.degree() as i64 {
        return Err(BergmanError::DegreeMismatch);
    }
    Ok(maximize(|p| t.pointwise_norm(metric, p), &default_grid(24, 48), 1.0 / 24.0).0)
}

/// Max over random sections of `Gamma(k L + j M)` of `||s||_sup / ||s||_L2`,
/// with `L^2` taken against the measure of `L`.
///
/// Coefficients are independent normals scaled by `1 / sqrt(G_kk)`, so every
/// monomial contributes on the same scale.
#[allow(clippy::too_many_arguments)]
pub fn gromov_ratio(
    k: u32,
    j: u32,
    l: &MetricFamily,
    m: &MetricFamily,
    trials: usize,
    seed: u64,
    quad: &Quadrature,
) -> Result<f64, BergmanError> {
    if k + j == 0 || trials == 0 {
        return Err(BergmanError::EmptyRange);
    }
    let metric = l.scale(k as i64).plus(&m.scale(j as i64));
    let space = SectionSpace::new(metric.degree())?;
    let mu = CurvatureMeasure::induced_by(l)?;
    let g = l2_gram(space, &metric, &mu, quad)?;
    let mut r = rng::stream(seed, rng::streams::GROMOV);
    let mut best: f64 = 0.0;
    for _ in 0..trials {
        let c: Vec<f64> =
            g.ln_diag().iter().map(|&ld| rng::normal(&mut r) * libm::exp(-0.5 * ld)).collect();
        let Ok(s) = Section::new(c.clone()) else { continue };
        let l2 = libm::sqrt(g.quadratic_form(&c));
        best = best.max(sup_norm(&s, &metric)? / l2);
    }
    Ok(best)
}

/// Mean of `log |p|` over the circle of radius `r`, by Jensen's formula.
fn jensen(lead: f64, roots: &[f64], r: f64) -> f64 {
    libm::log(lead.abs()) + roots.iter().map(|&a| libm::log(a.max(r))).sum::<f64>()
}

fn chart_roots(mut a: Vec<f64>) -> Result<(f64, Vec<f64>), BergmanError> {
    while a.last() == Some(&0.0) {
        a.pop();
    }
    let lead = *a.last().ok_or(BergmanError::ZeroSection)?;
    if a.len() == 1 {
        return Ok((lead, Vec::new()));
    }
    let c: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let roots = complex_roots(&c, &RootOptions::new(1e-10, Precision::DOUBLE))
        .map_err(|_| BergmanError::InvalidParameter)?;
    Ok((lead, roots.iter().map(|z| z.norm()).collect()))
}

/// `int log ||s|| dmu`. The angular mean is exact by Jensen's formula, which
/// leaves a radial integral with kinks at the moduli of the zeros.
pub fn integral_log_norm(
    s: &Section,
    s_metric: &MetricFamily,
    mu: &CurvatureMeasure,
    quad: &Quadrature,
) -> Result<f64, BergmanError> {
    if s_metric.degree() != s.degree() as i64 {
        return Err(BergmanError::DegreeMismatch);
    }
    let mut total = 0.0;
    for chart in [Chart::Zero, Chart::Infinity] {
        let coeffs: Vec<f64> = match chart {
            Chart::Zero => s.coeffs().to_vec(),
            Chart::Infinity => s.coeffs().iter().rev().copied().collect(),
        };
        let (lead, roots) = chart_roots(coeffs)?;
        let f = |r: f64| {
            (jensen(lead, &roots, r) - s_metric.log_phi(chart, r)) * libm::exp(mu.ln_mass_density(chart, r))
        };
        total += quad.radial(f, &roots)?.0;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq)]
pub struct VolumeComparison {
    /// `log(vol B_L2 / vol B_s) = (log det G_s - log det G_L2) / 2`.
    pub log_volume_ratio: f64,
    /// `dim Gamma(N L) * int log ||s|| dmu`.
    pub comparator: f64,
    pub dim_nl: usize,
    pub integral_log_norm: f64,
    pub sup_norm: f64,
    pub ln_det_l2: f64,
    pub ln_det_s: f64,
}

/// Compares the `L^2` and `s`-twisted norms on `Gamma(N L - j M)`.
pub fn volume_comparison(
    n: u32,
    j: u32,
    s: &Section,
    l: &MetricFamily,
    m: &MetricFamily,
    quad: &Quadrature,
) -> Result<VolumeComparison, BergmanError> {
    if !m.is_positive() {
        return Err(BergmanError::NonPositiveCurvature);
    }
    let sup = sup_norm(s, m)?;
    if sup > 1.0 + EFFECTIVE_SLACK {
        return Err(BergmanError::NotEffective { sup });
    }
    let metric = l.scale(n as i64).minus(&m.scale(j as i64));
    let space = SectionSpace::new(metric.degree())?;
    let mu = CurvatureMeasure::induced_by(l)?;
    let ln_det_l2 = l2_gram(space, &metric, &mu, quad)?.ln_det()?;
    let ln_det_s = twisted_gram(s, m, space, &metric, &mu, quad)?.ln_det()?;
    let ilog = integral_log_norm(s, m, &mu, quad)?;
    let dim_nl = (n as i64 * l.degree() + 1) as usize;
    Ok(VolumeComparison {
        log_volume_ratio: 0.5 * (ln_det_s - ln_det_l2),
        comparator: dim_nl as f64 * ilog,
        dim_nl,
        integral_log_norm: ilog,
        sup_norm: sup,
        ln_det_l2,
        ln_det_s,
    })
}
