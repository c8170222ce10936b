//! Simultaneous polynomial root finding (Aberth-Ehrlich iteration).
//!
//! Start points sit on the circle of radius `1 + max |a_i / a_d|`, which
//! contains every root. At more than 53 bits the iteration first runs in
//! doubles and the result is polished at the requested precision.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::{Complex, Complex64};
use num_traits::{One, Zero};

use super::mp::{MpReal, PrecComplex, Precision, RootReal};
use super::poly::IntPolynomial;
use super::NumError;

/// Iteration caps of the root finder.
#[derive(Clone, Copy, Debug)]
pub struct RootOptions {
    pub precision: Precision,
    /// Residual tolerance of the postcondition `|p(r)| <= tol * |p|_1 * max(1,|r|)^d`.
    pub tol: f64,
    pub max_iterations: usize,
}

impl RootOptions {
    pub fn new(tol: f64, precision: Precision) -> Self {
        RootOptions { precision, tol, max_iterations: 400 }
    }
}

/// Complex roots of an integer polynomial, with multiplicity.
///
/// Deterministic for a fixed precision. `NonConvergence` means the iteration
/// cap was hit and some residual fails the postcondition; retry at a higher
/// precision.
pub fn poly_roots(p: &IntPolynomial, tol: f64, precision: Precision) -> Result<Vec<PrecComplex>, NumError> {
    let opts = RootOptions::new(tol, precision);
    let d = p.degree().ok_or(NumError::ZeroPolynomial)?;
    if d == 0 {
        return Err(NumError::ConstantPolynomial);
    }
    let prec = precision;
    let mp: Vec<PrecComplex> = p
        .coeffs()
        .iter()
        .map(|c| Complex::new(MpReal::from_bigint(c, prec), MpReal::zero_at(prec)))
        .collect();
    if prec.is_double() {
        let c: Vec<Complex64> = p.coeffs().iter().map(|c| Complex64::new(f64::from_bigint_at(c, prec), 0.0)).collect();
        if c.iter().all(|z| z.re.is_finite()) {
            let r = complex_roots(&c, &opts)?;
            return Ok(r.iter().map(|z| lift(z, prec)).collect());
        }
        return complex_roots(&mp, &opts);
    }
    let c: Vec<Complex64> = p.coeffs().iter().map(|c| Complex64::new(f64::from_bigint_at(c, prec), 0.0)).collect();
    let start = if c.iter().all(|z| z.re.is_finite()) {
        let quick = RootOptions { precision: Precision::DOUBLE, tol: 1e-6, max_iterations: opts.max_iterations };
        complex_roots_from(&c, None, &quick, false).ok()
    } else {
        None
    };
    match start {
        Some(s) => {
            let s: Vec<PrecComplex> = s.iter().map(|z| lift(z, prec)).collect();
            complex_roots_from(&mp, Some(s), &opts, true)
        }
        None => complex_roots(&mp, &opts),
    }
}

fn lift(z: &Complex64, prec: Precision) -> PrecComplex {
    Complex::new(MpReal::from_f64(z.re, prec), MpReal::from_f64(z.im, prec))
}

/// Roots of a polynomial with complex coefficients (lowest degree first).
pub fn complex_roots<T: RootReal>(coeffs: &[Complex<T>], opts: &RootOptions) -> Result<Vec<Complex<T>>, NumError> {
    complex_roots_from(coeffs, None, opts, true)
}

fn complex_roots_from<T: RootReal>(
    coeffs: &[Complex<T>],
    start: Option<Vec<Complex<T>>>,
    opts: &RootOptions,
    strict: bool,
) -> Result<Vec<Complex<T>>, NumError> {
    let mut a: Vec<Complex<T>> = coeffs.to_vec();
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    if a.is_empty() {
        return Err(NumError::ZeroPolynomial);
    }
    if a.len() == 1 {
        return Err(NumError::ConstantPolynomial);
    }
    if a.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(NumError::NonFinite);
    }
    let full_degree = a.len() - 1;
    // Exact roots at the origin.
    let low = a.iter().position(|c| !c.is_zero()).unwrap();
    let prec = opts.precision;
    let zero = Complex::new(T::from_f64_at(0.0, prec), T::from_f64_at(0.0, prec));
    let mut roots: Vec<Complex<T>> = vec![zero; low];
    let a: Vec<Complex<T>> = a[low..].to_vec();
    let d = a.len() - 1;
    if d == 0 {
        return Ok(roots);
    }
    if d == 1 {
        roots.push(-(a[0].clone() / a[1].clone()));
        return Ok(roots);
    }
    let mut z = match start {
        Some(s) if s.len() == full_degree => {
            // Keep the nonzero approximations for the reduced polynomial.
            let mut s = s;
            s.sort_by(|x, y| {
                let (mx, my) = (x.norm_sqr().to_f64(), y.norm_sqr().to_f64());
                mx.partial_cmp(&my).unwrap_or(core::cmp::Ordering::Equal)
            });
            let mut s = s.split_off(low);
            separate(&mut s, prec);
            s
        }
        _ => circle_start(&a, 0.0, prec),
    };
    let eps = libm::ldexp(1.0, -(prec.get().min(1000) as i32 - 6));
    let mut iterations = opts.max_iterations;
    let ok = aberth(&a, &mut z, eps, opts.max_iterations)?;
    if !ok && !residuals_ok(&a, &z, opts.tol) {
        // Second attempt from rotated, slightly larger start points.
        z = circle_start(&a, 0.5, prec);
        aberth(&a, &mut z, eps, 4 * opts.max_iterations)?;
        iterations += 4 * opts.max_iterations;
    }
    if strict && !residuals_ok(&a, &z, opts.tol) {
        return Err(NumError::NonConvergence { iterations, worst_residual: worst_residual(&a, &z) });
    }
    roots.extend(z);
    Ok(roots)
}

fn circle_start<T: RootReal>(a: &[Complex<T>], shift: f64, prec: Precision) -> Vec<Complex<T>> {
    let d = a.len() - 1;
    let lead = a[d].norm_sqr().ln_abs() * 0.5;
    let mut lmax = f64::NEG_INFINITY;
    for c in &a[..d] {
        if !c.is_zero() {
            lmax = lmax.max(c.norm_sqr().ln_abs() * 0.5 - lead);
        }
    }
    let radius = (1.0 + libm::exp(lmax.min(700.0))) * (1.0 + 0.1 * shift);
    (0..d)
        .map(|k| {
            let th = core::f64::consts::TAU * (k as f64 + 0.25 + shift) / d as f64;
            Complex::new(
                T::from_f64_at(radius * libm::cos(th), prec),
                T::from_f64_at(radius * libm::sin(th), prec),
            )
        })
        .collect()
}

/// Nudge coincident start points apart; Aberth needs distinct iterates.
fn separate<T: RootReal>(z: &mut [Complex<T>], prec: Precision) {
    for i in 0..z.len() {
        for j in 0..i {
            let diff = (z[i].clone() - z[j].clone()).norm_sqr().to_f64();
            let scale = 1.0 + z[i].norm_sqr().to_f64();
            if diff <= 1e-24 * scale {
                let bump = 1e-10 * libm::sqrt(scale) * (1.0 + i as f64);
                z[i] = z[i].clone() + Complex::new(T::from_f64_at(bump, prec), T::from_f64_at(0.7 * bump, prec));
            }
        }
    }
}

fn horner<T: RootReal>(a: &[Complex<T>], x: &Complex<T>) -> (Complex<T>, Complex<T>) {
    let d = a.len() - 1;
    let mut p = a[d].clone();
    let mut dp: Complex<T> = Complex::new(T::zero(), T::zero());
    for k in (0..d).rev() {
        dp = dp * x.clone() + p.clone();
        p = p * x.clone() + a[k].clone();
    }
    (p, dp)
}

fn aberth<T: RootReal>(a: &[Complex<T>], z: &mut [Complex<T>], eps: f64, max_iter: usize) -> Result<bool, NumError> {
    let d = z.len();
    let mut done = vec![false; d];
    let ln_eps2 = 2.0 * libm::log(eps);
    let one: Complex<T> = Complex::one();
    for _ in 0..max_iter {
        let mut all = true;
        for i in 0..d {
            if done[i] {
                continue;
            }
            let (p, dp) = horner(a, &z[i]);
            if p.is_zero() {
                done[i] = true;
                continue;
            }
            let mut s: Complex<T> = Complex::new(T::zero(), T::zero());
            for j in 0..d {
                if j != i {
                    s = s + one.clone() / (z[i].clone() - z[j].clone());
                }
            }
            let w = if dp.is_zero() {
                // Stationary point: step by the Aberth repulsion alone.
                one.clone() / s.clone()
            } else {
                let ratio = p / dp;
                ratio.clone() / (one.clone() - ratio * s)
            };
            if !w.re.is_finite() || !w.im.is_finite() {
                return Err(NumError::NonFinite);
            }
            z[i] = z[i].clone() - w.clone();
            let lw = w.norm_sqr().ln_abs();
            let lz = z[i].norm_sqr().ln_abs().max(-1400.0);
            if lw <= ln_eps2 + lz || lw < -2000.0 {
                done[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `ln( |p(r)| / (|p|_1 max(1,|r|)^d) )`, maximized over the roots.
fn worst_residual<T: RootReal>(a: &[Complex<T>], z: &[Complex<T>]) -> f64 {
    let d = a.len() - 1;
    let norm: f64 = a.iter().map(|c| libm::exp(0.5 * c.norm_sqr().ln_abs())).sum();
    let ln_norm = libm::log(norm);
    z.iter()
        .map(|r| {
            let (p, _) = horner(a, r);
            let lp = 0.5 * p.norm_sqr().ln_abs();
            let lr = (0.5 * r.norm_sqr().ln_abs()).max(0.0);
            lp - ln_norm - d as f64 * lr
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn residuals_ok<T: RootReal>(a: &[Complex<T>], z: &[Complex<T>], tol: f64) -> bool {
    worst_residual(a, z) <= libm::log(tol)
}

/// Residual check of the root-finder postcondition, exposed for callers
/// that want to audit a root list: returns `max |p(r)| / (|p|_1 max(1,|r|)^d)`.
pub fn relative_residual(p: &IntPolynomial, roots: &[PrecComplex]) -> f64 {
    let prec = roots.first().map(|r| r.re.precision()).unwrap_or_default();
    let a: Vec<PrecComplex> = p
        .coeffs()
        .iter()
        .map(|c| Complex::new(MpReal::from_bigint(c, prec), MpReal::zero_at(prec)))
        .collect();
    libm::exp(worst_residual(&a, roots))
}
