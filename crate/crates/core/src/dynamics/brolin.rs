//! Backward-iteration sampling of the canonical measure on `P^1(C)`.
//!
//! Each generation replaces the current point `x` by a uniformly chosen
//! preimage under `phi`. Points are kept homogeneous and the preimage
//! equation `x_1 f_0(y) - x_0 f_1(y) = 0` is solved in whichever affine chart
//! keeps its leading coefficient the larger one, so the point at infinity
//! needs no special casing.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_traits::{One, Zero};

use super::{DynError, Endomorphism};
use crate::numkernel::mp::{to_c64, RootReal};
use crate::numkernel::roots::{complex_roots, RootOptions};
use crate::numkernel::{MpReal, NumError, PrecComplex, Precision};
use crate::rng;

/// Generations discarded before sampling starts.
pub const DEFAULT_BURN_IN: usize = 30;

/// Empirical approximation of the canonical measure, uniform weights.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalMeasureSample {
    /// Affine coordinate `z = x_1 / x_0` of each sample.
    pub points: Vec<PrecComplex>,
    pub seed: u64,
    /// Burn-in generations discarded.
    pub generations: usize,
}

impl CanonicalMeasureSample {
    pub fn weight(&self) -> f64 {
        1.0 / self.points.len() as f64
    }

    pub fn points_c64(&self) -> Vec<Complex64> {
        self.points.iter().map(to_c64).collect()
    }
}

/// `count` consecutive states of one backward chain started at `z = 2`,
/// after `burn_in` discarded generations.
pub fn brolin_sample(
    phi: &Endomorphism,
    count: usize,
    burn_in: usize,
    seed: u64,
    precision: Precision,
) -> Result<CanonicalMeasureSample, DynError> {
    if count == 0 {
        return Err(DynError::EmptySample);
    }
    if phi.dimension() != 1 {
        return Err(DynError::UnsupportedShape);
    }
    let points = if precision.is_double() {
        chain::<f64>(phi, count, burn_in, seed, precision)?
            .iter()
            .map(|z| Complex::new(MpReal::from_f64(z.re, precision), MpReal::from_f64(z.im, precision)))
            .collect()
    } else {
        chain::<MpReal>(phi, count, burn_in, seed, precision)?
    };
    Ok(CanonicalMeasureSample { points, seed, generations: burn_in })
}

fn chain<T: RootReal>(
    phi: &Endomorphism,
    count: usize,
    burn_in: usize,
    seed: u64,
    precision: Precision,
) -> Result<Vec<Complex<T>>, DynError> {
    let mut r = rng::stream(seed, rng::streams::BROLIN);
    let q = phi.degree();
    let lift = |c: &BigInt| Complex::new(T::from_bigint_at(c, precision), T::from_f64_at(0.0, precision));
    let f0: Vec<Complex<T>> = phi.forms()[0].iter().map(lift).collect();
    let f1: Vec<Complex<T>> = phi.forms()[1].iter().map(lift).collect();
    let opts = RootOptions::new((precision.epsilon() * 1e6).max(1e-300), precision);
    let c = |x: f64| T::from_f64_at(x, precision);
    // (x_0 : x_1) = (1 : 2), scaled to max modulus 1
    let mut a0: Complex<T> = Complex::new(c(0.5), c(0.0));
    let mut a1: Complex<T> = Complex::new(c(1.0), c(0.0));
    let mut out = Vec::with_capacity(count);
    for step in 0..burn_in + count {
        let h: Vec<Complex<T>> = (0..=q).map(|k| a1.clone() * f0[k].clone() - a0.clone() * f1[k].clone()).collect();
        let lead = h[q].norm_sqr();
        let tail = h[0].norm_sqr();
        let pick = rng::below(&mut r, q as u64) as usize;
        let (y0, y1) = if lead >= tail {
            let roots = complex_roots(&h, &opts)?;
            (Complex::one(), roots.get(pick).ok_or(NumError::NonFinite)?.clone())
        } else {
            let rev: Vec<Complex<T>> = h.iter().rev().cloned().collect();
            let roots = complex_roots(&rev, &opts)?;
            (roots.get(pick).ok_or(NumError::NonFinite)?.clone(), Complex::one())
        };
        let m0 = y0.norm_sqr();
        let m1 = y1.norm_sqr();
        let scale = if m0 >= m1 { m0.sqrt() } else { m1.sqrt() };
        let s = Complex::new(scale, c(0.0));
        a0 = y0 / s.clone();
        a1 = y1 / s;
        if step >= burn_in {
            if a0.is_zero() {
                return Err(NumError::NonFinite.into());
            }
            out.push(a1.clone() / a0.clone());
        }
    }
    Ok(out)
}
