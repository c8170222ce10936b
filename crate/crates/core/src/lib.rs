//! Computable Arakelov geometry on `P^1` and on normed lattices.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure numerics:
//!
//! * [`numkernel`]: exact integers/rationals, precision-carrying complex
//!   arithmetic, polynomial roots and resultants.
//! * [`lattice`]: quadratically normed `Z`-modules, their arithmetic volume
//!   `chi`, lattice point counts `h0`/`h1` and sub/quotient norms.
//! * [`heights`]: naive heights of rational, algebraic and cyclotomic points.
//! * [`dynamics`]: polarized endomorphisms, Tate-limit canonical heights with
//!   certified error and backward-iteration sampling of the canonical measure.
//! * [`equidist`]: Galois orbits, Weyl sums, circle discrepancy and metric twists.
//! * [`bergman`]: metrics on `O(d)`, `L^2` Gram matrices, distortion functions,
//!   arithmetic intersection numbers and volume-growth experiments.
//!
//! IO, file formats and the command line live in the `arakelov-lab` crate.
#![no_std]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bergman;
pub mod dynamics;
pub mod equidist;
pub mod heights;
pub mod lattice;
pub mod numkernel;
pub mod rng;

pub use num_bigint::{BigInt, BigUint};
pub use num_complex::Complex64;
