//! Small-integer number theory: factorization by trial division, totient,
//! Moebius, divisors, and natural logarithms of big integers.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Prime factorization `[(p, e)]` of `n >= 1`, ascending.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn totient(n: u64) -> u64 {
    factor_u64(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Moebius function; `mu(1) = 1`.
pub fn moebius(n: u64) -> i8 {
    let f = factor_u64(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factor_u64(n).len() == 1 && factor_u64(n)[0].1 == 1
}

/// All positive divisors of `n >= 1`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = alloc::vec![1u64];
    for (p, e) in factor_u64(n) {
        let base = ds.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            ds.extend(base.iter().map(|d| d * pk));
        }
    }
    ds.sort_unstable();
    ds
}

/// Every `m` with `totient(m) == n`, ascending.
pub fn inverse_totient(n: u64) -> Vec<u64> {
    if n == 0 {
        return Vec::new();
    }
    let primes: Vec<u64> = divisors(n).into_iter().map(|d| d + 1).filter(|&p| is_prime(p)).collect();
    let mut out = Vec::new();
    inverse_totient_rec(n, &primes, 1, &mut out);
    out.sort_unstable();
    out.dedup();
    out
}

fn inverse_totient_rec(n: u64, primes: &[u64], acc: u64, out: &mut Vec<u64>) {
    if n == 1 {
        out.push(acc);
    }
    for (i, &p) in primes.iter().enumerate() {
        if n % (p - 1) != 0 {
            continue;
        }
        let mut rest = n / (p - 1);
        let mut pk = p;
        loop {
            inverse_totient_rec(rest, &primes[i + 1..], acc * pk, out);
            if rest % p != 0 {
                break;
            }
            rest /= p;
            pk *= p;
        }
    }
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// `ln |n|` for a nonzero big integer, accurate to double precision.
pub fn ln_bigint(n: &BigInt) -> f64 {
    ln_biguint(n.magnitude())
}

pub fn ln_biguint(n: &BigUint) -> f64 {
    assert!(!n.is_zero(), "ln of zero");
    let bits = n.bits();
    if bits <= 1000 {
        return libm::log(n.to_f64().unwrap_or(f64::INFINITY));
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(f64::INFINITY);
    libm::log(top) + shift as f64 * core::f64::consts::LN_2
}

/// `ln |q|` for a nonzero rational.
pub fn ln_rational(q: &BigRational) -> f64 {
    ln_bigint(q.numer()) - ln_bigint(q.denom())
}

/// Double approximation of a rational that cannot overflow for moderate values.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let l = ln_rational(q);
    let s = if q.is_negative() { -1.0 } else { 1.0 };
    s * libm::exp(l)
}
