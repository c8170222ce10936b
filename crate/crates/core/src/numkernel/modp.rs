//! Polynomials over small prime fields and a factor-degree certificate for
//! irreducibility over `Q`.
//!
//! If `f` is squarefree modulo a prime `l` not dividing its leading
//! coefficient, every factorization of `f` over `Q` refines modulo `l`, so the
//! degree of any rational factor is a subset sum of the degrees of the
//! irreducible factors mod `l`. Intersecting those subset-sum sets over many
//! primes and finding only `{0, d}` proves irreducibility.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::arith::is_prime;
use super::poly::IntPolynomial;

type Fp = Vec<u64>;

fn trim(mut a: Fp) -> Fp {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn pow_mod(mut b: u64, mut e: u64, l: u64) -> u64 {
    let mut r = 1u64;
    b %= l;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % l;
        }
        b = b * b % l;
        e >>= 1;
    }
    r
}

fn inv(a: u64, l: u64) -> u64 {
    pow_mod(a, l - 2, l)
}

fn reduce(p: &IntPolynomial, l: u64) -> Fp {
    let lb = BigInt::from(l);
    trim(p.coeffs().iter().map(|c| c.mod_floor(&lb).to_u64().unwrap_or(0)).collect())
}

fn sub(a: &[u64], b: &[u64], l: u64) -> Fp {
    let n = a.len().max(b.len());
    trim((0..n).map(|i| (a.get(i).copied().unwrap_or(0) + l - b.get(i).copied().unwrap_or(0)) % l).collect())
}

fn mul(a: &[u64], b: &[u64], l: u64) -> Fp {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + x * y) % l;
        }
    }
    trim(r)
}

/// `(quotient, remainder)` of `a / b`, `b` nonzero.
fn divrem(a: &[u64], b: &[u64], l: u64) -> (Fp, Fp) {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = inv(b[db], l);
    if r.len() <= db {
        return (Vec::new(), trim(r));
    }
    let mut q = vec![0u64; r.len() - db];
    for i in (db..r.len()).rev() {
        let c = r[i] * lead_inv % l;
        q[i - db] = c;
        if c != 0 {
            for j in 0..=db {
                r[i - db + j] = (r[i - db + j] + l - c * b[j] % l) % l;
            }
        }
    }
    r.truncate(db);
    (trim(q), trim(r))
}

fn gcd(a: &[u64], b: &[u64], l: u64) -> Fp {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let (_, r) = divrem(&a, &b, l);
        a = b;
        b = r;
    }
    a
}

fn derivative(a: &[u64], l: u64) -> Fp {
    trim(a.iter().enumerate().skip(1).map(|(i, &c)| (i as u64 % l) * c % l).collect())
}

fn powmod_poly(base: &[u64], mut e: u64, m: &[u64], l: u64) -> Fp {
    let mut r: Fp = vec![1];
    let mut b = divrem(base, m, l).1;
    while e > 0 {
        if e & 1 == 1 {
            r = divrem(&mul(&r, &b, l), m, l).1;
        }
        b = divrem(&mul(&b, &b, l), m, l).1;
        e >>= 1;
    }
    r
}

/// Degrees of the irreducible factors of `f mod l` (distinct-degree
/// factorization), or `None` when `l` divides the leading coefficient or
/// `f mod l` is not squarefree.
pub fn factor_degrees_mod(f: &IntPolynomial, l: u64) -> Option<Vec<usize>> {
    let d = f.degree()?;
    let mut a = reduce(f, l);
    if a.len() != d + 1 {
        return None;
    }
    if gcd(&a, &derivative(&a, l), l).len() != 1 {
        return None;
    }
    let x: Fp = vec![0, 1];
    let mut h = x.clone();
    let mut degrees = Vec::new();
    let mut i = 1;
    while a.len() > 1 {
        if 2 * i > a.len() - 1 {
            degrees.push(a.len() - 1);
            break;
        }
        h = powmod_poly(&h, l, &a, l);
        let g = gcd(&sub(&h, &x, l), &a, l);
        let dg = g.len() - 1;
        if dg > 0 {
            degrees.extend(core::iter::repeat(i).take(dg / i));
            a = divrem(&a, &g, l).0;
            h = divrem(&h, &a, l).1;
        }
        i += 1;
    }
    Some(degrees)
}

/// Bitmask of the subset sums of `degrees` (bit `k` set when `k` is a sum).
fn subset_sums(degrees: &[usize], d: usize) -> Vec<bool> {
    let mut s = vec![false; d + 1];
    s[0] = true;
    for &k in degrees {
        for t in (k..=d).rev() {
            if s[t - k] {
                s[t] = true;
            }
        }
    }
    s
}

/// Tries up to `max_primes` good primes; `true` means `f` is proven
/// irreducible over `Q` (for primitive `f` of degree `>= 1`). `false` means
/// only that no certificate was found.
pub fn irreducibility_certificate(f: &IntPolynomial, max_primes: usize) -> bool {
    let Some(d) = f.degree() else { return false };
    if d <= 1 {
        return d == 1;
    }
    let mut possible = vec![true; d + 1];
    let mut used = 0;
    let mut l = 1u64;
    while used < max_primes && l < 1 << 20 {
        l += 1;
        if !is_prime(l) {
            continue;
        }
        let Some(degs) = factor_degrees_mod(f, l) else { continue };
        used += 1;
        let sums = subset_sums(&degs, d);
        for k in 0..=d {
            possible[k] &= sums[k];
        }
        if (1..d).all(|k| !possible[k]) {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn degree_patterns() {
        // x^2 + 1 splits mod 5, stays irreducible mod 3
        assert_eq!(factor_degrees_mod(&p(&[1, 0, 1]), 5), Some(alloc::vec![1, 1]));
        assert_eq!(factor_degrees_mod(&p(&[1, 0, 1]), 3), Some(alloc::vec![2]));
        // x^2 + 1 is not squarefree mod 2
        assert_eq!(factor_degrees_mod(&p(&[1, 0, 1]), 2), None);
        let mut degs = factor_degrees_mod(&IntPolynomial::x_pow_minus_one(12), 13).unwrap();
        degs.sort_unstable();
        assert_eq!(degs, alloc::vec![1; 12]);
    }

    #[test]
    fn certificates() {
        assert!(irreducibility_certificate(&p(&[-2, 0, 0, 0, 1]), 40));
        assert!(irreducibility_certificate(&p(&[-1, -1, 0, 0, 0, 1]), 40));
        assert!(irreducibility_certificate(&IntPolynomial::cyclotomic(7), 40));
        assert!(!irreducibility_certificate(&p(&[1, 0, 1]).mul(&p(&[-2, 0, 1])), 40));
        // x^4 + 1 is reducible mod every prime yet irreducible over Q
        assert!(!irreducibility_certificate(&p(&[1, 0, 0, 0, 1]), 40));
    }
}
