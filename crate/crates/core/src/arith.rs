//! Rational-integer helpers: modular powers, primality, trial division.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeSet;

pub const DEFAULT_TRIAL_BOUND: u64 = 1_000_000;

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn prime_factors_u64(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Multiplicative order of `a` modulo `n` (gcd(a, n) = 1).
pub fn order_mod(a: u64, n: u64) -> u64 {
    let a = a % n;
    let mut x = a;
    let mut k = 1;
    while x != 1 {
        x = mul_mod(x, a, n);
        k += 1;
    }
    k
}

/// Smallest primitive root modulo the prime `p`.
pub fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let fs = prime_factors_u64(p - 1);
    (2..p)
        .find(|&g| fs.iter().all(|&f| pow_mod(g, (p - 1) / f, p) != 1))
        .expect("prime modulus has a primitive root")
}

pub fn mod_inverse(a: i64, m: u64) -> Option<u64> {
    let a = a.rem_euclid(m as i64) as u64;
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

pub fn valuation(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut v = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

pub fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if k == 0 {
        return None;
    }
    if n.is_negative() && k % 2 == 0 {
        return None;
    }
    let r = n.nth_root(k);
    if num_traits::pow(r.clone(), k as usize) == *n {
        Some(r)
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub sign: i8,
    pub factors: Vec<(u64, u32)>,
    /// Unfactored part (> 1) when trial division stopped short.
    pub cofactor: Option<BigInt>,
}

impl Factorization {
    pub fn is_complete(&self) -> bool {
        self.cofactor.is_none()
    }

    pub fn primes(&self) -> BTreeSet<u64> {
        self.factors.iter().map(|&(p, _)| p).collect()
    }
}

/// Trial division up to `bound`; a leftover below `bound²` is prime.
pub fn factor(n: &BigInt, bound: u64) -> Factorization {
    assert!(!n.is_zero(), "cannot factor zero");
    let sign = if n.is_negative() { -1 } else { 1 };
    let mut m = n.abs();
    let mut factors = Vec::new();
    if let Some(small) = m.to_u64() {
        return factor_small(small, bound, sign);
    }
    let mut p = 2u64;
    while p <= bound {
        let bp = BigInt::from(p);
        if (&m % &bp).is_zero() {
            let mut e = 0;
            while (&m % &bp).is_zero() {
                m /= &bp;
                e += 1;
            }
            factors.push((p, e));
            if let Some(small) = m.to_u64() {
                let mut rest = factor_small(small, bound, sign);
                factors.append(&mut rest.factors);
                return Factorization { sign, factors, cofactor: rest.cofactor };
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let cofactor = if m.is_one() { None } else { Some(m) };
    Factorization { sign, factors, cofactor }
}

fn factor_small(mut n: u64, bound: u64, sign: i8) -> Factorization {
    let mut factors = Vec::new();
    let mut p = 2u64;
    while p <= bound && p.saturating_mul(p) <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut cofactor = None;
    if n > 1 {
        if p.saturating_mul(p) > n || is_prime(n) {
            factors.push((n, 1));
        } else {
            cofactor = Some(BigInt::from(n));
        }
    }
    factors.sort();
    Factorization { sign, factors, cofactor }
}

pub fn gcd_all<'a>(xs: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    xs.into_iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

pub fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}
