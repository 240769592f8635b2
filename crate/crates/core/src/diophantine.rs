//! φ_r, its quadratic factors over K⁺, and the case A/B structure of solutions.

use crate::arith::{self, Factorization};
use crate::error::{invalid, Error, Result};
use crate::exec;
use crate::numfield::{FieldContext, FieldElement, PrimeIdeal};
use crate::poly::{BinaryForm, QuadraticForm};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// φ_r(a, b) = Σ (−1)^i a^{r−1−i} b^i.
pub fn phi_eval(r: u32, a: &BigInt, b: &BigInt) -> BigInt {
    // Horner in a, alternating coefficients
    let mut acc = BigInt::zero();
    let mut bpow = BigInt::one();
    let mut terms = Vec::with_capacity(r as usize);
    for i in 0..r {
        terms.push(if i % 2 == 0 { bpow.clone() } else { -&bpow });
        bpow *= b;
    }
    for t in terms.iter() {
        acc = acc * a + t;
    }
    acc
}

pub fn phi_eval_i64(r: u32, a: i64, b: i64) -> BigInt {
    phi_eval(r, &BigInt::from(a), &BigInt::from(b))
}

fn phi_mod(r: u32, a: i64, b: i64, m: u64) -> u64 {
    let am = a.rem_euclid(m as i64) as u64;
    let bm = b.rem_euclid(m as i64) as u64;
    let nb = (m - bm) % m;
    // Σ a^{r−1−i} (−b)^i by Horner in a
    let mut acc = 0u64;
    let mut pw = vec![1u64; r as usize];
    for i in 1..r as usize {
        pw[i] = arith::mul_mod(pw[i - 1], nb, m);
    }
    for i in 0..r as usize {
        acc = (arith::mul_mod(acc, am, m) + pw[i]) % m;
    }
    acc
}

/// The (r−1)/2 forms f_k = x² + (ζ^k + ζ^{−k})xy + y².
pub fn quadratic_factors(r: u32) -> Result<Vec<QuadraticForm>> {
    if r < 5 || !arith::is_prime(r as u64) {
        return invalid(format!("r = {r} must be a prime ≥ 5"));
    }
    Ok((1..=(r as i64 - 1) / 2).map(|k| BinaryForm::f_k(r, k)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionCase {
    /// r ∤ a+b, φ_r(a,b) = c^p.
    A,
    /// r | a+b, φ_r(a,b) = r·c^p.
    B,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorStatus {
    Complete,
    Incomplete { cofactor: BigInt },
}

impl FactorStatus {
    fn of(f: &Factorization) -> Self {
        match &f.cofactor {
            None => FactorStatus::Complete,
            Some(c) => FactorStatus::Incomplete { cofactor: c.clone() },
        }
    }
}

/// f_k(a,b) with its π_r-adic valuation (0 in case A, 1 in case B).
#[derive(Debug, Clone)]
pub struct FactorWitness {
    pub k: u32,
    pub value: FieldElement,
    pub pi_r_valuation: i64,
}

#[derive(Debug, Clone)]
pub struct SolutionClass {
    pub case: SolutionCase,
    /// |c| ≤ 1 (equivalently |abc| ≤ 1 after the reduction).
    pub trivial: bool,
    /// a + b = C·r^k·c0^p; `None` when a + b = 0.
    pub k: Option<u32>,
    pub c0: BigInt,
    /// φ_r(a,b) = c^p (case A) or r·c^p (case B).
    pub c: BigInt,
    pub phi: BigInt,
    pub factors: Vec<FactorWitness>,
    pub c_primes: Vec<u64>,
    pub status: FactorStatus,
}

/// Split a primitive solution of a^r + b^r = C c'^p into the case A/B shape.
pub fn classify_solution(
    r: u32,
    big_c: &BigInt,
    p: u32,
    a: &BigInt,
    b: &BigInt,
    c: &BigInt,
    trial_bound: u64,
) -> Result<SolutionClass> {
    let ctx = FieldContext::new(r)?;
    if p == 0 {
        return invalid("p must be positive");
    }
    if big_c.is_zero() {
        return invalid("C must be nonzero");
    }
    if !a.gcd(b).is_one() {
        return invalid(format!("({a}, {b}) is not primitive"));
    }
    if a.pow(r) + b.pow(r) != big_c * c.pow(p) {
        return Err(Error::IdentityFailed(format!("{a}^{r} + {b}^{r} != {big_c}·{c}^{p}")));
    }
    let cf = arith::factor(big_c, trial_bound);
    if let Some(cof) = &cf.cofactor {
        return invalid(format!("C has an unfactored part {cof}"));
    }
    if let Some(&(q, _)) = cf.factors.iter().find(|(q, _)| q % r as u64 <= 1) {
        return invalid(format!("C is divisible by {q}, which is 0 or 1 mod {r}"));
    }
    let sum = a + b;
    let phi = phi_eval(r, a, b);
    let rb = BigInt::from(r);
    let case = if sum.is_multiple_of(&rb) { SolutionCase::B } else { SolutionCase::A };
    let root = |n: &BigInt, what: &str| {
        arith::exact_root(n, p)
            .ok_or_else(|| Error::IdentityFailed(format!("{what} = {n} is not a {p}-th power")))
    };
    let cc = match case {
        SolutionCase::A => root(&phi, "φ_r(a,b)")?,
        SolutionCase::B => {
            let (q, rem) = phi.div_rem(&rb);
            if !rem.is_zero() {
                return Err(Error::IdentityFailed("r ∤ φ_r(a,b) although r | a+b".into()));
            }
            root(&q, "φ_r(a,b)/r")?
        }
    };
    let (k, c0) = if sum.is_zero() {
        (None, BigInt::zero())
    } else {
        let k = arith::valuation(&sum, r as u64);
        let rest = &sum / (big_c * rb.pow(k));
        if !(&rest * big_c * rb.pow(k) == sum) {
            return Err(Error::IdentityFailed(format!("C ∤ a+b = {sum}")));
        }
        (Some(k), root(&rest, "(a+b)/(C r^k)")?)
    };
    let pi = PrimeIdeal::pi_r(&ctx);
    let mut factors = Vec::new();
    for (i, f) in quadratic_factors(r)?.into_iter().enumerate() {
        let value = f.eval(a, b);
        let v = if value.is_zero() { i64::MAX } else { pi.valuation(&value)? };
        let expect = if case == SolutionCase::A { 0 } else { 1 };
        if v != expect && !sum.is_zero() {
            return Err(Error::IdentityFailed(format!("v_π(f_{}(a,b)) = {v}, expected {expect}", i + 1)));
        }
        factors.push(FactorWitness { k: i as u32 + 1, value, pi_r_valuation: v });
    }
    let ccf = if cc.is_zero() { arith::factor(&BigInt::one(), trial_bound) } else { arith::factor(&cc, trial_bound) };
    let c_primes: Vec<u64> = ccf.factors.iter().map(|&(q, _)| q).collect();
    if let Some(q) = c_primes.iter().find(|&&q| q % r as u64 != 1) {
        return Err(Error::IdentityFailed(format!("prime {q} | c is not 1 mod {r}")));
    }
    Ok(SolutionClass {
        case,
        trivial: cc.abs() <= BigInt::one(),
        k,
        c0,
        c: cc,
        phi,
        factors,
        c_primes,
        status: FactorStatus::of(&ccf),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TrivialValue {
    One,
    R,
}

const SIEVE_MODULI: [u64; 2] = [2_305_843_009_213_693_951, 1_000_000_007];

/// All (a, b) with |a|, |b| ≤ H and φ_r(a,b) ∈ {1, r}, sorted.
///
/// Rows are scanned in parallel; candidates must pass two modular filters
/// before the exact check.
pub fn search_trivial(r: u32, h: i64) -> Vec<(i64, i64, TrivialValue)> {
    let rb = BigInt::from(r);
    let rows = exec::map_range((2 * h + 1) as usize, |i| {
        let a = i as i64 - h;
        let mut out = Vec::new();
        for b in -h..=h {
            let ok = SIEVE_MODULI.iter().all(|&m| {
                let v = phi_mod(r, a, b, m);
                v == 1 || v == r as u64 % m
            });
            if !ok {
                continue;
            }
            let v = phi_eval_i64(r, a, b);
            if v.is_one() {
                out.push((a, b, TrivialValue::One));
            } else if v == rb {
                out.push((a, b, TrivialValue::R));
            }
        }
        out
    });
    let mut all: Vec<_> = rows.into_iter().flatten().collect();
    all.sort();
    all
}

#[derive(Debug, Clone)]
pub struct CoprimalityReport {
    pub r: u32,
    pub a: BigInt,
    pub b: BigInt,
    pub phi: BigInt,
    pub phi_factors: Vec<(u64, u32)>,
    /// No prime of Q(ζ) other than the one above r divides two factors a + ζ^i b.
    pub pairwise_coprime: bool,
    /// Valuations v_𝔓(a + ζ^i b) at the prime above r, when r | a+b.
    pub pr_valuations: Option<Vec<i64>>,
    pub v_r_phi: u32,
    /// Every prime l | φ_r(a,b) with l ∤ a+b is 1 mod r.
    pub congruence_ok: bool,
    pub status: FactorStatus,
}

impl CoprimalityReport {
    pub fn holds(&self) -> bool {
        self.pairwise_coprime
            && self.congruence_ok
            && self.pr_valuations.as_ref().is_none_or(|v| v.iter().all(|&x| x == 1) && self.v_r_phi == 1)
    }
}

/// Check the coprimality structure of the factors a + ζ^i b.
///
/// For a prime l ≡ 1 mod r the primes of Q(ζ) above l correspond to the
/// elements ρ of order r in F_l (ζ ↦ ρ), and a + ζ^i b lies in the prime for ρ
/// iff a + ρ^i b ≡ 0 mod l; coprimality means at most one i per ρ.
pub fn factor_coprimality_report(r: u32, a: &BigInt, b: &BigInt, trial_bound: u64) -> Result<CoprimalityReport> {
    if !a.gcd(b).is_one() {
        return invalid(format!("({a}, {b}) is not primitive"));
    }
    let ctx = FieldContext::new(r)?;
    let phi = phi_eval(r, a, b);
    let fac = if phi.is_zero() { arith::factor(&BigInt::one(), 2) } else { arith::factor(&phi, trial_bound) };
    let sum = a + b;
    let mut pairwise = true;
    let mut congruence_ok = true;
    for &(l, _) in &fac.factors {
        if l == r as u64 {
            continue;
        }
        if !(&sum % l).is_zero() && l % r as u64 != 1 {
            congruence_ok = false;
        }
        if l % r as u64 != 1 {
            // l inert-ish: a common prime above l would force l | b(1 − ζ^j)
            if !(b % l).is_zero() {
                continue;
            }
            pairwise = false;
            continue;
        }
        let am = a.mod_floor(&BigInt::from(l)).to_u64().unwrap();
        let bm = b.mod_floor(&BigInt::from(l)).to_u64().unwrap();
        let g = arith::primitive_root(l);
        let rho0 = arith::pow_mod(g, (l - 1) / r as u64, l);
        for s in 1..r as u64 {
            let rho = arith::pow_mod(rho0, s, l);
            let hits = (1..r as u64)
                .filter(|&i| (am + arith::mul_mod(arith::pow_mod(rho, i, l), bm, l)) % l == 0)
                .count();
            if hits > 1 {
                pairwise = false;
            }
        }
    }
    let pr_valuations = if sum.is_multiple_of(&BigInt::from(r)) && !sum.is_zero() {
        let big_p = PrimeIdeal::cyclotomic_r(&ctx);
        let vals = (1..r as i64)
            .map(|i| {
                let x = &ctx.int(a.clone()) + &ctx.zeta(i).scale_int(b);
                big_p.valuation(&x)
            })
            .collect::<Result<Vec<_>>>()?;
        Some(vals)
    } else {
        None
    };
    Ok(CoprimalityReport {
        r,
        a: a.clone(),
        b: b.clone(),
        v_r_phi: if phi.is_zero() { 0 } else { arith::valuation(&phi, r as u64) },
        phi,
        phi_factors: fac.factors.clone(),
        pairwise_coprime: pairwise,
        pr_valuations,
        congruence_ok,
        status: FactorStatus::of(&fac),
    })
}
