//! The three Frey-curve families over K⁺, descent to K₀, and k-curve structure.

use crate::arith;
use crate::error::{invalid, Error, Result};
use crate::numfield::{FieldContext, FieldElement, PrimeIdeal};
use crate::poly::{BinaryForm, Invariants, Ring, Weierstrass};
use num_bigint::BigInt;
use std::fmt::{self, Write as _};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    I,
    II,
    IIIPlus,
    IIIMinus,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::I => "I",
            Family::II => "II",
            Family::IIIPlus => "III+",
            Family::IIIMinus => "III-",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "I" | "1" => Family::I,
            "II" | "2" => Family::II,
            "III+" | "III" | "3+" => Family::IIIPlus,
            "III-" | "3-" => Family::IIIMinus,
            _ => return invalid(format!("unknown family {s:?}")),
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseField {
    KPlus,
    K0,
    Q,
}

impl fmt::Display for BaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaseField::KPlus => "K+",
            BaseField::K0 => "K0",
            BaseField::Q => "Q",
        })
    }
}

/// A Frey family as Weierstrass coefficients that are binary forms in (a, b).
#[derive(Clone, Debug)]
pub struct FreyFamily {
    pub ctx: Arc<FieldContext>,
    pub family: Family,
    pub indices: Vec<u32>,
    pub base: BaseField,
    pub descended: bool,
    /// α, β, γ (γ absent for family III).
    pub coeffs: Vec<FieldElement>,
    /// A, B, C for families I/II; α f_{k₁}, β f_{n₂} for family III.
    pub abc: Vec<BinaryForm>,
    pub model: Weierstrass<BinaryForm>,
}

/// All increasing triples 1 ≤ k₁ < k₂ < k₃ ≤ (r−1)/2.
pub fn suitable_triples(r: u32) -> Vec<[u32; 3]> {
    let d = (r - 1) / 2;
    let mut out = Vec::new();
    for i in 1..=d {
        for j in i + 1..=d {
            for k in j + 1..=d {
                out.push([i, j, k]);
            }
        }
    }
    out
}

fn normalize_index(r: u32, n: u64) -> u32 {
    let n = (n % r as u64) as u32;
    n.min(r - n)
}

/// (1, n₂, n₃) with ζ^{n₂} = σ^{2k}(ζ), ζ^{n₃} = σ^{4k}(ζ), r = 6k + 1.
pub fn descent_triple(ctx: &FieldContext) -> Result<[u32; 3]> {
    let r = ctx.r();
    if r % 6 != 1 {
        return invalid(format!("r = {r} is not 1 mod 6"));
    }
    let k = (r as u64 - 1) / 6;
    let mut t = [
        1,
        normalize_index(r, ctx.sigma_exponent(2 * k) as u64),
        normalize_index(r, ctx.sigma_exponent(4 * k) as u64),
    ];
    t.sort();
    Ok(t)
}

/// n₂ ≡ ±k₁·g^m mod r with m = (r−1)/4.
pub fn kcurve_pair(ctx: &FieldContext, k1: u32) -> Result<(u32, u32)> {
    let r = ctx.r();
    if r % 4 != 1 {
        return invalid(format!("r = {r} is not 1 mod 4"));
    }
    if k1 == 0 || k1 > (r - 1) / 2 {
        return invalid(format!("k1 = {k1} out of range"));
    }
    let m = (r as u64 - 1) / 4;
    let n2 = normalize_index(r, k1 as u64 * ctx.sigma_exponent(m) as u64);
    Ok((k1, n2))
}

fn ctx_for(r: u32) -> Result<Arc<FieldContext>> {
    Ok(Arc::new(FieldContext::new(r)?))
}

impl FreyFamily {
    fn legendre(ctx: Arc<FieldContext>, family: Family, indices: Vec<u32>, coeffs: Vec<FieldElement>, abc: Vec<BinaryForm>) -> Self {
        // Y² = X(X − A)(X + B)
        let (a, b) = (&abc[0], &abc[1]);
        let model = Weierstrass::short(b.sub(a), a.mul(b).neg(), BinaryForm::zero(ctx.r()));
        FreyFamily { ctx, family, indices, base: BaseField::KPlus, descended: false, coeffs, abc, model }
    }

    pub fn family_i(ctx: Arc<FieldContext>, triple: [u32; 3]) -> Result<Self> {
        let r = ctx.r();
        let d = (r - 1) / 2;
        let [k1, k2, k3] = triple;
        if !(1 <= k1 && k1 < k2 && k2 < k3 && k3 <= d) {
            return invalid(format!("{triple:?} is not {r}-suitable"));
        }
        let u = |k: u32| ctx.u(k as i64);
        let alpha = &u(k3) - &u(k2);
        let beta = &u(k1) - &u(k3);
        let gamma = &u(k2) - &u(k1);
        let abc: Vec<BinaryForm> = [(&alpha, k1), (&beta, k2), (&gamma, k3)]
            .iter()
            .map(|(c, k)| BinaryForm::f_k(r, *k as i64).scale(c))
            .collect();
        if !abc[0].add(&abc[1]).add(&abc[2]).is_zero() {
            return Err(Error::IdentityFailed("α f_k1 + β f_k2 + γ f_k3 != 0".into()));
        }
        Ok(Self::legendre(ctx, Family::I, triple.to_vec(), vec![alpha, beta, gamma], abc))
    }

    pub fn family_ii(ctx: Arc<FieldContext>, pair: (u32, u32)) -> Result<Self> {
        let r = ctx.r();
        let (k1, k2) = pair;
        if !(1 <= k1 && k1 < k2 && k2 <= (r - 1) / 2) {
            return invalid(format!("pair {pair:?} out of range"));
        }
        let u = |k: u32| ctx.u(k as i64);
        let two = ctx.int(2);
        let alpha = &u(k2) - &u(k1);
        let beta = &two - &u(k2);
        let gamma = &u(k1) - &two;
        let s = BinaryForm::sum_xy(r);
        let abc = vec![
            s.mul(&s).scale(&alpha),
            BinaryForm::f_k(r, k1 as i64).scale(&beta),
            BinaryForm::f_k(r, k2 as i64).scale(&gamma),
        ];
        if !abc[0].add(&abc[1]).add(&abc[2]).is_zero() {
            return Err(Error::IdentityFailed("α(x+y)² + β f_k1 + γ f_k2 != 0".into()));
        }
        Ok(Self::legendre(ctx, Family::II, vec![k1, k2], vec![alpha, beta, gamma], abc))
    }

    pub fn family_iii(ctx: Arc<FieldContext>, k1: u32, plus: bool) -> Result<Self> {
        let r = ctx.r();
        let (_, n2) = kcurve_pair(&ctx, k1)?;
        let t1 = ctx.u(k1 as i64);
        let t2 = ctx.u(n2 as i64);
        let two = ctx.int(2);
        let inv = (&t2 - &t1).inv()?;
        // α + β = 1, α t1 + β t2 = ±2
        let (alpha, beta) = if plus {
            (&(&t2 - &two) * &inv, &(&two - &t1) * &inv)
        } else {
            (&(&t2 + &two) * &inv, &(&(-&two) - &t1) * &inv)
        };
        let s = if plus {
            BinaryForm::sum_xy(r)
        } else {
            BinaryForm::new(r, vec![ctx.one(), ctx.int(-1)])
        };
        let abc = vec![
            BinaryForm::f_k(r, k1 as i64).scale(&alpha),
            BinaryForm::f_k(r, n2 as i64).scale(&beta),
        ];
        if abc[0].add(&abc[1]) != s.mul(&s) {
            return Err(Error::IdentityFailed("α f_k1 + β f_n2 != (x ± y)²".into()));
        }
        let model = Weierstrass::short(s.times(2), abc[0].clone(), BinaryForm::zero(r));
        Ok(FreyFamily {
            ctx,
            family: if plus { Family::IIIPlus } else { Family::IIIMinus },
            indices: vec![k1, n2],
            base: BaseField::KPlus,
            descended: false,
            coeffs: vec![alpha, beta],
            abc,
            model,
        })
    }

    pub fn build(r: u32, family: Family, indices: &[u32]) -> Result<Self> {
        let ctx = ctx_for(r)?;
        match (family, indices) {
            (Family::I, &[a, b, c]) => Self::family_i(ctx, [a, b, c]),
            (Family::II, &[a, b]) => Self::family_ii(ctx, (a, b)),
            (Family::IIIPlus | Family::IIIMinus, &[k1] | &[k1, _]) => {
                let f = Self::family_iii(ctx, k1, family == Family::IIIPlus)?;
                if indices.len() == 2 && indices[1] != f.indices[1] {
                    return invalid(format!("({k1}, {}) is not a k-curve pair", indices[1]));
                }
                Ok(f)
            }
            _ => invalid(format!("wrong number of indices for family {family}")),
        }
    }

    pub fn r(&self) -> u32 {
        self.ctx.r()
    }

    /// Short model Y² = X³ − 27c4 X − 54c6 of a family-I curve with the
    /// descent triple; its coefficients are fixed by σ^{2k}.
    pub fn descend(&self) -> Result<Self> {
        if self.family != Family::I || self.descended {
            return invalid("descent applies to family I only");
        }
        let t = descent_triple(&self.ctx)?;
        if self.indices != t {
            return invalid(format!("triple {:?} is not Galois-stable (expected {t:?})", self.indices));
        }
        let inv = self.model.invariants();
        let r = self.r();
        let model = Weierstrass::short(BinaryForm::zero(r), inv.c4.times(-27), inv.c6.times(-54));
        let k = (r as u64 - 1) / 6;
        let s2k = self.ctx.sigma_exponent(2 * k);
        for c in [&model.a4, &model.a6] {
            if &c.galois(s2k)? != c {
                return Err(Error::IdentityFailed("descended model is not fixed by σ^{2k}".into()));
            }
        }
        let base = if self.ctx.k0_degree() == Some(1) { BaseField::Q } else { BaseField::K0 };
        Ok(FreyFamily { base, descended: true, model, ..self.clone() })
    }

    pub fn invariants(&self) -> Invariants<BinaryForm> {
        self.model.invariants()
    }

    /// Integer coefficient vectors of (a4, a6) when the model is over Z.
    pub fn integer_short_model(&self) -> Option<(Vec<BigInt>, Vec<BigInt>)> {
        Some((self.model.a4.integer_coeffs()?, self.model.a6.integer_coeffs()?))
    }

    pub fn at(&self, a: &BigInt, b: &BigInt) -> FreyCurve {
        let model = self.model.map(|f| f.eval(a, b));
        let abc = self.abc.iter().map(|f| f.eval(a, b)).collect();
        FreyCurve::from_parts(self, a.clone(), b.clone(), model, abc)
    }

    pub fn at_i64(&self, a: i64, b: i64) -> FreyCurve {
        self.at(&BigInt::from(a), &BigInt::from(b))
    }

    /// The family obtained by applying σ_a to every coefficient.
    pub fn galois(&self, a: i64) -> Result<Self> {
        Ok(FreyFamily {
            coeffs: self.coeffs.iter().map(|c| c.galois(a)).collect::<Result<_>>()?,
            abc: self.abc.iter().map(|f| f.galois(a)).collect::<Result<_>>()?,
            model: self.model.try_map(|f| f.galois(a))?,
            ..self.clone()
        })
    }
}

pub fn build_i(r: u32, triple: [u32; 3], a: &BigInt, b: &BigInt) -> Result<FreyCurve> {
    Ok(FreyFamily::family_i(ctx_for(r)?, triple)?.at(a, b))
}

pub fn build_ii(r: u32, pair: (u32, u32), a: &BigInt, b: &BigInt) -> Result<FreyCurve> {
    Ok(FreyFamily::family_ii(ctx_for(r)?, pair)?.at(a, b))
}

pub fn build_iii(r: u32, k1: u32, plus: bool, a: &BigInt, b: &BigInt) -> Result<FreyCurve> {
    Ok(FreyFamily::family_iii(ctx_for(r)?, k1, plus)?.at(a, b))
}

pub fn descend_to_k0(curve: &FreyCurve) -> Result<FreyCurve> {
    let fam = FreyFamily::family_i(ctx_for(curve.r)?, [curve.indices[0], curve.indices[1], curve.indices[2]])?;
    Ok(fam.descend()?.at(&curve.a, &curve.b))
}

/// A member of a Frey family at a specific (a, b).
#[derive(Clone, Debug)]
pub struct FreyCurve {
    pub family: Family,
    pub r: u32,
    pub indices: Vec<u32>,
    pub a: BigInt,
    pub b: BigInt,
    pub base: BaseField,
    pub descended: bool,
    pub model: Weierstrass<FieldElement>,
    pub abc: Vec<FieldElement>,
    pub c4: FieldElement,
    pub c6: FieldElement,
    pub disc: FieldElement,
    pub j: Option<FieldElement>,
    pub singular: bool,
}

impl FreyCurve {
    fn from_parts(fam: &FreyFamily, a: BigInt, b: BigInt, model: Weierstrass<FieldElement>, abc: Vec<FieldElement>) -> Self {
        let inv = model.invariants();
        let singular = inv.disc.is_zero();
        let j = if singular {
            None
        } else {
            Some((&(&inv.c4 * &inv.c4) * &inv.c4).try_div(&inv.disc).expect("nonzero"))
        };
        FreyCurve {
            family: fam.family,
            r: fam.r(),
            indices: fam.indices.clone(),
            a,
            b,
            base: fam.base,
            descended: fam.descended,
            model,
            abc,
            c4: inv.c4,
            c6: inv.c6,
            disc: inv.disc,
            j,
            singular,
        }
    }

    pub fn invariants(&self) -> Invariants<FieldElement> {
        self.model.invariants()
    }

    /// Integer model [a1, a2, a3, a4, a6] when all coefficients are rational.
    pub fn rational_model(&self) -> Option<Weierstrass<num_rational::BigRational>> {
        let m = &self.model;
        Some(Weierstrass::new(
            m.a1.to_rational()?,
            m.a2.to_rational()?,
            m.a3.to_rational()?,
            m.a4.to_rational()?,
            m.a6.to_rational()?,
        ))
    }

    /// Apply σ_a to every coefficient; invariants are recomputed.
    pub fn galois(&self, a: i64) -> Result<Self> {
        let model = self.model.try_map(|c| c.galois(a))?;
        let inv = model.invariants();
        Ok(FreyCurve {
            abc: self.abc.iter().map(|c| c.galois(a)).collect::<Result<_>>()?,
            j: self.j.as_ref().map(|j| j.galois(a)).transpose()?,
            c4: inv.c4,
            c6: inv.c6,
            disc: inv.disc,
            model,
            ..self.clone()
        })
    }

    /// Canonical text form.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let idx: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(s, "family {}", self.family);
        let _ = writeln!(s, "r {}", self.r);
        let _ = writeln!(s, "indices {}", idx.join(","));
        let _ = writeln!(s, "a {}", self.a);
        let _ = writeln!(s, "b {}", self.b);
        let _ = writeln!(s, "base {}", self.base);
        let _ = writeln!(s, "descended {}", self.descended);
        let m = &self.model;
        for (name, c) in [("a1", &m.a1), ("a2", &m.a2), ("a3", &m.a3), ("a4", &m.a4), ("a6", &m.a6)] {
            let _ = writeln!(s, "{name} {c}");
        }
        let _ = writeln!(s, "c4 {}", self.c4);
        let _ = writeln!(s, "c6 {}", self.c6);
        let _ = writeln!(s, "disc {}", self.disc);
        match &self.j {
            Some(j) => {
                let _ = writeln!(s, "j {j}");
            }
            None => s.push_str("singular\n"),
        }
        s
    }
}

impl fmt::Display for FreyCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Scalars with a Galois action (field elements and forms over them).
pub trait Conjugate: Ring {
    fn conj(&self, a: i64) -> Result<Self>;
}

impl Conjugate for FieldElement {
    fn conj(&self, a: i64) -> Result<Self> {
        self.galois(a)
    }
}

impl Conjugate for BinaryForm {
    fn conj(&self, a: i64) -> Result<Self> {
        self.galois(a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugationReport {
    pub m: u64,
    pub sigma_exponent: i64,
    pub checks: Vec<(String, bool)>,
}

impl ConjugationReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }
}

fn conj_checks<S: Conjugate>(family: Family, abc: &[S], a2: &S, s: i64) -> Result<Vec<(String, bool)>> {
    let mut out = Vec::new();
    match family {
        Family::II => {
            out.push(("σ^m(A) = −A".into(), abc[0].conj(s)? == abc[0].neg()));
            out.push(("σ^m(B) = −C".into(), abc[1].conj(s)? == abc[2].neg()));
            out.push(("σ^m(C) = −B".into(), abc[2].conj(s)? == abc[1].neg()));
        }
        Family::IIIPlus | Family::IIIMinus => {
            let (af, bf) = (&abc[0], &abc[1]);
            out.push(("σ^m(α f1) = β f2".into(), af.conj(s)? == *bf));
            out.push(("σ^m(β f2) = α f1".into(), bf.conj(s)? == *af));
            // ^σE: Y² = X³ + a2 X² + βf2 X; its 2-isogenous image is
            // Y² = X³ − 2a2 X² + (a2² − 4βf2) X
            let e = Weierstrass::short(a2.clone(), af.clone(), a2.zero_like()).invariants();
            let img = Weierstrass::short(a2.times(-2), a2.square().sub(&bf.times(4)), a2.zero_like()).invariants();
            let cube = |x: &S| x.square().mul(x);
            let j_eq = cube(&e.c4).mul(&img.disc) == cube(&img.c4).mul(&e.disc);
            out.push(("j(image of 2-isogeny from ^σE) = j(E)".into(), j_eq));
        }
        Family::I => unreachable!(),
    }
    Ok(out)
}

/// Verify the σ^m action (m = (r−1)/4) on a family-II or family-III family.
pub fn conjugation_check_family(fam: &FreyFamily) -> Result<ConjugationReport> {
    let ctx = &fam.ctx;
    let r = ctx.r();
    if r % 4 != 1 {
        return invalid(format!("σ^m needs r ≡ 1 mod 4, got r = {r}"));
    }
    let m = (r as u64 - 1) / 4;
    let s = ctx.sigma_exponent(m);
    let mut checks = match fam.family {
        Family::I => return invalid("conjugation check applies to families II and III"),
        Family::II => {
            let (k1, k2) = (fam.indices[0], fam.indices[1]);
            if kcurve_pair(ctx, k1)?.1 != k2 {
                return invalid(format!("({k1}, {k2}) is not a σ^m pair"));
            }
            conj_checks(fam.family, &fam.abc, &fam.model.a2, s)?
        }
        _ => conj_checks(fam.family, &fam.abc, &fam.model.a2, s)?,
    };
    if matches!(fam.family, Family::IIIPlus | Family::IIIMinus) {
        let (al, be) = (&fam.coeffs[0], &fam.coeffs[1]);
        checks.insert(0, ("σ^m(α) = β".into(), &al.galois(s)? == be));
        checks.insert(1, ("σ^m(β) = α".into(), &be.galois(s)? == al));
    }
    let report = ConjugationReport { m, sigma_exponent: s, checks };
    if !report.holds() {
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.1).map(|c| c.0.clone()).collect();
        return Err(Error::IdentityFailed(failed.join("; ")));
    }
    Ok(report)
}

/// Same checks on a specific curve.
pub fn conjugation_check(curve: &FreyCurve) -> Result<ConjugationReport> {
    let r = curve.r;
    if r % 4 != 1 {
        return invalid(format!("σ^m needs r ≡ 1 mod 4, got r = {r}"));
    }
    let ctx = FieldContext::new(r)?;
    let m = (r as u64 - 1) / 4;
    let s = ctx.sigma_exponent(m);
    if curve.family == Family::I {
        return invalid("conjugation check applies to families II and III");
    }
    if curve.family == Family::II && kcurve_pair(&ctx, curve.indices[0])?.1 != curve.indices[1] {
        return invalid("pair is not a σ^m pair");
    }
    let checks = conj_checks(curve.family, &curve.abc, &curve.model.a2, s)?;
    let report = ConjugationReport { m, sigma_exponent: s, checks };
    if !report.holds() {
        return Err(Error::IdentityFailed("conjugation relations fail".into()));
    }
    Ok(report)
}

/// (label, v(α), v(β)) at each prime, for the family-III unit claim.
pub fn unit_report(fam: &FreyFamily, primes: &[PrimeIdeal]) -> Result<Vec<(String, i64, i64)>> {
    if !matches!(fam.family, Family::IIIPlus | Family::IIIMinus) {
        return invalid("unit report applies to family III");
    }
    primes
        .iter()
        .map(|p| Ok((p.label.clone(), p.valuation(&fam.coeffs[0])?, p.valuation(&fam.coeffs[1])?)))
        .collect()
}

/// Small set of primes used to test unit claims: π_r and the primes above 2, 3 and q.
pub fn unit_test_primes(ctx: &FieldContext, extra: &[u64]) -> Result<Vec<PrimeIdeal>> {
    let mut out = vec![PrimeIdeal::pi_r(ctx)];
    for &q in [2u64, 3].iter().chain(extra) {
        if q != ctx.r() as u64 && arith::is_prime(q) {
            out.extend(crate::numfield::split_prime(ctx, q, crate::numfield::DEFAULT_GENERATOR_BOUND)?);
        }
    }
    Ok(out)
}
