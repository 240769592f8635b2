//! Newform elimination: A_{x,y}(f), B_q(f), non-rational bounds and the
//! final exponent bound.
//!
//! Newform file grammar (one directive per line, `#` starts a comment):
//!
//! ```text
//! field K+ 7                       # or: field Q 7
//! prime q1 13 z:[-3,1,1]           # generator in z = -(ζ+ζ⁻¹) coordinates
//! prime q2 13 theta:[..]           # or θ = ζ+ζ⁻¹ coordinates
//! prime l3 3                       # over Q: just the rational prime
//! newform f level 2^4,3,p7 degree 1 : q1=-4 q2=minpoly[-2,0,1] inertia:7=3
//! ```
//!
//! `minpoly[c0,c1,...,1]` lists the monic minimal polynomial of the eigenvalue
//! in ascending order. `inertia:ℓ=n` records |Φ_ℓ| of the newform's curve.

use crate::arith;
use crate::error::{invalid, Error, Result};
use crate::exec;
use crate::numfield::{FieldContext, PrimeIdeal};
use crate::traces::{Entry, TraceTable};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

/// Trial-division bound used when factoring obstruction integers.
pub const FACTOR_BOUND: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NewformField {
    Q,
    KPlus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Eigenvalue {
    Rational(BigInt),
    /// Monic integer minimal polynomial, ascending coefficients.
    MinPoly(Vec<BigInt>),
}

impl Eigenvalue {
    /// |Norm(t − a)|: |t − a|, or |P(t)| for a minimal polynomial.
    pub fn norm_diff(&self, t: &BigInt) -> BigInt {
        match self {
            Eigenvalue::Rational(a) => (t - a).abs(),
            Eigenvalue::MinPoly(p) => poly_eval(p, t).abs(),
        }
    }

    /// |Norm((N+1)² − a²)|: for a minimal polynomial, |P(N+1)·P(−N−1)|.
    pub fn norm_mult(&self, n: u64) -> BigInt {
        let m = BigInt::from(n) + 1;
        match self {
            Eigenvalue::Rational(a) => {
                let d: BigInt = &m * &m - a * a;
                d.abs()
            }
            Eigenvalue::MinPoly(p) => (poly_eval(p, &m) * poly_eval(p, &-&m)).abs(),
        }
    }

    pub fn is_rational(&self) -> bool {
        match self {
            Eigenvalue::Rational(_) => true,
            Eigenvalue::MinPoly(p) => p.len() == 2,
        }
    }

    /// Degree-1 polynomials collapse to rational values.
    pub fn normalized(self) -> Self {
        match self {
            Eigenvalue::MinPoly(p) if p.len() == 2 => Eigenvalue::Rational(-&p[0]),
            e => e,
        }
    }
}

impl fmt::Display for Eigenvalue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Eigenvalue::Rational(a) => write!(f, "{a}"),
            Eigenvalue::MinPoly(p) => {
                let c: Vec<String> = p.iter().map(|c| c.to_string()).collect();
                write!(f, "minpoly[{}]", c.join(","))
            }
        }
    }
}

pub fn poly_eval(p: &[BigInt], t: &BigInt) -> BigInt {
    p.iter().rev().fold(BigInt::zero(), |acc, c| acc * t + c)
}

/// Integer roots of a monic integer polynomial.
pub fn integer_roots(p: &[BigInt]) -> Result<Vec<BigInt>> {
    if p.len() < 2 {
        return Ok(vec![]);
    }
    if p[0].is_zero() {
        let mut r = integer_roots(&p[1..])?;
        r.push(BigInt::zero());
        r.sort();
        r.dedup();
        return Ok(r);
    }
    let f = arith::factor(&p[0], FACTOR_BOUND);
    if !f.is_complete() {
        return Err(Error::Unsupported(format!("cannot factor constant term {}", p[0])));
    }
    let mut divisors = vec![BigInt::one()];
    for &(q, e) in &f.factors {
        let mut next = Vec::new();
        for d in &divisors {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= q;
            }
        }
        divisors = next;
    }
    let mut roots: Vec<BigInt> = divisors
        .into_iter()
        .flat_map(|d| [d.clone(), -d])
        .filter(|t| poly_eval(p, t).is_zero())
        .collect();
    roots.sort();
    Ok(roots)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewformRecord {
    pub field: NewformField,
    pub label: String,
    /// Empty when the file says `level any`.
    pub level: Vec<(String, u32)>,
    pub degree: u32,
    pub eigenvalues: BTreeMap<String, Eigenvalue>,
    /// ℓ ↦ |Φ_ℓ| of the attached curve, when known.
    pub inertia: BTreeMap<u64, u32>,
}

impl NewformRecord {
    pub fn is_rational(&self) -> bool {
        self.eigenvalues.values().all(Eigenvalue::is_rational)
    }

    /// Canonical `label^e,...` form; `any` when unspecified.
    pub fn level_text(&self) -> String {
        if self.level.is_empty() {
            return "any".into();
        }
        let parts: Vec<String> =
            self.level.iter().map(|(l, e)| if *e == 1 { l.clone() } else { format!("{l}^{e}") }).collect();
        parts.join(",")
    }
}

#[derive(Debug, Clone)]
pub struct NewformSet {
    pub field: NewformField,
    pub r: u32,
    /// Declared primes, in file order.
    pub primes: Vec<PrimeIdeal>,
    pub records: Vec<NewformRecord>,
}

impl NewformSet {
    pub fn prime(&self, label: &str) -> Option<&PrimeIdeal> {
        self.primes.iter().find(|p| p.label == label)
    }

    pub fn primes_above(&self, q: u64) -> Vec<PrimeIdeal> {
        self.primes.iter().filter(|p| p.q == q).cloned().collect()
    }
}

pub fn load_newforms(path: impl AsRef<Path>) -> Result<NewformSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Other(format!("{}: {e}", path.display())))?;
    parse_newforms(&text)
}

fn parse_int_list(s: &str) -> Option<Vec<BigInt>> {
    let inner = s.trim().strip_prefix('[')?.strip_suffix(']')?;
    inner.split(',').map(|c| c.trim().parse().ok()).collect()
}

pub fn parse_newforms(text: &str) -> Result<NewformSet> {
    let mut field: Option<(NewformField, u32)> = None;
    let mut ctx: Option<FieldContext> = None;
    let mut primes: Vec<PrimeIdeal> = Vec::new();
    let mut records = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let err = |m: String| Error::InvalidParameter(format!("line {}: {m}", n + 1));
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "field" => {
                if toks.len() != 3 {
                    return Err(err("expected 'field Q|K+ r'".into()));
                }
                let f = match toks[1] {
                    "Q" => NewformField::Q,
                    "K+" => NewformField::KPlus,
                    o => return Err(err(format!("unknown field '{o}'"))),
                };
                let r: u32 = toks[2].parse().map_err(|_| err("bad r".into()))?;
                ctx = Some(FieldContext::new(r).map_err(|e| err(e.to_string()))?);
                field = Some((f, r));
            }
            "prime" => {
                let (f, r) = field.ok_or_else(|| err("'prime' before 'field'".into()))?;
                if toks.len() < 3 {
                    return Err(err("expected 'prime label q [z:[..]|theta:[..]]'".into()));
                }
                let label = toks[1].to_string();
                if primes.iter().any(|p| p.label == label) {
                    return Err(err(format!("duplicate prime label '{label}'")));
                }
                let q: u64 = toks[2].parse().map_err(|_| err("bad q".into()))?;
                if !arith::is_prime(q) {
                    return Err(err(format!("{q} is not prime")));
                }
                let p = match (f, toks.get(3)) {
                    (NewformField::Q, None) => PrimeIdeal::rational(r, q).with_label(&label),
                    (NewformField::KPlus, Some(_)) => {
                        let spec = toks[3..].join("");
                        let ctx = ctx.as_ref().unwrap();
                        let gen = if let Some(c) = spec.strip_prefix("z:") {
                            ctx.from_z(&parse_int_list(c).ok_or_else(|| err("bad coordinates".into()))?)
                        } else if let Some(c) = spec.strip_prefix("theta:") {
                            ctx.from_theta_int(&parse_int_list(c).ok_or_else(|| err("bad coordinates".into()))?)
                        } else {
                            return Err(err(format!("bad generator '{spec}'")));
                        };
                        let p = PrimeIdeal::from_generator(ctx, &gen, &label).map_err(|e| err(e.to_string()))?;
                        if p.q != q {
                            return Err(err(format!("generator lies above {}, not {q}", p.q)));
                        }
                        p
                    }
                    (NewformField::KPlus, None) => return Err(err("K+ primes need a generator".into())),
                    (NewformField::Q, Some(_)) => return Err(err("rational primes take no generator".into())),
                };
                primes.push(p);
            }
            "newform" => {
                let (f, _) = field.ok_or_else(|| err("'newform' before 'field'".into()))?;
                let (head, tail) = line.split_once(':').ok_or_else(|| err("missing ':'".into()))?;
                let h: Vec<&str> = head.split_whitespace().collect();
                if h.len() != 6 || h[2] != "level" || h[4] != "degree" {
                    return Err(err("expected 'newform label level L degree n : ...'".into()));
                }
                let level = if h[3] == "any" {
                    vec![]
                } else {
                    h[3].split(',')
                    .map(|t| match t.split_once('^') {
                        Some((l, e)) => e.parse().map(|e| (l.to_string(), e)).map_err(|_| err(format!("bad level part '{t}'"))),
                        None => Ok((t.to_string(), 1)),
                    })
                    .collect::<Result<Vec<_>>>()?
                };
                let degree: u32 = h[5].parse().map_err(|_| err("bad degree".into()))?;
                let mut rec = NewformRecord {
                    field: f,
                    label: h[1].to_string(),
                    level,
                    degree,
                    eigenvalues: BTreeMap::new(),
                    inertia: BTreeMap::new(),
                };
                for tok in tail.split_whitespace() {
                    if let Some(rest) = tok.strip_prefix("inertia:") {
                        let (l, o) = rest.split_once('=').ok_or_else(|| err(format!("bad inertia '{tok}'")))?;
                        let l = l.parse().map_err(|_| err(format!("bad inertia prime '{l}'")))?;
                        rec.inertia.insert(l, o.parse().map_err(|_| err(format!("bad inertia order '{o}'")))?);
                        continue;
                    }
                    let (lbl, val) = tok.split_once('=').ok_or_else(|| err(format!("bad entry '{tok}'")))?;
                    if !primes.iter().any(|p| p.label == lbl) {
                        return Err(err(format!("unknown prime label '{lbl}'")));
                    }
                    let ev = if let Some(c) = val.strip_prefix("minpoly") {
                        let c = parse_int_list(c).ok_or_else(|| err(format!("bad polynomial '{val}'")))?;
                        if c.len() < 2 || !c.last().unwrap().is_one() {
                            return Err(err(format!("minimal polynomial must be monic and nonconstant: '{val}'")));
                        }
                        if c.len() as u32 - 1 > degree {
                            return Err(err(format!("minimal polynomial degree exceeds {degree}")));
                        }
                        if c.len() > 2 && !integer_roots(&c).map_err(|e| err(e.to_string()))?.is_empty() {
                            return Err(err(format!("minimal polynomial '{val}' has a rational root")));
                        }
                        Eigenvalue::MinPoly(c).normalized()
                    } else {
                        Eigenvalue::Rational(val.parse().map_err(|_| err(format!("bad eigenvalue '{val}'")))?)
                    };
                    if rec.eigenvalues.insert(lbl.to_string(), ev).is_some() {
                        return Err(err(format!("repeated prime '{lbl}'")));
                    }
                }
                records.push(rec);
            }
            o => return Err(err(format!("unknown directive '{o}'"))),
        }
    }
    let (field, r) = field.ok_or_else(|| Error::InvalidParameter("missing 'field' line".into()))?;
    Ok(NewformSet { field, r, primes, records })
}

/// A_{x,y}(f) for row `row` of `table`.
pub fn a_xy(f: &NewformRecord, table: &TraceTable, row: usize) -> Result<BigInt> {
    let row = &table.rows[row];
    let mut g = BigInt::zero();
    let mut overlap = false;
    for (i, label) in table.labels.iter().enumerate() {
        let Some(ev) = f.eigenvalues.get(label) else { continue };
        overlap = true;
        let v = match row.entries[i] {
            Entry::Trace(t) => ev.norm_diff(&BigInt::from(t)),
            Entry::Mult => ev.norm_mult(table.norms[i]),
            // no congruence is available at additive classes
            Entry::Add => continue,
        };
        g = g.gcd(&v);
        if g.is_one() {
            break;
        }
    }
    if !overlap {
        return invalid(format!("newform {} has no eigenvalue at any ideal of the q = {} table", f.label, table.q));
    }
    Ok(g)
}

/// B_q(f) with its prime support and the first class where A_{x,y}(f) = 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BqValue {
    pub q: u64,
    pub value: BigInt,
    pub primes: BTreeSet<u64>,
    /// Unfactored parts of A_{x,y} values (trial division bound exceeded).
    pub unfactored: Vec<BigInt>,
    pub witness: Option<(u64, u64)>,
}

pub fn b_q(f: &NewformRecord, table: &TraceTable) -> Result<BqValue> {
    let mut value = BigInt::one();
    let mut primes = BTreeSet::new();
    let mut unfactored = Vec::new();
    let mut witness = None;
    let mut seen: BTreeSet<BigInt> = BTreeSet::new();
    for (i, row) in table.rows.iter().enumerate() {
        let a = a_xy(f, table, i)?;
        if a.is_zero() {
            witness.get_or_insert((row.x, row.y));
            value = BigInt::zero();
            continue;
        }
        if !value.is_zero() {
            value *= &a;
        }
        if seen.insert(a.clone()) && !a.is_one() {
            let fz = arith::factor(&a, FACTOR_BOUND);
            primes.extend(fz.primes());
            unfactored.extend(fz.cofactor);
        }
    }
    if table.rows.is_empty() {
        value = BigInt::one();
    }
    if value.is_zero() {
        primes.clear();
        unfactored.clear();
    }
    Ok(BqValue { q: table.q, value, primes, unfactored, witness })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Eliminated,
    Survivor,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationOutcome {
    pub label: String,
    pub status: Status,
    /// B_q(f) per table that shares an ideal with the record.
    pub obstructions: Vec<BqValue>,
    /// Prime divisors of gcd of the nonzero B_q(f).
    pub exceptional: BTreeSet<u64>,
    /// Prime divisors of the product of the nonzero B_q(f).
    pub exceptional_union: BTreeSet<u64>,
    pub note: Option<String>,
}

impl EliminationOutcome {
    pub fn m_f(&self) -> BigInt {
        self.exceptional.iter().fold(BigInt::one(), |m, &p| m * p)
    }
}

fn eliminate_one(f: &NewformRecord, tables: &[TraceTable]) -> Result<EliminationOutcome> {
    let mut obstructions = Vec::new();
    for t in tables {
        if t.labels.iter().any(|l| f.eigenvalues.contains_key(l)) {
            obstructions.push(b_q(f, t)?);
        }
    }
    let nonzero: Vec<&BqValue> = obstructions.iter().filter(|b| !b.value.is_zero()).collect();
    let status = if nonzero.is_empty() { Status::Survivor } else { Status::Eliminated };
    let mut exceptional: Option<BTreeSet<u64>> = None;
    let mut exceptional_union = BTreeSet::new();
    let mut note = None;
    for b in &nonzero {
        exceptional = Some(match exceptional {
            None => b.primes.clone(),
            Some(e) => e.intersection(&b.primes).copied().collect(),
        });
        exceptional_union.extend(b.primes.iter().copied());
        if !b.unfactored.is_empty() {
            note = Some(format!("unfactored parts at q = {}: {:?}", b.q, b.unfactored));
        }
    }
    if obstructions.is_empty() {
        note = Some("no table shares an ideal with this record".into());
    }
    Ok(EliminationOutcome {
        label: f.label.clone(),
        status,
        obstructions,
        exceptional: exceptional.unwrap_or_default(),
        exceptional_union,
        note,
    })
}

/// Per record: eliminated iff some B_q(f) ≠ 0. Outcomes are in input order.
pub fn eliminate(newforms: &[NewformRecord], tables: &[TraceTable]) -> Result<Vec<EliminationOutcome>> {
    if tables.is_empty() {
        return invalid("eliminate needs at least one trace table");
    }
    exec::map(newforms, |f| eliminate_one(f, tables)).into_iter().collect()
}

/// `Some(false)` when the record's |Φ_ℓ| is known and differs from the curve's.
pub fn inertia_compatible(f: &NewformRecord, l: u64, curve_order: u32) -> Option<bool> {
    f.inertia.get(&l).map(|&o| o == curve_order)
}

/// Marks survivors whose inertia at ℓ cannot match the Frey curve's.
pub fn apply_inertia(outcomes: &mut [EliminationOutcome], records: &[NewformRecord], l: u64, curve_order: u32) {
    for (o, f) in outcomes.iter_mut().zip(records) {
        if o.status == Status::Survivor && inertia_compatible(f, l, curve_order) == Some(false) {
            o.status = Status::Eliminated;
            // the inertia comparison at ℓ is only used for p > ℓ
            o.exceptional = (2..=l).filter(|&q| arith::is_prime(q)).collect();
            o.exceptional_union = o.exceptional.clone();
            o.note = Some(format!("|Φ_{l}| = {} for the newform, {curve_order} for the curve", f.inertia[&l]));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyValues {
    pub label: String,
    pub q: u64,
    pub traces: BTreeSet<i64>,
    /// P(t) for t in the trace set.
    pub good: Vec<BigInt>,
    /// P(±(Norm q + 1)), present when the table has multiplicative classes.
    pub mult: Vec<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonRationalBound {
    pub label: String,
    pub values: Vec<PolyValues>,
    pub primes: BTreeSet<u64>,
    pub m_f: BigInt,
    pub survivor: bool,
}

/// Values P(t) over a trace set and, optionally, P(±(N+1)).
pub fn minpoly_values(p: &[BigInt], traces: &BTreeSet<i64>, mult_norm: Option<u64>) -> (Vec<BigInt>, Vec<BigInt>) {
    let good = traces.iter().map(|&t| poly_eval(p, &BigInt::from(t))).collect();
    let mult = match mult_norm {
        Some(n) => {
            let m = BigInt::from(n) + 1;
            vec![poly_eval(p, &m), poly_eval(p, &-m)]
        }
        None => vec![],
    };
    (good, mult)
}

/// M_f: product of the primes dividing some nonzero P_q(t).
pub fn nonrational_bound(f: &NewformRecord, tables: &[TraceTable]) -> Result<NonRationalBound> {
    let mut values = Vec::new();
    for (label, ev) in &f.eigenvalues {
        let Eigenvalue::MinPoly(p) = ev else { continue };
        for t in tables {
            let Some(i) = t.index_of(label) else { continue };
            let traces = t.traces_at(i);
            let has_mult = t.rows.iter().any(|r| r.entries[i] == Entry::Mult);
            let (good, mult) = minpoly_values(p, &traces, has_mult.then_some(t.norms[i]));
            values.push(PolyValues { label: label.clone(), q: t.q, traces, good, mult });
        }
    }
    if values.is_empty() {
        return invalid(format!("newform {} has no non-rational entry at any table ideal", f.label));
    }
    let mut primes = BTreeSet::new();
    let mut any = false;
    for v in values.iter().flat_map(|v| v.good.iter().chain(&v.mult)) {
        if v.is_zero() {
            continue;
        }
        any = true;
        let fz = arith::factor(v, FACTOR_BOUND);
        if let Some(c) = fz.cofactor {
            return Err(Error::Unsupported(format!("cannot factor {c}")));
        }
        primes.extend(fz.primes());
    }
    let m_f = primes.iter().fold(BigInt::one(), |m, &p| m * p);
    Ok(NonRationalBound { label: f.label.clone(), values, primes, m_f, survivor: !any })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Threshold {
    /// I = (1 + 3^exponent)², with exponent = d·h unless overridden.
    Formula { degree: u32, class_number: u32, exponent: Option<u32> },
    /// An explicit lower bound p ≥ n.
    Explicit(u64),
}

impl Threshold {
    pub fn exponent(&self) -> Option<u32> {
        match self {
            Threshold::Formula { degree, class_number, exponent } => Some(exponent.unwrap_or(degree * class_number)),
            Threshold::Explicit(_) => None,
        }
    }

    /// Solutions are excluded for p strictly greater than this value.
    pub fn value(&self) -> BigInt {
        match self {
            Threshold::Formula { .. } => {
                let b = BigInt::one() + BigInt::from(3).pow(self.exponent().unwrap());
                &b * &b
            }
            Threshold::Explicit(n) => BigInt::from(n.saturating_sub(1)),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Threshold::Formula { .. } => format!("(1+3^{})^2", self.exponent().unwrap()),
            Threshold::Explicit(n) => format!("{}", n.saturating_sub(1)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundConfig {
    pub threshold: Threshold,
    /// Primes dividing the constant B_r (taken as given).
    pub br_divisors: Vec<u64>,
    pub modularity_note: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentBound {
    pub threshold: BigInt,
    pub threshold_text: String,
    pub note: String,
    pub per_newform: Vec<(String, BTreeSet<u64>)>,
    pub survivors: Vec<String>,
    pub m: BigInt,
    pub conditional: bool,
}

impl ExponentBound {
    pub fn statement(&self) -> String {
        let mut primes: BTreeSet<u64> = BTreeSet::new();
        for (_, s) in &self.per_newform {
            primes.extend(s);
        }
        let large: Vec<String> = primes.iter().filter(|p| BigInt::from(**p) > self.threshold).map(|p| p.to_string()).collect();
        let mut s = if self.conditional {
            if self.survivors.is_empty() {
                "CONDITIONAL: nothing was eliminated".to_string()
            } else {
                format!("CONDITIONAL: survivors {}", self.survivors.join(", "))
            }
        } else {
            format!("no non-trivial primitive solutions for p > {}", self.threshold_text)
        };
        if !self.conditional && !large.is_empty() {
            s.push_str(&format!(" and p not in {{{}}}", large.join(",")));
        }
        s.push_str(&format!(" [M = {}; {}]", self.m, self.note));
        s
    }
}

pub fn assemble_bound(outcomes: &[EliminationOutcome], config: &BoundConfig) -> ExponentBound {
    let survivors: Vec<String> =
        outcomes.iter().filter(|o| o.status == Status::Survivor).map(|o| o.label.clone()).collect();
    let mut m = config.br_divisors.iter().fold(BigInt::one(), |m, &p| m.lcm(&BigInt::from(p)));
    for o in outcomes.iter().filter(|o| o.status == Status::Eliminated) {
        m = m.lcm(&o.m_f());
    }
    ExponentBound {
        threshold: config.threshold.value(),
        threshold_text: config.threshold.describe(),
        note: config.modularity_note.clone(),
        per_newform: outcomes.iter().map(|o| (o.label.clone(), o.exceptional.clone())).collect(),
        conditional: outcomes.is_empty() || !survivors.is_empty(),
        survivors,
        m,
    }
}

/// Largest exceptional prime over eliminated records (0 if none).
pub fn max_exceptional(outcomes: &[EliminationOutcome]) -> u64 {
    outcomes.iter().flat_map(|o| o.exceptional.iter().copied()).max().unwrap_or(0)
}

/// Helper for integer lists in reports.
pub fn to_i64s(v: &[BigInt]) -> Vec<i64> {
    v.iter().map(|x| x.to_i64().unwrap_or(i64::MAX)).collect()
}
