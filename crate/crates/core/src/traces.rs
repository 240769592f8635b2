//! Traces of Frobenius of Frey curves and residual trace tables.

use crate::error::{invalid, Error, Result};
use crate::exec;
use crate::frey::{BaseField, FreyCurve, FreyFamily};
use crate::localred::{self, DvrFamily, Reduction};
use crate::numfield::{split_prime, FieldContext, PrimeIdeal, PrimeLevel, ResidueField, DEFAULT_GENERATOR_BOUND};
use crate::numfield::residue::Fe;
use crate::poly::ResidueForm;
use num_bigint::BigInt;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

pub const DEFAULT_NORM_BOUND: u64 = 1_000_000;

/// Local behaviour at one prime: a trace for good reduction, otherwise the
/// reduction type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Entry {
    Trace(i64),
    Mult,
    Add,
}

impl Entry {
    pub fn trace(self) -> Option<i64> {
        match self {
            Entry::Trace(t) => Some(t),
            _ => None,
        }
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Trace(t) => write!(f, "{t}"),
            Entry::Mult => write!(f, "MULT"),
            Entry::Add => write!(f, "ADD"),
        }
    }
}

impl FromStr for Entry {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "MULT" => Ok(Entry::Mult),
            "ADD" => Ok(Entry::Add),
            _ => s.parse().map(Entry::Trace).map_err(|_| Error::InvalidParameter(format!("bad table entry '{s}'"))),
        }
    }
}

/// Quadratic character table of a finite field, indexed by `ResidueField::encode`.
struct Chi {
    k: ResidueField,
    chi: Vec<i8>,
}

impl Chi {
    fn new(k: &ResidueField) -> Self {
        let n = k.size() as usize;
        let mut chi = vec![-1i8; n];
        chi[0] = 0;
        for x in k.elements() {
            if !k.is_zero(&x) {
                chi[k.encode(&k.mul(&x, &x)) as usize] = 1;
            }
        }
        Chi { k: k.clone(), chi }
    }

    fn of(&self, x: &Fe) -> i64 {
        self.chi[self.k.encode(x) as usize] as i64
    }

    /// Trace of y² = x³ + A x + B.
    fn short(&self, a: &Fe, b: &Fe) -> i64 {
        let k = &self.k;
        -k.elements().map(|x| self.of(&k.add(&k.mul(&k.add(&k.mul(&x, &x), a), &x), b))).sum::<i64>()
    }

    /// Trace of a general Weierstrass model, via (2y + a1x + a3)² = 4x³ + b2x² + 2b4x + b6.
    fn general(&self, a: &[Fe; 5]) -> i64 {
        let k = &self.k;
        let [a1, a2, a3, a4, a6] = a;
        let b2 = k.add(&k.mul(a1, a1), &k.scale(a2, 4));
        let b4 = k.add(&k.mul(a1, a3), &k.scale(a4, 2));
        let b6 = k.add(&k.mul(a3, a3), &k.scale(a6, 4));
        let b4x2 = k.scale(&b4, 2);
        -k.elements()
            .map(|x| {
                let v = k.add(&k.mul(&k.add(&k.mul(&k.add(&k.scale(&x, 4), &b2), &x), &b4x2), &x), &b6);
                self.of(&v)
            })
            .sum::<i64>()
    }
}

fn check_prime(p: &PrimeIdeal, bound: u64) -> Result<u64> {
    if p.q == 2 {
        return Err(Error::Unsupported("point counts in characteristic 2".into()));
    }
    let n = p.norm();
    if n > bound {
        return Err(Error::InvalidParameter(format!("Norm({}) = {n} exceeds the bound {bound}", p.label)));
    }
    Ok(n)
}

/// a_P(E) = Norm(P) + 1 − #Ẽ(F_P) for good reduction, otherwise the reduction type.
pub fn count_trace(curve: &FreyCurve, p: &PrimeIdeal) -> Result<Entry> {
    count_trace_bounded(curve, p, DEFAULT_NORM_BOUND)
}

pub fn count_trace_bounded(curve: &FreyCurve, p: &PrimeIdeal, bound: u64) -> Result<Entry> {
    check_prime(p, bound)?;
    let k = p.residue_field();
    if p.q == 3 {
        let t = localred::tate_at(curve, p)?;
        return Ok(match t.exponent {
            0 => {
                let dvr = tate_dvr(curve, p)?;
                Entry::Trace(Chi::new(k).general(&t.model.clone().map(|c| dvr.red(&c))))
            }
            1 => Entry::Mult,
            _ => Entry::Add,
        });
    }
    let ld = localred::local_data(curve, p)?;
    match ld.reduction {
        Reduction::Multiplicative => return Ok(Entry::Mult),
        Reduction::Additive | Reduction::Ambiguous => return Ok(Entry::Add),
        Reduction::Good => {}
    }
    let s = ld.rescale;
    let g = &p.generator;
    let c4 = curve.c4.try_mul(&g.pow(-4 * s)?)?;
    let c6 = curve.c6.try_mul(&g.pow(-6 * s)?)?;
    let a = k.scale(&p.reduce(&c4)?, -27);
    let b = k.scale(&p.reduce(&c6)?, -54);
    Ok(Entry::Trace(Chi::new(k).short(&a, &b)))
}

fn tate_dvr(curve: &FreyCurve, p: &PrimeIdeal) -> Result<localred::InertDvr> {
    if p.level == PrimeLevel::Rational {
        Ok(localred::InertDvr::rational(p.q))
    } else {
        localred::InertDvr::kplus(&FieldContext::new(curve.r)?, p)
    }
}

/// Which residue classes (x, y) ∈ F_q² \ {(0,0)} a table covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Constraint {
    #[default]
    All,
    /// q | x + y.
    SumZero,
    /// q ∤ x + y.
    SumNonZero,
}

impl Constraint {
    pub fn admits(self, q: u64, x: u64, y: u64) -> bool {
        let s = (x + y) % q;
        match self {
            Constraint::All => true,
            Constraint::SumZero => s == 0,
            Constraint::SumNonZero => s != 0,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constraint::All => "all",
            Constraint::SumZero => "x+y=0",
            Constraint::SumNonZero => "x+y!=0",
        })
    }
}

impl FromStr for Constraint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.replace(' ', "").as_str() {
            "all" => Ok(Constraint::All),
            "x+y=0" | "x+y==0" => Ok(Constraint::SumZero),
            "x+y!=0" => Ok(Constraint::SumNonZero),
            _ => Err(Error::InvalidParameter(format!("unknown constraint '{s}' (all, x+y=0, x+y!=0)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub x: u64,
    pub y: u64,
    pub entries: Vec<Entry>,
}

impl TableRow {
    pub fn is_mult(&self) -> bool {
        self.entries.contains(&Entry::Mult)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceTable {
    pub descriptor: String,
    pub r: u32,
    pub q: u64,
    pub labels: Vec<String>,
    pub norms: Vec<u64>,
    pub constraint: Constraint,
    pub rows: Vec<TableRow>,
}

impl TraceTable {
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Traces at ideal `i` over good classes.
    pub fn traces_at(&self, i: usize) -> BTreeSet<i64> {
        self.rows.iter().filter_map(|r| r.entries[i].trace()).collect()
    }

    pub fn has_mult(&self) -> bool {
        self.rows.iter().any(TableRow::is_mult)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("family {}\n", self.descriptor));
        s.push_str(&format!("r {}\n", self.r));
        s.push_str(&format!("q {}\n", self.q));
        let ideals: Vec<String> = self.labels.iter().zip(&self.norms).map(|(l, n)| format!("{l}:{n}")).collect();
        s.push_str(&format!("ideals {}\n", ideals.join(" ")));
        s.push_str(&format!("constraint {}\n", self.constraint));
        for row in &self.rows {
            let e: Vec<String> = row.entries.iter().map(|e| e.to_string()).collect();
            if row.entries.iter().all(|e| *e == Entry::Mult) {
                s.push_str(&format!("{} {} : MULT\n", row.x, row.y));
            } else {
                s.push_str(&format!("{} {} : {}\n", row.x, row.y, e.join(" ")));
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut t = TraceTable {
            descriptor: String::new(),
            r: 0,
            q: 0,
            labels: vec![],
            norms: vec![],
            constraint: Constraint::All,
            rows: vec![],
        };
        let bad = |n: usize, m: &str| Error::InvalidParameter(format!("line {}: {m}", n + 1));
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some((lhs, rhs)) = line.split_once(':').filter(|(l, _)| l.trim().split_whitespace().count() == 2 && l.trim().chars().next().is_some_and(|c| c.is_ascii_digit())) {
                let mut xy = lhs.split_whitespace().map(|v| v.parse::<u64>());
                let (x, y) = match (xy.next(), xy.next()) {
                    (Some(Ok(x)), Some(Ok(y))) => (x, y),
                    _ => return Err(bad(n, "bad class")),
                };
                let mut entries: Vec<Entry> = rhs.split_whitespace().map(str::parse).collect::<Result<_>>().map_err(|_| bad(n, "bad entry"))?;
                if entries == [Entry::Mult] {
                    entries = vec![Entry::Mult; t.labels.len()];
                }
                if entries.len() != t.labels.len() {
                    return Err(bad(n, "wrong number of entries"));
                }
                t.rows.push(TableRow { x, y, entries });
                continue;
            }
            let (key, val) = line.split_once(' ').ok_or_else(|| bad(n, "expected 'key value'"))?;
            match key {
                "family" => t.descriptor = val.to_string(),
                "r" => t.r = val.trim().parse().map_err(|_| bad(n, "bad r"))?,
                "q" => t.q = val.trim().parse().map_err(|_| bad(n, "bad q"))?,
                "ideals" => {
                    for tok in val.split_whitespace() {
                        let (l, nm) = tok.split_once(':').ok_or_else(|| bad(n, "ideal must be label:norm"))?;
                        t.labels.push(l.to_string());
                        t.norms.push(nm.parse().map_err(|_| bad(n, "bad norm"))?);
                    }
                }
                "constraint" => t.constraint = val.parse()?,
                _ => return Err(bad(n, "unknown key")),
            }
        }
        Ok(t)
    }
}

pub fn describe(fam: &FreyFamily) -> String {
    let idx: Vec<String> = fam.indices.iter().map(|i| i.to_string()).collect();
    format!("{} r={} indices={} base={}{}", fam.family, fam.r(), idx.join(","), fam.base, if fam.descended { " descended" } else { "" })
}

/// The prime ideals above ℓ in the family's base field.
pub fn primes_above(fam: &FreyFamily, l: u64) -> Result<Vec<PrimeIdeal>> {
    match fam.base {
        BaseField::Q => Ok(vec![PrimeIdeal::rational(fam.r(), l)]),
        BaseField::KPlus => split_prime(&fam.ctx, l, DEFAULT_GENERATOR_BOUND),
        BaseField::K0 => Err(Error::Unsupported("trace tables over K0".into())),
    }
}

enum Kernel {
    /// Reduced c4, c6, Δ forms; valid when the residue characteristic is ≥ 5.
    Residue { k: ResidueField, chi: Chi, c4: ResidueForm, c6: ResidueForm, disc: ResidueForm },
    /// Integral lifts in [0, q) through Tate's algorithm; residue characteristic 3.
    Lift { dvr: DvrFamily, chi: Chi },
}

impl Kernel {
    fn new(fam: &FreyFamily, p: &PrimeIdeal) -> Result<Self> {
        let k = p.residue_field().clone();
        let chi = Chi::new(&k);
        if p.q == 3 {
            return Ok(Kernel::Lift { dvr: DvrFamily::new(fam, p)?, chi });
        }
        let inv = fam.invariants();
        Ok(Kernel::Residue { c4: inv.c4.reduce(p)?, c6: inv.c6.reduce(p)?, disc: inv.disc.reduce(p)?, k, chi })
    }

    fn entry(&self, x: u64, y: u64) -> Result<Entry> {
        match self {
            Kernel::Residue { k, chi, c4, c6, disc } => {
                let (xf, yf) = (k.from_int(x as i64), k.from_int(y as i64));
                let c4v = c4.eval(k, &xf, &yf);
                if k.is_zero(&disc.eval(k, &xf, &yf)) {
                    return Ok(if k.is_zero(&c4v) { Entry::Add } else { Entry::Mult });
                }
                let c6v = c6.eval(k, &xf, &yf);
                Ok(Entry::Trace(chi.short(&k.scale(&c4v, -27), &k.scale(&c6v, -54))))
            }
            Kernel::Lift { dvr, chi } => {
                let t = dvr.tate(&BigInt::from(x), &BigInt::from(y))?;
                Ok(match t.exponent {
                    0 => Entry::Trace(chi.general(&t.model.clone().map(|c| dvr.dvr.red(&c)))),
                    1 => Entry::Mult,
                    _ => Entry::Add,
                })
            }
        }
    }
}

/// Per class (x, y), the vector of local entries at every ideal in `primes`
/// (all above the same rational prime q).
pub fn grouped_table(fam: &FreyFamily, primes: &[PrimeIdeal], constraint: Constraint) -> Result<TraceTable> {
    grouped_table_bounded(fam, primes, constraint, DEFAULT_NORM_BOUND)
}

pub fn grouped_table_bounded(fam: &FreyFamily, primes: &[PrimeIdeal], constraint: Constraint, bound: u64) -> Result<TraceTable> {
    let Some(first) = primes.first() else {
        return invalid("no prime ideals given");
    };
    let q = first.q;
    if primes.iter().any(|p| p.q != q) {
        return invalid("ideals lie above different rational primes");
    }
    if fam.r() as u64 == q {
        return invalid(format!("q = {q} divides 2r"));
    }
    let norms = primes.iter().map(|p| check_prime(p, bound)).collect::<Result<Vec<_>>>()?;
    let kernels = primes.iter().map(|p| Kernel::new(fam, p)).collect::<Result<Vec<_>>>()?;
    let classes: Vec<(u64, u64)> = (0..q)
        .flat_map(|x| (0..q).map(move |y| (x, y)))
        .filter(|&(x, y)| (x, y) != (0, 0) && constraint.admits(q, x, y))
        .collect();
    let rows = exec::map(&classes, |&(x, y)| -> Result<TableRow> {
        let entries = kernels.iter().map(|k| k.entry(x, y)).collect::<Result<_>>()?;
        Ok(TableRow { x, y, entries })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(TraceTable {
        descriptor: describe(fam),
        r: fam.r(),
        q,
        labels: primes.iter().map(|p| p.label.clone()).collect(),
        norms,
        constraint,
        rows,
    })
}

/// All good-reduction traces over classes satisfying the constraint, at every ideal above ℓ.
pub fn trace_spectrum(fam: &FreyFamily, l: u64, constraint: Constraint) -> Result<BTreeSet<i64>> {
    let t = grouped_table(fam, &primes_above(fam, l)?, constraint)?;
    Ok(t.rows.iter().flat_map(|r| r.entries.iter().filter_map(|e| e.trace())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frey::Family;

    fn descent() -> FreyFamily {
        FreyFamily::build(7, Family::I, &[1, 2, 3]).unwrap().descend().unwrap()
    }

    #[test]
    fn trivial_curve_traces() {
        let fam = descent();
        let p3 = PrimeIdeal::rational(7, 3);
        let p5 = PrimeIdeal::rational(7, 5);
        assert_eq!(count_trace(&fam.at_i64(1, 1), &p3).unwrap(), Entry::Trace(3));
        assert_eq!(count_trace(&fam.at_i64(0, 1), &p5).unwrap(), Entry::Trace(-3));
        assert_eq!(count_trace(&fam.at_i64(1, -1), &p5).unwrap(), Entry::Trace(-1));
    }

    #[test]
    fn spectra_over_q() {
        let fam = descent();
        let s = |l, c| trace_spectrum(&fam, l, c).unwrap().into_iter().collect::<Vec<_>>();
        assert_eq!(s(3, Constraint::All), vec![-1, 3]);
        assert_eq!(s(3, Constraint::SumZero), vec![-1]);
        assert_eq!(s(5, Constraint::All), vec![-3, -1, 1, 3]);
        assert_eq!(s(5, Constraint::SumZero), vec![-1]);
    }

    #[test]
    fn table_round_trip() {
        let fam = descent();
        let t = grouped_table(&fam, &primes_above(&fam, 5).unwrap(), Constraint::All).unwrap();
        assert_eq!(TraceTable::from_text(&t.to_text()).unwrap(), t);
    }

    #[test]
    fn class_values_match_curves() {
        let fam = descent();
        let p5 = PrimeIdeal::rational(7, 5);
        let t = grouped_table(&fam, &[p5.clone()], Constraint::All).unwrap();
        for row in &t.rows {
            let e = count_trace(&fam.at_i64(row.x as i64, row.y as i64), &p5).unwrap();
            assert_eq!(e, row.entries[0], "({}, {})", row.x, row.y);
        }
    }

    #[test]
    fn char2_is_rejected() {
        let fam = descent();
        assert!(matches!(count_trace(&fam.at_i64(0, 1), &PrimeIdeal::rational(7, 2)), Err(Error::Unsupported(_))));
    }

    #[test]
    fn spectrum_at_23() {
        let s: Vec<i64> = trace_spectrum(&descent(), 23, Constraint::All).unwrap().into_iter().collect();
        assert_eq!(s, vec![-9, -7, -5, -1, 1, 3]);
    }

    #[test]
    fn char3_classes_do_not_depend_on_lifts() {
        let fam = descent();
        let p3 = PrimeIdeal::rational(7, 3);
        let t = grouped_table(&fam, &[p3.clone()], Constraint::All).unwrap();
        for row in &t.rows {
            for (dx, dy) in [(3, 0), (0, 3), (6, 9), (-3, 3)] {
                let e = count_trace(&fam.at_i64(row.x as i64 + dx, row.y as i64 + dy), &p3).unwrap();
                assert_eq!(e, row.entries[0]);
            }
        }
    }

    #[test]
    fn family_ii_at_13() {
        let fam = FreyFamily::build(7, Family::II, &[1, 2]).unwrap();
        let ctx = &fam.ctx;
        let q1 = PrimeIdeal::from_generator(ctx, &ctx.from_z(&[(-3).into(), 1.into(), 1.into()]), "q1").unwrap();
        let mut primes = vec![q1.clone()];
        primes.extend(split_prime(ctx, 13, 5).unwrap().into_iter().filter(|p| *p != q1));
        let t = grouped_table(&fam, &primes, Constraint::All).unwrap();
        assert_eq!(t.traces_at(0), [-6, -2, 2].into_iter().collect());
        for row in &t.rows {
            assert_ne!(row.entries, vec![Entry::Trace(-2); 3]);
            assert_eq!(row.is_mult(), (row.x + row.y) % 13 == 0);
        }
    }
}
