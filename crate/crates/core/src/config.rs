//! Run configurations (TOML) and the sieve pipeline they drive.

use crate::error::{invalid, Error, Result};
use crate::frey::{BaseField, Family, FreyFamily};
use crate::localred;
use crate::numfield::{split_prime, PrimeIdeal, DEFAULT_GENERATOR_BOUND};
use crate::sieve::{self, BoundConfig, EliminationOutcome, ExponentBound, NewformField, NewformRecord, NewformSet, NonRationalBound, Status, Threshold};
use crate::traces::{self, Constraint, TraceTable};
use serde::Deserialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuxPrime {
    pub q: u64,
    #[serde(default = "default_constraint")]
    pub constraint: String,
}

fn default_constraint() -> String {
    "all".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Irreducibility {
    #[serde(default)]
    pub degree: Option<u32>,
    #[serde(default)]
    pub class_number: Option<u32>,
    /// Overrides degree·class_number in (1 + 3^e)².
    #[serde(default)]
    pub exponent: Option<u32>,
    /// An explicit threshold p ≥ n instead of the formula.
    #[serde(default)]
    pub explicit: Option<u64>,
    #[serde(default)]
    pub br_divisors: Vec<u64>,
    #[serde(default)]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inertia {
    pub prime: u64,
    /// |Φ_ℓ| of the Frey curve in the case being treated.
    pub order: u32,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub name: String,
    pub r: u32,
    pub family: String,
    pub indices: Vec<u32>,
    #[serde(default)]
    pub descend: bool,
    #[serde(default = "one", rename = "C")]
    pub c: i64,
    #[serde(default)]
    pub aux: Vec<AuxPrime>,
    /// Residual enumeration modulus for conductor classes (a power of a prime).
    #[serde(default)]
    pub modulus: Option<u64>,
    #[serde(default)]
    pub newforms: Vec<PathBuf>,
    #[serde(default)]
    pub irreducibility: Option<Irreducibility>,
    /// Predicted levels (`label^e,...`); records at other levels are skipped.
    /// Records with `level any` are always kept.
    #[serde(default)]
    pub levels: Option<Vec<String>>,
    #[serde(default)]
    pub inertia: Option<Inertia>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn one() -> i64 {
    1
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::InvalidParameter(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads a config; relative paths inside it are resolved against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Other(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in cfg.newforms.iter_mut().chain(cfg.out.iter_mut()) {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.r < 7 || !crate::arith::is_prime(self.r as u64) {
            return invalid(format!("r = {} must be a prime ≥ 7", self.r));
        }
        for a in &self.aux {
            if a.q == 2 || a.q == self.r as u64 || !crate::arith::is_prime(a.q) {
                return invalid(format!("auxiliary prime {} must be an odd prime different from r", a.q));
            }
            a.constraint.parse::<Constraint>()?;
        }
        if let Some(i) = &self.irreducibility {
            if i.explicit.is_none() && i.exponent.is_none() && (i.degree.is_none() || i.class_number.is_none()) {
                return invalid("irreducibility needs 'explicit', 'exponent', or 'degree' and 'class_number'");
            }
        }
        Family::parse(&self.family)?;
        Ok(())
    }

    pub fn build_family(&self) -> Result<FreyFamily> {
        let fam = FreyFamily::build(self.r, Family::parse(&self.family)?, &self.indices)?;
        if self.descend {
            fam.descend()
        } else {
            Ok(fam)
        }
    }

    fn irreducibility(&self) -> Result<&Irreducibility> {
        self.irreducibility.as_ref().ok_or_else(|| Error::InvalidParameter("config has no [irreducibility] section".into()))
    }

    pub fn threshold(&self) -> Result<Threshold> {
        let i = self.irreducibility()?;
        Ok(match i.explicit {
            Some(n) => Threshold::Explicit(n),
            None => Threshold::Formula {
                degree: i.degree.unwrap_or(0),
                class_number: i.class_number.unwrap_or(1),
                exponent: i.exponent,
            },
        })
    }

    pub fn bound_config(&self) -> Result<BoundConfig> {
        let i = self.irreducibility()?;
        Ok(BoundConfig {
            threshold: self.threshold()?,
            br_divisors: i.br_divisors.clone(),
            modularity_note: i.note.clone().unwrap_or_else(|| "assumes modularity of the Frey curve".into()),
        })
    }

    pub fn admits_level(&self, f: &NewformRecord) -> bool {
        match &self.levels {
            None => true,
            Some(ls) => f.level.is_empty() || ls.iter().any(|l| l.replace(' ', "") == f.level_text()),
        }
    }
}

/// Merges newform files; all must describe the same field.
pub fn load_newform_sets(paths: &[PathBuf]) -> Result<Option<NewformSet>> {
    let mut merged: Option<NewformSet> = None;
    for p in paths {
        let s = sieve::load_newforms(p)?;
        match &mut merged {
            None => merged = Some(s),
            Some(m) => {
                if m.field != s.field || m.r != s.r {
                    return invalid(format!("{}: field differs from earlier newform files", p.display()));
                }
                for q in s.primes {
                    match m.prime(&q.label) {
                        Some(old) if *old != q => return invalid(format!("prime label {} redefined", q.label)),
                        Some(_) => {}
                        None => m.primes.push(q),
                    }
                }
                m.records.extend(s.records);
            }
        }
    }
    Ok(merged)
}

/// The ideals of a trace table at q: declared primes first (keeping their
/// labels), then any remaining ideals above q.
pub fn table_primes(fam: &FreyFamily, set: Option<&NewformSet>, q: u64) -> Result<Vec<PrimeIdeal>> {
    let declared = set.map(|s| s.primes_above(q)).unwrap_or_default();
    match fam.base {
        BaseField::Q => Ok(declared.into_iter().next().map(|p| vec![p]).unwrap_or_else(|| vec![PrimeIdeal::rational(fam.r(), q)])),
        _ => {
            let mut out = declared.clone();
            for p in split_prime(&fam.ctx, q, DEFAULT_GENERATOR_BOUND)? {
                if !declared.contains(&p) {
                    out.push(p);
                }
            }
            Ok(out)
        }
    }
}

#[derive(Debug, Clone)]
pub struct SieveReport {
    pub name: String,
    pub tables: Vec<TraceTable>,
    pub outcomes: Vec<EliminationOutcome>,
    pub nonrational: Vec<NonRationalBound>,
    pub bound: ExponentBound,
}

impl SieveReport {
    pub fn success(&self) -> bool {
        !self.bound.conditional
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if !self.name.is_empty() {
            let _ = writeln!(s, "# {}", self.name);
        }
        for t in &self.tables {
            let sets: Vec<String> = (0..t.labels.len())
                .map(|i| format!("{}: {:?}", t.labels[i], t.traces_at(i)))
                .collect();
            let _ = writeln!(s, "table q={} [{}] {} classes; traces {}", t.q, t.constraint, t.rows.len(), sets.join("; "));
        }
        for o in &self.outcomes {
            let st = match o.status {
                Status::Eliminated => "eliminated",
                Status::Survivor => "SURVIVOR",
            };
            let _ = write!(s, "{:<12} {:<10} exceptional {:?} (union {:?})", o.label, st, o.exceptional, o.exceptional_union);
            for b in &o.obstructions {
                match b.witness {
                    Some((x, y)) => {
                        let _ = write!(s, "; B_{}=0 at ({x},{y})", b.q);
                    }
                    None => {
                        let _ = write!(s, "; B_{} primes {:?}", b.q, b.primes);
                    }
                }
            }
            if let Some(n) = &o.note {
                let _ = write!(s, "; {n}");
            }
            s.push('\n');
        }
        for nr in &self.nonrational {
            for v in &nr.values {
                let _ = writeln!(
                    s,
                    "{} at {} (q={}): P(t) for t in {:?} = {:?}; P(±(N+1)) = {:?}",
                    nr.label,
                    v.label,
                    v.q,
                    v.traces,
                    sieve::to_i64s(&v.good),
                    sieve::to_i64s(&v.mult)
                );
            }
            let _ = writeln!(s, "{}: M_f = {} primes {:?}", nr.label, nr.m_f, nr.primes);
        }
        let _ = writeln!(s, "{}", self.bound.statement());
        s
    }
}

/// Builds the trace tables, eliminates every record, applies the inertia
/// predicate and assembles the exponent bound.
pub fn run_sieve(cfg: &RunConfig) -> Result<SieveReport> {
    let fam = cfg.build_family()?;
    let set = load_newform_sets(&cfg.newforms)?;
    if let Some(s) = &set {
        let want = if fam.base == BaseField::Q { NewformField::Q } else { NewformField::KPlus };
        if s.field != want || s.r != cfg.r {
            return invalid("newform field does not match the Frey curve's base field");
        }
    }
    let bound_cfg = cfg.bound_config()?;
    let records: Vec<NewformRecord> = set
        .as_ref()
        .map(|s| s.records.iter().filter(|f| cfg.admits_level(f)).cloned().collect())
        .unwrap_or_default();
    let mut tables = Vec::new();
    for a in &cfg.aux {
        let primes = table_primes(&fam, set.as_ref(), a.q)?;
        tables.push(traces::grouped_table(&fam, &primes, a.constraint.parse()?)?);
    }
    let mut outcomes = if records.is_empty() { vec![] } else { sieve::eliminate(&records, &tables)? };
    if let Some(i) = &cfg.inertia {
        sieve::apply_inertia(&mut outcomes, &records, i.prime, i.order);
    }
    let mut nonrational = Vec::new();
    for f in records.iter().filter(|f| !f.is_rational()) {
        nonrational.push(sieve::nonrational_bound(f, &tables)?);
    }
    let bound = sieve::assemble_bound(&outcomes, &bound_cfg);
    Ok(SieveReport { name: cfg.name.clone(), tables, outcomes, nonrational, bound })
}

/// Conductor classes at a rational prime for the configured family.
pub fn run_conductor(cfg: &RunConfig, p: &PrimeIdeal) -> Result<localred::ConductorClasses> {
    let m = cfg.modulus.ok_or_else(|| Error::InvalidParameter("config has no 'modulus'".into()))?;
    let k = exponent_of(m, p.q)?;
    localred::enumerate_conductor_classes(&cfg.build_family()?, p, k, true)
}

/// k with m = p^k.
pub fn exponent_of(m: u64, p: u64) -> Result<u32> {
    let mut k = 0;
    let mut n = 1u64;
    while n < m {
        n = n.checked_mul(p).ok_or_else(|| Error::InvalidParameter("modulus overflow".into()))?;
        k += 1;
    }
    if n != m || k == 0 {
        return invalid(format!("modulus {m} is not a positive power of {p}"));
    }
    Ok(k)
}
