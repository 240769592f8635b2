#![allow(dead_code)]

use frey_sieve::frey::{Family, FreyFamily};
use frey_sieve::numfield::{FieldContext, PrimeIdeal};
use frey_sieve::sieve::{Eigenvalue, NewformField, NewformRecord};
use frey_sieve::traces::{self, Constraint, Entry, TraceTable};
use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::collections::{BTreeMap, BTreeSet};

/// Ideals above 13 and 41 in K+ for r = 7, generators in z-coordinates.
pub fn r7_primes(ctx: &FieldContext, q: u64) -> Vec<PrimeIdeal> {
    let gens: [(&str, [i64; 3]); 3] = match q {
        13 => [("q1", [-3, 1, 1]), ("q2", [2, 2, -1]), ("q3", [-2, -1, 2])],
        41 => [("r1", [4, -2, -1]), ("r2", [4, 3, -2]), ("r3", [3, 1, -3])],
        _ => panic!("no generators recorded for {q}"),
    };
    gens.iter()
        .map(|(l, c)| {
            let c: Vec<BigInt> = c.iter().map(|&x| x.into()).collect();
            PrimeIdeal::from_generator(ctx, &ctx.from_z(&c), l).unwrap()
        })
        .collect()
}

pub fn family_ii_r7() -> FreyFamily {
    FreyFamily::build(7, Family::II, &[1, 2]).unwrap()
}

pub fn descent_r7() -> FreyFamily {
    FreyFamily::build(7, Family::I, &[1, 2, 3]).unwrap().descend().unwrap()
}

pub fn r7_tables() -> (TraceTable, TraceTable) {
    let fam = family_ii_r7();
    let t13 = traces::grouped_table(&fam, &r7_primes(&fam.ctx, 13), Constraint::All).unwrap();
    let t41 = traces::grouped_table(&fam, &r7_primes(&fam.ctx, 41), Constraint::All).unwrap();
    (t13, t41)
}

/// Exact compatibility of a rational record with some class of the table:
/// every shared ideal matches the class's trace, or ±(N+1) at a
/// multiplicative class.
pub fn oracle_compatible(f: &NewformRecord, t: &TraceTable) -> bool {
    let vals: Vec<Option<i64>> = t
        .labels
        .iter()
        .map(|l| match f.eigenvalues.get(l) {
            Some(Eigenvalue::Rational(a)) => Some(a.try_into().unwrap()),
            Some(_) => panic!("oracle handles rational records only"),
            None => None,
        })
        .collect();
    t.rows.iter().any(|row| {
        row.entries.iter().zip(&vals).enumerate().all(|(i, (e, v))| match (e, v) {
            (_, None) => true,
            (Entry::Trace(t), Some(a)) => t == a,
            (Entry::Mult, Some(a)) => a.abs() as u64 == t.norms[i] + 1,
            (Entry::Add, Some(_)) => true,
        })
    })
}

pub struct Synthetic {
    pub records: Vec<NewformRecord>,
    pub planted: BTreeSet<String>,
    /// Compatible at the first table but not at the second.
    pub decoys: BTreeSet<String>,
}

fn record(label: String, ev: BTreeMap<String, i64>) -> NewformRecord {
    NewformRecord {
        field: NewformField::KPlus,
        label,
        level: vec![],
        degree: 1,
        eigenvalues: ev.into_iter().map(|(k, v)| (k, Eigenvalue::Rational(v.into()))).collect(),
        inertia: BTreeMap::new(),
    }
}

fn class_vector(t: &TraceTable, x: i64, y: i64) -> Vec<i64> {
    let (xm, ym) = (x.rem_euclid(t.q as i64) as u64, y.rem_euclid(t.q as i64) as u64);
    let row = t.rows.iter().find(|r| r.x == xm && r.y == ym).expect("class present");
    row.entries
        .iter()
        .enumerate()
        .map(|(i, e)| match e {
            Entry::Trace(v) => *v,
            _ => t.norms[i] as i64 + 1,
        })
        .collect()
}

fn random_vector(rng: &mut StdRng, t: &TraceTable) -> Vec<i64> {
    t.norms
        .iter()
        .map(|&n| {
            let h = (2.0 * (n as f64).sqrt()).floor() as i64;
            rng.random_range(-h..=h)
        })
        .collect()
}

fn with(t: &TraceTable, v: &[i64], into: &mut BTreeMap<String, i64>) {
    for (l, a) in t.labels.iter().zip(v) {
        into.insert(l.clone(), *a);
    }
}

/// Planted records carry the traces of genuine Frey curves E(a,b) at both
/// tables; decoys match a class of `t1` only; the rest are random vectors in
/// the Hasse range rejected whenever they happen to match a class of `t1`.
pub fn synthetic(t1: &TraceTable, t2: &TraceTable, planted: &[(i64, i64)], decoys: usize, random: usize, seed: u64) -> Synthetic {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Synthetic { records: vec![], planted: BTreeSet::new(), decoys: BTreeSet::new() };
    for &(a, b) in planted {
        let mut ev = BTreeMap::new();
        with(t1, &class_vector(t1, a, b), &mut ev);
        with(t2, &class_vector(t2, a, b), &mut ev);
        let label = format!("planted_{a}_{b}");
        out.planted.insert(label.clone());
        out.records.push(record(label, ev));
    }
    let mut n = 0;
    while out.decoys.len() < decoys {
        let row = &t1.rows[rng.random_range(0..t1.rows.len())];
        let mut ev = BTreeMap::new();
        with(t1, &class_vector(t1, row.x as i64, row.y as i64), &mut ev);
        with(t2, &random_vector(&mut rng, t2), &mut ev);
        let f = record(format!("decoy_{n}"), ev);
        n += 1;
        if !oracle_compatible(&f, t2) {
            out.decoys.insert(f.label.clone());
            out.records.push(f);
        }
    }
    let mut made = 0;
    while made < random {
        let mut ev = BTreeMap::new();
        with(t1, &random_vector(&mut rng, t1), &mut ev);
        with(t2, &random_vector(&mut rng, t2), &mut ev);
        let f = record(format!("random_{n}"), ev);
        n += 1;
        if !oracle_compatible(&f, t1) {
            out.records.push(f);
            made += 1;
        }
    }
    out
}
