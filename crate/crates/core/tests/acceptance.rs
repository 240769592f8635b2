//! Acceptance harness: one PASS/FAIL line per criterion.
//!
//! All arithmetic is exact, so every check is an equality or a set
//! inclusion; the only numeric tolerances are the wall-clock budgets below.

mod common;

use common::*;
use frey_sieve::config::{run_sieve, RunConfig};
use frey_sieve::diophantine::{phi_eval, search_trivial, TrivialValue};
use frey_sieve::frey::{suitable_triples, Family, FreyFamily};
use frey_sieve::localred::{enumerate_conductor_classes, phi_group_order, ClassKey};
use frey_sieve::numfield::{split_prime, FieldContext, PrimeIdeal};
use frey_sieve::poly::{BinaryForm, Ring};
use frey_sieve::sieve::{self, eliminate, nonrational_bound, Eigenvalue, NewformField, NewformRecord, Status};
use frey_sieve::traces::{count_trace, grouped_table, trace_spectrum, Constraint, Entry};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Pow;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

type Check = std::result::Result<String, String>;

const BUDGET_IDENTITIES: Duration = Duration::from_secs(30);
const BUDGET_CONDUCTOR: Duration = Duration::from_secs(120);
const BUDGET_PROPERTIES: Duration = Duration::from_secs(60);
const BUDGET_DEFAULT: Duration = Duration::from_secs(120);
const RANDOM_CURVES: usize = 1000;
const SEED: u64 = 0x5eed;

macro_rules! ensure {
    ($c:expr, $($m:tt)*) => {
        if !$c {
            return Err(format!($($m)*));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn ints(xs: &[i64]) -> BTreeSet<i64> {
    xs.iter().copied().collect()
}

fn c1_identities() -> Check {
    let mut n = 0;
    for r in [7u32, 11, 13, 17, 19] {
        let ctx = std::sync::Arc::new(FieldContext::new(r).map_err(err)?);
        for t in suitable_triples(r) {
            let f = FreyFamily::family_i(ctx.clone(), t).map_err(err)?;
            let s = f.abc[0].add(&f.abc[1]).add(&f.abc[2]);
            ensure!(s.is_zero(), "family I {t:?} at r={r}");
            n += 1;
        }
        let d = (r - 1) / 2;
        for k1 in 1..=d {
            for k2 in k1 + 1..=d {
                let f = FreyFamily::family_ii(ctx.clone(), (k1, k2)).map_err(err)?;
                ensure!(f.abc[0].add(&f.abc[1]).add(&f.abc[2]).is_zero(), "family II ({k1},{k2}) at r={r}");
                n += 1;
            }
        }
        if r % 4 == 1 {
            for k1 in 1..=d {
                for plus in [true, false] {
                    let f = FreyFamily::family_iii(ctx.clone(), k1, plus).map_err(err)?;
                    let s = if plus {
                        BinaryForm::sum_xy(r)
                    } else {
                        BinaryForm::new(r, vec![ctx.one(), ctx.int(-1)])
                    };
                    ensure!(f.abc[0].add(&f.abc[1]) == s.mul(&s), "family III k1={k1} plus={plus} at r={r}");
                    n += 1;
                }
            }
        }
    }
    Ok(format!("{n} identities"))
}

fn c2_descent() -> Check {
    let fam = descent_r7();
    let (a4, a6) = fam.integer_short_model().ok_or("descended model is not integral")?;
    let v = |c: &[i64], s: i64| c.iter().map(|&x| BigInt::from(x * s)).collect::<Vec<_>>();
    ensure!(a4 == v(&[1, -1, 3, -1, 1], -3024), "a4 = {a4:?}");
    ensure!(a6 == v(&[1, -15, 15, -29, 15, -15, 1], 12096), "a6 = {a6:?}");
    Ok("a4, a6 match".into())
}

fn c3_spectra() -> Check {
    let fam = descent_r7();
    let cases: [(u64, Constraint, &[i64]); 5] = [
        (3, Constraint::All, &[-1, 3]),
        (5, Constraint::All, &[-3, -1, 1, 3]),
        (23, Constraint::All, &[-9, -7, -5, -1, 1, 3]),
        (3, Constraint::SumZero, &[-1]),
        (5, Constraint::SumZero, &[-1]),
    ];
    for (l, c, want) in cases {
        let got = trace_spectrum(&fam, l, c).map_err(err)?;
        ensure!(got == ints(want), "spectrum at {l} [{c}] = {got:?}");
    }
    for (a, b, l, t) in [(1, 1, 3, 3), (0, 1, 5, -3), (1, -1, 5, -1)] {
        let got = count_trace(&fam.at_i64(a, b), &PrimeIdeal::rational(7, l)).map_err(err)?;
        ensure!(got == Entry::Trace(t), "a_{l}(E({a},{b})) = {got}");
    }
    Ok("5 spectra, 3 values".into())
}

fn c4_conductor() -> Check {
    let fam = descent_r7();
    let two = PrimeIdeal::rational(7, 2);
    let classes = enumerate_conductor_classes(&fam, &two, 8, true).map_err(err)?;
    ensure!(classes.unstable.is_empty(), "unstable classes {:?}", classes.unstable);
    let want: BTreeMap<ClassKey, BTreeSet<u32>> = [
        (ClassKey::OddSumEvenDiv4, 2),
        (ClassKey::OddSumEvenNotDiv4, 3),
        (ClassKey::SumExactly2, 4),
        (ClassKey::SumDiv4, 3),
    ]
    .into_iter()
    .map(|(k, e)| (k, [e].into()))
    .collect();
    ensure!(classes.summary() == want, "summary {:?}", classes.summary());
    for ((a, b), s) in [((0, 1), 2), ((1, -1), 3), ((1, 1), 4)] {
        let e = fam.at_i64(a, b);
        let m = e.rational_model().ok_or("not rational")?;
        let t = frey_sieve::localred::tate_q(&m, 2).map_err(err)?;
        ensure!(t.exponent == s, "E({a},{b}) has 2-exponent {}", t.exponent);
    }
    Ok(format!("{} classes mod 2^8, refined to 2^9", classes.rows.len()))
}

fn c5_inertia() -> Check {
    let fam = descent_r7();
    let seven = PrimeIdeal::rational(7, 7);
    let o = phi_group_order(&fam.at_i64(1, -1), &seven).map_err(err)?;
    ensure!(o == 3, "|Φ| = {o} at (1,-1)");
    let mut n = 0;
    for a in -20i64..=20 {
        for b in -20i64..=20 {
            if a.gcd(&b) != 1 || (a + b) % 7 == 0 {
                continue;
            }
            let e = fam.at_i64(a, b);
            if e.singular {
                continue;
            }
            let o = phi_group_order(&e, &seven).map_err(err)?;
            ensure!(o == 6, "|Φ| = {o} at ({a},{b})");
            n += 1;
        }
    }
    Ok(format!("{n} sampled classes"))
}

fn c6_family_ii() -> Check {
    let fam = family_ii_r7();
    let t = grouped_table(&fam, &r7_primes(&fam.ctx, 13), Constraint::All).map_err(err)?;
    let q1 = t.traces_at(0);
    ensure!(q1.is_subset(&ints(&[-6, -2, 2])), "a_q1 values {q1:?}");
    let bad = vec![Entry::Trace(-2); 3];
    ensure!(t.rows.iter().all(|r| r.entries != bad), "(-2,-2,-2) occurs");
    let cfg = RunConfig::load(root().join("configs/r7_partII.toml")).map_err(err)?;
    let rep = run_sieve(&cfg).map_err(err)?;
    ensure!(rep.outcomes.len() == 4, "{} records", rep.outcomes.len());
    for o in &rep.outcomes {
        ensure!(o.status == Status::Eliminated, "{} survives", o.label);
        ensure!(o.exceptional.is_subset(&[2, 3, 5, 7].into()), "{}: {:?}", o.label, o.exceptional);
    }
    Ok(format!("max exceptional prime {}", sieve::max_exceptional(&rep.outcomes)))
}

fn c7_worked_example() -> Check {
    let (t13, _) = r7_tables();
    let p: Vec<BigInt> = [7, 10, -7, 1].iter().map(|&x| x.into()).collect();
    let g = NewformRecord {
        field: NewformField::KPlus,
        label: "g".into(),
        level: vec![],
        degree: 3,
        eigenvalues: [(t13.labels[0].clone(), Eigenvalue::MinPoly(p))].into(),
        inertia: BTreeMap::new(),
    };
    let nb = nonrational_bound(&g, &[t13]).map_err(err)?;
    let v = &nb.values[0];
    ensure!(v.traces == ints(&[-6, -2, 2]), "traces {:?}", v.traces);
    ensure!(sieve::to_i64s(&v.good) == vec![-521, -49, 7], "good {:?}", v.good);
    ensure!(sieve::to_i64s(&v.mult) == vec![1519, -4249], "mult {:?}", v.mult);
    ensure!(nb.primes == [7, 31, 521, 607].into(), "primes {:?}", nb.primes);
    Ok("{-521,-49,7} ∪ {1519,-4249}; primes {7,31,521,607}".into())
}

fn c8_s2() -> Check {
    let cfg = RunConfig::load(root().join("configs/r7_s2.toml")).map_err(err)?;
    let rep = run_sieve(&cfg).map_err(err)?;
    for (l, want) in [("s2_a", vec![-1, 7]), ("s2_b", vec![-7, 1])] {
        let nb = rep.nonrational.iter().find(|n| n.label == l).ok_or(format!("{l} missing"))?;
        ensure!(nb.values[0].traces == ints(&[-1, 3]), "{l} traces {:?}", nb.values[0].traces);
        ensure!(sieve::to_i64s(&nb.values[0].good) == want, "{l} values {:?}", nb.values[0].good);
    }
    let m = sieve::max_exceptional(&rep.outcomes);
    ensure!(rep.outcomes.iter().all(|o| o.status == Status::Eliminated) && m <= 7, "max exceptional {m}");
    Ok("eliminated for p > 7".into())
}

fn c9_properties() -> Check {
    let mut rng = StdRng::seed_from_u64(SEED);
    // Hasse on every stored trace
    let (t13, t41) = r7_tables();
    let mut stored = 0;
    for t in [&t13, &t41] {
        for row in &t.rows {
            for (i, e) in row.entries.iter().enumerate() {
                if let Entry::Trace(a) = e {
                    ensure!(((a * a) as u64) <= 4 * t.norms[i], "Hasse fails at {} ({},{})", t.labels[i], row.x, row.y);
                    stored += 1;
                }
            }
        }
    }
    // syzygy on random curves from every family
    let fams = [
        descent_r7(),
        family_ii_r7(),
        FreyFamily::build(7, Family::I, &[1, 2, 3]).map_err(err)?,
        FreyFamily::build(13, Family::IIIPlus, &[1]).map_err(err)?,
        FreyFamily::build(11, Family::II, &[1, 3]).map_err(err)?,
    ];
    for i in 0..RANDOM_CURVES {
        let f = &fams[i % fams.len()];
        let (a, b) = (rng.random_range(-500i64..=500), rng.random_range(-500i64..=500));
        ensure!(f.at_i64(a, b).invariants().syzygy_defect().is_zero(), "syzygy at ({a},{b})");
    }
    // Galois equivariance
    let fam = family_ii_r7();
    let primes = split_prime(&fam.ctx, 29, 5).map_err(err)?;
    for _ in 0..20 {
        let (a, b) = (rng.random_range(-50i64..=50), rng.random_range(1i64..=50));
        let e = fam.at_i64(a, b);
        if e.singular || a.gcd(&b) != 1 {
            continue;
        }
        for s in [2i64, 3] {
            let es = e.galois(s).map_err(err)?;
            ensure!(es.c4 == e.c4.galois(s).map_err(err)? && es.disc == e.disc.galois(s).map_err(err)?, "invariants");
            for p in &primes {
                let sp = PrimeIdeal::from_generator(&fam.ctx, &p.generator.galois(s).map_err(err)?, "s").map_err(err)?;
                ensure!(count_trace(&e, p).map_err(err)? == count_trace(&es, &sp).map_err(err)?, "trace at ({a},{b})");
            }
        }
    }
    // cyclotomic identity
    for r in [5u32, 7, 11, 13, 17, 19] {
        for _ in 0..50 {
            let x = BigInt::from(rng.random_range(-10_000i64..=10_000));
            let y = BigInt::from(rng.random_range(-10_000i64..=10_000));
            ensure!((&x + &y) * phi_eval(r, &x, &y) == Pow::pow(&x, r) + Pow::pow(&y, r), "phi_{r}");
        }
    }
    // trivial solutions
    let found: Vec<(i64, i64, TrivialValue)> = search_trivial(7, 1000);
    let one = TrivialValue::One;
    let want = vec![
        (-1, -1, one),
        (-1, 0, one),
        (-1, 1, TrivialValue::R),
        (0, -1, one),
        (0, 1, one),
        (1, -1, TrivialValue::R),
        (1, 0, one),
        (1, 1, one),
    ];
    ensure!(found == want, "trivial pairs {found:?}");
    Ok(format!("{stored} stored traces, {RANDOM_CURVES} curves, 8 trivial pairs"))
}

fn c10_synthetic() -> Check {
    let (t13, t41) = r7_tables();
    let mut checked = 0;
    for seed in 0..4u64 {
        let s = synthetic(&t13, &t41, &[(3, 4), (1, 6), (5, -2)], 10, 40, seed);
        let one = eliminate(&s.records, &[t13.clone()]).map_err(err)?;
        let two = eliminate(&s.records, &[t13.clone(), t41.clone()]).map_err(err)?;
        for ((f, a), b) in s.records.iter().zip(&one).zip(&two) {
            let planted = s.planted.contains(&f.label);
            ensure!((b.status == Status::Survivor) == planted, "{} with 13 and 41", f.label);
            ensure!((a.status == Status::Survivor) == (planted || s.decoys.contains(&f.label)), "{} with 13", f.label);
            ensure!(a.status == Status::Survivor || b.status == Status::Eliminated, "monotonicity for {}", f.label);
            checked += 1;
        }
    }
    Ok(format!(
        "{checked} synthetic records; the 462- and 152-record Hilbert newform datasets and the 12289/10753/86017-dimensional spaces are not reproducible here"
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check, Duration); 10] = [
        ("symbolic identities", c1_identities, BUDGET_IDENTITIES),
        ("descent coefficients", c2_descent, BUDGET_DEFAULT),
        ("trace spectra", c3_spectra, BUDGET_DEFAULT),
        ("conductor table mod 2^8", c4_conductor, BUDGET_CONDUCTOR),
        ("inertia orders", c5_inertia, BUDGET_DEFAULT),
        ("family II elimination", c6_family_ii, BUDGET_DEFAULT),
        ("non-rational worked example", c7_worked_example, BUDGET_DEFAULT),
        ("S2 elimination", c8_s2, BUDGET_DEFAULT),
        ("property suites", c9_properties, BUDGET_PROPERTIES),
        ("synthetic datasets", c10_synthetic, BUDGET_DEFAULT),
    ];
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = f();
        let dt = t.elapsed();
        let res = match res {
            Ok(m) if dt > *budget => Err(format!("{m}; took {dt:.1?} > {budget:?}")),
            r => r,
        };
        match res {
            Ok(m) => println!("criterion {:>2}: PASS  {name}: {m} ({dt:.1?})", i + 1),
            Err(m) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name}: {m} ({dt:.1?})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
