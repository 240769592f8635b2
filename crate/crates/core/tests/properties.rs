mod common;

use common::*;
use frey_sieve::diophantine::phi_eval;
use frey_sieve::exec::{self, Mode};
use frey_sieve::frey::{Family, FreyFamily};
use frey_sieve::numfield::{split_prime, PrimeIdeal};
use frey_sieve::sieve::{a_xy, b_q, eliminate, Eigenvalue, NewformField, NewformRecord, Status};
use frey_sieve::traces::{count_trace, grouped_table, Constraint, Entry};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Pow, Signed, Zero};
use proptest::prelude::*;
use std::collections::BTreeMap;
use std::sync::OnceLock;

fn tables() -> &'static (frey_sieve::traces::TraceTable, frey_sieve::traces::TraceTable) {
    static T: OnceLock<(frey_sieve::traces::TraceTable, frey_sieve::traces::TraceTable)> = OnceLock::new();
    T.get_or_init(r7_tables)
}

fn fam_ii() -> &'static FreyFamily {
    static F: OnceLock<FreyFamily> = OnceLock::new();
    F.get_or_init(family_ii_r7)
}

fn coprime() -> impl Strategy<Value = (i64, i64)> {
    (-60i64..=60, -60i64..=60).prop_filter("coprime, nonzero", |&(a, b)| a.gcd(&b) == 1 && a != 0 && b != 0 && a != b && a != -b)
}

fn rational(label: &str, ev: &[(String, i64)]) -> NewformRecord {
    NewformRecord {
        field: NewformField::KPlus,
        label: label.into(),
        level: vec![],
        degree: 1,
        eigenvalues: ev.iter().map(|(l, a)| (l.clone(), Eigenvalue::Rational((*a).into()))).collect(),
        inertia: BTreeMap::new(),
    }
}

/// Integer determinant by fraction-free elimination.
fn bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::from(1);
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn syzygy_holds_on_descended_curves(a in -10_000i64..10_000, b in -10_000i64..10_000) {
        static F: OnceLock<FreyFamily> = OnceLock::new();
        let fam = F.get_or_init(descent_r7);
        let e = fam.at_i64(a, b);
        prop_assert!(e.invariants().syzygy_defect().is_zero());
    }

    #[test]
    fn cyclotomic_identity(r in prop::sample::select(vec![5u32, 7, 11, 13, 17, 19]), x in -1000i64..1000, y in -1000i64..1000) {
        let (x, y) = (BigInt::from(x), BigInt::from(y));
        let lhs = (&x + &y) * phi_eval(r, &x, &y);
        prop_assert_eq!(lhs, Pow::pow(&x, r) + Pow::pow(&y, r));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn syzygy_holds_over_kplus(r in prop::sample::select(vec![7u32, 11, 13]), (a, b) in coprime()) {
        let fam = FreyFamily::build(r, Family::I, &frey_sieve::frey::suitable_triples(r)[0]).unwrap();
        prop_assert!(fam.at_i64(a, b).invariants().syzygy_defect().is_zero());
    }

    #[test]
    fn traces_obey_hasse((a, b) in coprime(), q in prop::sample::select(vec![13u64, 29, 41, 43])) {
        let fam = fam_ii();
        let e = fam.at_i64(a, b);
        prop_assume!(!e.singular);
        for p in split_prime(&fam.ctx, q, 5).unwrap() {
            if let Entry::Trace(t) = count_trace(&e, &p).unwrap() {
                prop_assert!((t * t) as u64 <= 4 * p.norm(), "a = {} at {}", t, p.label);
            }
        }
    }

    #[test]
    fn traces_are_galois_equivariant((a, b) in coprime(), s in prop::sample::select(vec![2i64, 3])) {
        let fam = fam_ii();
        let e = fam.at_i64(a, b);
        prop_assume!(!e.singular);
        let es = e.galois(s).unwrap();
        for p in split_prime(&fam.ctx, 29, 5).unwrap() {
            let sp = PrimeIdeal::from_generator(&fam.ctx, &p.generator.galois(s).unwrap(), "s").unwrap();
            prop_assert_eq!(count_trace(&e, &p).unwrap(), count_trace(&es, &sp).unwrap());
            let v = p.valuation(&e.disc).unwrap();
            prop_assert_eq!(v, sp.valuation(&es.disc).unwrap());
        }
    }

    #[test]
    fn a_xy_nonnegative_and_b_q_zero_iff_some_class_fits(ev in prop::collection::vec(-7i64..=7, 3)) {
        let (t13, _) = tables();
        let labels: Vec<(String, i64)> = t13.labels.iter().cloned().zip(ev).collect();
        let f = rational("f", &labels);
        let vals: Vec<BigInt> = (0..t13.rows.len()).map(|i| a_xy(&f, t13, i).unwrap()).collect();
        prop_assert!(vals.iter().all(|v| !v.is_negative()));
        let bq = b_q(&f, t13).unwrap();
        prop_assert_eq!(bq.value.is_zero(), vals.iter().any(|v| v.is_zero()));
        prop_assert_eq!(bq.value.is_zero(), oracle_compatible(&f, t13));
    }

    #[test]
    fn degree_one_polynomials_match_rationals(ev in prop::collection::vec(-7i64..=7, 3)) {
        let (t13, _) = tables();
        let labels: Vec<(String, i64)> = t13.labels.iter().cloned().zip(ev.iter().copied()).collect();
        let f = rational("f", &labels);
        let mut g = f.clone();
        for (l, a) in &labels {
            g.eigenvalues.insert(l.clone(), Eigenvalue::MinPoly(vec![BigInt::from(-a), 1.into()]));
        }
        for i in 0..t13.rows.len() {
            prop_assert_eq!(a_xy(&f, t13, i).unwrap(), a_xy(&g, t13, i).unwrap());
        }
    }

    #[test]
    fn norm_difference_is_a_determinant(c in prop::collection::vec(-20i64..=20, 1..5), t in -30i64..=30) {
        // P(t) = det(tI − C) for the companion matrix C of a monic P
        let mut p: Vec<BigInt> = c.iter().map(|&x| x.into()).collect();
        p.push(1.into());
        let n = c.len();
        let mut m = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            m[i][i] = t.into();
            if i + 1 < n {
                m[i + 1][i] = (-1).into();
            }
            m[i][n - 1] += &p[i];
        }
        let ev = Eigenvalue::MinPoly(p);
        prop_assert_eq!(ev.norm_diff(&t.into()), bareiss(m).abs());
    }

    #[test]
    fn elimination_is_monotone(seed in any::<u64>()) {
        let (t13, t41) = tables();
        let s = synthetic(t13, t41, &[], 2, 6, seed);
        let one = eliminate(&s.records, std::slice::from_ref(t13)).unwrap();
        let two = eliminate(&s.records, &[t13.clone(), t41.clone()]).unwrap();
        for (a, b) in one.iter().zip(&two) {
            prop_assert!(a.status == Status::Survivor || b.status == Status::Eliminated);
        }
    }
}

#[test]
fn sequential_and_parallel_agree() {
    let fam = fam_ii();
    let primes = r7_primes(&fam.ctx, 13);
    exec::set_mode(Mode::Sequential);
    let seq = grouped_table(fam, &primes, Constraint::All).unwrap().to_text();
    let s = synthetic(&tables().0, &tables().1, &[(3, 4)], 3, 10, 5);
    let seq_e = format!("{:?}", eliminate(&s.records, &[tables().0.clone(), tables().1.clone()]).unwrap());
    exec::set_mode(Mode::Parallel);
    let par = grouped_table(fam, &primes, Constraint::All).unwrap().to_text();
    let par_e = format!("{:?}", eliminate(&s.records, &[tables().0.clone(), tables().1.clone()]).unwrap());
    assert_eq!(seq, par);
    assert_eq!(seq_e, par_e);
}
