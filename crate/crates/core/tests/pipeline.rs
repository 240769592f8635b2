use frey_sieve::config::{run_conductor, run_sieve, RunConfig, SieveReport};
use frey_sieve::numfield::PrimeIdeal;
use frey_sieve::sieve::{load_newforms, Eigenvalue, Status};
use std::collections::BTreeSet;
use std::path::PathBuf;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(name: &str) -> SieveReport {
    let cfg = RunConfig::load(root().join("configs").join(name)).unwrap();
    run_sieve(&cfg).unwrap()
}

fn exceptional(r: &SieveReport, label: &str) -> BTreeSet<u64> {
    let o = r.outcomes.iter().find(|o| o.label == label).unwrap();
    assert_eq!(o.status, Status::Eliminated, "{label}");
    o.exceptional.clone()
}

fn set(xs: &[u64]) -> BTreeSet<u64> {
    xs.iter().copied().collect()
}

#[test]
fn part_ii_fixture_contents() {
    let s = load_newforms(root().join("fixtures/r7_partII.nf")).unwrap();
    assert!(s.records.iter().all(|f| f.level_text() != "p7"));
    let q1 = |l: &str| s.records.iter().find(|f| f.label == l).unwrap().eigenvalues["q1"].clone();
    assert_eq!(q1("f_2p7"), Eigenvalue::Rational((-4).into()));
    let both: BTreeSet<String> = ["f_2p7sq", "g_2p7sq"].iter().map(|l| format!("{:?}", q1(l))).collect();
    assert_eq!(both.len(), 2);
}

#[test]
fn part_ii_eliminates_everything() {
    let r = run("r7_partII.toml");
    assert_eq!(exceptional(&r, "f_p7sq"), set(&[2, 3, 7]));
    assert_eq!(exceptional(&r, "f_2p7"), set(&[2, 3, 5]));
    assert_eq!(exceptional(&r, "f_2p7sq"), set(&[2, 3, 5]));
    assert_eq!(exceptional(&r, "g_2p7sq"), set(&[2, 3, 7]));
    assert!(r.success());
    assert!(r.bound.statement().contains("(1+3^18)^2"));
}

#[test]
fn part_iii_known_forms() {
    let r = run("r7_partIII.toml");
    assert_eq!(exceptional(&r, "f1"), set(&[2, 3]));
    assert_eq!(exceptional(&r, "f2"), set(&[2, 5]));
    assert_eq!(exceptional(&r, "g"), set(&[7, 31, 521, 607]));
    let g = &r.nonrational[0];
    let v = &g.values[0];
    assert_eq!(frey_sieve::sieve::to_i64s(&v.good), vec![-521, -49, 7]);
    assert_eq!(frey_sieve::sieve::to_i64s(&v.mult), vec![1519, -4249]);
}

#[test]
fn part_i_cases_bound_by_seven() {
    for c in ["r7_partI_case1.toml", "r7_partI_case2.toml", "r7_partI_case3.toml"] {
        let r = run(c);
        assert!(r.outcomes.iter().all(|o| o.status == Status::Eliminated), "{c}");
        let m = frey_sieve::sieve::max_exceptional(&r.outcomes);
        assert!(m <= 7, "{c}: {m}");
    }
    // the inertia mismatch rules out f_1_m1 irrespective of traces
    let r = run("r7_partI_case1.toml");
    let o = r.outcomes.iter().find(|o| o.label == "f_1_m1").unwrap();
    assert!(o.note.as_deref().unwrap().contains("Φ_7"));
}

#[test]
fn s2_values() {
    let r = run("r7_s2.toml");
    for (l, vals) in [("s2_a", vec![-1, 7]), ("s2_b", vec![-7, 1])] {
        let nr = r.nonrational.iter().find(|n| n.label == l).unwrap();
        assert_eq!(frey_sieve::sieve::to_i64s(&nr.values[0].good), vals);
        assert_eq!(nr.primes, set(&[7]));
    }
    assert_eq!(frey_sieve::sieve::max_exceptional(&r.outcomes), 7);
}

#[test]
fn conductor_config_mod_16() {
    let mut cfg = RunConfig::load(root().join("configs/r7_conductor_q.toml")).unwrap();
    cfg.modulus = Some(16);
    let classes = run_conductor(&cfg, &PrimeIdeal::rational(7, 2)).unwrap();
    let vals: BTreeSet<u32> = classes.summary().into_iter().flat_map(|(_, v)| v).collect();
    assert!(vals.is_subset(&set(&[2, 3, 4]).into_iter().map(|x| x as u32).collect()));
}
