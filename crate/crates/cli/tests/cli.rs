use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freysieve")).args(args).current_dir(root()).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn field_reports_splitting() {
    let o = run(&["field", "--r", "7", "--primes", "2,13,41"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("inert"), "{s}");
    assert!(s.contains("13"));
}

#[test]
fn frey_descended_curve() {
    let o = run(&["frey", "I", "7", "1,2,3", "0", "1", "--descend"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("-3024") && s.contains("12096"), "{s}");
}

#[test]
fn frey_flag_form_matches_positional() {
    let a = run(&["frey", "II", "7", "1,2", "3", "4"]);
    let b = run(&["frey", "--family", "II", "--r", "7", "--indices", "1,2", "--a", "3", "--b", "4"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn sieve_part_ii() {
    let o = run(&["sieve", "--config", "configs/r7_partII.toml"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(!s.contains("SURVIVOR"), "{s}");
    assert!(s.contains("(1+3^18)^2"));
}

#[test]
fn sieve_sequential_matches_parallel() {
    let a = run(&["sieve", "--config", "configs/r7_partIII.toml"]);
    let b = run(&["--sequential", "sieve", "--config", "configs/r7_partIII.toml"]);
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).contains("{7, 31, 521, 607}"));
}

#[test]
fn traces_writes_a_table() {
    let dir = std::env::temp_dir().join(format!("freysieve-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("t3.txt");
    let o = run(&[
        "traces", "--family", "I", "--r", "7", "--indices", "1,2,3", "--descend", "--q", "3",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = std::fs::read_to_string(&out).unwrap();
    assert!(t.starts_with("family"), "{t}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn trivial_search() {
    let o = run(&["trivial", "--r", "7", "--h", "50"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().filter(|l| l.trim_start().starts_with(|c: char| c == '-' || c.is_ascii_digit())).count(), 8, "{}", stdout(&o));
}

#[test]
fn bad_input_exits_with_2() {
    let o = run(&["frey", "I", "9", "1,2,3", "0", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["sieve", "--config", "configs/does_not_exist.toml"]);
    assert_eq!(o.status.code(), Some(2));
}
