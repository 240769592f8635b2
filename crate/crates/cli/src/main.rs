use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use frey_sieve::config::{self, RunConfig};
use frey_sieve::diophantine;
use frey_sieve::exec::{self, Mode};
use frey_sieve::frey::{self, BaseField, Family, FreyFamily};
use frey_sieve::localred;
use frey_sieve::numfield::{split_prime, FieldContext, PrimeIdeal, DEFAULT_GENERATOR_BOUND};
use frey_sieve::traces::{self, Constraint};
use num_bigint::BigInt;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "freysieve", version, about = "Modular-method toolkit for x^r + y^r = C z^p")]
struct Cli {
    /// Run every kernel on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Field data for K+ ⊂ Q(ζ_r) and the splitting of some primes.
    Field {
        #[arg(long)]
        r: u32,
        /// Comma-separated rational primes to split.
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        primes: Vec<u64>,
    },
    /// Build one Frey curve, print it with its conductor profile.
    #[command(allow_negative_numbers = true)]
    Frey {
        /// FAMILY R INDICES [SIGN] A B (alternative to the flags).
        spec: Vec<String>,
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long)]
        a: Option<i64>,
        #[arg(long)]
        b: Option<i64>,
        /// Trial-division bound for the discriminant norm.
        #[arg(long, default_value_t = 1_000_000)]
        bound: u64,
    },
    /// Conductor exponents over residue classes of (a, b).
    Conductor {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        curve: CurveArgs,
        /// Power of the prime: classes are taken mod this modulus.
        #[arg(long)]
        modulus: Option<u64>,
        #[arg(long, default_value_t = 2)]
        prime: u64,
        /// Skip the refinement check at the next power.
        #[arg(long)]
        no_refine: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trace table at the primes above q.
    Traces {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value = "all")]
        constraint: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Newform elimination driven by a config file.
    Sieve {
        #[arg(long)]
        config: PathBuf,
        /// Replace the config's newform files.
        #[arg(long)]
        newforms: Vec<PathBuf>,
        /// Replace the config's auxiliary primes (constraint "all").
        #[arg(long, value_delimiter = ',')]
        aux_primes: Vec<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// All (a, b) with |a|, |b| ≤ H and φ_r(a, b) ∈ {1, r}.
    Trivial {
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 1000)]
        h: i64,
    },
    /// Case A/B decomposition of a solution of a^r + b^r = C c^p.
    Solution {
        #[arg(long)]
        r: u32,
        #[arg(long = "C", default_value = "1")]
        big_c: BigInt,
        #[arg(long)]
        p: u32,
        #[arg(long, allow_negative_numbers = true)]
        a: BigInt,
        #[arg(long, allow_negative_numbers = true)]
        b: BigInt,
        #[arg(long, allow_negative_numbers = true)]
        c: BigInt,
    },
}

#[derive(Args, Clone, Default)]
struct CurveArgs {
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    r: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    indices: Vec<u32>,
    /// Descend family I to K0 (to Q when r = 7).
    #[arg(long)]
    descend: bool,
}

impl CurveArgs {
    fn build(&self) -> Result<FreyFamily> {
        let fam = self.family.as_deref().ok_or_else(|| anyhow!("--family is required"))?;
        let r = self.r.ok_or_else(|| anyhow!("--r is required"))?;
        let fam = FreyFamily::build(r, Family::parse(fam)?, &self.indices)?;
        Ok(if self.descend { fam.descend()? } else { fam })
    }
}

fn parse_indices(s: &str) -> Result<Vec<u32>> {
    s.split(',').map(|t| t.trim().parse().with_context(|| format!("bad index '{t}'"))).collect()
}

/// FAMILY R INDICES [+|-] A B
fn merge_spec(spec: &[String], curve: &mut CurveArgs, a: &mut Option<i64>, b: &mut Option<i64>) -> Result<()> {
    if spec.is_empty() {
        return Ok(());
    }
    let mut it = spec.iter();
    let mut family = it.next().unwrap().clone();
    let r = it.next().ok_or_else(|| anyhow!("missing r"))?;
    curve.r = Some(r.parse().context("bad r")?);
    curve.indices = parse_indices(it.next().ok_or_else(|| anyhow!("missing indices"))?)?;
    let mut rest: Vec<&String> = it.collect();
    if family == "III" {
        match rest.first().map(|s| s.as_str()) {
            Some(sign @ ("+" | "-")) => {
                family.push_str(sign);
                rest.remove(0);
            }
            _ => bail!("family III needs a sign: III 13 1 + a b"),
        }
    }
    curve.family = Some(family);
    match rest.as_slice() {
        [] => {}
        [x, y] => {
            *a = Some(x.parse().context("bad a")?);
            *b = Some(y.parse().context("bad b")?);
        }
        _ => bail!("expected FAMILY R INDICES [SIGN] A B"),
    }
    Ok(())
}

fn theta_to_z(c: &[num_rational::BigRational]) -> String {
    let v: Vec<String> = c
        .iter()
        .enumerate()
        .map(|(i, x)| if i % 2 == 1 { (-x).to_string() } else { x.to_string() })
        .collect();
    format!("z:[{}]", v.join(","))
}

fn cmd_field(r: u32, primes: &[u64]) -> Result<ExitCode> {
    let ctx = FieldContext::new(r)?;
    println!("r {r}");
    println!("K+ degree {}", ctx.kplus_degree());
    let mp: Vec<String> = ctx.theta_minpoly().iter().map(|c| c.to_string()).collect();
    println!("theta minpoly [{}]", mp.join(","));
    println!("K0 {}", ctx.k0_degree().map_or("none".into(), |d| format!("degree {d}")));
    println!("k {}", ctx.k_degree().map_or("none".into(), |d| format!("degree {d}")));
    let pi = PrimeIdeal::pi_r(&ctx);
    println!("pi_r {} {} norm {} e {}", pi.label, theta_to_z(&ctx.to_theta(&pi.generator)?), pi.norm(), pi.e);
    for &q in primes {
        if q == r as u64 {
            continue;
        }
        let ps = split_prime(&ctx, q, DEFAULT_GENERATOR_BOUND)?;
        let kind = if ps.len() == 1 { "inert" } else if ps[0].f == 1 { "split" } else { "partially split" };
        println!("prime {q}: {kind}, {} ideal(s) of residue degree {}", ps.len(), ps[0].f);
        for p in &ps {
            println!("  {} {}", p.label, theta_to_z(&ctx.to_theta(&p.generator)?));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_frey(curve: &CurveArgs, a: i64, b: i64, bound: u64) -> Result<ExitCode> {
    let fam = curve.build()?;
    let e = fam.at_i64(a, b);
    print!("{}", e.to_text());
    if matches!(fam.family, Family::IIIPlus | Family::IIIMinus) {
        for (label, va, vb) in frey::unit_report(&fam, &frey::unit_test_primes(&fam.ctx, &[])?)? {
            println!("unit {label} v(alpha)={va} v(beta)={vb}");
        }
    }
    if e.singular {
        return Ok(ExitCode::SUCCESS);
    }
    if fam.base == BaseField::K0 {
        println!("conductor: not available over K0");
        return Ok(ExitCode::SUCCESS);
    }
    let support = localred::default_support(&e, bound)?;
    let prof = localred::conductor_profile(&e, &support)?;
    for d in &prof.entries {
        let vc = |v: Option<i64>| v.map_or("inf".to_string(), |v| v.to_string());
        let kod = d.kodaira.map_or(String::new(), |k| format!(" {k}"));
        println!(
            "local {} v(c4)={} v(c6)={} v(disc)={} {:?}{} exponent {}",
            d.label,
            vc(d.vc4),
            vc(d.vc6),
            d.vdisc,
            d.reduction,
            kod,
            d.exponent
        );
    }
    println!("conductor {}", prof.formal());
    Ok(ExitCode::SUCCESS)
}

fn cmd_conductor(fam: &FreyFamily, p: &PrimeIdeal, k: u32, refine: bool, out: Option<&PathBuf>) -> Result<ExitCode> {
    let t = localred::enumerate_conductor_classes(fam, p, k, refine)?;
    println!("conductor exponents at {} over {} classes mod {}^{}", p.label, t.rows.len(), p.q, k);
    for (key, set) in t.summary() {
        println!("  {:<16} {:?}", key.describe(), set);
    }
    if p.q == 2 {
        if let (Some(e01), Some(e1m1), Some(e11)) = (
            t.rows.iter().find(|r| r.0 == (0, 1)).map(|r| r.1),
            t.rows.iter().find(|r| r.0 == (1, (1u64 << k) as i64 - 1)).map(|r| r.1),
            t.rows.iter().find(|r| r.0 == (1, 1)).map(|r| r.1),
        ) {
            println!("  (0,1) -> {e01}, (1,-1) -> {e1m1}, (1,1) -> {e11}");
        }
    }
    if refine {
        if t.unstable.is_empty() {
            println!("stable under refinement to {}^{}", p.q, k + 1);
        } else {
            println!("UNSTABLE classes: {:?}", t.unstable);
        }
    }
    if let Some(path) = out {
        std::fs::write(path, t.to_text())?;
    }
    Ok(if t.unstable.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(3) })
}

fn cmd_traces(curve: &CurveArgs, q: u64, constraint: &str, out: Option<&PathBuf>) -> Result<ExitCode> {
    let fam = curve.build()?;
    let c: Constraint = constraint.parse()?;
    let t = traces::grouped_table(&fam, &traces::primes_above(&fam, q)?, c)?;
    match out {
        Some(path) => std::fs::write(path, t.to_text())?,
        None => print!("{}", t.to_text()),
    }
    for (i, l) in t.labels.iter().enumerate() {
        println!("# traces at {l}: {:?}", t.traces_at(i));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sieve(path: &PathBuf, newforms: &[PathBuf], aux: &[u64], out: Option<&PathBuf>) -> Result<ExitCode> {
    let mut cfg = RunConfig::load(path)?;
    if !newforms.is_empty() {
        cfg.newforms = newforms.to_vec();
    }
    if !aux.is_empty() {
        cfg.aux = aux.iter().map(|&q| config::AuxPrime { q, constraint: "all".into() }).collect();
    }
    let report = config::run_sieve(&cfg)?;
    let text = report.to_text();
    print!("{text}");
    if let Some(p) = out.or(cfg.out.as_ref()) {
        std::fs::write(p, &text)?;
    }
    Ok(if report.success() { ExitCode::SUCCESS } else { ExitCode::from(3) })
}

fn run(cli: Cli) -> Result<ExitCode> {
    if cli.sequential {
        exec::set_mode(Mode::Sequential);
    }
    match cli.cmd {
        Cmd::Field { r, primes } => cmd_field(r, &primes),
        Cmd::Frey { spec, mut curve, mut a, mut b, bound } => {
            merge_spec(&spec, &mut curve, &mut a, &mut b)?;
            let (a, b) = a.zip(b).ok_or_else(|| anyhow!("a and b are required"))?;
            cmd_frey(&curve, a, b, bound)
        }
        Cmd::Conductor { config, curve, modulus, prime, no_refine, out } => {
            let (fam, modulus) = match config {
                Some(path) => {
                    let cfg = RunConfig::load(path)?;
                    (cfg.build_family()?, modulus.or(cfg.modulus))
                }
                None => (curve.build()?, modulus),
            };
            let modulus = modulus.ok_or_else(|| anyhow!("--modulus is required"))?;
            let k = config::exponent_of(modulus, prime)?;
            let p = if fam.base == BaseField::Q {
                PrimeIdeal::rational(fam.r(), prime)
            } else {
                let ps = split_prime(&fam.ctx, prime, DEFAULT_GENERATOR_BOUND)?;
                if ps.len() != 1 {
                    bail!("{prime} is not inert in K+; residual enumeration needs an inert prime");
                }
                ps.into_iter().next().unwrap()
            };
            cmd_conductor(&fam, &p, k, !no_refine, out.as_ref())
        }
        Cmd::Traces { curve, q, constraint, out } => cmd_traces(&curve, q, &constraint, out.as_ref()),
        Cmd::Sieve { config, newforms, aux_primes, out } => cmd_sieve(&config, &newforms, &aux_primes, out.as_ref()),
        Cmd::Trivial { r, h } => {
            for (a, b, v) in diophantine::search_trivial(r, h) {
                println!("{a} {b} {v:?}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Solution { r, big_c, p, a, b, c } => {
            let s = diophantine::classify_solution(r, &big_c, p, &a, &b, &c, 1_000_000)?;
            println!("case {:?}", s.case);
            println!("trivial {}", s.trivial);
            println!("k {}", s.k.map_or("none (a+b=0)".into(), |k| k.to_string()));
            println!("c0 {}", s.c0);
            println!("c {}", s.c);
            println!("phi {}", s.phi);
            for f in &s.factors {
                println!("factor k={} v_pi={} value {}", f.k, f.pi_r_valuation, f.value);
            }
            println!("c primes {:?} {:?}", s.c_primes, s.status);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
