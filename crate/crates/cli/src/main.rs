//! `forge`: build, verify and sweep generic elements; run the congruence
//! and cuspidality checks from the command line.
//!
//! Exit codes: 0 pass, 1 a verification failed (the report is still
//! written), 2 invalid input.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use forge_core::congruence::linalg::Mat;
use forge_core::congruence::{
    decompose_rational, nonconstant_check, quotient_map_check, verify_congruence_theorem,
    FiniteModel, ModelConfig, NonconstantOutcome,
};
use forge_core::cuspcheck::{
    cusp_battery, cusp_integral_check, elliptic_seed, fourier_support_check,
    homomorphism_threshold, lambda_character, sample_elements, TruncatedMatrix,
};
use forge_core::depthcalc::{
    character_image_order, level_window, torus_power_filtration, DepthError, FilteredLattice,
};
use forge_core::rootsys::{DiagramAutomorphism, RootSystemType};
use forge_core::sweep::{run_sweep, SweepConfig};
use forge_core::toraldata::{
    build_generic_element, format_rational, parse_rational, verify, BuildOptions, DatumJson,
    GenericityReport, ZeroToralDatum,
};

#[derive(Parser)]
#[command(
    name = "forge",
    version,
    about = "Generic elements, congruences and cusp checks"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a generic element and verify it.
    Build(BuildArgs),
    /// Re-verify a datum written by `build`.
    Verify(VerifyArgs),
    /// Build and verify over a grid of types and primes.
    Sweep(SweepArgs),
    /// Check the congruence theorem on a finite model.
    Congruence(CongruenceArgs),
    /// Check the cuspidality of the type-theoretic character.
    Cusp(CuspArgs),
    /// Level windows and character image orders.
    Depth(DepthArgs),
}

#[derive(Args)]
struct BuildArgs {
    /// Root system type, e.g. E6, D5, B3.
    #[arg(long = "type")]
    ty: RootSystemType,
    #[arg(long)]
    p: u64,
    /// Residue field size; defaults to p.
    #[arg(long)]
    q: Option<u64>,
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long)]
    ramified: bool,
    /// Diagram automorphism: `id`, `std`, or a comma-separated permutation.
    #[arg(long, default_value = "id")]
    delta: String,
    /// Write the datum here.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    file: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated types, or `all`.
    #[arg(long, default_value = "all")]
    types: String,
    /// Rank bound for `--types all`.
    #[arg(long, default_value_t = 8)]
    max_rank: usize,
    #[arg(long, default_value_t = 2)]
    primes_per_type: usize,
    /// Explicit primes, replacing `--primes-per-type`.
    #[arg(long, value_delimiter = ',')]
    primes: Vec<u64>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    q_powers: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    n: Vec<u32>,
    #[arg(long)]
    ramified: bool,
    #[arg(long)]
    twist: bool,
    /// Worker threads; `FORGE_JOBS` overrides this.
    #[arg(long)]
    jobs: Option<usize>,
    /// A JSON sweep config; replaces the grid flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    json: bool,
    /// Add a per-row milliseconds column.
    #[arg(long)]
    timing: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CongruenceArgs {
    /// Built-in model: heisenberg, trivial-lambda, non-free.
    #[arg(long, default_value = "heisenberg")]
    model: String,
    /// A JSON model config; replaces `--model`, `--p`, `--m`.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    p: u64,
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// Number of copies of the coefficients.
    #[arg(short = 'N', long = "copies", default_value_t = 1)]
    copies: usize,
    /// JSON `{"k": .., "generators": [..]}` giving `U_p` acting on a lattice
    /// mod `p^k`, for the nonconstant-coefficient check.
    #[arg(long)]
    rep: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CuspArgs {
    #[arg(long, default_value_t = 5)]
    p: u64,
    /// Depth of the compact open `K_n`; defaults to `m + 2`.
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// One character `x`; all classes mod `p^{m+1}` when omitted.
    #[arg(long)]
    x: Option<u64>,
    /// Working precision `p^K`.
    #[arg(long = "K", default_value_t = 8)]
    k: u32,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct DepthArgs {
    #[arg(long, default_value_t = 5)]
    p: u64,
    #[arg(long = "e-f", default_value_t = 1)]
    e_f: u32,
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// Depth, e.g. `3` or `5/2`; defaults to the top of the window.
    #[arg(long)]
    r: Option<String>,
    #[arg(long, default_value_t = 1)]
    rank: usize,
    /// Also build `U_m / U_2m -> Z/p^m` for a torus over `F_q`.
    #[arg(long)]
    torus_q: Option<u64>,
    /// Tame ramification index for `--torus-q`.
    #[arg(long, default_value_t = 1)]
    torus_e: u32,
    #[arg(long)]
    json: bool,
}

/// Either a verdict or an input error.
type Outcome = Result<bool, String>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let res = match cli.cmd {
        Cmd::Build(a) => build(a),
        Cmd::Verify(a) => verify_file(a),
        Cmd::Sweep(a) => sweep(a),
        Cmd::Congruence(a) => congruence(a),
        Cmd::Cusp(a) => cusp(a),
        Cmd::Depth(a) => depth(a),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

fn mark(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAIL"
    }
}

fn parse_delta(ty: RootSystemType, s: &str) -> Result<DiagramAutomorphism, String> {
    match s {
        "id" => Ok(DiagramAutomorphism::identity(ty.rank())),
        "std" => DiagramAutomorphism::standard_involution(ty).map_err(err),
        _ => {
            let perm = s
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| format!("bad permutation '{s}'"))?;
            DiagramAutomorphism::new(ty, perm).map_err(err)
        }
    }
}

fn report_text(head: &str, r: &GenericityReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{head}");
    let _ = writeln!(out, "coroots checked: {}", r.coroot_rows.len());
    let _ = writeln!(out, "descent relations checked: {}", r.descent_rows.len());
    for row in r.failing_coroots() {
        let _ = writeln!(
            out,
            "FAIL coroot {:?} valuation {} residue {:?}",
            row.expansion, row.valuation, row.residue
        );
    }
    for row in r.failing_descent() {
        let _ = writeln!(
            out,
            "FAIL descent {} lhs {:?} rhs {:?}",
            row.index, row.lhs, row.rhs
        );
    }
    for n in &r.notes {
        let _ = writeln!(out, "note: {n}");
    }
    let _ = writeln!(out, "verdict: {}", if r.verdict { "pass" } else { "fail" });
    out
}

fn datum_head(d: &ZeroToralDatum) -> String {
    format!(
        "{} p={} q={} n={} case={} depth={}",
        d.root_type(),
        d.p(),
        d.q(),
        d.n(),
        d.case(),
        format_rational(d.depth())
    )
}

fn emit_report(d: &ZeroToralDatum, r: &GenericityReport, as_json: bool) {
    if as_json {
        let v = json!({ "case": d.case().to_string(), "datum": d.to_json(), "report": r });
        println!("{}", pretty(&v));
    } else {
        print!("{}", report_text(&datum_head(d), r));
    }
}

fn build(a: BuildArgs) -> Outcome {
    let delta = parse_delta(a.ty, &a.delta)?;
    let opts = BuildOptions {
        ramified: a.ramified,
    };
    let d = build_generic_element(a.ty, &delta, a.p, a.q.unwrap_or(a.p), a.n, opts).map_err(err)?;
    let r = verify(&d);
    if let Some(path) = &a.output {
        write(path, &pretty(&d.to_json()))?;
    }
    emit_report(&d, &r, a.json);
    Ok(r.verdict)
}

fn verify_file(a: VerifyArgs) -> Outcome {
    let text = read(&a.file)?;
    let json: DatumJson =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", a.file.display()))?;
    let d = ZeroToralDatum::from_json(&json).map_err(err)?;
    let r = verify(&d);
    emit_report(&d, &r, a.json);
    Ok(r.verdict)
}

fn jobs(flag: Option<usize>) -> Result<usize, String> {
    if let Ok(v) = std::env::var("FORGE_JOBS") {
        return v
            .trim()
            .parse()
            .map_err(|_| format!("FORGE_JOBS = '{v}' is not a count"));
    }
    Ok(flag.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())))
}

fn sweep_config(a: &SweepArgs) -> Result<SweepConfig, String> {
    if let Some(path) = &a.config {
        return serde_json::from_str(&read(path)?).map_err(|e| format!("{}: {e}", path.display()));
    }
    let types = if a.types == "all" {
        SweepConfig::all_types(a.max_rank).types
    } else {
        a.types
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse::<RootSystemType>().map_err(err))
            .collect::<Result<_, _>>()?
    };
    Ok(SweepConfig {
        types,
        primes_per_type: a.primes_per_type,
        primes: a.primes.clone(),
        q_powers: a.q_powers.clone(),
        n_values: a.n.clone(),
        ramified: a.ramified,
        twist: a.twist,
    })
}

fn sweep(a: SweepArgs) -> Outcome {
    let cfg = sweep_config(&a)?;
    let jobs = jobs(a.jobs)?;
    let started = Instant::now();
    let (report, ms) = run_sweep(&cfg, jobs).map_err(err)?;
    if let Some(path) = &a.output {
        write(path, &pretty(&report))?;
    }
    if a.json {
        println!("{}", pretty(&report));
    } else {
        print!("{}", report.to_text(a.timing.then_some(ms.as_slice())));
        if a.timing {
            println!("total {} ms on {jobs} jobs", started.elapsed().as_millis());
        }
    }
    Ok(report.pass)
}

fn load_model(a: &CongruenceArgs) -> Result<FiniteModel, String> {
    match &a.config {
        Some(path) => {
            let cfg: ModelConfig = serde_json::from_str(&read(path)?)
                .map_err(|e| format!("{}: {e}", path.display()))?;
            FiniteModel::new(cfg).map_err(err)
        }
        None => FiniteModel::by_name(&a.model, a.p, a.m).map_err(err),
    }
}

fn load_rep(path: &Path) -> Result<(u32, Vec<Mat>), String> {
    let v: Value =
        serde_json::from_str(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
    let k = v["k"].as_u64().ok_or("rep file needs an integer \"k\"")? as u32;
    let gens = serde_json::from_value(v["generators"].clone())
        .map_err(|e| format!("rep generators: {e}"))?;
    Ok((k, gens))
}

fn congruence(a: CongruenceArgs) -> Outcome {
    if a.copies == 0 {
        return Err("N must be positive".into());
    }
    let model = load_model(&a)?;
    let theorem = verify_congruence_theorem(&model, a.copies).map_err(err)?;
    let decomposition = decompose_rational(&model);
    let quotient = quotient_map_check(&model).map_err(err)?;
    let nonconstant = match &a.rep {
        Some(path) => {
            let (k, gens) = load_rep(path)?;
            Some(nonconstant_check(&model, &gens, k).map_err(err)?)
        }
        None => None,
    };
    // an isomorphic quotient map is expected exactly for free actions
    let quotient_ok = quotient.basis_fixed && (!model.acts_freely() || quotient.isomorphism);
    let pass = theorem.pass
        && decomposition.consistent
        && quotient_ok
        && nonconstant
            .as_ref()
            .is_none_or(|r| r.outcome != NonconstantOutcome::Fail);
    if a.json {
        let v = json!({
            "p": model.p,
            "m": model.m,
            "free": model.acts_freely(),
            "theorem": theorem,
            "decomposition": decomposition,
            "quotient": quotient,
            "nonconstant": nonconstant,
            "pass": pass,
        });
        println!("{}", pretty(&v));
        return Ok(pass);
    }
    println!(
        "model p={} m={} N={} orbits={} free={}",
        model.p,
        model.m,
        a.copies,
        theorem.orbit_count,
        model.acts_freely()
    );
    println!(
        "theorem: lengths {} / {}, quotient action trivial {}, operators {} ({} commute): {}",
        theorem.lhs_length,
        theorem.rhs_length,
        theorem.quotient_action_trivial,
        theorem.operators.len(),
        theorem.operators.iter().filter(|o| o.commutes).count(),
        mark(theorem.pass)
    );
    let ranks: Vec<String> = decomposition
        .components
        .iter()
        .map(|c| format!("j={}:{}", c.j, c.rank))
        .collect();
    println!(
        "rational decomposition: dim {} ranks [{}] factorization {}: {}",
        decomposition.rational_dim,
        ranks.join(" "),
        mark(decomposition.factorization_ok),
        mark(decomposition.consistent)
    );
    println!(
        "quotient map: basis fixed {}, isomorphism {}: {}",
        quotient.basis_fixed,
        quotient.isomorphism,
        mark(quotient_ok)
    );
    if let Some(r) = &nonconstant {
        println!(
            "nonconstant: m'={} m={} dim={} outcome {:?}",
            r.m_prime, r.m, r.dim, r.outcome
        );
    }
    println!("verdict: {}", if pass { "pass" } else { "fail" });
    Ok(pass)
}

fn cusp(a: CuspArgs) -> Outcome {
    let n = a.n.unwrap_or(homomorphism_threshold(a.m));
    let seed = elliptic_seed(a.p, a.k).map_err(err)?;
    let lam = lambda_character(&seed, n, a.m).map_err(err)?;
    let hom = lam.verify_homomorphism(a.samples, a.seed).map_err(err)?;
    let samples = sample_elements(&lam, a.samples, a.seed).map_err(err)?;
    let x = a.x.unwrap_or(1);
    let support = seed.y(a.m).scale(-(x as i64));
    let off = support.add(&TruncatedMatrix::new(a.p, a.k, -1, [[0, 1], [0, 0]]));
    let fourier = [
        fourier_support_check(&seed, a.m, x, &support).map_err(err)?,
        fourier_support_check(&seed, a.m, x, &off).map_err(err)?,
    ];
    let fourier_ok = fourier.iter().all(|f| f.ok()) && fourier[0].integral && !fourier[1].integral;
    let (cusp_value, cusp_pass, summary) = match a.x {
        Some(x) => {
            let r = cusp_integral_check(&lam, x, &samples).map_err(err)?;
            let nonzero = r.rows.iter().filter(|row| !row.sum.is_zero()).count();
            let line = format!("x={x}: {} sums, {} nonzero", r.rows.len(), nonzero);
            (serde_json::to_value(&r).map_err(err)?, r.pass, line)
        }
        None => {
            let b = cusp_battery(&lam, &samples).map_err(err)?;
            let line = format!(
                "{} x classes, {} samples (supported {:?}), {} sums, {} nonzero",
                b.x_classes, b.samples, b.supported, b.sums_checked, b.nonzero_sums
            );
            (serde_json::to_value(&b).map_err(err)?, b.pass, line)
        }
    };
    let pass = seed.certificate && hom.ok() && cusp_pass && fourier_ok;
    if a.json {
        let v = json!({
            "seed": seed,
            "homomorphism": hom,
            "cusp": cusp_value,
            "fourier": fourier,
            "pass": pass,
        });
        println!("{}", pretty(&v));
    } else {
        println!("p={} n={n} m={} K={}", a.p, a.m, a.k);
        println!(
            "seed: epsilon {} gram det {} elliptic certificate {}",
            seed.epsilon,
            seed.gram_det,
            mark(seed.certificate)
        );
        println!(
            "homomorphism: {} generator pairs, {} random pairs, {} failures, surjective {}: {}",
            hom.generator_pairs,
            hom.random_pairs,
            hom.failures,
            hom.surjective,
            mark(hom.ok())
        );
        println!("cusp integrals: {summary}: {}", mark(cusp_pass));
        println!(
            "fourier support: on {} exact {:?}, off {} exact {:?}: {}",
            fourier[0].integral,
            fourier[0].exact,
            fourier[1].integral,
            fourier[1].exact,
            mark(fourier_ok)
        );
        println!("verdict: {}", if pass { "pass" } else { "fail" });
    }
    Ok(pass)
}

fn depth(a: DepthArgs) -> Outcome {
    let window = level_window(a.e_f, a.m).map_err(err)?;
    let r = match &a.r {
        Some(s) => parse_rational(s).ok_or_else(|| format!("bad rational '{s}'"))?,
        None => (window.n + 1).into(),
    };
    let lat = FilteredLattice::unramified_torus(a.p, a.rank, a.e_f).map_err(err)?;
    let order = character_image_order(r, &lat).map_err(err)?;
    let in_window = window.contains(r);
    let mut pass = !in_window || order.exponent == a.m;
    let torus = match a.torus_q {
        Some(q) => {
            // probe at k = 1 for the smallest admissible precision
            let map = match torus_power_filtration(q, a.torus_e, a.m, 1) {
                Err(DepthError::PrecisionInsufficient { need, .. }) => {
                    torus_power_filtration(q, a.torus_e, a.m, need)
                }
                other => other,
            }
            .map_err(err)?;
            pass &= map.is_surjective();
            Some(map)
        }
        None => None,
    };
    if a.json {
        let v = json!({
            "p": a.p,
            "e_f": a.e_f,
            "m": a.m,
            "n": window.n,
            "r": r.to_string(),
            "in_window": in_window,
            "image_exponent": order.exponent,
            "image_order": order.order().to_string(),
            "window_m": order.window_m,
            "torus": torus.as_ref().map(|t| json!({ "map": t.to_json(), "surjective": t.is_surjective() })),
            "pass": pass,
        });
        println!("{}", pretty(&v));
    } else {
        println!(
            "window for e_F={} m={}: ({}, {}]",
            a.e_f,
            a.m,
            window.n,
            window.n + 1
        );
        println!(
            "r={} in window {}: image order {}^{} = {}",
            r,
            in_window,
            a.p,
            order.exponent,
            order.order()
        );
        if let Some(t) = &torus {
            println!(
                "torus U_m/U_2m -> Z/{}^{}: images {:?}, surjective {}",
                t.p,
                t.m,
                t.images,
                t.is_surjective()
            );
        }
        println!("verdict: {}", if pass { "pass" } else { "fail" });
    }
    Ok(pass)
}
