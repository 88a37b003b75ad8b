//! `cylsep` command-line front end.

mod table;

use std::f64::consts::PI;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cylsep::decomposer::{max_simulatable_r, ExploreOptions, Family, SearchOptions};
use cylsep::growth::{curve_lambda, curve_region, is_cyl_separable, lemma1_determinant, linspace, GrowthQuery, ThetaBound};
use cylsep::oracle::{eq15_min_eigenvalue, exact_distribution, OracleCaps};
use cylsep::sampler::{
    empirical_distribution, tv_distance, validate_run, GraphSpec, MeasurementProgram, SamplerConfig, Simulator, DEFAULT_ETA,
};
use cylsep::state_spaces::DEFAULT_N_ANGLES;
use cylsep::Error;
use serde_json::{json, Value};

use table::{fmt12, Csv};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_REJECTED: u8 = 3;

#[derive(Parser)]
#[command(name = "cylsep", version, about = "Cylinder-separable simulation of diagonal-gate MBQC")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the disentangling growth rate λ(φ) as CSV.
    Lambda(LambdaArgs),
    /// Tabulate the simulable region θ_max(φ) for degree D as CSV.
    Region(RegionArgs),
    /// Decide cylinder separability of a gate output for input/output radius ratios.
    CheckSep(CheckSepArgs),
    /// Sample measurement outcomes; writes one JSON shot record per line.
    Simulate(SimArgs),
    /// Compare sampled and exact outcome distributions.
    Verify(VerifyArgs),
    /// Search the largest simulable input radius for a state-space family.
    Explore(ExploreArgs),
}

#[derive(Args)]
struct LambdaArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi_min: f64,
    #[arg(long, default_value_t = 2.0 * PI, allow_negative_numbers = true)]
    phi_max: f64,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 1001)]
    steps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RegionArgs {
    /// Maximum degree.
    #[arg(long = "D", short = 'D', default_value_t = 3)]
    d: u32,
    /// Input temperature; omitted means pure inputs.
    #[arg(long = "T", short = 'T')]
    temperature: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi_min: f64,
    #[arg(long, default_value_t = 2.0 * PI, allow_negative_numbers = true)]
    phi_max: f64,
    #[arg(long, default_value_t = 1001)]
    steps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckSepArgs {
    #[arg(long)]
    fa: f64,
    #[arg(long)]
    fb: f64,
    #[arg(long, allow_negative_numbers = true)]
    phi: f64,
    /// Also report the minimum eigenvalue of the gate-output operator.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct RunArgs {
    /// Graph JSON file.
    #[arg(long)]
    graph: PathBuf,
    /// Measurement program JSON file.
    #[arg(long)]
    program: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output-radius margin for every gate decomposition.
    #[arg(long, default_value_t = DEFAULT_ETA)]
    eta: f64,
    #[arg(long, default_value_t = DEFAULT_N_ANGLES)]
    n_angles: usize,
    /// LP slack.
    #[arg(long, default_value_t = 1e-9)]
    eps: f64,
}

#[derive(Args)]
struct SimArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Largest accepted total variation distance.
    #[arg(long, default_value_t = 0.02)]
    tv_max: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExploreArgs {
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[arg(long, default_value_t = PI)]
    phi: f64,
    #[arg(long = "D", short = 'D', default_value_t = 3)]
    d: u32,
    #[arg(long, default_value_t = DEFAULT_N_ANGLES)]
    n_angles: usize,
    /// Margin on the growth of later gate layers.
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
    #[arg(long, default_value_t = 1e-9)]
    eps: f64,
    /// Bisection precision on the input radius.
    #[arg(long, default_value_t = 1e-4)]
    r_tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failure carrying its exit code.
struct Fail {
    code: u8,
    msg: String,
}

impl Fail {
    fn usage(msg: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, msg: msg.into() }
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Rejected(_) => EXIT_REJECTED,
            Error::ZOutOfRange(_)
            | Error::NonFinite
            | Error::InvalidArgument(_)
            | Error::Graph(_)
            | Error::Program(_)
            | Error::Json(_)
            | Error::CapExceeded { .. } => EXIT_USAGE,
            _ => EXIT_FAIL,
        };
        Self { code, msg: e.to_string() }
    }
}

impl From<io::Error> for Fail {
    fn from(e: io::Error) -> Self {
        Self { code: EXIT_USAGE, msg: e.to_string() }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Fail> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(p: &PathBuf) -> Result<T, Fail> {
    let s = fs::read_to_string(p).map_err(|e| Fail::usage(format!("{}: {e}", p.display())))?;
    serde_json::from_str(&s).map_err(|e| Fail::usage(format!("{}: {e}", p.display())))
}

fn phi_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>, Fail> {
    if steps == 0 {
        return Err(Fail::usage("--steps must be at least 1"));
    }
    if !(0.0 <= lo && lo <= hi && hi <= 2.0 * PI) {
        return Err(Fail::usage(format!("need 0 <= phi-min <= phi-max <= 2π (got {lo}, {hi})")));
    }
    Ok(linspace(lo, hi, steps))
}

fn cmd_lambda(a: &LambdaArgs) -> Result<(), Fail> {
    let grid = phi_grid(a.phi_min, a.phi_max, a.steps)?;
    let mut csv = Csv::new(&["phi", "lambda"]);
    csv.config("command", "lambda").config("phi_min", fmt12(a.phi_min)).config("phi_max", fmt12(a.phi_max));
    csv.config("steps", a.steps);
    for (phi, l) in curve_lambda(&grid) {
        csv.row(&[fmt12(phi), fmt12(l)]);
    }
    emit(&a.out, &csv.finish())
}

fn cmd_region(a: &RegionArgs) -> Result<(), Fail> {
    if a.d < 1 {
        return Err(Fail::usage("--D must be at least 1"));
    }
    if let Some(t) = a.temperature {
        if !(t >= 0.0) {
            return Err(Fail::usage("--T must be >= 0"));
        }
    }
    let grid = phi_grid(a.phi_min, a.phi_max, a.steps)?;
    let mut csv = Csv::new(&["phi", "theta_max", "saturated"]);
    csv.config("command", "region").config("D", a.d);
    csv.config("T", a.temperature.map_or("none".to_string(), fmt12));
    csv.config("phi_min", fmt12(a.phi_min)).config("phi_max", fmt12(a.phi_max)).config("steps", a.steps);
    for (phi, b) in curve_region(a.d, &grid, a.temperature)? {
        let (theta, sat) = match b {
            ThetaBound::Bounded(t) => (t, 0),
            // every polar angle is admissible
            ThetaBound::Saturated { .. } => (PI / 2.0, 1),
        };
        csv.row(&[fmt12(phi), fmt12(theta), sat.to_string()]);
    }
    emit(&a.out, &csv.finish())
}

fn cmd_check_sep(a: &CheckSepArgs) -> Result<(), Fail> {
    if !(a.fa > 0.0 && a.fb > 0.0) {
        return Err(Fail::usage("--fa and --fb must be positive"));
    }
    let q = GrowthQuery::new(a.fa, a.fb, a.phi)?;
    let mut out = format!(
        "fa={}\nfb={}\nphi={}\ndeterminant={}\ncyl_separable={}\n",
        fmt12(a.fa),
        fmt12(a.fb),
        fmt12(a.phi),
        fmt12(lemma1_determinant(&q)),
        is_cyl_separable(&q)
    );
    if a.oracle {
        out += &format!("eq15_min_eigenvalue={}\n", fmt12(eq15_min_eigenvalue(a.fa, a.fb, a.phi)));
    }
    emit(&None, &out)
}

fn run_config(r: &RunArgs, command: &str) -> Value {
    json!({
        "command": command,
        "graph": r.graph.display().to_string(),
        "program": r.program.display().to_string(),
        "shots": r.shots,
        "seed": r.seed,
        "eta": r.eta,
        "n_angles": r.n_angles,
        "eps": r.eps,
    })
}

fn build_sim(r: &RunArgs) -> Result<(GraphSpec, MeasurementProgram, Simulator), Fail> {
    if !(r.eta >= 0.0) || !(r.eps >= 0.0) || r.n_angles < 3 {
        return Err(Fail::usage("need --eta >= 0, --eps >= 0 and --n-angles >= 3"));
    }
    let g: GraphSpec = read_json(&r.graph)?;
    let prog: MeasurementProgram = read_json(&r.program)?;
    let config = SamplerConfig { eta: r.eta, n_angles: r.n_angles, lp_eps: r.eps, ..Default::default() };
    match Simulator::new(&g, &prog, config) {
        Ok(sim) => Ok((g, prog, sim)),
        Err(Error::Rejected(nodes)) => {
            let report = validate_run(&g.prepare()?, r.eta)?;
            let msg = format!(
                "instance rejected: nodes {nodes:?} exceed the radius budget\n{}",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
            Err(Fail { code: EXIT_REJECTED, msg })
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_simulate(a: &SimArgs) -> Result<(), Fail> {
    let (_, _, sim) = build_sim(&a.run)?;
    let records = sim.run_batch(a.run.shots, a.run.seed)?;
    let mut out = serde_json::to_string(&json!({ "config": run_config(&a.run, "simulate") })).expect("json");
    out.push('\n');
    for r in &records {
        out += &serde_json::to_string(r).expect("record serializes");
        out.push('\n');
    }
    emit(&a.out, &out)
}

fn cmd_verify(a: &VerifyArgs) -> Result<bool, Fail> {
    let (g, prog, sim) = build_sim(&a.run)?;
    let exact = exact_distribution(&g, &prog, OracleCaps::default())?;
    let records = sim.run_batch(a.run.shots, a.run.seed)?;
    let tv = tv_distance(&empirical_distribution(&records), &exact);
    let pass = tv <= a.tv_max;
    let mut config = run_config(&a.run, "verify");
    config["tv_max"] = json!(a.tv_max);
    let report = json!({
        "instance": a.run.graph.display().to_string(),
        "tv_distance": tv,
        "n_shots": a.run.shots,
        "oracle_support_size": exact.values().filter(|&&p| p > 0.0).count(),
        "pass": pass,
        "config": config,
    });
    emit(&a.out, &(serde_json::to_string_pretty(&report).expect("json") + "\n"))?;
    Ok(pass)
}

fn cmd_explore(a: &ExploreArgs) -> Result<(), Fail> {
    if a.d < 1 || a.n_angles < 3 || !(a.eta >= 0.0) || !(a.r_tol > 0.0) {
        return Err(Fail::usage("need --D >= 1, --n-angles >= 3, --eta >= 0 and --r-tol > 0"));
    }
    let opts = ExploreOptions {
        search: SearchOptions { n_angles: a.n_angles, eps: a.eps, ..Default::default() },
        r_tol: a.r_tol,
        eta: a.eta,
    };
    let report = max_simulatable_r(a.family, a.phi, a.d, &opts)?;
    let mut v = serde_json::to_value(&report).expect("report serializes");
    v["config"] = json!({
        "command": "explore",
        "family": a.family.to_string(),
        "phi": a.phi,
        "D": a.d,
        "n_angles": a.n_angles,
        "eta": a.eta,
        "eps": a.eps,
        "r_tol": a.r_tol,
        "radius_tol": opts.search.tol,
    });
    emit(&a.out, &(serde_json::to_string_pretty(&v).expect("json") + "\n"))
}

fn init_threads() {
    if let Some(n) = std::env::var("CYLSEP_THREADS").ok().and_then(|s| s.parse::<usize>().ok()).filter(|&n| n > 0) {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads();
    let result = match &cli.command {
        Command::Lambda(a) => cmd_lambda(a).map(|_| true),
        Command::Region(a) => cmd_region(a).map(|_| true),
        Command::CheckSep(a) => cmd_check_sep(a).map(|_| true),
        Command::Simulate(a) => cmd_simulate(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
        Command::Explore(a) => cmd_explore(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(EXIT_FAIL)
        }
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
