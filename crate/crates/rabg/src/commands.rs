//! Subcommand definitions and execution. Every command renders a [`Table`]
//! so CSV and JSON outputs always agree value-for-value.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use rabg_core::game::{
    compute_nmax, lemma1_check, run_protocol, verify_theorems, GameConfig, InitialState, Mode,
    RecordedOutcome,
};
use rabg_core::oracle::GeometricScheduleSpec;
use rabg_core::Error as CoreError;

use crate::numfmt::format_sig;
use crate::table::{Cell, Format, Table};

const MAX_BELL: f64 = 2.0 * std::f64::consts::SQRT_2;

/// Errors carrying their process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or values: exit 2.
    Usage(String),
    /// Simulation disagreed with the closed form: exit 3.
    Mismatch(String),
    /// Runtime failure (IO, failed verification): exit 1.
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Mismatch(_) => 3,
            CliError::Failure(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Mismatch(m) | CliError::Failure(m) => m,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn from_core(e: CoreError) -> CliError {
    match e {
        CoreError::OracleMismatch { round, discrepancy } => CliError::Mismatch(format!(
            "simulation disagrees with the closed form at round {round} (|Δ| = {discrepancy:e})"
        )),
        other => usage(format!("{other}")),
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "rabg",
    version,
    about = "Random access Bell game simulator",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the protocol on a GHZ start and report per-round Bell values
    Run(RunArgs),
    /// Maximum guaranteed rounds over a threshold/alpha grid
    Nmax(NmaxArgs),
    /// Coherent-control check: PT spectra and Bell values per alpha
    Lemma1(Lemma1Args),
    /// W-state runs: per-round Bell values and separability flags
    Wstate(WstateArgs),
    /// Cross-validate simulation against the closed forms
    Verify(VerifyArgs),
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct IoArgs {
    /// Output file; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format: csv or json
    #[arg(long)]
    pub format: Option<String>,
    /// Significant digits for serialized numbers
    #[arg(long)]
    pub precision: Option<usize>,
    /// key=value file supplying defaults for any long flag
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// GHZ weight alpha in [0, 1]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Comma-separated sharpness schedule, e.g. 0.1,1.0
    #[arg(long, conflicts_with = "geometric")]
    pub lambdas: Option<String>,
    /// Geometric schedule "k,q" with final projective round
    #[arg(long)]
    pub geometric: Option<String>,
    /// deterministic (default) or sampled
    #[arg(long)]
    pub mode: Option<String>,
    /// RNG seed for sampled mode (falls back to RABG_SEED, then 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Violation threshold reported by the transcript
    #[arg(long)]
    pub bmin: Option<f64>,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Args, Debug)]
pub struct NmaxArgs {
    /// Threshold grid start:stop:step, within (2, 2*sqrt(2)]
    #[arg(long = "bmin-grid")]
    pub bmin_grid: Option<String>,
    /// Comma-separated alphas in (0, 1)
    #[arg(long)]
    pub alphas: Option<String>,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Args, Debug)]
pub struct Lemma1Args {
    /// Alphas as a comma list or start:stop:step grid, within [0, 1]
    #[arg(long)]
    pub alphas: Option<String>,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Args, Debug)]
pub struct WstateArgs {
    /// Number of rounds (uses lambda = 0.5 each unless --lambdas is given)
    #[arg(long)]
    pub rounds: Option<usize>,
    /// Explicit comma-separated schedule
    #[arg(long)]
    pub lambdas: Option<String>,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Largest schedule length exercised (at most 10)
    #[arg(long)]
    pub kcap: Option<usize>,
    /// Number of random schedules
    #[arg(long)]
    pub trials: Option<usize>,
    /// Sweep seed (falls back to RABG_SEED, then 42)
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub io: IoArgs,
}

/// Rendered output plus the process exit code to use.
pub struct CmdOutput {
    pub text: String,
    pub out: Option<PathBuf>,
    pub exit_code: i32,
}

/// Flag-or-config resolution: explicit flags win, then the config file.
struct Resolver {
    map: BTreeMap<String, String>,
}

impl Resolver {
    fn new(config: &Option<PathBuf>) -> Result<Self, CliError> {
        let map = match config {
            Some(path) => crate::config::load(path).map_err(CliError::Usage)?,
            None => BTreeMap::new(),
        };
        Ok(Self { map })
    }

    fn get<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.map.get(key) {
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| usage(format!("config value for {key} is invalid: {raw}"))),
            None => Ok(None),
        }
    }

    fn raw(&self, flag: Option<String>, key: &str) -> Option<String> {
        flag.or_else(|| self.map.get(key).cloned())
    }
}

struct IoSettings {
    out: Option<PathBuf>,
    format: Format,
    precision: usize,
}

fn resolve_io(io: &IoArgs, r: &Resolver) -> Result<IoSettings, CliError> {
    let format = match r
        .raw(io.format.clone(), "format")
        .unwrap_or_else(|| String::from("csv"))
        .as_str()
    {
        "csv" => Format::Csv,
        "json" => Format::Json,
        other => return Err(usage(format!("unknown format {other}; use csv or json"))),
    };
    let precision = r.get(io.precision, "precision")?.unwrap_or(12);
    if !(1..=17).contains(&precision) {
        return Err(usage("precision must be between 1 and 17"));
    }
    let out = io.out.clone().or_else(|| {
        r.map
            .get("out")
            .map(PathBuf::from)
    });
    Ok(IoSettings {
        out,
        format,
        precision,
    })
}

fn env_seed() -> Result<Option<u64>, CliError> {
    match std::env::var("RABG_SEED") {
        Ok(raw) => raw
            .parse::<u64>()
            .map(Some)
            .map_err(|_| usage(format!("RABG_SEED is not a valid seed: {raw}"))),
        Err(_) => Ok(None),
    }
}

fn parse_comma_f64(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    let values: Result<Vec<f64>, _> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
    let values = values.map_err(|_| usage(format!("cannot parse {what}: {s}")))?;
    if values.is_empty() {
        return Err(usage(format!("{what} must not be empty")));
    }
    Ok(values)
}

/// "start:stop:step" inclusive grid, or a plain comma list.
fn parse_grid(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    if !s.contains(':') {
        return parse_comma_f64(s, what);
    }
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(usage(format!("{what} grid must be start:stop:step: {s}")));
    }
    let nums: Result<Vec<f64>, _> = parts.iter().map(|p| p.trim().parse::<f64>()).collect();
    let nums = nums.map_err(|_| usage(format!("cannot parse {what} grid: {s}")))?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if step <= 0.0 || stop < start {
        return Err(usage(format!("{what} grid must ascend with positive step")));
    }
    let mut out = Vec::new();
    let mut i = 0usize;
    loop {
        let v = start + step * i as f64;
        if v > stop + step * 1e-9 {
            break;
        }
        out.push(v.min(stop));
        i += 1;
    }
    Ok(out)
}

fn parse_geometric(s: &str) -> Result<GeometricScheduleSpec, CliError> {
    let (k_str, q_str) = s
        .split_once(',')
        .ok_or_else(|| usage(format!("--geometric must be k,q: {s}")))?;
    let k: usize = k_str
        .trim()
        .parse()
        .map_err(|_| usage(format!("geometric round count is invalid: {k_str}")))?;
    let q: f64 = q_str
        .trim()
        .parse()
        .map_err(|_| usage(format!("geometric parameter q is invalid: {q_str}")))?;
    GeometricScheduleSpec::new(k, q).map_err(from_core)
}

pub fn execute(cli: Cli) -> Result<CmdOutput, CliError> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Nmax(args) => cmd_nmax(args),
        Command::Lemma1(args) => cmd_lemma1(args),
        Command::Wstate(args) => cmd_wstate(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn cmd_run(args: RunArgs) -> Result<CmdOutput, CliError> {
    let r = Resolver::new(&args.io.config)?;
    let io = resolve_io(&args.io, &r)?;
    let alpha = r
        .get(args.alpha, "alpha")?
        .ok_or_else(|| usage("--alpha is required"))?;
    let lambdas = match (
        r.raw(args.lambdas, "lambdas"),
        r.raw(args.geometric, "geometric"),
    ) {
        (Some(list), None) => parse_comma_f64(&list, "--lambdas")?,
        (None, Some(spec)) => parse_geometric(&spec)?.lambdas(),
        (Some(_), Some(_)) => return Err(usage("--lambdas conflicts with --geometric")),
        (None, None) => return Err(usage("one of --lambdas or --geometric is required")),
    };
    let mode = match r
        .raw(args.mode, "mode")
        .unwrap_or_else(|| String::from("deterministic"))
        .as_str()
    {
        "deterministic" => Mode::Deterministic,
        "sampled" => {
            let seed = match r.get(args.seed, "seed")? {
                Some(s) => s,
                None => env_seed()?.unwrap_or(0),
            };
            Mode::Sampled { seed }
        }
        other => return Err(usage(format!("unknown mode {other}"))),
    };

    let mut cfg = GameConfig::new(InitialState::Ghz { alpha }, lambdas)
        .map_err(from_core)?
        .with_mode(mode);
    if let Some(bmin) = r.get(args.bmin, "bmin")? {
        cfg = cfg.with_b_min(bmin).map_err(from_core)?;
    }
    let transcript = run_protocol(&cfg).map_err(from_core)?;

    let mut table = Table::new(
        vec![
            "k",
            "lambda_k",
            "p_plus",
            "bell_sim",
            "bell_oracle",
            "discrepancy",
        ],
        io.precision,
    );
    for round in &transcript.rounds {
        let p_plus = match round.outcome {
            RecordedOutcome::Minus => 1.0 - round.outcome_probability,
            _ => round.outcome_probability,
        };
        table.push(vec![
            Cell::Int(round.k as i64),
            Cell::Num(round.lambda),
            Cell::Num(p_plus),
            Cell::Num(round.bell_value),
            round.oracle_bell_value.map_or(Cell::Empty, Cell::Num),
            round.discrepancy.map_or(Cell::Empty, Cell::Num),
        ]);
    }
    Ok(CmdOutput {
        text: table.render(io.format),
        out: io.out,
        exit_code: 0,
    })
}

fn cmd_nmax(args: NmaxArgs) -> Result<CmdOutput, CliError> {
    let r = Resolver::new(&args.io.config)?;
    let io = resolve_io(&args.io, &r)?;
    let grid = parse_grid(
        &r.raw(args.bmin_grid, "bmin-grid")
            .ok_or_else(|| usage("--bmin-grid is required"))?,
        "--bmin-grid",
    )?;
    let alphas = parse_comma_f64(
        &r.raw(args.alphas, "alphas")
            .ok_or_else(|| usage("--alphas is required"))?,
        "--alphas",
    )?;
    for &b in &grid {
        if !(b > 2.0 && b <= MAX_BELL + 1e-12) {
            return Err(usage(format!(
                "threshold {b} outside (2, 2*sqrt(2)]"
            )));
        }
    }
    for &a in &alphas {
        if !(0.0 < a && a < 1.0) {
            return Err(usage(format!("alpha {a} outside (0, 1)")));
        }
    }

    let mut table = Table::new(vec!["b_min", "alpha", "n_max", "lambdas"], io.precision);
    for &b_min in &grid {
        for &alpha in &alphas {
            let res = compute_nmax(b_min, alpha).map_err(from_core)?;
            let joined = res
                .chosen_lambdas
                .iter()
                .map(|&l| format_sig(l, io.precision))
                .collect::<Vec<_>>()
                .join(";");
            table.push(vec![
                Cell::Num(b_min),
                Cell::Num(alpha),
                Cell::Int(res.n_max as i64),
                Cell::Text(joined),
            ]);
        }
    }
    Ok(CmdOutput {
        text: table.render(io.format),
        out: io.out,
        exit_code: 0,
    })
}

fn cmd_lemma1(args: Lemma1Args) -> Result<CmdOutput, CliError> {
    let r = Resolver::new(&args.io.config)?;
    let io = resolve_io(&args.io, &r)?;
    let alphas = parse_grid(
        &r.raw(args.alphas, "alphas")
            .ok_or_else(|| usage("--alphas is required"))?,
        "--alphas",
    )?;
    for &a in &alphas {
        if !(0.0..=1.0).contains(&a) {
            return Err(usage(format!("alpha {a} outside [0, 1]")));
        }
    }
    let points = lemma1_check(&alphas).map_err(from_core)?;
    let mut table = Table::new(
        vec![
            "alpha", "pt_1", "pt_2", "pt_3", "pt_4", "min_pt", "bell", "separable",
        ],
        io.precision,
    );
    for p in &points {
        table.push(vec![
            Cell::Num(p.alpha),
            Cell::Num(p.pt_spectrum[0]),
            Cell::Num(p.pt_spectrum[1]),
            Cell::Num(p.pt_spectrum[2]),
            Cell::Num(p.pt_spectrum[3]),
            Cell::Num(p.min_pt_eigenvalue),
            Cell::Num(p.bell_value),
            Cell::Bool(p.separable),
        ]);
    }
    Ok(CmdOutput {
        text: table.render(io.format),
        out: io.out,
        exit_code: 0,
    })
}

fn cmd_wstate(args: WstateArgs) -> Result<CmdOutput, CliError> {
    let r = Resolver::new(&args.io.config)?;
    let io = resolve_io(&args.io, &r)?;
    let lambdas = match (r.raw(args.lambdas, "lambdas"), r.get(args.rounds, "rounds")?) {
        (Some(list), _) => parse_comma_f64(&list, "--lambdas")?,
        (None, Some(rounds)) if rounds >= 1 => vec![0.5; rounds],
        (None, Some(_)) => return Err(usage("--rounds must be at least 1")),
        (None, None) => return Err(usage("one of --rounds or --lambdas is required")),
    };
    let cfg = GameConfig::new(InitialState::W, lambdas).map_err(from_core)?;
    let transcript = run_protocol(&cfg).map_err(from_core)?;

    let mut table = Table::new(vec!["k", "lambda_k", "bell", "ppt"], io.precision);
    for round in &transcript.rounds {
        let ppt = round
            .post_measurement_ab
            .is_separable_ppt()
            .map_err(from_core)?;
        table.push(vec![
            Cell::Int(round.k as i64),
            Cell::Num(round.lambda),
            Cell::Num(round.bell_value),
            Cell::Bool(ppt),
        ]);
    }
    Ok(CmdOutput {
        text: table.render(io.format),
        out: io.out,
        exit_code: 0,
    })
}

fn cmd_verify(args: VerifyArgs) -> Result<CmdOutput, CliError> {
    let r = Resolver::new(&args.io.config)?;
    let io = resolve_io(&args.io, &r)?;
    let kcap = r.get(args.kcap, "kcap")?.unwrap_or(5);
    let trials = r.get(args.trials, "trials")?.unwrap_or(200);
    let seed = match r.get(args.seed, "seed")? {
        Some(s) => s,
        None => env_seed()?.unwrap_or(42),
    };
    let report = verify_theorems(kcap, trials, seed).map_err(from_core)?;

    let mut table = Table::new(vec!["check", "passed", "worst"], io.precision);
    for c in &report.checks {
        table.push(vec![
            Cell::Text(String::from(c.name)),
            Cell::Bool(c.passed),
            Cell::Num(c.worst),
        ]);
    }
    Ok(CmdOutput {
        text: table.render(io.format),
        out: io.out,
        exit_code: if report.all_passed() { 0 } else { 1 },
    })
}
