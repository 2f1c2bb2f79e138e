use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hiconvex::config::{Command, FalsifyTarget, Ineq, RunConfig};
use hiconvex::io;
use hiconvex::run::{emit, exit_code, load_config, render, run, Envelope, RunError};
use hiconvex_core::hh_bounds::WeightSpec;
use serde_json::Value;

#[derive(Parser)]
#[command(name = "hiconvex", version, about = "Checks higher-order convexity inequalities and emits JSON reports")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// n-convexity verdict (order --k, default 3) of a model or CSV samples.
    Check(Common),
    /// Verify one inequality.
    Verify(Common),
    /// Decide nu ≺ mu in the 3-convex order.
    Order(Common),
    /// Search for counterexamples.
    Falsify {
        #[arg(value_enum)]
        target: FalsifyTarget,
        #[command(flatten)]
        common: Common,
    },
    /// Matrix Hornich-Hlawka check (three matrices) or the exponential family (one matrix, --exp).
    Matrix(Common),
    /// Run one configuration or an array of configurations from a JSON file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        no_meta: bool,
    },
}

#[derive(Args, Default)]
#[command(allow_negative_numbers = true)]
struct Common {
    #[arg(long, value_enum)]
    ineq: Option<Ineq>,
    /// Model JSON, inline or a file path.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    measure_nu: Option<String>,
    #[arg(long)]
    measure_mu: Option<String>,
    /// Array of matrix objects, inline or a file path.
    #[arg(long)]
    matrices: Option<String>,
    /// CSV file with header `x,f`.
    #[arg(long)]
    samples: Option<PathBuf>,
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    interval: Option<Vec<f64>>,
    /// Scalar arguments (x y z, or x1 .. xn for va).
    #[arg(long, num_args = 1..)]
    point: Option<Vec<f64>>,
    /// `linear`, `cosine`, or weight JSON such as {"kind":"power","n":2}.
    #[arg(long)]
    weight: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long, num_args = 3, value_names = ["R", "S", "T"])]
    exp: Option<Vec<f64>>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Omit the version/timestamp block for byte-identical output.
    #[arg(long)]
    no_meta: bool,
}

fn source(arg: Option<String>, flag: &str) -> Result<Option<Value>, RunError> {
    let Some(arg) = arg else { return Ok(None) };
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        Ok(Some(io::parse_json(&arg, &format!("--{flag}"))?))
    } else {
        Ok(Some(Value::String(arg)))
    }
}

fn weight(arg: Option<String>) -> Result<Option<WeightSpec>, RunError> {
    let Some(arg) = arg else { return Ok(None) };
    let text = if arg.trim_start().starts_with('{') { arg } else { format!("{{\"kind\":\"{}\"}}", arg.trim()) };
    Ok(Some(io::parse_json(&text, "--weight")?))
}

fn to_config(command: Command, c: Common) -> Result<RunConfig, RunError> {
    let mut config = RunConfig::new(command);
    config.ineq = c.ineq;
    config.model = source(c.model, "model")?;
    config.measure_nu = source(c.measure_nu, "measure-nu")?;
    config.measure_mu = source(c.measure_mu, "measure-mu")?;
    config.matrices = source(c.matrices, "matrices")?;
    config.samples = c.samples;
    config.interval = c.interval.map(|v| [v[0], v[1]]);
    config.point = c.point;
    config.weight = weight(c.weight)?;
    config.alpha = c.alpha;
    config.eps = c.eps;
    config.k = c.k;
    config.points = c.points;
    config.exp = c.exp.map(|v| [v[0], v[1], v[2]]);
    config.tol = c.tol;
    config.seed = c.seed;
    config.trials = c.trials;
    config.out = c.out;
    config.no_meta = c.no_meta;
    Ok(config)
}

fn execute(cli: Cli) -> Result<i32, RunError> {
    let (configs, base, out): (Vec<RunConfig>, PathBuf, Option<PathBuf>) = match cli.command {
        Cmd::Run { config, out, no_meta } => {
            let mut runs = load_config(&config)?;
            if runs.is_empty() {
                return Err(RunError::Usage(format!("{}: no runs in config", config.display())));
            }
            for r in &mut runs {
                r.no_meta |= no_meta;
            }
            let out = out.or_else(|| if runs.len() == 1 { runs[0].out.clone() } else { None });
            let base = config.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf);
            (runs, base, out)
        }
        Cmd::Falsify { target, common } => {
            let mut c = to_config(Command::Falsify, common)?;
            c.target = Some(target);
            let out = c.out.clone();
            (vec![c], PathBuf::from("."), out)
        }
        other => {
            let (command, common) = match other {
                Cmd::Check(c) => (Command::Check, c),
                Cmd::Verify(c) => (Command::Verify, c),
                Cmd::Order(c) => (Command::Order, c),
                Cmd::Matrix(c) => (Command::Matrix, c),
                _ => unreachable!(),
            };
            let c = to_config(command, common)?;
            let out = c.out.clone();
            (vec![c], PathBuf::from("."), out)
        }
    };
    let envelopes = configs.iter().map(|c| run(c, &base)).collect::<Result<Vec<Envelope>, _>>()?;
    if let Some(text) = emit(&render(&envelopes), out.as_ref())? {
        print!("{text}");
    }
    Ok(exit_code(&envelopes))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
