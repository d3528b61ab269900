//! Command-line front end for the experiment suites.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sublinear::harness::{parse_config_text, run, ExperimentConfig, HarnessError};

#[derive(Parser)]
#[command(
    name = "sublinear",
    about = "Rate checks for limit theorems under sublinear expectations"
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Law-of-large-numbers deviation and adaptive-centering bounds
    Lln,
    /// Central limit theorem rates (adaptive, convex or concave)
    Clt,
    /// G-heat PDE, volatility-control DP and feedback-diffusion Monte Carlo
    Gnormal,
    /// Stein-equation checks
    Stein,
    /// Block estimators under adversarial sampling
    Estimate,
    /// Grid backward induction against the exact tree
    OracleCheck,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Lln => "lln",
            Command::Clt => "clt",
            Command::Gnormal => "gnormal",
            Command::Stein => "stein",
            Command::Estimate => "estimate",
            Command::OracleCheck => "oracle-check",
        }
    }
}

#[derive(Args)]
struct Flags {
    /// key=value file mirroring the long flags (flags win)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Preset (f1, f2, f3, fair) or family file
    #[arg(long, global = true)]
    family: Option<String>,
    /// Test function, e.g. abs, ramp, clip(-1,1), pwl:knots=[0];slopes=[0,1];y0=0
    #[arg(long, global = true, allow_hyphen_values = true)]
    phi: Option<String>,
    /// Comma-separated, strictly increasing horizons
    #[arg(long, global = true)]
    n_list: Option<String>,
    /// exact | grid
    #[arg(long, global = true)]
    mode: Option<String>,
    #[arg(long, global = true)]
    grid_step: Option<String>,
    #[arg(long, global = true)]
    grid_radius: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Output CSV path (standard output when absent)
    #[arg(long, global = true)]
    out: Option<String>,
    /// Suite variant: deviation|adaptive (lln), adaptive|convex|concave (clt)
    #[arg(long, global = true)]
    kind: Option<String>,
    #[arg(long, global = true)]
    convex: bool,
    #[arg(long, global = true)]
    concave: bool,
    #[arg(long, global = true)]
    adaptive: bool,
    #[arg(long, global = true)]
    sigma_lo: Option<String>,
    #[arg(long, global = true)]
    sigma_hi: Option<String>,
    #[arg(long, global = true)]
    pde_dx: Option<String>,
    #[arg(long, global = true)]
    pde_dt: Option<String>,
    #[arg(long, global = true)]
    mc_paths: Option<String>,
    #[arg(long, global = true)]
    mc_steps: Option<String>,
    /// Rows of the data matrix (estimate)
    #[arg(long, global = true)]
    k: Option<String>,
    /// fixed-theta-per-row | random-theta-per-cell | adaptive-greedy | all
    #[arg(long, global = true)]
    strategy: Option<String>,
    #[arg(long, global = true)]
    trials: Option<String>,
    /// Stein variances, comma-separated
    #[arg(long, global = true)]
    t_list: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    x: Option<String>,
}

fn settings(cli: Cli) -> Result<BTreeMap<String, String>, HarnessError> {
    let f = cli.flags;
    let mut map = match &f.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| HarnessError::Parse(format!("config {}: {e}", path.display())))?;
            parse_config_text(&text)?
        }
        None => BTreeMap::new(),
    };
    if let Some(c) = cli.command {
        map.insert("suite".into(), c.name().into());
    }
    let kind = match (f.convex, f.concave, f.adaptive) {
        (true, false, false) => Some("convex".to_string()),
        (false, true, false) => Some("concave".to_string()),
        (false, false, true) => Some("adaptive".to_string()),
        (false, false, false) => f.kind,
        _ => {
            return Err(HarnessError::Parse(
                "pick one of --convex, --concave, --adaptive".into(),
            ))
        }
    };
    let pairs = [
        ("family", f.family),
        ("phi", f.phi),
        ("n-list", f.n_list),
        ("mode", f.mode),
        ("grid-step", f.grid_step),
        ("grid-radius", f.grid_radius),
        ("seed", f.seed),
        ("out", f.out),
        ("kind", kind),
        ("sigma-lo", f.sigma_lo),
        ("sigma-hi", f.sigma_hi),
        ("pde-dx", f.pde_dx),
        ("pde-dt", f.pde_dt),
        ("mc-paths", f.mc_paths),
        ("mc-steps", f.mc_steps),
        ("k", f.k),
        ("strategy", f.strategy),
        ("trials", f.trials),
        ("t-list", f.t_list),
        ("x", f.x),
    ];
    for (key, value) in pairs {
        if let Some(v) = value {
            map.insert(key.into(), v);
        }
    }
    Ok(map)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let result = settings(cli)
        .and_then(|m| ExperimentConfig::from_map(&m))
        .and_then(|cfg| run(&cfg));
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
