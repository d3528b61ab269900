//! Experiment orchestration: parse family and test-function specs, run one suite
//! over an n-list, and write the CSV rate table.
//!
//! Configuration arrives as `key=value` pairs (from a config file, command-line
//! flags, or both) and is validated into an [`ExperimentConfig`].

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use thiserror::Error;

use crate::clt::{adaptive_clt_report, convex_clt_report, Shape};
use crate::engine::{adapted_sup, EvalMode, GridSpec, RunningSum, Schedule};
use crate::estimators::{block_experiment, StrategyMode};
use crate::family::{parse_family, presets, DiscreteDistribution, UncertaintyFamily};
use crate::gnormal::{
    gheat_solve, policy_dp_value, sde_representation_mc, GParams, PdeGrid, PolicySpec,
};
use crate::lln::{adaptive_lln_report, interval_deviation_report, SmoothTestFn};
use crate::pwl::PiecewiseLinearFn;
use crate::report::RateReport;
use crate::stein::{
    gaussian_characterization_check, stein_residual, verify_f_second_derivative_bound,
    verify_gradient_identity, SteinContext, Sweep,
};

pub const CSV_HEADER: [&str; 7] = [
    "suite",
    "n",
    "value",
    "reference",
    "gap",
    "bound",
    "satisfied",
];
/// Grid-versus-tree tolerance of the oracle check.
pub const ORACLE_TOL: f64 = 1e-6;
pub const STEIN_RESIDUAL_TOL: f64 = 1e-6;
pub const STEIN_GRADIENT_TOL: f64 = 1e-6;
pub const STEIN_CHARACTERIZATION_TOL: f64 = 1e-8;
/// Relative slack on the `f″` bound, which holds with equality in the limit.
pub const STEIN_RATIO_SLACK: f64 = 1e-3;
/// Discretization allowance added to `3·stderr` in the Monte Carlo row.
pub const MC_ALLOWANCE: f64 = 0.05;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Numerical(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// 2 for input problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Parse(_) | HarnessError::Io(_) => 2,
            HarnessError::Numerical(_) => 3,
        }
    }
}

fn parse_err(msg: impl fmt::Display) -> HarnessError {
    HarnessError::Parse(msg.to_string())
}

fn num_err(msg: impl fmt::Display) -> HarnessError {
    HarnessError::Numerical(msg.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lln,
    Clt,
    Gnormal,
    Stein,
    Estimate,
    OracleCheck,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Lln => "lln",
            Suite::Clt => "clt",
            Suite::Gnormal => "gnormal",
            Suite::Stein => "stein",
            Suite::Estimate => "estimate",
            Suite::OracleCheck => "oracle-check",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Suite::Lln,
            Suite::Clt,
            Suite::Gnormal,
            Suite::Stein,
            Suite::Estimate,
            Suite::OracleCheck,
        ]
        .into_iter()
        .find(|x| x.name() == s)
    }
}

/// `phi` grammar error at byte offset `pos`.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("phi spec, position {pos}: {message}")]
pub struct PhiParseError {
    pub pos: usize,
    pub message: String,
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl Cursor<'_> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, PhiParseError> {
        Err(PhiParseError {
            pos: self.pos,
            message: message.into(),
        })
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), PhiParseError> {
        if self.eat(token) {
            Ok(())
        } else {
            self.err(format!("expected `{token}`"))
        }
    }

    fn number(&mut self) -> Result<f64, PhiParseError> {
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E')))
            .unwrap_or(self.rest().len());
        match self.rest()[..len].parse::<f64>() {
            Ok(v) if v.is_finite() => {
                self.pos += len;
                Ok(v)
            }
            _ => self.err("expected a finite number"),
        }
    }

    fn list(&mut self) -> Result<Vec<f64>, PhiParseError> {
        self.expect("[")?;
        let mut out = Vec::new();
        if self.eat("]") {
            return Ok(out);
        }
        loop {
            out.push(self.number()?);
            if self.eat("]") {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    fn pair(&mut self) -> Result<(f64, f64), PhiParseError> {
        self.expect("(")?;
        let a = self.number()?;
        self.expect(",")?;
        let b = self.number()?;
        self.expect(")")?;
        Ok((a, b))
    }

    fn spec(&mut self) -> Result<PiecewiseLinearFn, PhiParseError> {
        self.skip_ws();
        let start = self.pos;
        let wrap = |r: Result<PiecewiseLinearFn, crate::pwl::PwlError>| {
            r.map_err(|e| PhiParseError {
                pos: start,
                message: e.to_string(),
            })
        };
        if self.eat("abs") {
            Ok(PiecewiseLinearFn::abs())
        } else if self.eat("ramp") {
            Ok(PiecewiseLinearFn::ramp())
        } else if self.eat("clip") {
            let (a, b) = self.pair()?;
            wrap(PiecewiseLinearFn::clip(a, b))
        } else if self.eat("linear") {
            let (s, c) = self.pair()?;
            Ok(PiecewiseLinearFn::linear(s, c))
        } else if self.eat("const") {
            self.expect("(")?;
            let c = self.number()?;
            self.expect(")")?;
            Ok(PiecewiseLinearFn::constant(c))
        } else if self.eat("neg") {
            self.expect("(")?;
            let inner = self.spec()?;
            self.expect(")")?;
            Ok(inner.negate())
        } else if self.eat("pwl:") {
            self.expect("knots=")?;
            let knots = self.list()?;
            self.expect(";")?;
            self.expect("slopes=")?;
            let slopes = self.list()?;
            self.expect(";")?;
            self.expect("y0=")?;
            let y0 = self.number()?;
            wrap(PiecewiseLinearFn::new(knots, slopes, y0))
        } else {
            self.err("expected abs, ramp, clip(a,b), linear(s,c), const(c), neg(...) or pwl:...")
        }
    }
}

/// Parses a test-function spec:
///
/// ```text
/// abs | ramp | clip(a,b) | linear(s,c) | const(c) | neg(<spec>)
/// pwl:knots=[k1,...];slopes=[s0,...];y0=v      (v is φ(k1), or φ(0) without knots)
/// ```
pub fn parse_phi(spec: &str) -> Result<PiecewiseLinearFn, PhiParseError> {
    let mut c = Cursor { src: spec, pos: 0 };
    let phi = c.spec()?;
    c.skip_ws();
    if c.pos != spec.len() {
        return c.err("trailing input");
    }
    Ok(phi)
}

/// Preset name (`f1`, `f2`, `f3`, `fair`) or a path to a family file.
pub fn load_family(spec: &str) -> Result<UncertaintyFamily, HarnessError> {
    if let Some(f) = presets::by_name(spec) {
        return Ok(f);
    }
    let text =
        std::fs::read_to_string(spec).map_err(|e| parse_err(format!("family file {spec}: {e}")))?;
    parse_family(&text).map_err(|e| parse_err(format!("family file {spec}: {e}")))
}

/// Comma-separated, strictly increasing positive integers.
pub fn parse_n_list(s: &str) -> Result<Vec<usize>, HarnessError> {
    let list = s
        .split(',')
        .map(|p| {
            p.trim().parse::<usize>().map_err(|_| {
                parse_err(format!(
                    "n-list entry `{}` is not a positive integer",
                    p.trim()
                ))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    if list.is_empty() || list[0] == 0 || list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(parse_err(format!(
            "n-list `{s}` must be strictly increasing positive integers"
        )));
    }
    Ok(list)
}

/// `key=value` lines; `#` starts a comment. Keys are the long flag names.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, HarnessError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| parse_err(format!("config line {}: expected key=value", i + 1)))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    Exact,
    Grid,
}

/// Validated suite configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub suite: Suite,
    pub family: Option<String>,
    pub phi: Option<String>,
    pub n_list: Vec<usize>,
    pub mode: ModeKind,
    pub grid_step: f64,
    pub grid_radius: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    /// Suite variant: `deviation|adaptive` (lln), `adaptive|convex|concave` (clt).
    pub kind: Option<String>,
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    pub pde_dx: f64,
    pub pde_dt: Option<f64>,
    pub mc_paths: usize,
    pub mc_steps: usize,
    pub k: usize,
    pub strategy: Option<StrategyMode>,
    pub trials: usize,
    pub t_list: Vec<f64>,
    pub x: f64,
}

pub const KNOWN_KEYS: [&str; 22] = [
    "suite",
    "family",
    "phi",
    "n-list",
    "mode",
    "grid-step",
    "grid-radius",
    "seed",
    "out",
    "kind",
    "sigma-lo",
    "sigma-hi",
    "pde-dx",
    "pde-dt",
    "mc-paths",
    "mc-steps",
    "k",
    "strategy",
    "trials",
    "t-list",
    "x",
    "config",
];

fn get_parsed<T: std::str::FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, HarnessError> {
    map.get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|_| parse_err(format!("{key}: cannot parse `{v}`")))
        })
        .transpose()
}

impl ExperimentConfig {
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self, HarnessError> {
        if let Some(k) = map.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            return Err(parse_err(format!("unknown key `{k}`")));
        }
        let suite_name = map
            .get("suite")
            .ok_or_else(|| parse_err("no suite given"))?;
        let suite = Suite::parse(suite_name)
            .ok_or_else(|| parse_err(format!("unknown suite `{suite_name}`")))?;
        let mode = match map.get("mode").map(String::as_str) {
            None | Some("grid") => ModeKind::Grid,
            Some("exact") => ModeKind::Exact,
            Some(m) => return Err(parse_err(format!("mode `{m}` is not exact|grid"))),
        };
        let n_list = match map.get("n-list") {
            Some(s) => parse_n_list(s)?,
            None if suite == Suite::Stein => vec![],
            None => return Err(parse_err(format!("suite {} needs --n-list", suite.name()))),
        };
        let family = map.get("family").cloned();
        if family.is_none()
            && matches!(
                suite,
                Suite::Lln | Suite::Clt | Suite::Estimate | Suite::OracleCheck
            )
        {
            return Err(parse_err(format!("suite {} needs --family", suite.name())));
        }
        let strategy = match map.get("strategy").map(String::as_str) {
            None | Some("all") => None,
            Some(s) => Some(
                StrategyMode::parse(s)
                    .ok_or_else(|| parse_err(format!("unknown strategy `{s}`")))?,
            ),
        };
        let t_list = match map.get("t-list") {
            None => vec![0.25, 1.0, 4.0],
            Some(s) => s
                .split(',')
                .map(|p| match p.trim().parse::<f64>() {
                    Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
                    _ => Err(parse_err(format!(
                        "t-list entry `{}` is not a positive number",
                        p.trim()
                    ))),
                })
                .collect::<Result<_, _>>()?,
        };
        let cfg = Self {
            suite,
            family,
            phi: map.get("phi").cloned(),
            n_list,
            mode,
            grid_step: get_parsed(map, "grid-step")?.unwrap_or(1.0 / 256.0),
            grid_radius: get_parsed(map, "grid-radius")?,
            seed: get_parsed(map, "seed")?,
            out: map.get("out").map(PathBuf::from),
            kind: map.get("kind").cloned(),
            sigma_lo: get_parsed(map, "sigma-lo")?.unwrap_or(1.0),
            sigma_hi: get_parsed(map, "sigma-hi")?.unwrap_or(2.0),
            pde_dx: get_parsed(map, "pde-dx")?.unwrap_or(1.0 / 64.0),
            pde_dt: get_parsed(map, "pde-dt")?,
            mc_paths: get_parsed(map, "mc-paths")?.unwrap_or(0),
            mc_steps: get_parsed(map, "mc-steps")?.unwrap_or(256),
            k: get_parsed(map, "k")?.unwrap_or(4),
            strategy,
            trials: get_parsed(map, "trials")?.unwrap_or(2000),
            t_list,
            x: get_parsed(map, "x")?.unwrap_or(0.0),
        };
        if cfg.seed.is_none()
            && (suite == Suite::Estimate || (suite == Suite::Gnormal && cfg.mc_paths > 0))
        {
            return Err(parse_err(format!("suite {} needs --seed", suite.name())));
        }
        if let Some(phi) = &cfg.phi {
            if !(suite == Suite::Lln) {
                parse_phi(phi).map_err(parse_err)?;
            }
        }
        Ok(cfg)
    }

    fn eval_mode(&self) -> EvalMode {
        match self.mode {
            ModeKind::Exact => EvalMode::exact(),
            ModeKind::Grid => EvalMode::Grid(self.grid_spec()),
        }
    }

    fn grid_spec(&self) -> GridSpec {
        match self.grid_radius {
            Some(r) => GridSpec::with_radius(r, self.grid_step),
            None => GridSpec::new(self.grid_step),
        }
    }

    fn phi_or(&self, default: &str) -> Result<PiecewiseLinearFn, HarnessError> {
        parse_phi(self.phi.as_deref().unwrap_or(default)).map_err(parse_err)
    }

    fn family(&self) -> Result<UncertaintyFamily, HarnessError> {
        load_family(
            self.family
                .as_deref()
                .ok_or_else(|| parse_err("no family given"))?,
        )
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub suite: String,
    pub report: RateReport,
}

impl Row {
    fn new(suite: &str, report: RateReport) -> Self {
        Self {
            suite: suite.to_string(),
            report,
        }
    }
}

fn lln_rows(cfg: &ExperimentConfig) -> Result<Vec<Row>, HarnessError> {
    let family = cfg.family()?;
    let mode = cfg.eval_mode();
    match cfg.kind.as_deref().unwrap_or("deviation") {
        "deviation" => cfg
            .n_list
            .iter()
            .map(|&n| {
                interval_deviation_report(&family, n, &mode)
                    .map(|r| Row::new("lln/deviation", r))
                    .map_err(num_err)
            })
            .collect(),
        "adaptive" => {
            let phi = match cfg.phi.as_deref().unwrap_or("quadratic") {
                "quadratic" => SmoothTestFn::quadratic(),
                "soft-abs" => SmoothTestFn::soft_abs(),
                "log-cosh" => SmoothTestFn::log_cosh(),
                other => {
                    return Err(parse_err(format!(
                        "lln test function `{other}` is not quadratic|soft-abs|log-cosh"
                    )))
                }
            };
            cfg.n_list
                .iter()
                .map(|&n| {
                    adaptive_lln_report(&family, n, &phi, &mode)
                        .map(|r| Row::new("lln/adaptive", r))
                        .map_err(num_err)
                })
                .collect()
        }
        k => Err(parse_err(format!(
            "lln kind `{k}` is not deviation|adaptive"
        ))),
    }
}

fn clt_rows(cfg: &ExperimentConfig) -> Result<Vec<Row>, HarnessError> {
    let family = cfg.family()?;
    let mode = cfg.eval_mode();
    let kind = cfg.kind.as_deref().unwrap_or("adaptive");
    let shape = match kind {
        "adaptive" => None,
        "convex" => Some(Shape::Convex),
        "concave" => Some(Shape::Concave),
        k => {
            return Err(parse_err(format!(
                "clt kind `{k}` is not adaptive|convex|concave"
            )))
        }
    };
    let phi = cfg.phi_or(match shape {
        None => "clip(-2,2)",
        Some(Shape::Convex) => "abs",
        Some(Shape::Concave) => "neg(abs)",
    })?;
    cfg.n_list
        .iter()
        .map(|&n| {
            let r = match shape {
                None => adaptive_clt_report(&family, n, &phi, &mode).map(|o| o.report),
                Some(s) => convex_clt_report(&vec![family.clone(); n], &phi, s, &mode),
            };
            r.map(|r| Row::new(&format!("clt/{kind}"), r))
                .map_err(num_err)
        })
        .collect()
}

fn gnormal_rows(cfg: &ExperimentConfig) -> Result<Vec<Row>, HarnessError> {
    let params = GParams::new(cfg.sigma_lo, cfg.sigma_hi).map_err(parse_err)?;
    let phi = cfg.phi_or("abs")?;
    let driver = match &cfg.family {
        None => DiscreteDistribution::new(vec![-1.0, 1.0], vec![0.5, 0.5]).expect("fair coin"),
        Some(f) => {
            let fam = load_family(f)?;
            match fam.thetas() {
                [d] => d.clone(),
                _ => {
                    return Err(parse_err(
                        "gnormal driver family must have exactly one distribution",
                    ))
                }
            }
        }
    };
    let mut pde = PdeGrid::default_for(&phi, &params, cfg.pde_dx);
    if let Some(dt) = cfg.pde_dt {
        pde.dt = dt;
    }
    if let Some(r) = cfg.grid_radius {
        pde.radius = pde.radius.max(r);
    }
    let slices = if cfg.mc_paths > 0 { cfg.mc_steps } else { 1 };
    let solution = gheat_solve(&phi, &params, &pde, slices).map_err(num_err)?;
    let pde_value = solution.value();
    let spec = PolicySpec::bang_bang(&params, driver, 1).map_err(parse_err)?;
    let dp_grid = GridSpec::new(cfg.grid_step);
    let mut rows = Vec::new();
    let mut first_gap = None;
    for &n in &cfg.n_list {
        let v = policy_dp_value(&phi, &spec.with_n(n), &dp_grid).map_err(num_err)?;
        let gap = (v - pde_value).abs();
        // decay check: no row may exceed the gap at the smallest n
        let bound = *first_gap.get_or_insert(gap);
        rows.push(Row::new(
            "gnormal/dp",
            RateReport::two_sided(n, v, pde_value, bound),
        ));
    }
    if cfg.mc_paths > 0 {
        let mc = sde_representation_mc(
            &phi,
            &params,
            &solution,
            cfg.mc_paths,
            cfg.mc_steps,
            cfg.seed,
        )
        .map_err(num_err)?;
        rows.push(Row::new(
            "gnormal/mc",
            RateReport::two_sided(
                cfg.mc_steps,
                mc.estimate,
                pde_value,
                3.0 * mc.std_error + MC_ALLOWANCE,
            ),
        ));
    }
    Ok(rows)
}

fn stein_rows(cfg: &ExperimentConfig) -> Result<Vec<Row>, HarnessError> {
    let phis: Vec<PiecewiseLinearFn> = match &cfg.phi {
        Some(s) => vec![parse_phi(s).map_err(parse_err)?],
        None => vec![
            PiecewiseLinearFn::abs(),
            PiecewiseLinearFn::ramp(),
            PiecewiseLinearFn::clip(-1.0, 1.0).expect("ordered"),
        ],
    };
    let mut rows = Vec::new();
    let mut idx = 0;
    let mut push = |suite: &str, r: RateReport| {
        idx += 1;
        rows.push(Row::new(suite, RateReport { n: idx, ..r }));
    };
    for phi in &phis {
        for &t in &cfg.t_list {
            let ctx = SteinContext::new(phi.clone(), t, cfg.x).map_err(num_err)?;
            let sd = t.sqrt();
            let mut worst: f64 = 0.0;
            for j in -12..=12 {
                let w = cfg.x + 0.25 * sd * j as f64 + 1e-3;
                worst = worst.max(stein_residual(&ctx, w).map_err(num_err)?.abs());
            }
            push(
                "stein/residual",
                RateReport::one_sided(0, worst, 0.0, STEIN_RESIDUAL_TOL),
            );
            let fpp =
                verify_f_second_derivative_bound(&ctx, &Sweep::new(cfg.x, 3.0 * sd, sd / 16.0))
                    .map_err(num_err)?;
            let mut r = RateReport::one_sided(0, fpp.estimate, 0.0, fpp.bound);
            r.satisfied = fpp.ratio() <= 1.0 + STEIN_RATIO_SLACK;
            push("stein/second-derivative", r);
            let g = verify_gradient_identity(&ctx).map_err(num_err)?;
            push(
                "stein/gradient",
                RateReport::two_sided(0, g.lhs, g.rhs, STEIN_GRADIENT_TOL),
            );
            let c = gaussian_characterization_check(t, cfg.x, phi).map_err(num_err)?;
            push(
                "stein/characterization",
                RateReport::one_sided(0, c, 0.0, STEIN_CHARACTERIZATION_TOL),
            );
        }
    }
    Ok(rows)
}

fn estimate_rows(cfg: &ExperimentConfig) -> Result<Vec<Row>, HarnessError> {
    let family = cfg.family()?;
    let modes: Vec<StrategyMode> = match cfg.strategy {
        Some(m) => vec![m],
        None => StrategyMode::ALL.to_vec(),
    };
    let seed = cfg.seed.ok_or_else(|| parse_err("estimate needs --seed"))?;
    cfg.n_list
        .iter()
        .map(|&n| {
            block_experiment(&family, n, cfg.k, &modes, seed, cfg.trials)
                .map(|r| Row::new("estimate", r.report))
                .map_err(num_err)
        })
        .collect()
}

fn oracle_rows(cfg: &ExperimentConfig) -> Result<Vec<Row>, HarnessError> {
    let family = cfg.family()?;
    let phi = cfg.phi_or("abs")?;
    let model = RunningSum::new(|w: f64| phi.eval(w));
    cfg.n_list
        .iter()
        .map(|&n| {
            let schedule = Schedule::iid(&family, n);
            let exact = adapted_sup(&schedule, &model, &EvalMode::exact()).map_err(num_err)?;
            let grid = adapted_sup(&schedule, &model, &EvalMode::Grid(cfg.grid_spec()))
                .map_err(num_err)?;
            Ok(Row::new(
                "oracle-check",
                RateReport::two_sided(n, grid, exact, ORACLE_TOL),
            ))
        })
        .collect()
}

/// Runs the configured suite.
pub fn run_suite(cfg: &ExperimentConfig) -> Result<Vec<Row>, HarnessError> {
    match cfg.suite {
        Suite::Lln => lln_rows(cfg),
        Suite::Clt => clt_rows(cfg),
        Suite::Gnormal => gnormal_rows(cfg),
        Suite::Stein => stein_rows(cfg),
        Suite::Estimate => estimate_rows(cfg),
        Suite::OracleCheck => oracle_rows(cfg),
    }
}

/// Writes the rate table; floats use the shortest round-trip representation.
pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| HarnessError::Io(std::io::Error::other(e));
    w.write_record(CSV_HEADER).map_err(io)?;
    for row in rows {
        let r = &row.report;
        w.write_record([
            row.suite.clone(),
            r.n.to_string(),
            r.value.to_string(),
            r.reference.to_string(),
            r.gap.to_string(),
            r.bound.to_string(),
            r.satisfied.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs the suite, writes the CSV to `out` (or `stdout`), and returns the exit status.
pub fn run(cfg: &ExperimentConfig) -> Result<i32, HarnessError> {
    let rows = run_suite(cfg)?;
    match &cfg.out {
        Some(path) => write_csv(&rows, std::fs::File::create(path)?)?,
        None => write_csv(&rows, std::io::stdout().lock())?,
    }
    Ok(if rows.iter().all(|r| r.report.satisfied) {
        0
    } else {
        1
    })
}
