//! Central limit theorems with rates: the convex/concave case with certain mean,
//! and the general case where the centering `μ_i` and scaling `σ_i` adapt to the
//! heat-equation solution along the path.

use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use crate::engine::{adapted_sup, EngineError, EvalMode, RunningSum, Schedule, StepModel};
use crate::family::{FamilyError, FamilyStats, UncertaintyFamily, DEDUP_TOL};
use crate::pwl::{PiecewiseLinearFn, PwlError};
use crate::report::RateReport;

/// Samples in the bracket scan of the selector.
pub const SCAN_SAMPLES: usize = 512;
/// Bisection stops once the bracket is this narrow.
pub const ROOT_TOL: f64 = 1e-12;
/// Heat time used if a stage would evaluate `V` at `t = 0`.
pub const TIME_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CltError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Pwl(#[from] PwlError),
    #[error("positivity of the extreme conditional variances fails")]
    NoVarianceFloor,
    #[error("no root of the zero condition in [{lo}, {hi}] (Vx = {vx}, Vxx = {vxx}, sup at far end = {at_end:e})")]
    NoRoot {
        lo: f64,
        hi: f64,
        vx: f64,
        vxx: f64,
        at_end: f64,
    },
    #[error("family {0} has uncertain mean")]
    UncertainMean(usize),
    #[error("stage means differ: {0} vs {1}")]
    MeanMismatch(f64, f64),
    #[error("family {0} has zero variance")]
    ZeroVariance(usize),
    #[error("test function is not {0}")]
    WrongShape(&'static str),
    #[error("at least one stage is required")]
    Empty,
}

/// Stage centering and scaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepChoice {
    pub mu: f64,
    pub sigma: f64,
    /// `|max over M₂ of f_b|` at `b = sigma`.
    pub residual: f64,
}

/// `f_b(μ, σ²)` for one `(μ, σ²)` pair.
#[inline]
fn f_pair(b: f64, mean: f64, var: f64, mu_i: f64, vx_n: f64, vxx_n: f64) -> f64 {
    let d = mean - mu_i;
    d / b * vx_n + ((var + d * d) / (b * b) - 1.0) * vxx_n
}

/// `sup over M₂ of f_b(μ, σ²)`.
pub fn zero_condition(stats: &FamilyStats, mu_i: f64, b: f64, vx: f64, vxx: f64, n: usize) -> f64 {
    let nf = n as f64;
    let (vx_n, vxx_n) = (vx / nf.sqrt(), vxx / nf);
    stats
        .mean_var_set
        .iter()
        .map(|&(m, v)| f_pair(b, m, v, mu_i, vx_n, vxx_n))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Residual of the zero condition at a selected step.
pub fn zero_condition_residual(
    stats: &FamilyStats,
    choice: &StepChoice,
    vx: f64,
    vxx: f64,
    n: usize,
) -> f64 {
    zero_condition(stats, choice.mu, choice.sigma, vx, vxx, n).abs()
}

/// First `b` from `start` towards `end` where `F(b) ≤ 0`, given `F(start) ≥ 0`.
fn first_root(f: impl Fn(f64) -> f64, start: f64, end: f64, scale: f64) -> Option<f64> {
    // values this small are round-off in the exact zero F(start) = 0
    let zero = 1e-15 * scale;
    if f(start) <= zero || start == end {
        return Some(start);
    }
    let mut prev = start;
    for k in 1..=SCAN_SAMPLES {
        let b = start + (end - start) * (k as f64 / SCAN_SAMPLES as f64);
        if f(b) <= zero {
            let (mut pos, mut neg) = (prev, b);
            while (neg - pos).abs() > ROOT_TOL {
                let mid = 0.5 * (pos + neg);
                if f(mid) <= zero {
                    neg = mid;
                } else {
                    pos = mid;
                }
            }
            return Some(neg);
        }
        prev = b;
    }
    None
}

/// Chooses `(μ_i, σ_i)` from `∂ₓV`, `∂²ₓₓV` at the current state.
///
/// `μ_i = μ̄` if `Vx ≥ 0`, else `μ̲`. When `Vxx ≥ 0`, `σ_i` is the smallest
/// `b ≥ σ̄_{μ_i}` with `sup_{M₂} f_b = 0`; otherwise the largest `b ≤ σ̲_{μ_i}`.
pub fn select_step(
    stats: &FamilyStats,
    vx: f64,
    vxx: f64,
    n: usize,
) -> Result<StepChoice, CltError> {
    let mu = if vx >= 0.0 {
        stats.mu_upper
    } else {
        stats.mu_lower
    };
    let profile = stats.profile_at(mu).ok_or(CltError::NoVarianceFloor)?;
    if !(profile.var_lower > 0.0) {
        return Err(CltError::NoVarianceFloor);
    }
    let f = |b: f64| zero_condition(stats, mu, b, vx, vxx, n);
    let nf = n as f64;
    let scale = vx.abs() / nf.sqrt() + vxx.abs() / nf;
    let (lo, hi) = if vxx >= 0.0 {
        (profile.var_upper.sqrt(), stats.second_moment_sup(mu).sqrt())
    } else {
        (stats.second_moment_inf(mu).sqrt(), profile.var_lower.sqrt())
    };
    let (start, end) = if vxx >= 0.0 { (lo, hi) } else { (hi, lo) };
    let sigma = first_root(f, start, end, scale).ok_or(CltError::NoRoot {
        lo,
        hi,
        vx,
        vxx,
        at_end: f(end),
    })?;
    debug_assert!(sigma >= lo - ROOT_TOL && sigma <= hi + ROOT_TOL);
    Ok(StepChoice {
        mu,
        sigma,
        residual: f(sigma).abs(),
    })
}

/// `C₁ = 2 + 5[σ̄ + (μ̄−μ̲)]/σ₀ + 4[γ̄ + (μ̄−μ̲)³]/σ₀³`.
pub fn c1(stats: &FamilyStats) -> f64 {
    let s0 = stats.sigma0_sq.sqrt();
    let d = stats.diam_means;
    2.0 + 5.0 * (stats.sigma_bar_sq.sqrt() + d) / s0
        + 4.0 * (stats.gamma_bar + d * d * d) / (s0 * s0 * s0)
}

/// `C₁(log n + 1)/√n · ‖φ′‖`.
pub fn adaptive_clt_bound(stats: &FamilyStats, n: usize, lipschitz: f64) -> f64 {
    let nf = n as f64;
    c1(stats) * (nf.ln() + 1.0) / nf.sqrt() * lipschitz
}

/// State `W_{i−1}`; the plan is the selector output at `(t_{i−1}, W_{i−1})`.
pub struct AdaptiveCltModel<'a> {
    phi: &'a PiecewiseLinearFn,
    stats: &'a FamilyStats,
    max_residual: AtomicU64,
    /// Largest |atom − μ| over both candidate centers.
    spread: f64,
}

impl<'a> AdaptiveCltModel<'a> {
    pub fn new(
        phi: &'a PiecewiseLinearFn,
        family: &'a UncertaintyFamily,
    ) -> Result<Self, CltError> {
        let stats = family.stats()?;
        if !stats.check_regularity().positivity {
            return Err(CltError::NoVarianceFloor);
        }
        let spread = family
            .thetas()
            .iter()
            .flat_map(|t| t.atoms())
            .map(|a| {
                (a[0] - stats.mu_upper)
                    .abs()
                    .max((a[0] - stats.mu_lower).abs())
            })
            .fold(0.0, f64::max);
        Ok(Self {
            phi,
            stats,
            max_residual: AtomicU64::new(0.0_f64.to_bits()),
            spread,
        })
    }

    /// Largest zero-condition residual over every state visited so far.
    pub fn max_residual(&self) -> f64 {
        f64::from_bits(self.max_residual.load(Ordering::Relaxed))
    }
}

impl StepModel for AdaptiveCltModel<'_> {
    type State = f64;
    type Plan = StepChoice;

    fn initial_state(&self) -> f64 {
        0.0
    }

    fn plan(&self, n: usize, stage: usize, w: &f64) -> Result<StepChoice, EngineError> {
        let t = ((n - stage + 1) as f64 / n as f64).max(TIME_FLOOR);
        let heat = self
            .phi
            .heat_solution(t, *w)
            .map_err(|e| EngineError::Model(e.to_string()))?;
        let choice = select_step(self.stats, heat.vx, heat.vxx, n)
            .map_err(|e| EngineError::Model(e.to_string()))?;
        // nonnegative floats order like their bit patterns
        self.max_residual
            .fetch_max(choice.residual.to_bits(), Ordering::Relaxed);
        Ok(choice)
    }

    fn step(&self, n: usize, _stage: usize, c: &StepChoice, w: &f64, atom: &[f64]) -> f64 {
        w + (atom[0] - c.mu) / (c.sigma * (n as f64).sqrt())
    }

    fn terminal(&self, _n: usize, w: &f64) -> f64 {
        self.phi.eval(*w)
    }

    fn increment_bound(&self, n: usize, _stage: usize, _family: &UncertaintyFamily) -> f64 {
        self.spread / (self.stats.sigma0_sq.sqrt() * (n as f64).sqrt())
    }
}

/// Report plus diagnostics of one adaptive CLT run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveCltOutcome {
    pub report: RateReport,
    pub max_residual: f64,
    pub c1: f64,
}

/// `|E φ(W_n) − E φ(Z)|` against `C₁(log n + 1)/√n · ‖φ′‖`.
pub fn adaptive_clt_report(
    family: &UncertaintyFamily,
    n: usize,
    phi: &PiecewiseLinearFn,
    mode: &EvalMode,
) -> Result<AdaptiveCltOutcome, CltError> {
    let model = AdaptiveCltModel::new(phi, family)?;
    let value = adapted_sup(&Schedule::iid(family, n), &model, mode)?;
    let reference = phi.heat_solution(1.0, 0.0)?.v;
    let stats = family.stats()?;
    let bound = adaptive_clt_bound(stats, n, phi.lipschitz());
    Ok(AdaptiveCltOutcome {
        report: RateReport::two_sided(n, value, reference, bound),
        max_residual: model.max_residual(),
        c1: c1(stats),
    })
}

/// Convex or concave test function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Convex,
    Concave,
}

/// Per-stage moments of independent, certain-mean stages.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexCltSchedule {
    pub mu: f64,
    pub var_upper: Vec<f64>,
    pub var_lower: Vec<f64>,
    /// `sup_θ E_θ|X_i − μ|³`
    pub third: Vec<f64>,
    pub b_upper_sq: f64,
    pub b_lower_sq: f64,
    /// `Σ_{j≥i} σ̄_j²`
    pub tail_upper: Vec<f64>,
    /// `Σ_{j≥i} σ̲_j²`
    pub tail_lower: Vec<f64>,
}

impl ConvexCltSchedule {
    pub fn new(families: &[UncertaintyFamily]) -> Result<Self, CltError> {
        if families.is_empty() {
            return Err(CltError::Empty);
        }
        let mut mu = None;
        let (mut var_upper, mut var_lower, mut third) = (vec![], vec![], vec![]);
        for (i, fam) in families.iter().enumerate() {
            let s = fam.stats()?;
            if !s.has_certain_mean() {
                return Err(CltError::UncertainMean(i));
            }
            match mu {
                None => mu = Some(s.mu_upper),
                Some(m) if (m - s.mu_upper).abs() > DEDUP_TOL => {
                    return Err(CltError::MeanMismatch(m, s.mu_upper))
                }
                _ => {}
            }
            let p = s.profile_at(s.mu_upper).expect("attained mean");
            if !(p.var_lower > 0.0) {
                return Err(CltError::ZeroVariance(i));
            }
            var_upper.push(p.var_upper);
            var_lower.push(p.var_lower);
            third.push(s.gamma_bar);
        }
        let tails = |v: &[f64]| -> Vec<f64> {
            let mut out = vec![0.0; v.len()];
            let mut acc = 0.0;
            for i in (0..v.len()).rev() {
                acc += v[i];
                out[i] = acc;
            }
            out
        };
        let tail_upper = tails(&var_upper);
        let tail_lower = tails(&var_lower);
        Ok(Self {
            mu: mu.unwrap(),
            b_upper_sq: tail_upper[0],
            b_lower_sq: tail_lower[0],
            var_upper,
            var_lower,
            third,
            tail_upper,
            tail_lower,
        })
    }

    pub fn iid(family: &UncertaintyFamily, n: usize) -> Result<Self, CltError> {
        Self::new(&vec![family.clone(); n])
    }

    pub fn n(&self) -> usize {
        self.var_upper.len()
    }

    /// Normalizer `B̄_n` (convex) or `B̲_n` (concave).
    pub fn normalizer(&self, shape: Shape) -> f64 {
        match shape {
            Shape::Convex => self.b_upper_sq.sqrt(),
            Shape::Concave => self.b_lower_sq.sqrt(),
        }
    }

    /// Rate bound for a test function with Lipschitz constant `lipschitz`.
    pub fn bound(&self, shape: Shape, lipschitz: f64) -> f64 {
        let sum: f64 = (0..self.n())
            .map(|i| {
                let (hi, lo) = (self.var_upper[i], self.var_lower[i]);
                match shape {
                    Shape::Convex => (2.0 * hi * hi.sqrt() + self.third[i]) / self.tail_upper[i],
                    Shape::Concave => (2.0 * lo * hi.sqrt() + self.third[i]) / self.tail_lower[i],
                }
            })
            .sum();
        lipschitz / self.normalizer(shape) * sum
    }
}

fn check_shape(phi: &PiecewiseLinearFn, shape: Shape) -> Result<(), CltError> {
    match shape {
        Shape::Convex if !phi.is_convex() => Err(CltError::WrongShape("convex")),
        Shape::Concave if !phi.is_concave() => Err(CltError::WrongShape("concave")),
        _ => Ok(()),
    }
}

/// `|E φ(Σ(X_i − μ)/B_n) − E φ(Z)|` against the convex/concave rate bound.
pub fn convex_clt_report(
    families: &[UncertaintyFamily],
    phi: &PiecewiseLinearFn,
    shape: Shape,
    mode: &EvalMode,
) -> Result<RateReport, CltError> {
    check_shape(phi, shape)?;
    let schedule = ConvexCltSchedule::new(families)?;
    let scale = 1.0 / schedule.normalizer(shape);
    let model = RunningSum::scaled(scale, schedule.mu, |w: f64| phi.eval(w));
    let value = adapted_sup(&Schedule::Staged(families), &model, mode)?;
    let reference = phi.heat_solution(1.0, 0.0)?.v;
    Ok(RateReport::two_sided(
        schedule.n(),
        value,
        reference,
        schedule.bound(shape, phi.lipschitz()),
    ))
}

/// I.i.d. form: `(log n + 1)/√n · (2 + E|(X−μ)/σ̄|³)‖φ′‖` (convex) or
/// `(log n + 1)/√n · (2σ̄/σ̲ + E|(X−μ)/σ̲|³)‖φ′‖` (concave).
pub fn iid_convex_bound(
    family: &UncertaintyFamily,
    n: usize,
    lipschitz: f64,
    shape: Shape,
) -> Result<f64, CltError> {
    let s = family.stats()?;
    if !s.has_certain_mean() {
        return Err(CltError::UncertainMean(0));
    }
    let p = s.profile_at(s.mu_upper).expect("attained mean");
    let (hi, lo) = (p.var_upper.sqrt(), p.var_lower.sqrt());
    if !(lo > 0.0) {
        return Err(CltError::ZeroVariance(0));
    }
    let nf = n as f64;
    let lead = (nf.ln() + 1.0) / nf.sqrt();
    let k = match shape {
        Shape::Convex => 2.0 + s.gamma_bar / (hi * hi * hi),
        Shape::Concave => 2.0 * hi / lo + s.gamma_bar / (lo * lo * lo),
    };
    Ok(lead * k * lipschitz)
}
