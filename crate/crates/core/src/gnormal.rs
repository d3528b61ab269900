//! The G-normal distribution: the G-heat equation `∂ₜu = G(∂²ₓₓu)`, its discrete
//! volatility-control approximation, and a Monte Carlo check of the feedback
//! diffusion that attains it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use thiserror::Error;

use crate::engine::{
    adapted_sup, EngineError, EvalMode, GridFunction, GridSpec, RunningSum, Schedule, UniformAxis,
};
use crate::family::{DiscreteDistribution, FamilyError, UncertaintyFamily};
use crate::pwl::PiecewiseLinearFn;

/// Largest admissible `σ̄²Δt/Δx²`.
pub const CFL_MAX: f64 = 0.5;
/// Ratio used when the time step is derived from the space step.
pub const CFL_TARGET: f64 = 0.45;
/// Required distance, in units of `σ̄`, between the outermost knot of φ and the boundary.
pub const BOUNDARY_MARGIN: f64 = 4.0;
/// Default half-width in units of `σ̄`, measured beyond the outermost knot.
pub const DEFAULT_RADIUS: f64 = 8.0;
/// Second differences above this count as nonnegative curvature.
pub const CURVATURE_TOL: f64 = 1e-10;
/// Fewest Euler steps accepted by the Monte Carlo.
pub const MIN_MC_STEPS: usize = 16;
const DRIVER_TOL: f64 = 1e-12;
const RADIUS_PAD: f64 = 1.1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GNormalError {
    #[error("need 0 < sigma_lower <= sigma_upper, got {0} and {1}")]
    BadParams(f64, f64),
    #[error("CFL ratio {0} exceeds {CFL_MAX}")]
    Cfl(f64),
    #[error("invalid PDE grid: {0}")]
    BadGrid(String),
    #[error("PDE radius {radius} leaves less than {needed} around the knots of phi")]
    BoundaryTooClose { radius: f64, needed: f64 },
    #[error("driver must have mean 0 and variance 1 (got {mean}, {var})")]
    BadDriver { mean: f64, var: f64 },
    #[error("volatility action {0} outside [sigma_lower, sigma_upper]")]
    BadLambda(f64),
    #[error("volatility grid is empty")]
    EmptyLambda,
    #[error("at least one step is required")]
    ZeroSteps,
    #[error("convex phi but a smaller volatility wins at stage {stage}, x = {x}")]
    NotMaximal { stage: usize, x: f64 },
    #[error("the Monte Carlo needs a seed")]
    MissingSeed,
    #[error("{0} Euler steps is below the minimum {MIN_MC_STEPS}")]
    TooFewSteps(usize),
    #[error("{slices} stored PDE slices cannot serve {steps} Euler steps")]
    SliceMismatch { slices: usize, steps: usize },
    #[error("n-list needs at least 3 strictly increasing entries")]
    BadNList,
    #[error("value function undefined at the origin (grid too small)")]
    OutOfGrid,
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// Volatility bounds `0 < σ̲ ≤ σ̄`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GParams {
    pub sigma_lower: f64,
    pub sigma_upper: f64,
}

impl GParams {
    pub fn new(sigma_lower: f64, sigma_upper: f64) -> Result<Self, GNormalError> {
        if !(sigma_lower > 0.0 && sigma_lower <= sigma_upper && sigma_upper.is_finite()) {
            return Err(GNormalError::BadParams(sigma_lower, sigma_upper));
        }
        Ok(Self {
            sigma_lower,
            sigma_upper,
        })
    }
}

/// `G(α) = ½(σ̄²α⁺ − σ̲²α⁻)`.
#[inline]
pub fn g_function(alpha: f64, params: &GParams) -> f64 {
    let s2 = if alpha >= 0.0 {
        params.sigma_upper
    } else {
        params.sigma_lower
    };
    0.5 * s2 * s2 * alpha
}

/// Explicit finite-difference grid on `[−radius, radius] × [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeGrid {
    pub radius: f64,
    pub dx: f64,
    pub dt: f64,
}

impl PdeGrid {
    pub fn new(radius: f64, dx: f64, dt: f64) -> Self {
        Self { radius, dx, dt }
    }

    /// Radius `8σ̄` beyond the outermost knot; `dt` at CFL ratio 0.45.
    pub fn default_for(phi: &PiecewiseLinearFn, params: &GParams, dx: f64) -> Self {
        let reach = phi.knots().iter().map(|k| k.abs()).fold(0.0, f64::max);
        Self {
            radius: reach + DEFAULT_RADIUS * params.sigma_upper,
            dx,
            dt: CFL_TARGET * dx * dx / (params.sigma_upper * params.sigma_upper),
        }
    }

    pub fn cfl(&self, params: &GParams) -> f64 {
        params.sigma_upper * params.sigma_upper * self.dt / (self.dx * self.dx)
    }

    fn validate(
        &self,
        phi: &PiecewiseLinearFn,
        params: &GParams,
    ) -> Result<UniformAxis, GNormalError> {
        for (name, v) in [("radius", self.radius), ("dx", self.dx), ("dt", self.dt)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(GNormalError::BadGrid(format!("{name} = {v}")));
            }
        }
        let cfl = self.cfl(params);
        if cfl > CFL_MAX {
            return Err(GNormalError::Cfl(cfl));
        }
        let reach = phi.knots().iter().map(|k| k.abs()).fold(0.0, f64::max);
        let needed = reach + BOUNDARY_MARGIN * params.sigma_upper;
        if self.radius < needed {
            return Err(GNormalError::BoundaryTooClose {
                radius: self.radius,
                needed,
            });
        }
        let half = (self.radius / self.dx).ceil();
        if half > 5.0e6 {
            return Err(GNormalError::BadGrid(format!("{half} knots per half-axis")));
        }
        Ok(UniformAxis {
            half: half as usize,
            step: self.dx,
        })
    }
}

/// Stored solution slices `u(k/slices, ·)` for `k = 0..=slices`.
#[derive(Debug, Clone, PartialEq)]
pub struct GHeatSolution {
    pub axis: UniformAxis,
    pub slices: Vec<Vec<f64>>,
    pub time_steps: usize,
}

impl GHeatSolution {
    /// `𝒩_G[φ] = u(1, 0)`.
    pub fn value(&self) -> f64 {
        self.slices.last().expect("at least two slices")[self.axis.half]
    }

    /// `u(1, ·)`.
    pub fn at_time_one(&self) -> GridFunction {
        GridFunction {
            axis: self.axis,
            values: self.slices.last().expect("at least two slices").clone(),
        }
    }

    pub fn slice_count(&self) -> usize {
        self.slices.len() - 1
    }

    /// Whether `∂²ₓₓu(k/slices, x) ≥ −1e-10`, read at the nearest interior knot.
    pub fn curvature_nonneg(&self, slice: usize, x: f64) -> bool {
        let u = &self.slices[slice];
        let last = self.axis.len() - 2;
        let pos = (x / self.axis.step + self.axis.half as f64).round();
        let k = pos.clamp(1.0, last as f64) as usize;
        let h = self.axis.step;
        (u[k + 1] - 2.0 * u[k] + u[k - 1]) / (h * h) >= -CURVATURE_TOL
    }
}

/// Explicit scheme `u ← u + Δt·G(D²u)` with linear extrapolation at both ends.
/// The time step is shrunk so that a whole number of steps lands on each of the
/// `slices` stored times.
pub fn gheat_solve(
    phi: &PiecewiseLinearFn,
    params: &GParams,
    grid: &PdeGrid,
    slices: usize,
) -> Result<GHeatSolution, GNormalError> {
    let axis = grid.validate(phi, params)?;
    let slices = slices.max(1);
    let per_slice = ((1.0 / grid.dt) / slices as f64).ceil().max(1.0) as usize;
    let time_steps = per_slice * slices;
    let dt = 1.0 / time_steps as f64;
    let r = dt / (axis.step * axis.step);
    let len = axis.len();
    let mut u: Vec<f64> = (0..len).map(|k| phi.eval(axis.knot(k))).collect();
    let mut next = vec![0.0; len];
    let mut stored = vec![u.clone()];
    for step in 1..=time_steps {
        next[1..len - 1]
            .par_iter_mut()
            .with_min_len(4096)
            .enumerate()
            .for_each(|(j, out)| {
                let k = j + 1;
                *out = u[k] + g_function(r * (u[k + 1] - 2.0 * u[k] + u[k - 1]), params);
            });
        next[0] = 2.0 * next[1] - next[2];
        next[len - 1] = 2.0 * next[len - 2] - next[len - 3];
        std::mem::swap(&mut u, &mut next);
        if step % per_slice == 0 {
            stored.push(u.clone());
        }
    }
    Ok(GHeatSolution {
        axis,
        slices: stored,
        time_steps,
    })
}

/// Volatility actions, a standardized driver, and a horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicySpec {
    lambdas: Vec<f64>,
    driver: DiscreteDistribution,
    n: usize,
}

impl PolicySpec {
    pub fn new(
        params: &GParams,
        lambdas: Vec<f64>,
        driver: DiscreteDistribution,
        n: usize,
    ) -> Result<Self, GNormalError> {
        if lambdas.is_empty() {
            return Err(GNormalError::EmptyLambda);
        }
        if let Some(&l) = lambdas
            .iter()
            .find(|&&l| !(l >= params.sigma_lower && l <= params.sigma_upper))
        {
            return Err(GNormalError::BadLambda(l));
        }
        if driver.dim() != 1 {
            return Err(FamilyError::WrongDimension {
                expected: 1,
                got: driver.dim(),
            }
            .into());
        }
        let (mean, var) = (driver.mean()[0], driver.variance());
        if mean.abs() > DRIVER_TOL || (var - 1.0).abs() > DRIVER_TOL {
            return Err(GNormalError::BadDriver { mean, var });
        }
        if n == 0 {
            return Err(GNormalError::ZeroSteps);
        }
        Ok(Self { lambdas, driver, n })
    }

    /// Actions `{σ̲, σ̄}`.
    pub fn bang_bang(
        params: &GParams,
        driver: DiscreteDistribution,
        n: usize,
    ) -> Result<Self, GNormalError> {
        let mut l = vec![params.sigma_lower];
        if params.sigma_upper > params.sigma_lower {
            l.push(params.sigma_upper);
        }
        Self::new(params, l, driver, n)
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn driver(&self) -> &DiscreteDistribution {
        &self.driver
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn with_n(&self, n: usize) -> Self {
        Self { n, ..self.clone() }
    }

    /// The uncertainty family `{λ·driver : λ ∈ actions}`.
    pub fn family(&self) -> Result<UncertaintyFamily, GNormalError> {
        let atoms = self.driver.scalar_atoms().expect("scalar driver");
        let thetas = self
            .lambdas
            .iter()
            .map(|&l| {
                DiscreteDistribution::new(
                    atoms.iter().map(|a| l * a).collect(),
                    self.driver.weights().to_vec(),
                )
                .map(|d| d.named(format!("x{l}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(UncertaintyFamily::new(thetas)?)
    }

    /// Radius matching the engine's automatic one for [`family`](Self::family).
    fn fallback_radius(&self, h: f64) -> f64 {
        let atoms = self.driver.scalar_atoms().expect("scalar driver");
        let amax = atoms.iter().map(|a| a.abs()).fold(0.0, f64::max);
        let inc = self
            .lambdas
            .iter()
            .map(|l| (l * amax).abs())
            .fold(0.0, f64::max)
            / (self.n as f64).sqrt();
        let mut reach = h;
        for _ in 0..self.n {
            reach += inc + h;
        }
        reach * RADIUS_PAD
    }
}

/// Backward induction `V_{i−1}(x) = max_λ Σ_a w(a) V_i(x + λa/√n)` from `V_n = φ`.
/// For convex φ every node is checked to be won by the largest action.
pub fn policy_dp_value(
    phi: &PiecewiseLinearFn,
    spec: &PolicySpec,
    grid: &GridSpec,
) -> Result<f64, GNormalError> {
    let axis = grid.axis(spec.fallback_radius(grid.step_size))?;
    let atoms = spec.driver.scalar_atoms().expect("scalar driver");
    let weights = spec.driver.weights();
    let scale = 1.0 / (spec.n as f64).sqrt();
    let convex = phi.is_convex();
    let lmax = spec
        .lambdas
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let mut values: Vec<f64> = (0..axis.len()).map(|k| phi.eval(axis.knot(k))).collect();
    for stage in (1..=spec.n).rev() {
        let prev = &values;
        let next: Vec<Result<f64, GNormalError>> = (0..axis.len())
            .into_par_iter()
            .map(|k| {
                let x = axis.knot(k);
                let expect = |l: f64| -> f64 {
                    atoms
                        .iter()
                        .zip(weights)
                        .map(|(a, w)| w * axis.interp(prev, x + scale * (l * a)))
                        .sum()
                };
                let mut best = f64::NEG_INFINITY;
                for &l in &spec.lambdas {
                    let v = expect(l);
                    if v.is_nan() {
                        return Ok(f64::NAN);
                    }
                    best = best.max(v);
                }
                if convex && expect(lmax) < best - 1e-12 * (1.0 + best.abs()) {
                    return Err(GNormalError::NotMaximal { stage, x });
                }
                Ok(best)
            })
            .collect();
        values = next.into_iter().collect::<Result<_, _>>()?;
    }
    let v0 = values[axis.half];
    if v0.is_nan() {
        return Err(GNormalError::OutOfGrid);
    }
    Ok(v0)
}

/// `|policy DP − engine value for {λ·driver}|` on one shared grid.
pub fn policy_consistency_check(
    phi: &PiecewiseLinearFn,
    spec: &PolicySpec,
    grid: &GridSpec,
) -> Result<f64, GNormalError> {
    let shared = GridSpec::with_radius(
        grid.radius
            .unwrap_or_else(|| spec.fallback_radius(grid.step_size)),
        grid.step_size,
    );
    let dp = policy_dp_value(phi, spec, &shared)?;
    let family = spec.family()?;
    let model = RunningSum::scaled(1.0 / (spec.n as f64).sqrt(), 0.0, |w: f64| phi.eval(w));
    let engine = adapted_sup(
        &Schedule::iid(&family, spec.n),
        &model,
        &EvalMode::Grid(shared),
    )?;
    Ok((dp - engine).abs())
}

/// Discrete-control values against the PDE value along an n-list.
#[derive(Debug, Clone, PartialEq)]
pub struct GNormalRateReport {
    pub n_list: Vec<usize>,
    pub dp_values: Vec<f64>,
    pub pde_value: f64,
    pub gaps: Vec<f64>,
    /// Least-squares slope of `log gap` against `log n` (0 when fewer than two gaps are positive).
    pub slope: f64,
    /// `−2·slope`, the fitted exponent `α̂` in `gap ≈ C n^{−α/2}`.
    pub alpha: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
}

/// Least-squares line through `(x, y)`: `(slope, rms residual)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let m = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / m, y.iter().sum::<f64>() / m);
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let e = b - (my + slope * (a - mx));
            e * e
        })
        .sum();
    (slope, (rss / m).sqrt())
}

/// Gaps `|DP(n) − 𝒩_G[φ]|` and their fitted decay.
pub fn g_rate_fit(
    phi: &PiecewiseLinearFn,
    spec: &PolicySpec,
    n_list: &[usize],
    pde: &PdeGrid,
    dp_grid: &GridSpec,
    params: &GParams,
) -> Result<GNormalRateReport, GNormalError> {
    if n_list.len() < 3 || n_list.windows(2).any(|w| w[0] >= w[1]) || n_list[0] == 0 {
        return Err(GNormalError::BadNList);
    }
    let pde_value = gheat_solve(phi, params, pde, 1)?.value();
    let dp_values = n_list
        .iter()
        .map(|&n| policy_dp_value(phi, &spec.with_n(n), dp_grid))
        .collect::<Result<Vec<_>, _>>()?;
    let gaps: Vec<f64> = dp_values.iter().map(|v| (v - pde_value).abs()).collect();
    let (lx, ly): (Vec<f64>, Vec<f64>) = n_list
        .iter()
        .zip(&gaps)
        .filter(|(_, g)| **g > 0.0)
        .map(|(&n, g)| ((n as f64).ln(), g.ln()))
        .unzip();
    let (slope, residual) = if lx.len() >= 2 {
        fit_line(&lx, &ly)
    } else {
        (0.0, 0.0)
    };
    Ok(GNormalRateReport {
        n_list: n_list.to_vec(),
        dp_values,
        pde_value,
        gaps,
        slope,
        alpha: -2.0 * slope,
        residual,
    })
}

/// Monte Carlo estimate and standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

/// Euler scheme for `dW = σ_φ(t, W) dB`, `W₀ = 0`, with volatility `σ̄` where
/// `∂²ₓₓu(1 − t, W) ≥ 0` and `σ̲` elsewhere, read from the stored PDE slices.
/// Path `p` draws from the ChaCha8 stream `p` of `seed`.
pub fn sde_representation_mc(
    phi: &PiecewiseLinearFn,
    params: &GParams,
    solution: &GHeatSolution,
    paths: usize,
    steps: usize,
    seed: Option<u64>,
) -> Result<McEstimate, GNormalError> {
    let seed = seed.ok_or(GNormalError::MissingSeed)?;
    if steps < MIN_MC_STEPS {
        return Err(GNormalError::TooFewSteps(steps));
    }
    let slices = solution.slice_count();
    if !slices.is_multiple_of(steps) {
        return Err(GNormalError::SliceMismatch { slices, steps });
    }
    if paths < 2 {
        return Err(GNormalError::BadGrid(format!("{paths} paths")));
    }
    let per = slices / steps;
    let sqdt = (1.0 / steps as f64).sqrt();
    let outcomes: Vec<f64> = (0..paths)
        .into_par_iter()
        .map(|p| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(p as u64);
            let mut w = 0.0;
            for j in 0..steps {
                // time t = j/steps reads u at 1 − t
                let vol = if solution.curvature_nonneg(slices - j * per, w) {
                    params.sigma_upper
                } else {
                    params.sigma_lower
                };
                let z: f64 = StandardNormal.sample(&mut rng);
                w += vol * sqdt * z;
            }
            phi.eval(w)
        })
        .collect();
    let m = paths as f64;
    let mean = outcomes.iter().sum::<f64>() / m;
    let var = outcomes
        .iter()
        .map(|v| (v - mean) * (v - mean))
        .sum::<f64>()
        / (m - 1.0);
    Ok(McEstimate {
        estimate: mean,
        std_error: (var / m).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal::MEAN_ABS;

    fn fair() -> DiscreteDistribution {
        DiscreteDistribution::new(vec![-1.0, 1.0], vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn g_formula() {
        let p = GParams::new(1.0, 2.0).unwrap();
        assert_eq!(
            (
                g_function(2.0, &p),
                g_function(-2.0, &p),
                g_function(0.0, &p)
            ),
            (4.0, -1.0, 0.0)
        );
        let q = GParams::new(1.5, 1.5).unwrap();
        for a in [-3.0, -0.1, 0.0, 2.5] {
            assert_eq!(g_function(a, &q), 1.125 * a);
            assert_eq!(g_function(3.0 * a, &p), 3.0 * g_function(a, &p));
        }
        assert!(GParams::new(2.0, 1.0).is_err());
    }

    #[test]
    fn pde_reference_values() {
        let check = |phi: PiecewiseLinearFn, lo: f64, hi: f64, expect: f64| {
            let p = GParams::new(lo, hi).unwrap();
            let v = gheat_solve(&phi, &p, &PdeGrid::default_for(&phi, &p, 1.0 / 64.0), 1)
                .unwrap()
                .value();
            assert!((v - expect).abs() < 1e-3, "{v} vs {expect}");
        };
        check(PiecewiseLinearFn::abs(), 1.0, 1.0, MEAN_ABS);
        check(PiecewiseLinearFn::abs(), 1.0, 2.0, 2.0 * MEAN_ABS);
        check(PiecewiseLinearFn::abs().negate(), 1.0, 2.0, -MEAN_ABS);
    }

    #[test]
    fn pde_grid_errors() {
        let p = GParams::new(1.0, 2.0).unwrap();
        let phi = PiecewiseLinearFn::abs();
        assert!(matches!(
            gheat_solve(&phi, &p, &PdeGrid::new(16.0, 0.1, 0.01), 1),
            Err(GNormalError::Cfl(_))
        ));
        assert!(matches!(
            gheat_solve(&phi, &p, &PdeGrid::new(5.0, 0.1, 0.001), 1),
            Err(GNormalError::BoundaryTooClose { .. })
        ));
    }

    #[test]
    fn policy_dp_small_cases() {
        let p = GParams::new(1.0, 2.0).unwrap();
        let spec = PolicySpec::bang_bang(&p, fair(), 1).unwrap();
        let v = policy_dp_value(&PiecewiseLinearFn::abs(), &spec, &GridSpec::new(1e-3)).unwrap();
        assert_eq!(v, 2.0);
        assert!(PolicySpec::new(&p, vec![3.0], fair(), 2).is_err());
        let skew = DiscreteDistribution::new(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            PolicySpec::bang_bang(&p, skew, 2),
            Err(GNormalError::BadDriver { .. })
        ));
    }

    #[test]
    fn policy_consistency_gap_is_round_off() {
        let p = GParams::new(1.0, 2.0).unwrap();
        for n in [1, 4, 9] {
            let spec = PolicySpec::bang_bang(&p, fair(), n).unwrap();
            for phi in [
                PiecewiseLinearFn::abs(),
                PiecewiseLinearFn::clip(-1.0, 1.0).unwrap(),
            ] {
                let gap = policy_consistency_check(&phi, &spec, &GridSpec::new(1e-3)).unwrap();
                assert!(gap <= 1e-9, "n={n} gap={gap}");
            }
        }
    }

    #[test]
    fn mc_argument_checks() {
        let p = GParams::new(1.0, 1.0).unwrap();
        let phi = PiecewiseLinearFn::abs();
        let sol = gheat_solve(&phi, &p, &PdeGrid::default_for(&phi, &p, 0.05), 32).unwrap();
        assert_eq!(
            sde_representation_mc(&phi, &p, &sol, 10, 32, None),
            Err(GNormalError::MissingSeed)
        );
        assert_eq!(
            sde_representation_mc(&phi, &p, &sol, 10, 8, Some(1)),
            Err(GNormalError::TooFewSteps(8))
        );
        assert!(matches!(
            sde_representation_mc(&phi, &p, &sol, 10, 24, Some(1)),
            Err(GNormalError::SliceMismatch { .. })
        ));
        let a = sde_representation_mc(&phi, &p, &sol, 2000, 32, Some(7)).unwrap();
        let b = sde_representation_mc(&phi, &p, &sol, 2000, 32, Some(7)).unwrap();
        assert_eq!(a, b);
        assert!((a.estimate - MEAN_ABS).abs() < 4.0 * a.std_error + 0.02);
    }
}
