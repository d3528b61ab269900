//! Laws of large numbers with explicit rates: deviation of the sample mean from
//! the mean interval (or mean polygon) and the adaptive-centering LLN.

use std::f64::consts::PI;
use std::sync::Arc;

use thiserror::Error;

use crate::engine::{
    adapted_sup, EngineError, EvalMode, PlanarRunningSum, RunningSum, Schedule, StepModel,
};
use crate::family::{FamilyError, UncertaintyFamily};
use crate::polytope::{Point, Polytope2D, PolytopeError};
use crate::report::RateReport;

/// Relative slack for bounds attained with equality.
pub const EQUALITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LlnError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("polygon is not the convex hull of the family's means")]
    NotHull,
    #[error("derivative disagrees with finite differences at {x}: {deriv} vs {fd}")]
    DerivativeMismatch { x: f64, deriv: f64, fd: f64 },
    #[error("curvature bound must be finite and nonnegative, got {0}")]
    BadCurvature(f64),
    #[error("interval bounds must satisfy lo <= hi, got [{0}, {1}]")]
    BadInterval(f64, f64),
    #[error("horizon must be at least 1")]
    ZeroHorizon,
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type PlanarFn<T> = Arc<dyn Fn(Point) -> T + Send + Sync>;

/// Points where derivatives are cross-checked against finite differences.
const CHECK_POINTS: [f64; 9] = [-3.0, -1.5, -0.75, -0.1, 0.0, 0.2, 0.9, 1.7, 3.0];
const CHECK_STEP: f64 = 1e-5;
const CHECK_TOL: f64 = 1e-5;

/// A `C¹` test function with Lipschitz derivative and a caller-supplied `‖φ″‖`.
#[derive(Clone)]
pub struct SmoothTestFn {
    pub name: String,
    eval: ScalarFn,
    deriv: ScalarFn,
    pub second_norm: f64,
}

impl std::fmt::Debug for SmoothTestFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SmoothTestFn")
            .field("name", &self.name)
            .field("second_norm", &self.second_norm)
            .finish()
    }
}

impl SmoothTestFn {
    /// Checks `deriv` against central differences of `eval`; `second_norm` is trusted.
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
        second_norm: f64,
    ) -> Result<Self, LlnError> {
        if !(second_norm.is_finite() && second_norm >= 0.0) {
            return Err(LlnError::BadCurvature(second_norm));
        }
        for x in CHECK_POINTS {
            let fd = (eval(x + CHECK_STEP) - eval(x - CHECK_STEP)) / (2.0 * CHECK_STEP);
            let d = deriv(x);
            if !((fd - d).abs() <= CHECK_TOL) {
                return Err(LlnError::DerivativeMismatch { x, deriv: d, fd });
            }
        }
        Ok(Self {
            name: name.into(),
            eval: Arc::new(eval),
            deriv: Arc::new(deriv),
            second_norm,
        })
    }

    /// `y²/2`, `‖φ″‖ = 1`.
    pub fn quadratic() -> Self {
        Self::new("quadratic", |y| 0.5 * y * y, |y| y, 1.0).unwrap()
    }

    /// `√(1 + y²)`, `‖φ″‖ = 1` (attained at 0).
    pub fn soft_abs() -> Self {
        Self::new(
            "soft_abs",
            |y| (1.0 + y * y).sqrt(),
            |y| y / (1.0 + y * y).sqrt(),
            1.0,
        )
        .unwrap()
    }

    /// `log cosh y`, `‖φ″‖ = 1`.
    pub fn log_cosh() -> Self {
        Self::new(
            "log_cosh",
            |y: f64| y.abs() + (-2.0 * y.abs()).exp().ln_1p() - std::f64::consts::LN_2,
            f64::tanh,
            1.0,
        )
        .unwrap()
    }

    /// `c·y`, `‖φ″‖ = 0`.
    pub fn linear(c: f64) -> Self {
        Self::new("linear", move |y| c * y, move |_| c, 0.0).unwrap()
    }

    pub fn eval(&self, y: f64) -> f64 {
        (self.eval)(y)
    }

    pub fn deriv(&self, y: f64) -> f64 {
        (self.deriv)(y)
    }
}

/// A planar `C¹` test function with Lipschitz gradient and `λ* = sup ‖D²φ‖`.
#[derive(Clone)]
pub struct SmoothTestFn2 {
    pub name: String,
    eval: PlanarFn<f64>,
    grad: PlanarFn<Point>,
    pub hessian_norm: f64,
}

impl std::fmt::Debug for SmoothTestFn2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SmoothTestFn2")
            .field("name", &self.name)
            .field("hessian_norm", &self.hessian_norm)
            .finish()
    }
}

impl SmoothTestFn2 {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(Point) -> f64 + Send + Sync + 'static,
        grad: impl Fn(Point) -> Point + Send + Sync + 'static,
        hessian_norm: f64,
    ) -> Result<Self, LlnError> {
        if !(hessian_norm.is_finite() && hessian_norm >= 0.0) {
            return Err(LlnError::BadCurvature(hessian_norm));
        }
        for (i, &a) in CHECK_POINTS.iter().enumerate() {
            let b = CHECK_POINTS[(i * 4 + 3) % CHECK_POINTS.len()];
            let g = grad([a, b]);
            let fx = (eval([a + CHECK_STEP, b]) - eval([a - CHECK_STEP, b])) / (2.0 * CHECK_STEP);
            let fy = (eval([a, b + CHECK_STEP]) - eval([a, b - CHECK_STEP])) / (2.0 * CHECK_STEP);
            for (d, fd) in [(g[0], fx), (g[1], fy)] {
                if !((fd - d).abs() <= CHECK_TOL) {
                    return Err(LlnError::DerivativeMismatch { x: a, deriv: d, fd });
                }
            }
        }
        Ok(Self {
            name: name.into(),
            eval: Arc::new(eval),
            grad: Arc::new(grad),
            hessian_norm,
        })
    }

    /// `|y|²/2`, `λ* = 1`.
    pub fn quadratic() -> Self {
        Self::new(
            "quadratic",
            |p| 0.5 * (p[0] * p[0] + p[1] * p[1]),
            |p| p,
            1.0,
        )
        .unwrap()
    }

    /// Squared distance to the translated tangent cone of `poly` at vertex `i`, `λ* = 2`.
    pub fn cone_distance(poly: &Polytope2D, i: usize) -> Self {
        let cone = poly.vertex_cone(i);
        let c2 = cone.clone();
        Self::new(
            format!("cone_distance_{i}"),
            move |p| cone.dist2(p),
            move |p| c2.grad_dist2(p),
            2.0,
        )
        .unwrap()
    }

    pub fn eval(&self, p: Point) -> f64 {
        (self.eval)(p)
    }

    pub fn grad(&self, p: Point) -> Point {
        (self.grad)(p)
    }
}

fn check_n(n: usize) -> Result<(), LlnError> {
    if n == 0 {
        Err(LlnError::ZeroHorizon)
    } else {
        Ok(())
    }
}

/// Squared distance from `y` to `[lo, hi]`.
pub fn interval_dist2(y: f64, lo: f64, hi: f64) -> f64 {
    let above = (y - hi).max(0.0);
    let below = (lo - y).max(0.0);
    above * above + below * below
}

/// `E[d²_{[lo,hi]}(X̄_n)]` for an arbitrary interval.
pub fn interval_deviation_value(
    family: &UncertaintyFamily,
    n: usize,
    lo: f64,
    hi: f64,
    mode: &EvalMode,
) -> Result<f64, LlnError> {
    check_n(n)?;
    family.stats()?;
    if !(lo <= hi) {
        return Err(LlnError::BadInterval(lo, hi));
    }
    let nf = n as f64;
    let model = RunningSum::new(move |s: f64| interval_dist2(s / nf, lo, hi));
    Ok(adapted_sup(&Schedule::iid(family, n), &model, mode)?)
}

/// Deviation of the sample mean from `[μ̲, μ̄]` against `2[σ̄² + (μ̄−μ̲)²]/n`.
pub fn interval_deviation_report(
    family: &UncertaintyFamily,
    n: usize,
    mode: &EvalMode,
) -> Result<RateReport, LlnError> {
    let s = family.stats()?;
    let value = interval_deviation_value(family, n, s.mu_lower, s.mu_upper, mode)?;
    let bound = interval_deviation_bound(family, n)?;
    Ok(RateReport::one_sided(n, value, 0.0, bound))
}

/// `2[σ̄² + (μ̄−μ̲)²]/n`.
pub fn interval_deviation_bound(family: &UncertaintyFamily, n: usize) -> Result<f64, LlnError> {
    check_n(n)?;
    let s = family.stats()?;
    Ok(2.0 * (s.sigma_bar_sq + s.diam_means * s.diam_means) / n as f64)
}

/// Running state `y = Σ_{j<i}(X_j − μ_j)/n` with `μ_i` picked by the sign of `φ′(y)`.
struct AdaptiveMean<'a> {
    phi: &'a SmoothTestFn,
    mu_upper: f64,
    mu_lower: f64,
}

impl StepModel for AdaptiveMean<'_> {
    type State = f64;
    type Plan = f64;

    fn initial_state(&self) -> f64 {
        0.0
    }

    fn plan(&self, _n: usize, _stage: usize, y: &f64) -> Result<f64, EngineError> {
        Ok(if self.phi.deriv(*y) >= 0.0 {
            self.mu_upper
        } else {
            self.mu_lower
        })
    }

    fn step(&self, n: usize, _stage: usize, mu: &f64, y: &f64, atom: &[f64]) -> f64 {
        y + (atom[0] - mu) / n as f64
    }

    fn terminal(&self, _n: usize, y: &f64) -> f64 {
        self.phi.eval(*y)
    }

    fn increment_bound(&self, n: usize, _stage: usize, family: &UncertaintyFamily) -> f64 {
        family
            .thetas()
            .iter()
            .flat_map(|t| t.atoms())
            .map(|a| {
                (a[0] - self.mu_upper)
                    .abs()
                    .max((a[0] - self.mu_lower).abs())
            })
            .fold(0.0, f64::max)
            / n as f64
    }
}

/// `C₀ = ½[σ̄² + (μ̄−μ̲)²]`.
pub fn lln_constant(family: &UncertaintyFamily) -> Result<f64, LlnError> {
    let s = family.stats()?;
    Ok(0.5 * (s.sigma_bar_sq + s.diam_means * s.diam_means))
}

/// Adaptive-centering LLN: `|E φ(Σ(X_i − μ_i)/n) − φ(0)|` against `C₀‖φ″‖/n`.
pub fn adaptive_lln_report(
    family: &UncertaintyFamily,
    n: usize,
    phi: &SmoothTestFn,
    mode: &EvalMode,
) -> Result<RateReport, LlnError> {
    check_n(n)?;
    let s = family.stats()?;
    let model = AdaptiveMean {
        phi,
        mu_upper: s.mu_upper,
        mu_lower: s.mu_lower,
    };
    let value = adapted_sup(&Schedule::iid(family, n), &model, mode)?;
    let bound = lln_constant(family)? * phi.second_norm / n as f64;
    Ok(RateReport::two_sided_with_slack(
        n,
        value,
        phi.eval(0.0),
        bound,
        EQUALITY_SLACK,
    ))
}

/// Checks that `poly` has exactly the vertices of the hull of the family's means.
pub fn validate_mean_hull(family: &UncertaintyFamily, poly: &Polytope2D) -> Result<(), LlnError> {
    let means = &family.planar_stats()?.means;
    let hull = Polytope2D::hull(means)?;
    if hull.same_vertices(poly, 1e-9) {
        Ok(())
    } else {
        Err(LlnError::NotHull)
    }
}

/// `m{σ̄² + diam²(𝒫)}/n` with `σ̄² = sup_θ E_θ|X − E_θX|²`.
pub fn polytope_deviation_bound(
    family: &UncertaintyFamily,
    poly: &Polytope2D,
    n: usize,
) -> Result<f64, LlnError> {
    check_n(n)?;
    let sigma = family.planar_stats()?.sigma_bar_sq;
    let d = poly.diameter();
    Ok(poly.m() as f64 * (sigma + d * d) / n as f64)
}

/// `E[d²_𝒫(X̄_n)]` in the plane against [`polytope_deviation_bound`].
pub fn polytope_deviation_report(
    family: &UncertaintyFamily,
    poly: &Polytope2D,
    n: usize,
    mode: &EvalMode,
) -> Result<RateReport, LlnError> {
    check_n(n)?;
    validate_mean_hull(family, poly)?;
    let p = poly.clone();
    let model = PlanarRunningSum::new(1.0 / n as f64, move |s: Point| p.dist2(s));
    let value = adapted_sup(&Schedule::iid(family, n), &model, mode)?;
    let bound = polytope_deviation_bound(family, poly, n)?;
    Ok(RateReport::one_sided(n, value, 0.0, bound))
}

/// Planar running state with `μ_i` the first vertex of the mean hull maximizing `μ·Dφ(y)`.
struct AdaptivePlanarMean<'a> {
    phi: &'a SmoothTestFn2,
    vertices: Vec<Point>,
}

impl StepModel for AdaptivePlanarMean<'_> {
    type State = Point;
    type Plan = Point;

    fn initial_state(&self) -> Point {
        [0.0, 0.0]
    }

    fn plan(&self, _n: usize, _stage: usize, y: &Point) -> Result<Point, EngineError> {
        let g = self.phi.grad(*y);
        let mut best = self.vertices[0];
        let mut best_val = best[0] * g[0] + best[1] * g[1];
        for v in &self.vertices[1..] {
            let val = v[0] * g[0] + v[1] * g[1];
            // strict comparison keeps the lowest index on ties
            if val > best_val {
                best = *v;
                best_val = val;
            }
        }
        Ok(best)
    }

    fn step(&self, n: usize, _stage: usize, mu: &Point, y: &Point, a: &[f64]) -> Point {
        let nf = n as f64;
        [y[0] + (a[0] - mu[0]) / nf, y[1] + (a[1] - mu[1]) / nf]
    }

    fn terminal(&self, _n: usize, y: &Point) -> f64 {
        self.phi.eval(*y)
    }

    fn increment_bound(&self, n: usize, _stage: usize, family: &UncertaintyFamily) -> f64 {
        let vmax = self
            .vertices
            .iter()
            .flat_map(|v| v.iter())
            .fold(0.0_f64, |acc, c| acc.max(c.abs()));
        (family.max_abs_coord() + vmax) / n as f64
    }
}

/// Planar adaptive LLN against `λ*{σ̄² + diam²(𝒫)}/(2n)`.
pub fn adaptive_lln_planar_report(
    family: &UncertaintyFamily,
    n: usize,
    phi: &SmoothTestFn2,
    mode: &EvalMode,
) -> Result<RateReport, LlnError> {
    check_n(n)?;
    let stats = family.planar_stats()?;
    let poly = Polytope2D::hull(&stats.means)?;
    let model = AdaptivePlanarMean {
        phi,
        vertices: poly.vertices().to_vec(),
    };
    let value = adapted_sup(&Schedule::iid(family, n), &model, mode)?;
    let d = poly.diameter();
    let bound = phi.hessian_norm * (stats.sigma_bar_sq + d * d) / (2.0 * n as f64);
    Ok(RateReport::two_sided_with_slack(
        n,
        value,
        phi.eval([0.0, 0.0]),
        bound,
        EQUALITY_SLACK,
    ))
}

/// Disk bound data: polygon order, circumscribed radius and the final rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskBoundReport {
    pub m: usize,
    /// Circumradius `R / cos(π/m)` of the regular m-gon circumscribing the disk.
    pub r_m: f64,
    /// `r_m − R`.
    pub excess: f64,
    /// `7π²R/m²`.
    pub excess_bound: f64,
    pub geometric_ok: bool,
    /// `(7π²R + √(σ̄² + 16R²)) / n^{2/5}`.
    pub bound: f64,
}

/// `r_m − R = R(1 − cos(π/m))/cos(π/m)`, written without cancellation.
pub fn disk_excess(radius: f64, m: usize) -> f64 {
    let theta = PI / m as f64;
    let s = (theta / 2.0).sin();
    radius * 2.0 * s * s / theta.cos()
}

/// Smallest `m ≥ 3` with `m⁵ ≥ n`, i.e. `⌈n^{1/5}⌉` without rounding trouble.
pub fn disk_polygon_order(n: usize) -> usize {
    let mut m = 1usize;
    while (m as u128).pow(5) < n as u128 {
        m += 1;
    }
    m.max(3)
}

pub fn disk_bound_report(radius: f64, sigma_bar_sq: f64, n: usize) -> DiskBoundReport {
    let m = disk_polygon_order(n);
    let excess = disk_excess(radius, m);
    let excess_bound = 7.0 * PI * PI * radius / (m * m) as f64;
    DiskBoundReport {
        m,
        r_m: radius / (PI / m as f64).cos(),
        excess,
        excess_bound,
        geometric_ok: excess <= excess_bound,
        bound: (7.0 * PI * PI * radius + (sigma_bar_sq + 16.0 * radius * radius).sqrt())
            / (n as f64).powf(0.4),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::presets::{f1, f2, f3, fair_coin};
    use crate::family::DiscreteDistribution;

    fn exact() -> EvalMode {
        EvalMode::exact()
    }

    #[test]
    fn interval_examples() {
        let r = interval_deviation_report(&f1(), 1, &exact()).unwrap();
        assert_eq!((r.value, r.bound, r.satisfied), (0.5, 4.0, true));
        let r = interval_deviation_report(&f2(), 1, &exact()).unwrap();
        assert_eq!((r.value, r.bound), (4.0, 8.0));
        for n in 1..=6 {
            let r = interval_deviation_report(&fair_coin(), n, &exact()).unwrap();
            assert!((r.value - 1.0 / n as f64).abs() < 1e-15);
            assert_eq!(r.bound, 2.0 / n as f64);
        }
    }

    #[test]
    fn adaptive_examples() {
        let r = adaptive_lln_report(&f1(), 1, &SmoothTestFn::quadratic(), &exact()).unwrap();
        assert_eq!((r.value, r.reference, r.bound), (1.0, 0.0, 1.0));
        assert!(r.satisfied);
        for n in [1, 2, 5] {
            let r =
                adaptive_lln_report(&fair_coin(), n, &SmoothTestFn::quadratic(), &exact()).unwrap();
            assert!((r.value - 0.5 / n as f64).abs() < 1e-15);
            assert!(r.satisfied);
        }
        for fam in [f1(), f2(), f3()] {
            let r = adaptive_lln_report(&fam, 3, &SmoothTestFn::linear(2.0), &exact()).unwrap();
            assert!(
                r.gap.abs() < 1e-15 && r.bound == 0.0 && r.satisfied,
                "{r:?}"
            );
        }
    }

    #[test]
    fn derivative_mismatch_is_rejected() {
        assert!(matches!(
            SmoothTestFn::new("bad", |y| y * y, |y| y, 2.0),
            Err(LlnError::DerivativeMismatch { .. })
        ));
        assert!(SmoothTestFn::new("neg", |y| y, |_| 1.0, -1.0).is_err());
        let _ = SmoothTestFn::soft_abs();
        let _ = SmoothTestFn::log_cosh();
    }

    fn segment_family() -> UncertaintyFamily {
        let a =
            DiscreteDistribution::planar(vec![[1.0, 0.0], [-1.0, 0.0]], vec![0.5, 0.5]).unwrap();
        let b =
            DiscreteDistribution::planar(vec![[1.0, 1.0], [1.0, -1.0]], vec![0.5, 0.5]).unwrap();
        UncertaintyFamily::new(vec![a, b]).unwrap()
    }

    #[test]
    fn polytope_examples() {
        let cov = DiscreteDistribution::planar(
            vec![[1.0, 0.0], [-1.0, 0.0], [0.0, 2.0], [0.0, -2.0]],
            vec![0.25; 4],
        )
        .unwrap();
        let fam = UncertaintyFamily::new(vec![cov]).unwrap();
        let poly = Polytope2D::point([0.0, 0.0]);
        for n in 1..=3 {
            let r = polytope_deviation_report(&fam, &poly, n, &exact()).unwrap();
            assert!((r.value - 2.5 / n as f64).abs() < 1e-15);
        }
        let fam = segment_family();
        let seg = Polytope2D::new(vec![[0.0, 0.0], [1.0, 0.0]]).unwrap();
        let r = polytope_deviation_report(&fam, &seg, 1, &exact()).unwrap();
        assert!(r.satisfied && r.value > 0.0);
        let wrong = Polytope2D::new(vec![[0.0, 0.0], [2.0, 0.0]]).unwrap();
        assert_eq!(
            polytope_deviation_report(&fam, &wrong, 1, &exact()),
            Err(LlnError::NotHull)
        );
        let vertex = DiscreteDistribution::planar(vec![[1.0, 0.0]], vec![1.0]).unwrap();
        let fam = UncertaintyFamily::new(vec![vertex]).unwrap();
        let r =
            polytope_deviation_report(&fam, &Polytope2D::point([1.0, 0.0]), 1, &exact()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn planar_adaptive_lln() {
        let fam = segment_family();
        for n in 1..=4 {
            let r =
                adaptive_lln_planar_report(&fam, n, &SmoothTestFn2::quadratic(), &exact()).unwrap();
            assert!(r.satisfied, "{r:?}");
        }
    }

    #[test]
    fn disk_examples() {
        assert!((disk_excess(1.0, 4) - (2.0_f64.sqrt() - 1.0)).abs() < 1e-15);
        let r = disk_bound_report(1.0, 1.0, 32);
        assert_eq!(r.m, 3);
        let r = disk_bound_report(1.0, 1.0, 1024);
        assert_eq!(r.m, 4);
        assert!((r.r_m - 2.0_f64.sqrt()).abs() < 1e-15);
        assert!(r.geometric_ok);
        let r = disk_bound_report(1.0, 1.0, 32);
        assert!((r.bound - (7.0 * PI * PI + 17.0_f64.sqrt()) / 4.0).abs() < 1e-12);
        assert!((r.bound - 18.303).abs() < 1e-3);
        assert_eq!(disk_polygon_order(243), 3);
        assert_eq!(disk_polygon_order(244), 4);
    }
}
