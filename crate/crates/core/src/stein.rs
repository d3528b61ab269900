//! Stein equation `t f′(w) − (w − x) f(w) = φ(w) − E φ(x + √t Z)` for
//! piecewise-linear φ: its bounded solution and numerical checks of the
//! solution's properties.

use thiserror::Error;

use crate::normal;
use crate::pwl::{HeatEval, PiecewiseLinearFn, PwlError};
use crate::quadrature::{integrate, QuadratureError};

/// Absolute quadrature tolerance for `f`.
pub const SOLUTION_TOL: f64 = 1e-10;
/// Central-difference step for `f′`.
pub const FIRST_DIFF_STEP: f64 = 1e-5;
/// Central-difference step for `f″`.
pub const SECOND_DIFF_STEP: f64 = 1e-4;
/// Truncation of Gaussian tails, in standard deviations.
const TAIL: f64 = 12.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SteinError {
    #[error(transparent)]
    Heat(#[from] PwlError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("sweep needs a positive radius and step")]
    BadSweep,
}

/// Center `x`, variance `t > 0` and test function φ.
#[derive(Debug, Clone, PartialEq)]
pub struct SteinContext {
    pub x: f64,
    pub t: f64,
    pub phi: PiecewiseLinearFn,
    heat: HeatEval,
}

impl SteinContext {
    pub fn new(phi: PiecewiseLinearFn, t: f64, x: f64) -> Result<Self, SteinError> {
        let heat = phi.heat_solution(t, x)?;
        Ok(Self { x, t, phi, heat })
    }

    /// `(V, ∂ₓV, ∂²ₓₓV)` at `(t, x)`.
    pub fn heat(&self) -> HeatEval {
        self.heat
    }

    /// Knots of `h(y) = φ(x + √t y)` in the standardized variable.
    fn standardized_knots(&self) -> Vec<f64> {
        let sd = self.t.sqrt();
        self.phi.knots().iter().map(|k| (k - self.x) / sd).collect()
    }

    /// `f_φ(w)` with quadrature tolerance `tol`.
    pub fn solution_with_tol(&self, w: f64, tol: f64) -> Result<f64, SteinError> {
        let sd = self.t.sqrt();
        let s = (w - self.x) / sd;
        let mean = self.heat.v;
        let h = |y: f64| self.phi.eval(self.x + sd * y) - mean;
        // e^{(s²−y²)/2} = e^{-(y−s)(y+s)/2} stays ≤ 1 on the integration range
        let weight = |y: f64| (-(y - s) * (y + s) / 2.0).exp();
        let breaks = self.standardized_knots();
        // The full-line integral vanishes, so for s > 0 the upper tail is used.
        let g = if s <= 0.0 {
            integrate(|y| weight(y) * h(y), s - TAIL, s, &breaks, tol * sd)?
        } else {
            -integrate(|y| weight(y) * h(y), s, s + TAIL, &breaks, tol * sd)?
        };
        Ok(g / sd)
    }

    /// `f_φ(w)` with the default tolerance.
    pub fn solution(&self, w: f64) -> Result<f64, SteinError> {
        self.solution_with_tol(w, SOLUTION_TOL)
    }

    /// `t f′(w) − (w − x) f(w) − [φ(w) − V(t,x)]` with a central difference for `f′`.
    pub fn residual(&self, w: f64) -> Result<f64, SteinError> {
        let h = FIRST_DIFF_STEP;
        let tol = FD_TOL;
        let fp =
            (self.solution_with_tol(w + h, tol)? - self.solution_with_tol(w - h, tol)?) / (2.0 * h);
        let f = self.solution_with_tol(w, tol)?;
        Ok(self.t * fp - (w - self.x) * f - (self.phi.eval(w) - self.heat.v))
    }

    /// Second central difference of `f` at `w`.
    pub fn second_derivative(&self, w: f64) -> Result<f64, SteinError> {
        let h = SECOND_DIFF_STEP;
        let tol = FD_TOL;
        let up = self.solution_with_tol(w + h, tol)?;
        let mid = self.solution_with_tol(w, tol)?;
        let down = self.solution_with_tol(w - h, tol)?;
        Ok((up - 2.0 * mid + down) / (h * h))
    }
}

/// Quadrature tolerance inside finite differences, where errors are divided by `h` or `h²`.
const FD_TOL: f64 = 1e-14;

pub fn stein_solution(ctx: &SteinContext, w: f64) -> Result<f64, SteinError> {
    ctx.solution(w)
}

pub fn stein_residual(ctx: &SteinContext, w: f64) -> Result<f64, SteinError> {
    ctx.residual(w)
}

/// Sweep of `|f″|` against its bound `2‖φ′‖/t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondDerivativeCheck {
    pub estimate: f64,
    pub bound: f64,
    pub points: usize,
    /// Sample points skipped because a knot of φ is within one difference step.
    pub skipped: usize,
}

impl SecondDerivativeCheck {
    pub fn ratio(&self) -> f64 {
        if self.bound == 0.0 {
            if self.estimate == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.estimate / self.bound
        }
    }
}

/// Uniform sweep `w ∈ [center − radius, center + radius]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub center: f64,
    pub radius: f64,
    pub step: f64,
}

impl Sweep {
    pub fn new(center: f64, radius: f64, step: f64) -> Self {
        Self {
            center,
            radius,
            step,
        }
    }

    fn points(&self) -> Result<Vec<f64>, SteinError> {
        if !(self.radius > 0.0 && self.step > 0.0) {
            return Err(SteinError::BadSweep);
        }
        let half = (self.radius / self.step).floor() as i64;
        Ok((-half..=half)
            .map(|k| self.center + k as f64 * self.step)
            .collect())
    }
}

/// Largest `|f″|` over the sweep, away from the knots of φ where `f″` jumps.
pub fn verify_f_second_derivative_bound(
    ctx: &SteinContext,
    sweep: &Sweep,
) -> Result<SecondDerivativeCheck, SteinError> {
    let h = SECOND_DIFF_STEP;
    let mut estimate: f64 = 0.0;
    let mut points = 0;
    let mut skipped = 0;
    for w in sweep.points()? {
        if ctx.phi.knots().iter().any(|k| (w - k).abs() <= h) {
            skipped += 1;
            continue;
        }
        estimate = estimate.max(ctx.second_derivative(w)?.abs());
        points += 1;
    }
    Ok(SecondDerivativeCheck {
        estimate,
        bound: 2.0 * ctx.phi.lipschitz() / ctx.t,
        points,
        skipped,
    })
}

/// Both sides of `E[f_φ(x + √t Z)] = −∂ₓV(t,x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

/// Outer tolerance for the Gaussian average of `f`.
pub const GRADIENT_TOL: f64 = 1e-8;

pub fn verify_gradient_identity(ctx: &SteinContext) -> Result<GradientCheck, SteinError> {
    let sd = ctx.t.sqrt();
    let breaks = ctx.standardized_knots();
    // inner solves are tighter than the outer tolerance so their errors do not add up
    let inner = GRADIENT_TOL * 1e-3;
    let failure = std::cell::RefCell::new(None);
    let lhs = integrate(
        |z| match ctx.solution_with_tol(ctx.x + sd * z, inner) {
            Ok(f) => f * normal::pdf(z),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        -TAIL,
        TAIL,
        &breaks,
        GRADIENT_TOL,
    );
    let lhs = match (lhs, failure.into_inner()) {
        (_, Some(e)) => return Err(e),
        (r, None) => r?,
    };
    let rhs = -ctx.heat.vx;
    Ok(GradientCheck {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
    })
}

/// `|E[(Y − x) f(Y)] − t·E[f′(Y)]|` for `Y = x + √t Z`, both sides in closed form.
///
/// The left side integrates each ramp `(y − k)^+` against `(y − x)` through the
/// truncated moments `∫_c^∞ z ϕ = ϕ(c)` and `∫_c^∞ z² ϕ = cϕ(c) + 1 − Φ(c)`; the
/// right side uses `P(Y > k)` directly.
pub fn gaussian_characterization_check(
    t: f64,
    x: f64,
    f: &PiecewiseLinearFn,
) -> Result<f64, SteinError> {
    if !(t > 0.0) {
        return Err(PwlError::NonPositiveTime(t).into());
    }
    let sd = t.sqrt();
    let s0 = f.slopes()[0];
    // linear part a + s0·y: E[(Y−x)(a + s0 Y)] = s0·t
    let mut lhs = s0 * t;
    let mut rhs = t * s0;
    for (k, jump) in f.knots().iter().zip(f.slope_jumps()) {
        let m = x - k;
        let c = -m / sd;
        let first = normal::pdf(c);
        let second = c * normal::pdf(c) + normal::sf(c);
        // E[σZ (m + σZ)^+] = σ(m·∫zϕ + σ∫z²ϕ) over z > c
        lhs += jump * sd * (m * first + sd * second);
        rhs += t * jump * normal::sf(c);
    }
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(phi: PiecewiseLinearFn, t: f64, x: f64) -> SteinContext {
        SteinContext::new(phi, t, x).unwrap()
    }

    #[test]
    fn linear_phi_has_constant_solution() {
        let c = ctx(PiecewiseLinearFn::linear(1.0, 0.0), 1.0, 0.0);
        for w in [-3.0, -0.2, 0.0, 0.7, 4.0] {
            assert!((c.solution(w).unwrap() + 1.0).abs() < 1e-10, "{w}");
        }
        assert!(c.residual(0.7).unwrap().abs() < 1e-10);
    }

    #[test]
    fn constant_phi_has_zero_solution() {
        let c = ctx(PiecewiseLinearFn::constant(3.0), 2.0, 1.0);
        for w in [-3.0, 0.0, 5.0] {
            assert_eq!(c.solution(w).unwrap(), 0.0);
            assert_eq!(c.residual(w).unwrap(), 0.0);
        }
    }

    #[test]
    fn abs_residual_is_small() {
        let c = ctx(PiecewiseLinearFn::abs(), 1.0, 0.0);
        let r = c.residual(0.5).unwrap();
        assert!(r.abs() <= 1e-6, "{r}");
    }

    #[test]
    fn second_derivative_sweeps() {
        let c = ctx(PiecewiseLinearFn::linear(1.0, 0.0), 1.0, 0.0);
        let r = verify_f_second_derivative_bound(&c, &Sweep::new(0.0, 5.0, 0.25)).unwrap();
        assert!(r.estimate < 1e-6 && r.bound == 2.0);
        for (t, bound) in [(1.0, 2.0), (0.25, 8.0)] {
            let c = ctx(PiecewiseLinearFn::abs(), t, 0.0);
            let r = verify_f_second_derivative_bound(&c, &Sweep::new(0.0, 5.0, 0.05)).unwrap();
            assert_eq!(r.bound, bound);
            assert!(r.ratio() <= 1.0 + 1e-3, "{r:?}");
            assert_eq!(r.skipped, 1);
        }
    }

    #[test]
    fn gradient_identity_examples() {
        let g =
            verify_gradient_identity(&ctx(PiecewiseLinearFn::linear(1.0, 0.0), 1.0, 0.0)).unwrap();
        assert!((g.lhs + 1.0).abs() < 1e-9 && g.rhs == -1.0);
        let g = verify_gradient_identity(&ctx(PiecewiseLinearFn::abs(), 1.0, 0.0)).unwrap();
        assert!(g.gap <= 1e-6 && g.lhs.abs() <= 1e-6);
        let g = verify_gradient_identity(&ctx(PiecewiseLinearFn::ramp(), 0.5, 0.3)).unwrap();
        assert!(g.gap <= 1e-6, "{g:?}");
    }

    #[test]
    fn characterization_examples() {
        let lin = PiecewiseLinearFn::linear(1.0, 0.0);
        assert_eq!(
            gaussian_characterization_check(1.0, 0.0, &lin).unwrap(),
            0.0
        );
        assert!(
            gaussian_characterization_check(1.0, 0.0, &PiecewiseLinearFn::abs()).unwrap() <= 1e-8
        );
        assert!(
            gaussian_characterization_check(2.0, 1.0, &PiecewiseLinearFn::ramp()).unwrap() <= 1e-8
        );
        assert!(gaussian_characterization_check(0.0, 1.0, &lin).is_err());
    }
}
