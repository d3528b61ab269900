//! Continuous piecewise-linear test functions and their Gaussian smoothing.
//!
//! A function with knots `k_1 < … < k_m` and slopes `s_0, …, s_m` is written as
//! `φ(x) = a + s_0·x + Σ_j Δ_j (x − k_j)^+` with `Δ_j = s_j − s_{j−1}`, so the heat
//! semigroup acts on each ramp in closed form.

use std::fmt;

use thiserror::Error;

use crate::normal;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PwlError {
    #[error("{knots} knots need {} slopes, got {slopes}", knots + 1)]
    SlopeCount { knots: usize, slopes: usize },
    #[error("knots must be strictly increasing (index {0})")]
    UnsortedKnots(usize),
    #[error("non-finite parameter")]
    NonFinite,
    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("clip bounds must satisfy a < b, got ({0}, {1})")]
    BadClip(f64, f64),
}

/// `V(t,x) = E φ(x + √t Z)` and its first two x-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatEval {
    pub v: f64,
    pub vx: f64,
    pub vxx: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearFn {
    knots: Vec<f64>,
    slopes: Vec<f64>,
    /// Value at the leftmost knot, or at 0 when there are no knots.
    y0: f64,
}

impl PiecewiseLinearFn {
    pub fn new(knots: Vec<f64>, slopes: Vec<f64>, y0: f64) -> Result<Self, PwlError> {
        if slopes.len() != knots.len() + 1 {
            return Err(PwlError::SlopeCount {
                knots: knots.len(),
                slopes: slopes.len(),
            });
        }
        if !y0.is_finite() || knots.iter().chain(&slopes).any(|v| !v.is_finite()) {
            return Err(PwlError::NonFinite);
        }
        if let Some(i) = (1..knots.len()).find(|&i| knots[i] <= knots[i - 1]) {
            return Err(PwlError::UnsortedKnots(i));
        }
        Ok(Self { knots, slopes, y0 })
    }

    /// `|x|`
    pub fn abs() -> Self {
        Self::new(vec![0.0], vec![-1.0, 1.0], 0.0).unwrap()
    }

    /// `max(x, 0)`
    pub fn ramp() -> Self {
        Self::new(vec![0.0], vec![0.0, 1.0], 0.0).unwrap()
    }

    /// `min(max(x, a), b)`
    pub fn clip(a: f64, b: f64) -> Result<Self, PwlError> {
        if !(a < b) {
            return Err(PwlError::BadClip(a, b));
        }
        Self::new(vec![a, b], vec![0.0, 1.0, 0.0], a)
    }

    /// `slope·x + intercept`
    pub fn linear(slope: f64, intercept: f64) -> Self {
        Self::new(vec![], vec![slope], intercept).unwrap()
    }

    pub fn constant(c: f64) -> Self {
        Self::linear(0.0, c)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn y0(&self) -> f64 {
        self.y0
    }

    /// `-φ`
    pub fn negate(&self) -> Self {
        self.scale(-1.0)
    }

    /// `c·φ`
    pub fn scale(&self, c: f64) -> Self {
        Self {
            knots: self.knots.clone(),
            slopes: self.slopes.iter().map(|s| c * s).collect(),
            y0: c * self.y0,
        }
    }

    /// Intercept `a` of the ramp expansion.
    fn intercept(&self) -> f64 {
        match self.knots.first() {
            Some(&k0) => self.y0 - self.slopes[0] * k0,
            None => self.y0,
        }
    }

    /// Slope changes `Δ_j` at the knots.
    pub fn slope_jumps(&self) -> Vec<f64> {
        self.slopes.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut v = self.intercept() + self.slopes[0] * x;
        for (k, d) in self.knots.iter().zip(self.slopes.windows(2)) {
            if x > *k {
                v += (d[1] - d[0]) * (x - k);
            }
        }
        v
    }

    /// Right derivative.
    pub fn derivative(&self, x: f64) -> f64 {
        let i = self.knots.partition_point(|&k| k <= x);
        self.slopes[i]
    }

    /// `‖φ′‖ = max |slope|`.
    pub fn lipschitz(&self) -> f64 {
        self.slopes.iter().fold(0.0, |acc, s| acc.max(s.abs()))
    }

    pub fn is_convex(&self) -> bool {
        self.slope_jumps().iter().all(|&d| d >= 0.0)
    }

    pub fn is_concave(&self) -> bool {
        self.slope_jumps().iter().all(|&d| d <= 0.0)
    }

    /// Closed-form `V(t,x) = E φ(x + √t Z)`, `∂ₓV`, `∂²ₓₓV`.
    pub fn heat_solution(&self, t: f64, x: f64) -> Result<HeatEval, PwlError> {
        if !(t > 0.0) {
            return Err(PwlError::NonPositiveTime(t));
        }
        let sd = t.sqrt();
        let s0 = self.slopes[0];
        let mut out = HeatEval {
            v: self.intercept() + s0 * x,
            vx: s0,
            vxx: 0.0,
        };
        for (k, d) in self.knots.iter().zip(self.slopes.windows(2)) {
            let jump = d[1] - d[0];
            let m = x - k;
            let z = m / sd;
            let (cdf, pdf) = (normal::cdf(z), normal::pdf(z));
            out.v += jump * (m * cdf + sd * pdf);
            out.vx += jump * cdf;
            out.vxx += jump * pdf / sd;
        }
        Ok(out)
    }

    /// Gaussian mean `E φ(x + √t Z)`.
    pub fn gaussian_mean(&self, t: f64, x: f64) -> Result<f64, PwlError> {
        self.heat_solution(t, x).map(|h| h.v)
    }
}

/// `heat_solution` as a free function.
pub fn heat_solution(phi: &PiecewiseLinearFn, t: f64, x: f64) -> Result<HeatEval, PwlError> {
    phi.heat_solution(t, x)
}

impl fmt::Display for PiecewiseLinearFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(
            f,
            "pwl:knots=[{}];slopes=[{}];y0={}",
            list(&self.knots),
            list(&self.slopes),
            self.y0
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT_2_OVER_PI: f64 = 0.7978845608028654;

    #[test]
    fn presets_evaluate() {
        let c = PiecewiseLinearFn::clip(-1.0, 1.0).unwrap();
        assert_eq!([c.eval(-3.0), c.eval(0.25), c.eval(7.0)], [-1.0, 0.25, 1.0]);
        assert_eq!(PiecewiseLinearFn::abs().eval(-2.5), 2.5);
        assert_eq!(PiecewiseLinearFn::ramp().eval(-2.5), 0.0);
        assert_eq!(PiecewiseLinearFn::linear(2.0, 1.0).eval(3.0), 7.0);
        assert_eq!(c.lipschitz(), 1.0);
        assert!(PiecewiseLinearFn::abs().is_convex());
        assert!(PiecewiseLinearFn::abs().negate().is_concave());
        assert!(!c.is_convex() && !c.is_concave());
        assert_eq!(c.derivative(-1.0), 1.0);
        assert_eq!(c.derivative(1.0), 0.0);
    }

    #[test]
    fn invalid_inputs() {
        assert!(matches!(
            PiecewiseLinearFn::new(vec![0.0], vec![1.0], 0.0),
            Err(PwlError::SlopeCount { .. })
        ));
        assert_eq!(
            PiecewiseLinearFn::new(vec![1.0, 1.0], vec![0.0, 1.0, 0.0], 0.0),
            Err(PwlError::UnsortedKnots(1))
        );
        assert!(PiecewiseLinearFn::clip(1.0, 1.0).is_err());
        assert_eq!(
            PiecewiseLinearFn::abs().heat_solution(0.0, 0.0),
            Err(PwlError::NonPositiveTime(0.0))
        );
    }

    #[test]
    fn heat_reference_values() {
        for t in [0.1, 1.0, 7.0] {
            let h = PiecewiseLinearFn::linear(1.0, 0.0)
                .heat_solution(t, 0.3)
                .unwrap();
            assert_eq!((h.v, h.vx, h.vxx), (0.3, 1.0, 0.0));
        }
        let h = PiecewiseLinearFn::abs().heat_solution(1.0, 0.0).unwrap();
        assert!((h.v - SQRT_2_OVER_PI).abs() < 1e-15);
        assert_eq!(h.vx, 0.0);
        assert!((h.vxx - SQRT_2_OVER_PI).abs() < 1e-15);
        let h = PiecewiseLinearFn::ramp().heat_solution(1.0, 0.0).unwrap();
        assert!((h.v - 0.3989422804014327).abs() < 1e-15);
        assert_eq!(h.vx, 0.5);
    }

    #[test]
    fn display_round_trips_through_fields() {
        let c = PiecewiseLinearFn::clip(-2.0, 2.0).unwrap();
        assert_eq!(c.to_string(), "pwl:knots=[-2,2];slopes=[0,1,0];y0=-2");
    }
}
