use super::EngineError;

/// Requested grid: half-width (automatic when `None`) and knot spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub radius: Option<f64>,
    pub step_size: f64,
}

impl GridSpec {
    /// Automatic radius covering every reachable state, padded by 10%.
    pub fn new(step_size: f64) -> Self {
        Self {
            radius: None,
            step_size,
        }
    }

    pub fn with_radius(radius: f64, step_size: f64) -> Self {
        Self {
            radius: Some(radius),
            step_size,
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if !(self.step_size.is_finite() && self.step_size > 0.0) {
            return Err(EngineError::InvalidGrid(format!(
                "step size {}",
                self.step_size
            )));
        }
        if let Some(r) = self.radius {
            if !(r.is_finite() && r > 0.0) {
                return Err(EngineError::InvalidGrid(format!("radius {r}")));
            }
        }
        Ok(())
    }

    /// Axis with the requested radius, or `fallback` when none was given.
    pub fn axis(&self, fallback: f64) -> Result<UniformAxis, EngineError> {
        self.validate()?;
        let radius = self.radius.unwrap_or(fallback);
        let half = (radius / self.step_size).ceil().max(1.0);
        if half > 5.0e7 {
            return Err(EngineError::InvalidGrid(format!(
                "{half} knots per half-axis is too many"
            )));
        }
        Ok(UniformAxis {
            half: half as usize,
            step: self.step_size,
        })
    }
}

/// Knots `x_k = (k - half)·step` for `k = 0..=2·half`; 0 is always a knot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformAxis {
    pub half: usize,
    pub step: f64,
}

impl UniformAxis {
    pub fn len(&self) -> usize {
        2 * self.half + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn radius(&self) -> f64 {
        self.half as f64 * self.step
    }

    pub fn knot(&self, k: usize) -> f64 {
        (k as f64 - self.half as f64) * self.step
    }

    /// Lower knot index and fractional offset, or `None` outside the axis.
    #[inline]
    pub fn locate(&self, x: f64) -> Option<(usize, f64)> {
        let pos = x / self.step + self.half as f64;
        let last = (2 * self.half) as f64;
        if !(0.0..=last).contains(&pos) {
            return None;
        }
        let k = pos.floor();
        Some((k as usize, pos - k))
    }

    /// Linear interpolation; NaN outside the axis or next to a NaN knot.
    #[inline]
    pub fn interp(&self, values: &[f64], x: f64) -> f64 {
        match self.locate(x) {
            None => f64::NAN,
            Some((k, 0.0)) => values[k],
            Some((k, frac)) => values[k] * (1.0 - frac) + values[k + 1] * frac,
        }
    }

    /// Bilinear interpolation on the square grid `self × self`, row-major in x.
    #[inline]
    pub fn interp2(&self, values: &[f64], p: [f64; 2]) -> f64 {
        let (Some((i, fx)), Some((j, fy))) = (self.locate(p[0]), self.locate(p[1])) else {
            return f64::NAN;
        };
        let n = self.len();
        let row = |i: usize| {
            let base = i * n;
            if fy == 0.0 {
                values[base + j]
            } else {
                values[base + j] * (1.0 - fy) + values[base + j + 1] * fy
            }
        };
        if fx == 0.0 {
            row(i)
        } else {
            row(i) * (1.0 - fx) + row(i + 1) * fx
        }
    }
}

/// Values at the knots of a uniform axis, evaluated by linear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub axis: UniformAxis,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn from_fn(axis: UniformAxis, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..axis.len()).map(|k| f(axis.knot(k))).collect();
        Self { axis, values }
    }

    /// Interpolated value; an error outside the grid or where values were not computed.
    pub fn eval(&self, x: f64) -> Result<f64, EngineError> {
        let v = self.axis.interp(&self.values, x);
        if v.is_nan() {
            Err(EngineError::OutOfGrid {
                stage: 0,
                radius: self.axis.radius(),
            })
        } else {
            Ok(v)
        }
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(k, &v)| (self.axis.knot(k), v))
    }
}

/// Values on the square grid `axis × axis`, evaluated by bilinear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction2 {
    pub axis: UniformAxis,
    pub values: Vec<f64>,
}

impl GridFunction2 {
    pub fn from_fn(axis: UniformAxis, f: impl Fn([f64; 2]) -> f64) -> Self {
        let n = axis.len();
        let values = (0..n * n)
            .map(|idx| f([axis.knot(idx / n), axis.knot(idx % n)]))
            .collect();
        Self { axis, values }
    }

    pub fn eval(&self, p: [f64; 2]) -> Result<f64, EngineError> {
        let v = self.axis.interp2(&self.values, p);
        if v.is_nan() {
            Err(EngineError::OutOfGrid {
                stage: 0,
                radius: self.axis.radius(),
            })
        } else {
            Ok(v)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_is_a_knot_and_lattice_points_are_exact() {
        let axis = UniformAxis {
            half: 1024,
            step: 1.0 / 1024.0,
        };
        assert_eq!(axis.knot(1024), 0.0);
        let f = GridFunction::from_fn(axis, |x| x * x * x);
        for x in [-1.0, -0.5, 0.25, 0.998046875, 1.0] {
            assert_eq!(f.eval(x).unwrap(), x * x * x);
        }
        assert!(f.eval(1.001).is_err());
    }

    #[test]
    fn linear_functions_interpolate_exactly() {
        let axis = UniformAxis {
            half: 50,
            step: 0.1,
        };
        let f = GridFunction::from_fn(axis, |x| 3.0 * x - 1.0);
        for x in [-4.93, 0.017, 2.5551] {
            assert!((f.eval(x).unwrap() - (3.0 * x - 1.0)).abs() < 1e-12);
        }
        let g = GridFunction2::from_fn(axis, |p| p[0] - 2.0 * p[1] + p[0] * p[1]);
        let p = [0.123, -1.77];
        assert!((g.eval(p).unwrap() - (p[0] - 2.0 * p[1] + p[0] * p[1])).abs() < 1e-12);
        assert!(g.eval([0.0, 5.01]).is_err());
    }

    #[test]
    fn invalid_specs() {
        assert!(GridSpec::new(0.0).axis(1.0).is_err());
        assert!(GridSpec::with_radius(-1.0, 0.1).axis(1.0).is_err());
        assert_eq!(GridSpec::new(0.25).axis(1.1).unwrap().half, 5);
    }
}
