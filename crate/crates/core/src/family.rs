//! Finite families of discrete distributions and their moment statistics.
//!
//! A family `{E_θ}` induces the sublinear expectation `E[X] = max_θ E_θ[X]`.
//! Because every θ here has finite support, each such expectation is an exact
//! finite max of finite sums.

use std::fmt;

use thiserror::Error;

/// Default cap on the number of atoms in one distribution.
pub const DEFAULT_ATOM_CAP: usize = 16;
/// Tolerance on `sum(weights) == 1`.
pub const WEIGHT_TOL: f64 = 1e-12;
/// Absolute tolerance used to identify equal means (and variances) across θ.
pub const DEDUP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("distribution has no atoms")]
    NoAtoms,
    #[error("{count} atoms exceed the cap of {cap}")]
    TooManyAtoms { count: usize, cap: usize },
    #[error("{atoms} atoms but {weights} weights")]
    LengthMismatch { atoms: usize, weights: usize },
    #[error("weight #{index} is invalid: {value}")]
    BadWeight { index: usize, value: f64 },
    #[error("weights sum to {0}, expected 1")]
    WeightSum(f64),
    #[error("atom #{0} is not finite")]
    NonFiniteAtom(usize),
    #[error("atom #{0} repeats an earlier atom")]
    DuplicateAtom(usize),
    #[error("family has no distributions")]
    Empty,
    #[error("family mixes dimensions {0} and {1}")]
    MixedDimensions(usize, usize),
    #[error("operation needs a {expected}-dimensional family, got {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A finitely supported distribution on the line or the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    name: String,
    dim: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteDistribution {
    /// Scalar distribution with the default atom cap.
    pub fn new(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self, FamilyError> {
        Self::build(1, atoms, weights, DEFAULT_ATOM_CAP)
    }

    pub fn with_cap(atoms: Vec<f64>, weights: Vec<f64>, cap: usize) -> Result<Self, FamilyError> {
        Self::build(1, atoms, weights, cap)
    }

    /// Planar distribution with the default atom cap.
    pub fn planar(atoms: Vec<[f64; 2]>, weights: Vec<f64>) -> Result<Self, FamilyError> {
        let coords = atoms.iter().flat_map(|a| a.iter().copied()).collect();
        Self::build(2, coords, weights, DEFAULT_ATOM_CAP)
    }

    pub fn point_mass(x: f64) -> Self {
        Self::new(vec![x], vec![1.0]).expect("finite point mass")
    }

    /// Equal weights on the given scalar atoms.
    pub fn uniform(atoms: Vec<f64>) -> Result<Self, FamilyError> {
        let w = if atoms.is_empty() {
            0.0
        } else {
            1.0 / atoms.len() as f64
        };
        let weights = vec![w; atoms.len()];
        Self::new(atoms, weights)
    }

    fn build(
        dim: usize,
        coords: Vec<f64>,
        weights: Vec<f64>,
        cap: usize,
    ) -> Result<Self, FamilyError> {
        let count = coords.len() / dim;
        if count == 0 {
            return Err(FamilyError::NoAtoms);
        }
        if count > cap {
            return Err(FamilyError::TooManyAtoms { count, cap });
        }
        if count != weights.len() || !coords.len().is_multiple_of(dim) {
            return Err(FamilyError::LengthMismatch {
                atoms: count,
                weights: weights.len(),
            });
        }
        for (index, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w >= 0.0) {
                return Err(FamilyError::BadWeight { index, value: w });
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(FamilyError::WeightSum(total));
        }
        for (i, atom) in coords.chunks(dim).enumerate() {
            if atom.iter().any(|c| !c.is_finite()) {
                return Err(FamilyError::NonFiniteAtom(i));
            }
            if coords.chunks(dim).take(i).any(|prev| prev == atom) {
                return Err(FamilyError::DuplicateAtom(i));
            }
        }
        Ok(Self {
            name: String::new(),
            dim,
            coords,
            weights,
        })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn atom(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn atoms(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks(self.dim)
    }

    /// Scalar atoms; `None` for planar distributions.
    pub fn scalar_atoms(&self) -> Option<&[f64]> {
        (self.dim == 1).then_some(self.coords.as_slice())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `E_θ[phi(X)]`, summed in atom order.
    pub fn expect<F: Fn(&[f64]) -> f64>(&self, phi: F) -> f64 {
        self.atoms()
            .zip(&self.weights)
            .map(|(a, &w)| w * phi(a))
            .sum()
    }

    /// Mean vector (length `dim`).
    pub fn mean(&self) -> Vec<f64> {
        (0..self.dim).map(|k| self.expect(|a| a[k])).collect()
    }

    /// `E_θ |X - E_θ X|^p` with the Euclidean norm.
    pub fn central_abs_moment(&self, p: f64) -> f64 {
        let m = self.mean();
        self.expect(|a| {
            let sq: f64 = a.iter().zip(&m).map(|(x, mu)| (x - mu) * (x - mu)).sum();
            sq.sqrt().powf(p)
        })
    }

    /// Total variance `E_θ |X - E_θ X|^2` (trace of the covariance in 2-D).
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.expect(|a| a.iter().zip(&m).map(|(x, mu)| (x - mu) * (x - mu)).sum())
    }

    pub fn max_abs_coord(&self) -> f64 {
        self.coords.iter().fold(0.0_f64, |acc, c| acc.max(c.abs()))
    }
}

/// Mean-conditional variance envelope at one attained mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanProfile {
    pub mean: f64,
    /// `sup { var_θ : mean_θ = mean }`
    pub var_upper: f64,
    /// `inf { var_θ : mean_θ = mean }`
    pub var_lower: f64,
}

/// Moment statistics of a scalar family.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyStats {
    pub mu_upper: f64,
    pub mu_lower: f64,
    /// `sup_θ E_θ (X - E_θ X)^2`
    pub sigma_bar_sq: f64,
    /// `sup_θ E_θ |X - E_θ X|^3`
    pub gamma_bar: f64,
    /// Attained means, ascending, deduplicated.
    pub mean_set: Vec<f64>,
    /// Attained (mean, variance) pairs, deduplicated.
    pub mean_var_set: Vec<(f64, f64)>,
    pub profiles: Vec<MeanProfile>,
    pub sigma0_sq: f64,
    pub diam_means: f64,
}

impl FamilyStats {
    pub fn compute(thetas: &[DiscreteDistribution]) -> Result<Self, FamilyError> {
        if thetas.is_empty() {
            return Err(FamilyError::Empty);
        }
        if let Some(t) = thetas.iter().find(|t| t.dim() != 1) {
            return Err(FamilyError::WrongDimension {
                expected: 1,
                got: t.dim(),
            });
        }
        let moments: Vec<(f64, f64, f64)> = thetas
            .iter()
            .map(|t| {
                let m = t.mean()[0];
                let v = t.expect(|a| (a[0] - m) * (a[0] - m));
                let g = t.expect(|a| (a[0] - m).abs().powi(3));
                (m, v, g)
            })
            .collect();

        let mu_upper = moments
            .iter()
            .map(|m| m.0)
            .fold(f64::NEG_INFINITY, f64::max);
        let mu_lower = moments.iter().map(|m| m.0).fold(f64::INFINITY, f64::min);
        let sigma_bar_sq = moments.iter().map(|m| m.1).fold(0.0, f64::max);
        let gamma_bar = moments.iter().map(|m| m.2).fold(0.0, f64::max);

        let mut mean_set: Vec<f64> = Vec::new();
        for &(m, _, _) in &moments {
            if !mean_set.iter().any(|&x| (x - m).abs() <= DEDUP_TOL) {
                mean_set.push(m);
            }
        }
        mean_set.sort_by(|a, b| a.partial_cmp(b).unwrap());

        let mut mean_var_set: Vec<(f64, f64)> = Vec::new();
        for &(m, v, _) in &moments {
            if !mean_var_set
                .iter()
                .any(|&(x, y)| (x - m).abs() <= DEDUP_TOL && (y - v).abs() <= DEDUP_TOL)
            {
                mean_var_set.push((m, v));
            }
        }

        let profiles: Vec<MeanProfile> = mean_set
            .iter()
            .map(|&mean| {
                let vars = moments
                    .iter()
                    .filter(|m| (m.0 - mean).abs() <= DEDUP_TOL)
                    .map(|m| m.1);
                let (lo, hi) = vars.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(v), hi.max(v))
                });
                MeanProfile {
                    mean,
                    var_upper: hi,
                    var_lower: lo,
                }
            })
            .collect();

        let mut stats = FamilyStats {
            mu_upper,
            mu_lower,
            sigma_bar_sq,
            gamma_bar,
            mean_set,
            mean_var_set,
            profiles,
            sigma0_sq: 0.0,
            diam_means: mu_upper - mu_lower,
        };
        stats.sigma0_sq = [stats.mu_lower, stats.mu_upper]
            .iter()
            .map(|&mu_i| {
                let upper = stats.profile_at(mu_i).map_or(0.0, |p| p.var_upper);
                upper.min(stats.second_moment_inf(mu_i))
            })
            .fold(f64::INFINITY, f64::min);
        Ok(stats)
    }

    pub fn profile_at(&self, mean: f64) -> Option<&MeanProfile> {
        self.profiles
            .iter()
            .find(|p| (p.mean - mean).abs() <= DEDUP_TOL)
    }

    /// `σ̄²_μ`, or `None` if μ is not an attained mean.
    pub fn sigma_upper_at(&self, mean: f64) -> Option<f64> {
        self.profile_at(mean).map(|p| p.var_upper)
    }

    /// `σ̲²_μ`, or `None` if μ is not an attained mean.
    pub fn sigma_lower_at(&self, mean: f64) -> Option<f64> {
        self.profile_at(mean).map(|p| p.var_lower)
    }

    /// `sup over M₂ of σ² + (μ - center)²`.
    pub fn second_moment_sup(&self, center: f64) -> f64 {
        self.mean_var_set
            .iter()
            .map(|&(m, v)| v + (m - center) * (m - center))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `inf over M₂ of σ² + (μ - center)²`.
    pub fn second_moment_inf(&self, center: f64) -> f64 {
        self.mean_var_set
            .iter()
            .map(|&(m, v)| v + (m - center) * (m - center))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn has_certain_mean(&self) -> bool {
        self.diam_means.abs() <= DEDUP_TOL
    }

    pub fn check_regularity(&self) -> RegularityReport {
        let upper = self.profile_at(self.mu_upper);
        let lower = self.profile_at(self.mu_lower);
        let extremes_attained = upper.is_some() && lower.is_some();
        let quad = [
            upper.map_or(f64::NAN, |p| p.var_upper),
            upper.map_or(f64::NAN, |p| p.var_lower),
            lower.map_or(f64::NAN, |p| p.var_upper),
            lower.map_or(f64::NAN, |p| p.var_lower),
        ];
        RegularityReport {
            continuity: extremes_attained,
            positivity: extremes_attained && quad.iter().all(|&v| v > 0.0),
            var_upper_at_mu_upper: quad[0],
            var_lower_at_mu_upper: quad[1],
            var_upper_at_mu_lower: quad[2],
            var_lower_at_mu_lower: quad[3],
        }
    }
}

/// Outcome of checking the continuity and positivity conditions
/// on the mean-conditional variances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularityReport {
    /// For finite families this reduces to: both extreme means are attained.
    pub continuity: bool,
    /// All four extreme conditional variances are strictly positive.
    pub positivity: bool,
    pub var_upper_at_mu_upper: f64,
    pub var_lower_at_mu_upper: f64,
    pub var_upper_at_mu_lower: f64,
    pub var_lower_at_mu_lower: f64,
}

/// Moment statistics of a planar family.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarStats {
    /// Attained mean vectors, deduplicated.
    pub means: Vec<[f64; 2]>,
    /// `sup_θ E_θ |X - E_θ X|^2`
    pub sigma_bar_sq: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Moments {
    Scalar(FamilyStats),
    Planar(PlanarStats),
}

/// A nonempty finite set of distributions sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintyFamily {
    thetas: Vec<DiscreteDistribution>,
    moments: Moments,
}

impl UncertaintyFamily {
    pub fn new(thetas: Vec<DiscreteDistribution>) -> Result<Self, FamilyError> {
        let first = thetas.first().ok_or(FamilyError::Empty)?;
        let dim = first.dim();
        if let Some(t) = thetas.iter().find(|t| t.dim() != dim) {
            return Err(FamilyError::MixedDimensions(dim, t.dim()));
        }
        let moments = if dim == 1 {
            Moments::Scalar(FamilyStats::compute(&thetas)?)
        } else {
            let mut means: Vec<[f64; 2]> = Vec::new();
            for t in &thetas {
                let m = t.mean();
                let m = [m[0], m[1]];
                if !means
                    .iter()
                    .any(|x| (x[0] - m[0]).abs() <= DEDUP_TOL && (x[1] - m[1]).abs() <= DEDUP_TOL)
                {
                    means.push(m);
                }
            }
            let sigma_bar_sq = thetas.iter().map(|t| t.variance()).fold(0.0, f64::max);
            Moments::Planar(PlanarStats {
                means,
                sigma_bar_sq,
            })
        };
        Ok(Self { thetas, moments })
    }

    pub fn thetas(&self) -> &[DiscreteDistribution] {
        &self.thetas
    }

    pub fn dim(&self) -> usize {
        self.thetas[0].dim()
    }

    pub fn moments(&self) -> &Moments {
        &self.moments
    }

    pub fn stats(&self) -> Result<&FamilyStats, FamilyError> {
        match &self.moments {
            Moments::Scalar(s) => Ok(s),
            Moments::Planar(_) => Err(FamilyError::WrongDimension {
                expected: 1,
                got: self.dim(),
            }),
        }
    }

    pub fn planar_stats(&self) -> Result<&PlanarStats, FamilyError> {
        match &self.moments {
            Moments::Planar(s) => Ok(s),
            Moments::Scalar(_) => Err(FamilyError::WrongDimension {
                expected: 2,
                got: self.dim(),
            }),
        }
    }

    /// Recomputes the statistics from the thetas and compares with the stored ones.
    pub fn self_check(&self) -> bool {
        match Self::new(self.thetas.clone()) {
            Ok(fresh) => moments_close(&fresh.moments, &self.moments, DEDUP_TOL),
            Err(_) => false,
        }
    }

    /// For planar families both flags are false.
    pub fn check_regularity(&self) -> RegularityReport {
        match &self.moments {
            Moments::Scalar(s) => s.check_regularity(),
            Moments::Planar(_) => RegularityReport {
                continuity: false,
                positivity: false,
                var_upper_at_mu_upper: f64::NAN,
                var_lower_at_mu_upper: f64::NAN,
                var_upper_at_mu_lower: f64::NAN,
                var_lower_at_mu_lower: f64::NAN,
            },
        }
    }

    /// `max_θ E_θ[phi(X)]` for a scalar family.
    pub fn sublinear_expectation<F: Fn(f64) -> f64>(&self, phi: F) -> f64 {
        self.thetas
            .iter()
            .map(|t| t.expect(|a| phi(a[0])))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max_θ E_θ[phi(X)]` with atoms passed as coordinate slices.
    pub fn sublinear_expectation_nd<F: Fn(&[f64]) -> f64>(&self, phi: F) -> f64 {
        self.thetas
            .iter()
            .map(|t| t.expect(&phi))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs_coord(&self) -> f64 {
        self.thetas
            .iter()
            .map(DiscreteDistribution::max_abs_coord)
            .fold(0.0, f64::max)
    }

    /// Serializes to the line format read by [`parse_family`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.thetas.iter().enumerate() {
            let name = if t.name().is_empty() {
                format!("t{}", i + 1)
            } else {
                t.name().to_string()
            };
            let atoms: Vec<String> = t
                .atoms()
                .map(|a| {
                    if a.len() == 1 {
                        format!("{:?}", a[0])
                    } else {
                        format!("({:?},{:?})", a[0], a[1])
                    }
                })
                .collect();
            let weights: Vec<String> = t.weights().iter().map(|w| format!("{w:?}")).collect();
            out.push_str(&format!(
                "theta {name}: atoms=[{}] weights=[{}]\n",
                atoms.join(","),
                weights.join(",")
            ));
        }
        out
    }
}

/// Builds a family, computing its statistics.
pub fn make_family(thetas: Vec<DiscreteDistribution>) -> Result<UncertaintyFamily, FamilyError> {
    UncertaintyFamily::new(thetas)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol || (a.is_nan() && b.is_nan()) || a == b
}

fn moments_close(a: &Moments, b: &Moments, tol: f64) -> bool {
    match (a, b) {
        (Moments::Scalar(x), Moments::Scalar(y)) => {
            close(x.mu_upper, y.mu_upper, tol)
                && close(x.mu_lower, y.mu_lower, tol)
                && close(x.sigma_bar_sq, y.sigma_bar_sq, tol)
                && close(x.gamma_bar, y.gamma_bar, tol)
                && close(x.sigma0_sq, y.sigma0_sq, tol)
                && x.mean_var_set.len() == y.mean_var_set.len()
                && x.profiles.len() == y.profiles.len()
                && x.profiles.iter().zip(&y.profiles).all(|(p, q)| {
                    close(p.mean, q.mean, tol)
                        && close(p.var_upper, q.var_upper, tol)
                        && close(p.var_lower, q.var_lower, tol)
                })
        }
        (Moments::Planar(x), Moments::Planar(y)) => {
            close(x.sigma_bar_sq, y.sigma_bar_sq, tol) && x.means.len() == y.means.len()
        }
        _ => false,
    }
}

fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: f64 = num.trim().parse().ok()?;
        let d: f64 = den.trim().parse().ok()?;
        return (d != 0.0).then_some(n / d);
    }
    s.parse().ok()
}

/// Splits `a,b,(c,d)` at top-level commas.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
        .into_iter()
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .collect()
}

fn bracketed<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    let at = line.find(&format!("{key}=["))?;
    let rest = &line[at + key.len() + 2..];
    let end = rest.find(']')?;
    Some(&rest[..end])
}

/// Parses the family text format:
///
/// ```text
/// # comment
/// theta fair: atoms=[-1,1] weights=[0.5,0.5]
/// theta drift: atoms=[(0,0),(1,0)] weights=[1/2,1/2]
/// ```
pub fn parse_family(text: &str) -> Result<UncertaintyFamily, FamilyError> {
    let mut thetas = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: &str| FamilyError::Parse {
            line: line_no,
            message: message.to_string(),
        };
        let rest = line
            .strip_prefix("theta")
            .ok_or_else(|| err("expected `theta <name>: atoms=[...] weights=[...]`"))?;
        let (name, body) = rest
            .split_once(':')
            .ok_or_else(|| err("missing `:` after name"))?;
        let atoms_src = bracketed(body, "atoms").ok_or_else(|| err("missing atoms=[...]"))?;
        let weights_src = bracketed(body, "weights").ok_or_else(|| err("missing weights=[...]"))?;

        let weights = split_top_level(weights_src)
            .into_iter()
            .map(|w| parse_number(w).ok_or_else(|| err(&format!("bad weight `{w}`"))))
            .collect::<Result<Vec<_>, _>>()?;

        let items = split_top_level(atoms_src);
        let planar = items.first().is_some_and(|a| a.starts_with('('));
        let dist = if planar {
            let atoms = items
                .iter()
                .map(|a| {
                    let inner = a
                        .strip_prefix('(')
                        .and_then(|a| a.strip_suffix(')'))
                        .ok_or_else(|| err(&format!("bad planar atom `{a}`")))?;
                    let (x, y) = inner
                        .split_once(',')
                        .ok_or_else(|| err(&format!("bad planar atom `{a}`")))?;
                    match (parse_number(x), parse_number(y)) {
                        (Some(x), Some(y)) => Ok([x, y]),
                        _ => Err(err(&format!("bad planar atom `{a}`"))),
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            DiscreteDistribution::planar(atoms, weights)
        } else {
            let atoms = items
                .iter()
                .map(|a| parse_number(a).ok_or_else(|| err(&format!("bad atom `{a}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            DiscreteDistribution::new(atoms, weights)
        }
        .map_err(|e| err(&e.to_string()))?;
        thetas.push(dist.named(name.trim()));
    }
    UncertaintyFamily::new(thetas)
}

impl fmt::Display for UncertaintyFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Small reference families used throughout tests, examples and the CLI.
pub mod presets {
    use super::*;

    fn fair(scale: f64) -> DiscreteDistribution {
        DiscreteDistribution::new(vec![-scale, scale], vec![0.5, 0.5]).unwrap()
    }

    /// Singleton family `{fair ±1}`.
    pub fn fair_coin() -> UncertaintyFamily {
        UncertaintyFamily::new(vec![fair(1.0).named("fair")]).unwrap()
    }

    /// `{fair ±1, point mass at 1}`: mean uncertainty, one degenerate variance.
    pub fn f1() -> UncertaintyFamily {
        UncertaintyFamily::new(vec![
            fair(1.0).named("fair"),
            DiscreteDistribution::point_mass(1.0).named("one"),
        ])
        .unwrap()
    }

    /// `{fair ±1, fair ±2}`: certain mean 0, variance in [1, 4].
    pub fn f2() -> UncertaintyFamily {
        UncertaintyFamily::new(vec![fair(1.0).named("fair1"), fair(2.0).named("fair2")]).unwrap()
    }

    /// `{fair ±1, uniform on {0, 2}}`: means {0, 1}, unit variances.
    pub fn f3() -> UncertaintyFamily {
        UncertaintyFamily::new(vec![
            fair(1.0).named("fair"),
            DiscreteDistribution::new(vec![0.0, 2.0], vec![0.5, 0.5])
                .unwrap()
                .named("shifted"),
        ])
        .unwrap()
    }

    pub fn by_name(name: &str) -> Option<UncertaintyFamily> {
        match name.to_ascii_lowercase().as_str() {
            "f1" => Some(f1()),
            "f2" => Some(f2()),
            "f3" => Some(f3()),
            "fair" | "fair-coin" => Some(fair_coin()),
            _ => None,
        }
    }
}
