//! Block estimators of the lower and upper mean, and a Monte Carlo check of their
//! mean-square concentration against adversarial data generation.

use std::io::Read;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::family::{DiscreteDistribution, FamilyError, UncertaintyFamily};
use crate::report::RateReport;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimatorError {
    #[error("data matrix needs at least one row and one column")]
    Empty,
    #[error("row {row} has {len} entries, expected {expected}")]
    Ragged {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("row {row}, column {col}: cannot parse {value:?}")]
    Parse {
        row: usize,
        col: usize,
        value: String,
    },
    #[error("non-finite entry at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("csv: {0}")]
    Csv(String),
    #[error("the family must be one-dimensional")]
    NotScalar,
    #[error("at least one trial is required")]
    ZeroTrials,
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// `k` rows of `n` observations, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    k: usize,
    n: usize,
    data: Vec<f64>,
}

impl DataMatrix {
    pub fn new(k: usize, n: usize, data: Vec<f64>) -> Result<Self, EstimatorError> {
        if k == 0 || n == 0 {
            return Err(EstimatorError::Empty);
        }
        if data.len() != k * n {
            return Err(EstimatorError::Ragged {
                row: data.len() / n,
                len: data.len() % n,
                expected: n,
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(EstimatorError::NonFinite {
                row: i / n,
                col: i % n,
            });
        }
        Ok(Self { k, n, data })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, EstimatorError> {
        let n = rows.first().map_or(0, Vec::len);
        if let Some((row, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(EstimatorError::Ragged {
                row,
                len: r.len(),
                expected: n,
            });
        }
        let k = rows.len();
        Self::new(k, n, rows.into_iter().flatten().collect())
    }

    /// Headerless CSV, one row per line.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, EstimatorError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| EstimatorError::Csv(e.to_string()))?;
            let parsed = rec
                .iter()
                .enumerate()
                .map(|(col, s)| {
                    s.parse::<f64>().map_err(|_| EstimatorError::Parse {
                        row,
                        col,
                        value: s.to_string(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(parsed);
        }
        Self::from_rows(rows)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.data[j * self.n..(j + 1) * self.n]
    }

    /// The first `rows` rows.
    pub fn head(&self, rows: usize) -> Result<Self, EstimatorError> {
        Self::new(
            rows,
            self.n,
            self.data[..rows.min(self.k) * self.n].to_vec(),
        )
    }

    pub fn row_means(&self) -> Vec<f64> {
        (0..self.k)
            .map(|j| self.row(j).iter().sum::<f64>() / self.n as f64)
            .collect()
    }
}

/// `(min_j Y_j, max_j Y_j)` over the row means `Y_j`.
pub fn block_estimators(data: &DataMatrix) -> (f64, f64) {
    data.row_means()
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| {
            (lo.min(y), hi.max(y))
        })
}

/// How the adversary assigns distributions to observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyMode {
    /// One uniformly drawn θ per row.
    FixedThetaPerRow,
    /// A fresh uniformly drawn θ for every cell.
    RandomThetaPerCell,
    /// Each cell picks the θ that maximizes the expected one-step squared excess
    /// of the running row mean beyond the targeted extreme mean.
    AdaptiveGreedy,
}

impl StrategyMode {
    pub const ALL: [StrategyMode; 3] = [
        StrategyMode::FixedThetaPerRow,
        StrategyMode::RandomThetaPerCell,
        StrategyMode::AdaptiveGreedy,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            StrategyMode::FixedThetaPerRow => "fixed-theta-per-row",
            StrategyMode::RandomThetaPerCell => "random-theta-per-cell",
            StrategyMode::AdaptiveGreedy => "adaptive-greedy",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdversaryStrategy {
    pub mode: StrategyMode,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Target {
    Upper,
    Lower,
}

fn sample(theta: &DiscreteDistribution, rng: &mut ChaCha8Rng) -> f64 {
    let atoms = theta.scalar_atoms().expect("scalar family");
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (a, w) in atoms.iter().zip(theta.weights()) {
        acc += w;
        if u < acc {
            return *a;
        }
    }
    *atoms.last().expect("nonempty")
}

/// Squared excess of a row mean beyond the targeted extreme.
fn excess2(mean: f64, target: Target, mu_lower: f64, mu_upper: f64) -> f64 {
    let e = match target {
        Target::Upper => (mean - mu_upper).max(0.0),
        Target::Lower => (mu_lower - mean).max(0.0),
    };
    e * e
}

fn generate(
    family: &UncertaintyFamily,
    n: usize,
    k: usize,
    mode: StrategyMode,
    target: Target,
    bounds: (f64, f64),
    rng: &mut ChaCha8Rng,
) -> DataMatrix {
    let thetas = family.thetas();
    let mut data = Vec::with_capacity(n * k);
    for _ in 0..k {
        let row_theta = rng.gen_range(0..thetas.len());
        let mut sum = 0.0;
        for i in 0..n {
            let idx = match mode {
                StrategyMode::FixedThetaPerRow => row_theta,
                StrategyMode::RandomThetaPerCell => rng.gen_range(0..thetas.len()),
                StrategyMode::AdaptiveGreedy => {
                    let score = |t: &DiscreteDistribution| -> f64 {
                        t.expect(|a| {
                            excess2((sum + a[0]) / (i + 1) as f64, target, bounds.0, bounds.1)
                        })
                    };
                    // first index wins ties
                    (0..thetas.len()).fold(0, |best, j| {
                        if score(&thetas[j]) > score(&thetas[best]) {
                            j
                        } else {
                            best
                        }
                    })
                }
            };
            let x = sample(&thetas[idx], rng);
            sum += x;
            data.push(x);
        }
    }
    DataMatrix { k, n, data }
}

/// Monte Carlo estimates under one strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockEstimate {
    /// Mean of `((μ̂̄ − μ̄)⁺)²`.
    pub upper: f64,
    /// Mean of `((μ̲̂ − μ̲)⁻)²`.
    pub lower: f64,
}

/// `C = 2[σ̄² + (μ̄ − μ̲)²]`.
pub fn block_constant(family: &UncertaintyFamily) -> Result<f64, EstimatorError> {
    let s = family.stats()?;
    Ok(2.0 * (s.sigma_bar_sq + s.diam_means * s.diam_means))
}

/// Averages over `trials` datasets; trial `t` draws from ChaCha8 stream `2t`
/// (upper target) or `2t + 1` (lower target) of the strategy seed.
pub fn block_estimate(
    family: &UncertaintyFamily,
    n: usize,
    k: usize,
    strategy: &AdversaryStrategy,
    trials: usize,
) -> Result<BlockEstimate, EstimatorError> {
    if family.dim() != 1 {
        return Err(EstimatorError::NotScalar);
    }
    if trials == 0 {
        return Err(EstimatorError::ZeroTrials);
    }
    if n == 0 || k == 0 {
        return Err(EstimatorError::Empty);
    }
    let s = family.stats()?;
    let bounds = (s.mu_lower, s.mu_upper);
    let per_trial: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let run = |target: Target, stream: u64| {
                let mut rng = ChaCha8Rng::seed_from_u64(strategy.seed);
                rng.set_stream(stream);
                let d = generate(family, n, k, strategy.mode, target, bounds, &mut rng);
                let (lo, hi) = block_estimators(&d);
                match target {
                    Target::Upper => excess2(hi, target, bounds.0, bounds.1),
                    Target::Lower => excess2(lo, target, bounds.0, bounds.1),
                }
            };
            (
                run(Target::Upper, 2 * t as u64),
                run(Target::Lower, 2 * t as u64 + 1),
            )
        })
        .collect();
    let m = trials as f64;
    Ok(BlockEstimate {
        upper: per_trial.iter().map(|p| p.0).sum::<f64>() / m,
        lower: per_trial.iter().map(|p| p.1).sum::<f64>() / m,
    })
}

/// Largest estimate over a strategy portfolio against `C·k/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockReport {
    pub k: usize,
    pub per_strategy: Vec<(StrategyMode, BlockEstimate)>,
    pub report: RateReport,
}

/// Runs every strategy in `modes` with the shared `seed`; the reported value is the
/// largest of the upper and lower estimates, a lower bound on the worst case.
pub fn block_experiment(
    family: &UncertaintyFamily,
    n: usize,
    k: usize,
    modes: &[StrategyMode],
    seed: u64,
    trials: usize,
) -> Result<BlockReport, EstimatorError> {
    let per_strategy = modes
        .iter()
        .map(|&mode| {
            block_estimate(family, n, k, &AdversaryStrategy { mode, seed }, trials)
                .map(|e| (mode, e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let value = per_strategy
        .iter()
        .map(|(_, e)| e.upper.max(e.lower))
        .fold(0.0, f64::max);
    let bound = block_constant(family)? * k as f64 / n as f64;
    Ok(BlockReport {
        k,
        per_strategy,
        report: RateReport::one_sided(n, value, 0.0, bound),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::presets::{f1, fair_coin};

    #[test]
    fn block_estimator_examples() {
        let d = DataMatrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 5.0]]).unwrap();
        assert_eq!(block_estimators(&d), (1.5, 4.0));
        let one = DataMatrix::from_rows(vec![vec![1.0, 2.0, 6.0]]).unwrap();
        assert_eq!(block_estimators(&one), (3.0, 3.0));
        let c = DataMatrix::new(3, 4, vec![0.25; 12]).unwrap();
        assert_eq!(block_estimators(&c), (0.25, 0.25));
    }

    #[test]
    fn matrix_validation_and_csv() {
        assert_eq!(DataMatrix::from_rows(vec![]), Err(EstimatorError::Empty));
        assert!(matches!(
            DataMatrix::from_rows(vec![vec![1.0], vec![1.0, 2.0]]),
            Err(EstimatorError::Ragged { row: 1, .. })
        ));
        let d = DataMatrix::from_csv("1, 2\n3,5\n".as_bytes()).unwrap();
        assert_eq!((d.k(), d.n()), (2, 2));
        assert_eq!(
            DataMatrix::from_csv("1,x\n".as_bytes()),
            Err(EstimatorError::Parse {
                row: 0,
                col: 1,
                value: "x".into()
            })
        );
        assert!(matches!(
            DataMatrix::new(1, 1, vec![f64::NAN]),
            Err(EstimatorError::NonFinite { row: 0, col: 0 })
        ));
    }

    #[test]
    fn f1_within_bound() {
        let r = block_experiment(&f1(), 64, 4, &StrategyMode::ALL, 11, 2000).unwrap();
        assert!(r.report.bound == 0.25 && r.report.satisfied, "{r:?}");
        assert!(r.report.value > 0.0);
    }

    #[test]
    fn fair_coin_matches_half_variance() {
        let n = 16;
        let e = block_estimate(
            &fair_coin(),
            n,
            1,
            &AdversaryStrategy {
                mode: StrategyMode::RandomThetaPerCell,
                seed: 3,
            },
            20000,
        )
        .unwrap();
        let exact = 0.5 / n as f64;
        assert!((e.upper - exact).abs() < 0.1 * exact, "{e:?}");
        assert!((e.lower - exact).abs() < 0.1 * exact, "{e:?}");
    }

    #[test]
    fn point_mass_gives_zero() {
        let fam = UncertaintyFamily::new(vec![DiscreteDistribution::point_mass(0.5)]).unwrap();
        let r = block_experiment(&fam, 8, 3, &StrategyMode::ALL, 1, 50).unwrap();
        assert_eq!(r.report.value, 0.0);
    }

    #[test]
    fn reproducible() {
        let s = AdversaryStrategy {
            mode: StrategyMode::AdaptiveGreedy,
            seed: 9,
        };
        assert_eq!(
            block_estimate(&f1(), 16, 4, &s, 100),
            block_estimate(&f1(), 16, 4, &s, 100)
        );
    }
}
