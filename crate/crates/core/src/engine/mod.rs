//! Nested-supremum evaluation of adapted functionals of i.i.d. draws.
//!
//! At every stage the adversary observes the current state and then picks a
//! distribution θ from the stage's family; the draw moves the state through
//! [`StepModel::step`]. The value is
//!
//! ```text
//! V_n(s)     = terminal(s)
//! V_{i-1}(s) = max_θ Σ_a w_θ(a) · V_i(step(i, s, a))
//! ```
//!
//! [`exact_adapted_sup`] walks the full outcome tree and is used as the oracle;
//! [`grid_adapted_sup`] runs backward induction over interpolated grid values.

mod backward;
mod exact;
mod grid;
mod models;

pub use backward::{grid_adapted_sup, grid_value_function, GridSolution};
pub use exact::{exact_adapted_sup, ExactLimits};
pub use grid::{GridFunction, GridFunction2, GridSpec, UniformAxis};
pub use models::{Negated, PlanarRunningSum, RunningSum};

use thiserror::Error;

use crate::family::UncertaintyFamily;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("horizon n = {n} exceeds the exact-tree cap {cap}")]
    HorizonTooLarge { n: usize, cap: usize },
    #[error("outcome tree has about {nodes:.3e} nodes, cap is {cap}")]
    TreeTooLarge { nodes: f64, cap: usize },
    #[error("a reachable state at stage {stage} lies outside the grid of radius {radius}")]
    OutOfGrid { stage: usize, radius: f64 },
    #[error("non-finite value at stage {stage}")]
    NonFinite { stage: usize },
    #[error("model has dimension {model}, family has dimension {family}")]
    DimensionMismatch { model: usize, family: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("model error: {0}")]
    Model(String),
}

/// Engine state: a point on the line or in the plane.
pub trait EngineState: Copy + Send + Sync + 'static {
    const DIM: usize;
    fn coord(&self, k: usize) -> f64;
    fn from_coords(c: &[f64]) -> Self;
}

impl EngineState for f64 {
    const DIM: usize = 1;
    fn coord(&self, _k: usize) -> f64 {
        *self
    }
    fn from_coords(c: &[f64]) -> Self {
        c[0]
    }
}

impl EngineState for [f64; 2] {
    const DIM: usize = 2;
    fn coord(&self, k: usize) -> f64 {
        self[k]
    }
    fn from_coords(c: &[f64]) -> Self {
        [c[0], c[1]]
    }
}

/// One adapted functional: deterministic transition plus terminal payoff.
///
/// Stages are numbered `1..=n`. `plan` is the stage decision made from the
/// state before the draw (for instance the centering constants of an adaptive
/// procedure); models without such a decision use `()`.
pub trait StepModel: Sync {
    type State: EngineState;
    type Plan;

    fn initial_state(&self) -> Self::State;

    fn plan(&self, n: usize, stage: usize, state: &Self::State) -> Result<Self::Plan, EngineError>;

    fn step(
        &self,
        n: usize,
        stage: usize,
        plan: &Self::Plan,
        state: &Self::State,
        atom: &[f64],
    ) -> Self::State;

    fn terminal(&self, n: usize, state: &Self::State) -> f64;

    /// Upper bound on the per-coordinate displacement `|step(..) - state|`
    /// over every atom of `family` and every admissible plan.
    fn increment_bound(&self, n: usize, stage: usize, family: &UncertaintyFamily) -> f64;
}

/// The per-stage uncertainty: i.i.d. (one family repeated) or one family per stage.
#[derive(Debug, Clone, Copy)]
pub enum Schedule<'a> {
    Iid {
        family: &'a UncertaintyFamily,
        n: usize,
    },
    Staged(&'a [UncertaintyFamily]),
}

impl<'a> Schedule<'a> {
    pub fn iid(family: &'a UncertaintyFamily, n: usize) -> Self {
        Schedule::Iid { family, n }
    }

    pub fn n(&self) -> usize {
        match self {
            Schedule::Iid { n, .. } => *n,
            Schedule::Staged(f) => f.len(),
        }
    }

    /// Family governing stage `stage` (1-based).
    pub fn family(&self, stage: usize) -> &'a UncertaintyFamily {
        match self {
            Schedule::Iid { family, .. } => family,
            Schedule::Staged(f) => &f[stage - 1],
        }
    }

    fn validate<S: EngineState>(&self) -> Result<(), EngineError> {
        if self.n() == 0 {
            return Err(EngineError::ZeroHorizon);
        }
        for stage in 1..=self.n() {
            let dim = self.family(stage).dim();
            if dim != S::DIM {
                return Err(EngineError::DimensionMismatch {
                    model: S::DIM,
                    family: dim,
                });
            }
        }
        Ok(())
    }
}

/// Union of the atoms of every θ at one stage, with each θ's (atom, weight)
/// list in its own atom order.
pub(crate) struct StageTable {
    pub dim: usize,
    pub atoms: Vec<f64>,
    pub thetas: Vec<Vec<(usize, f64)>>,
}

impl StageTable {
    pub fn new(family: &UncertaintyFamily) -> Self {
        let dim = family.dim();
        let mut atoms: Vec<f64> = Vec::new();
        let thetas = family
            .thetas()
            .iter()
            .map(|t| {
                t.atoms()
                    .zip(t.weights())
                    .map(|(a, &w)| {
                        let idx = match atoms.chunks(dim).position(|u| u == a) {
                            Some(i) => i,
                            None => {
                                atoms.extend_from_slice(a);
                                atoms.len() / dim - 1
                            }
                        };
                        (idx, w)
                    })
                    .collect()
            })
            .collect();
        Self { dim, atoms, thetas }
    }

    pub fn len(&self) -> usize {
        self.atoms.len() / self.dim
    }

    pub fn atom(&self, i: usize) -> &[f64] {
        &self.atoms[i * self.dim..(i + 1) * self.dim]
    }

    /// `max_θ Σ w · values[atom]`, θ ascending then atom ascending. NaN
    /// (a value outside the grid) propagates.
    pub fn combine(&self, values: &[f64]) -> f64 {
        self.thetas
            .iter()
            .map(|t| t.iter().map(|&(i, w)| w * values[i]).sum::<f64>())
            .fold(f64::NEG_INFINITY, |acc, v| {
                if acc.is_nan() || v.is_nan() {
                    f64::NAN
                } else {
                    acc.max(v)
                }
            })
    }
}

/// Exact tree or interpolated grid.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalMode {
    Exact(ExactLimits),
    Grid(GridSpec),
}

impl EvalMode {
    pub fn exact() -> Self {
        EvalMode::Exact(ExactLimits::default())
    }

    pub fn grid(step_size: f64) -> Self {
        EvalMode::Grid(GridSpec::new(step_size))
    }
}

/// Upper value `E[terminal]` in the requested mode.
pub fn adapted_sup<M: StepModel>(
    schedule: &Schedule,
    model: &M,
    mode: &EvalMode,
) -> Result<f64, EngineError> {
    match mode {
        EvalMode::Exact(limits) => exact_adapted_sup(schedule, model, limits),
        EvalMode::Grid(grid) => grid_adapted_sup(schedule, model, grid),
    }
}

/// Lower value `-E[-terminal]`.
pub fn lower_expectation<M: StepModel>(
    schedule: &Schedule,
    model: &M,
    mode: &EvalMode,
) -> Result<f64, EngineError> {
    adapted_sup(schedule, &Negated(model), mode).map(|v| -v)
}
