use super::{EngineError, StepModel};
use crate::family::UncertaintyFamily;

/// `s ↦ s + scale·(a − shift)` with terminal `f(s)`.
pub struct RunningSum<F> {
    pub init: f64,
    pub scale: f64,
    pub shift: f64,
    pub terminal: F,
}

impl<F: Fn(f64) -> f64 + Sync> RunningSum<F> {
    /// Plain partial sum started at 0.
    pub fn new(terminal: F) -> Self {
        Self {
            init: 0.0,
            scale: 1.0,
            shift: 0.0,
            terminal,
        }
    }

    pub fn scaled(scale: f64, shift: f64, terminal: F) -> Self {
        Self {
            init: 0.0,
            scale,
            shift,
            terminal,
        }
    }
}

impl<F: Fn(f64) -> f64 + Sync> StepModel for RunningSum<F> {
    type State = f64;
    type Plan = ();

    fn initial_state(&self) -> f64 {
        self.init
    }

    fn plan(&self, _n: usize, _stage: usize, _state: &f64) -> Result<(), EngineError> {
        Ok(())
    }

    fn step(&self, _n: usize, _stage: usize, _plan: &(), state: &f64, atom: &[f64]) -> f64 {
        state + self.scale * (atom[0] - self.shift)
    }

    fn terminal(&self, _n: usize, state: &f64) -> f64 {
        (self.terminal)(*state)
    }

    fn increment_bound(&self, _n: usize, _stage: usize, family: &UncertaintyFamily) -> f64 {
        family
            .thetas()
            .iter()
            .flat_map(|t| t.atoms().map(|a| (a[0] - self.shift).abs()))
            .fold(0.0, f64::max)
            * self.scale.abs()
    }
}

/// Planar partial sum `s ↦ s + scale·a` with terminal `f(s)`.
pub struct PlanarRunningSum<F> {
    pub init: [f64; 2],
    pub scale: f64,
    pub terminal: F,
}

impl<F: Fn([f64; 2]) -> f64 + Sync> PlanarRunningSum<F> {
    pub fn new(scale: f64, terminal: F) -> Self {
        Self {
            init: [0.0, 0.0],
            scale,
            terminal,
        }
    }
}

impl<F: Fn([f64; 2]) -> f64 + Sync> StepModel for PlanarRunningSum<F> {
    type State = [f64; 2];
    type Plan = ();

    fn initial_state(&self) -> [f64; 2] {
        self.init
    }

    fn plan(&self, _n: usize, _stage: usize, _state: &[f64; 2]) -> Result<(), EngineError> {
        Ok(())
    }

    fn step(&self, _n: usize, _stage: usize, _plan: &(), s: &[f64; 2], atom: &[f64]) -> [f64; 2] {
        [s[0] + self.scale * atom[0], s[1] + self.scale * atom[1]]
    }

    fn terminal(&self, _n: usize, state: &[f64; 2]) -> f64 {
        (self.terminal)(*state)
    }

    fn increment_bound(&self, _n: usize, _stage: usize, family: &UncertaintyFamily) -> f64 {
        family.max_abs_coord() * self.scale.abs()
    }
}

/// Same dynamics, negated terminal.
pub struct Negated<'a, M>(pub &'a M);

impl<M: StepModel> StepModel for Negated<'_, M> {
    type State = M::State;
    type Plan = M::Plan;

    fn initial_state(&self) -> M::State {
        self.0.initial_state()
    }

    fn plan(&self, n: usize, stage: usize, state: &M::State) -> Result<M::Plan, EngineError> {
        self.0.plan(n, stage, state)
    }

    fn step(
        &self,
        n: usize,
        stage: usize,
        plan: &M::Plan,
        state: &M::State,
        atom: &[f64],
    ) -> M::State {
        self.0.step(n, stage, plan, state, atom)
    }

    fn terminal(&self, n: usize, state: &M::State) -> f64 {
        -self.0.terminal(n, state)
    }

    fn increment_bound(&self, n: usize, stage: usize, family: &UncertaintyFamily) -> f64 {
        self.0.increment_bound(n, stage, family)
    }
}
