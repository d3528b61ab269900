use super::{EngineError, Schedule, StageTable, StepModel};

/// Caps for the exact outcome tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactLimits {
    pub max_n: usize,
    pub max_nodes: usize,
}

impl Default for ExactLimits {
    fn default() -> Self {
        Self {
            max_n: 8,
            max_nodes: 50_000_000,
        }
    }
}

/// Nested max-expectation by full recursion over the outcome tree; no interpolation.
pub fn exact_adapted_sup<M: StepModel>(
    schedule: &Schedule,
    model: &M,
    limits: &ExactLimits,
) -> Result<f64, EngineError> {
    schedule.validate::<M::State>()?;
    let n = schedule.n();
    if n > limits.max_n {
        return Err(EngineError::HorizonTooLarge {
            n,
            cap: limits.max_n,
        });
    }
    let tables: Vec<StageTable> = (1..=n)
        .map(|s| StageTable::new(schedule.family(s)))
        .collect();
    let mut nodes = 0.0;
    let mut level = 1.0;
    for t in &tables {
        level *= t.len() as f64;
        nodes += level;
    }
    if nodes > limits.max_nodes as f64 {
        return Err(EngineError::TreeTooLarge {
            nodes,
            cap: limits.max_nodes,
        });
    }
    let v = recurse(model, &tables, n, 1, model.initial_state())?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EngineError::NonFinite { stage: 0 })
    }
}

fn recurse<M: StepModel>(
    model: &M,
    tables: &[StageTable],
    n: usize,
    stage: usize,
    state: M::State,
) -> Result<f64, EngineError> {
    if stage > n {
        let v = model.terminal(n, &state);
        return if v.is_finite() {
            Ok(v)
        } else {
            Err(EngineError::NonFinite { stage: n })
        };
    }
    let table = &tables[stage - 1];
    let plan = model.plan(n, stage, &state)?;
    let values = (0..table.len())
        .map(|a| {
            let next = model.step(n, stage, &plan, &state, table.atom(a));
            recurse(model, tables, n, stage + 1, next)
        })
        .collect::<Result<Vec<f64>, _>>()?;
    Ok(table.combine(&values))
}
