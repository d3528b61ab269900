use rayon::prelude::*;

use super::{
    EngineError, EngineState, GridFunction, GridSpec, Schedule, StageTable, StepModel, UniformAxis,
};

/// Padding factor on the automatic radius.
const RADIUS_PAD: f64 = 1.1;

/// Backward-induction result: the value at the initial state and the stage-0
/// value function (NaN outside the region reachable from the initial state).
#[derive(Debug, Clone, PartialEq)]
pub struct GridSolution {
    pub value: f64,
    pub axis: UniformAxis,
    pub dim: usize,
    pub initial: Vec<f64>,
}

impl GridSolution {
    /// Stage-0 value function of a one-dimensional model.
    pub fn value_function(&self) -> Option<GridFunction> {
        (self.dim == 1).then(|| GridFunction {
            axis: self.axis,
            values: self.initial.clone(),
        })
    }
}

/// `V_0` at the initial state by backward induction on the grid.
pub fn grid_adapted_sup<M: StepModel>(
    schedule: &Schedule,
    model: &M,
    grid: &GridSpec,
) -> Result<f64, EngineError> {
    grid_value_function(schedule, model, grid).map(|s| s.value)
}

/// Full backward induction; see [`GridSolution`].
pub fn grid_value_function<M: StepModel>(
    schedule: &Schedule,
    model: &M,
    grid: &GridSpec,
) -> Result<GridSolution, EngineError> {
    schedule.validate::<M::State>()?;
    grid.validate()?;
    let n = schedule.n();
    let dim = M::State::DIM;
    let h = grid.step_size;
    let tables: Vec<StageTable> = (1..=n)
        .map(|s| StageTable::new(schedule.family(s)))
        .collect();

    // reach[s]: max-norm radius holding every state visited after s draws, widened
    // by one knot per stage so interpolation neighbours are always evaluated.
    let init = model.initial_state();
    let mut reach = Vec::with_capacity(n + 1);
    reach.push((0..dim).map(|k| init.coord(k).abs()).fold(0.0, f64::max) + h);
    for s in 1..=n {
        let inc = model.increment_bound(n, s, schedule.family(s));
        if !inc.is_finite() {
            return Err(EngineError::NonFinite { stage: s });
        }
        reach.push(reach[s - 1] + inc + h);
    }
    let axis = grid.axis(reach[n] * RADIUS_PAD)?;
    let total = axis.len().pow(dim as u32);

    let index_range = |r: f64| -> (usize, usize) {
        let lo = axis.locate(-r).map_or(0, |(k, _)| k);
        let hi = axis
            .locate(r)
            .map_or(axis.len() - 1, |(k, f)| if f > 0.0 { k + 1 } else { k });
        (lo, hi.min(axis.len() - 1))
    };
    let point = |idx: usize| -> M::State {
        if dim == 1 {
            M::State::from_coords(&[axis.knot(idx)])
        } else {
            let m = axis.len();
            M::State::from_coords(&[axis.knot(idx / m), axis.knot(idx % m)])
        }
    };
    let active = |r: f64| -> Vec<usize> {
        let (lo, hi) = index_range(r);
        if dim == 1 {
            (lo..=hi).collect()
        } else {
            let m = axis.len();
            (lo..=hi)
                .flat_map(|i| (lo..=hi).map(move |j| i * m + j))
                .collect()
        }
    };
    let interp = |values: &[f64], s: &M::State| -> f64 {
        if dim == 1 {
            axis.interp(values, s.coord(0))
        } else {
            axis.interp2(values, [s.coord(0), s.coord(1)])
        }
    };

    let mut values = vec![f64::NAN; total];
    let idxs = active(reach[n]);
    let term: Vec<f64> = idxs
        .par_iter()
        .map(|&idx| model.terminal(n, &point(idx)))
        .collect();
    for (&idx, v) in idxs.iter().zip(term) {
        if !v.is_finite() {
            return Err(EngineError::NonFinite { stage: n });
        }
        values[idx] = v;
    }

    let mut escaped: Option<usize> = None;
    for stage in (1..=n).rev() {
        let table = &tables[stage - 1];
        let idxs = active(reach[stage - 1]);
        let prev = &values;
        let computed: Vec<f64> = idxs
            .par_iter()
            .map_init(
                || vec![0.0; table.len()],
                |buf, &idx| -> Result<f64, EngineError> {
                    let state = point(idx);
                    let plan = model.plan(n, stage, &state)?;
                    for (a, slot) in buf.iter_mut().enumerate() {
                        let next = model.step(n, stage, &plan, &state, table.atom(a));
                        *slot = interp(prev, &next);
                    }
                    Ok(table.combine(buf))
                },
            )
            .collect::<Result<_, _>>()?;
        let mut next = vec![f64::NAN; total];
        for (&idx, v) in idxs.iter().zip(computed) {
            if v.is_infinite() {
                return Err(EngineError::NonFinite { stage: stage - 1 });
            }
            if v.is_nan() && escaped.is_none() {
                escaped = Some(stage);
            }
            next[idx] = v;
        }
        values = next;
    }

    let value = interp(&values, &init);
    if value.is_nan() {
        return Err(EngineError::OutOfGrid {
            stage: escaped.unwrap_or(1),
            radius: axis.radius(),
        });
    }
    Ok(GridSolution {
        value,
        axis,
        dim,
        initial: values,
    })
}
