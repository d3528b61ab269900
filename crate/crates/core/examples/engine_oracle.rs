//! Adapted nested supremum of a terminal function of the running sum: the exact
//! tree against grid backward induction.

use sublinear::engine::{adapted_sup, EvalMode, RunningSum, Schedule};
use sublinear::presets;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let family = presets::f3();
    for n in 1..=8 {
        let model = RunningSum::new(move |s: f64| (s / n as f64).clamp(-0.5, 1.0));
        let schedule = Schedule::iid(&family, n);
        let exact = adapted_sup(&schedule, &model, &EvalMode::exact())?;
        let grid = adapted_sup(&schedule, &model, &EvalMode::grid(1.0 / 64.0))?;
        println!(
            "n={n:>2} exact {exact:.12} grid {grid:.12} diff {:.1e}",
            (exact - grid).abs()
        );
    }
    Ok(())
}
