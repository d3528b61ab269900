//! Block max/min-mean estimators under several adversarial sampling strategies.

use sublinear::estimators::{block_estimators, block_experiment, DataMatrix, StrategyMode};
use sublinear::presets;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = DataMatrix::from_rows(vec![
        vec![0.2, 1.4, -0.3],
        vec![1.1, 0.9, 1.6],
        vec![-0.5, 0.1, 0.0],
    ])?;
    let (lo, hi) = block_estimators(&data);
    println!("row means {:?} -> [{lo:.4}, {hi:.4}]", data.row_means());

    let family = presets::f3();
    for k in [1, 4, 16] {
        let r = block_experiment(&family, 64, k, &StrategyMode::ALL, 11, 1000)?;
        for (mode, est) in &r.per_strategy {
            println!(
                "k={k:>2} {:<24} upper {:.5} lower {:.5}",
                mode.name(),
                est.upper,
                est.lower
            );
        }
        println!(
            "k={k:>2} worst {:.5} <= {:.5}",
            r.report.value, r.report.bound
        );
    }
    Ok(())
}
