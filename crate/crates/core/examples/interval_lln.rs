//! Squared distance of the sample mean to the mean interval, and the adaptive
//! centering law of large numbers for a smooth test function.

use sublinear::engine::EvalMode;
use sublinear::lln::{adaptive_lln_report, interval_deviation_report, SmoothTestFn};
use sublinear::presets;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let family = presets::f3();
    let mode = EvalMode::grid(1.0 / 256.0);
    for n in [1, 4, 16, 64] {
        let d = interval_deviation_report(&family, n, &mode)?;
        let a = adaptive_lln_report(&family, n, &SmoothTestFn::log_cosh(), &mode)?;
        println!(
            "n={n:>3} deviation {:.5} <= {:.5} ({}) | adaptive gap {:.5} <= {:.5} ({})",
            d.value, d.bound, d.satisfied, a.gap, a.bound, a.satisfied
        );
    }
    Ok(())
}
