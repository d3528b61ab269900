//! Adaptive-centering CLT on the two-mean family: gap against `C₁(log n+1)/√n`.

use sublinear::clt::adaptive_clt_report;
use sublinear::engine::EvalMode;
use sublinear::{presets, PiecewiseLinearFn};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let family = presets::f3();
    let phi = PiecewiseLinearFn::clip(-2.0, 2.0)?;
    let step: f64 = std::env::args()
        .nth(1)
        .map_or(Ok(2f64.powi(-7)), |s| s.parse())?;
    println!(
        "{:>5} {:>12} {:>12} {:>10} {:>10} {:>10}",
        "n", "value", "reference", "gap", "bound", "residual"
    );
    for n in [4, 16, 64, 256] {
        let t = std::time::Instant::now();
        let out = adaptive_clt_report(&family, n, &phi, &EvalMode::grid(step))?;
        let r = out.report;
        println!(
            "{:>5} {:>12.4e} {:>12.4e} {:>10.4e} {:>10.6} {:>10.2e}  ({:.1}s)",
            n,
            r.value,
            r.reference,
            r.gap,
            r.bound,
            out.max_residual,
            t.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
