//! Convex and concave test functions with a certain mean: the normalized sum
//! against the G-normal reference.

use sublinear::clt::{convex_clt_report, iid_convex_bound, Shape};
use sublinear::engine::EvalMode;
use sublinear::{presets, PiecewiseLinearFn};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let family = presets::f2();
    let cases = [
        ("abs", PiecewiseLinearFn::abs(), Shape::Convex),
        ("-abs", PiecewiseLinearFn::abs().negate(), Shape::Concave),
    ];
    for (name, phi, shape) in cases {
        for n in [1, 4, 16, 64] {
            let r = convex_clt_report(
                &vec![family.clone(); n],
                &phi,
                shape,
                &EvalMode::grid(1.0 / 64.0),
            )?;
            let iid = iid_convex_bound(&family, n, phi.lipschitz(), shape)?;
            println!(
                "{name:>4} n={n:>2} gap {:.5} <= {:.5} (iid form {:.5})",
                r.gap, r.bound, iid
            );
        }
    }
    Ok(())
}
