//! Builds an uncertainty family, prints its summary statistics and evaluates the
//! sublinear expectation and its lower counterpart for a few test functions.

use sublinear::{presets, PiecewiseLinearFn};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (name, family) in [
        ("f1", presets::f1()),
        ("f2", presets::f2()),
        ("f3", presets::f3()),
    ] {
        let s = family.stats()?;
        println!(
            "{name}: means [{}, {}], sigma_bar^2 {}, sigma0^2 {}, certain mean {}",
            s.mu_lower,
            s.mu_upper,
            s.sigma_bar_sq,
            s.sigma0_sq,
            s.has_certain_mean()
        );
        for (label, phi) in [
            ("abs", PiecewiseLinearFn::abs()),
            ("ramp", PiecewiseLinearFn::ramp()),
        ] {
            let upper = family.sublinear_expectation(|x| phi.eval(x));
            let lower = -family.sublinear_expectation(|x| -phi.eval(x));
            println!("  E[{label}(X)] in [{lower}, {upper}]");
        }
    }
    Ok(())
}
