//! G-heat equation by finite differences, the volatility-control dynamic
//! program converging to it, and the feedback-diffusion Monte Carlo check.

use sublinear::engine::GridSpec;
use sublinear::gnormal::{
    g_rate_fit, gheat_solve, sde_representation_mc, GParams, PdeGrid, PolicySpec,
};
use sublinear::{DiscreteDistribution, PiecewiseLinearFn};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = GParams::new(1.0, 2.0)?;
    let phi = PiecewiseLinearFn::clip(-1.0, 1.0)?;
    let pde = PdeGrid::default_for(&phi, &params, 1.0 / 64.0);
    let solution = gheat_solve(&phi, &params, &pde, 256)?;
    println!("PDE value at the origin: {:.6}", solution.value());

    let driver = DiscreteDistribution::new(vec![-1.0, 1.0], vec![0.5, 0.5])?;
    let spec = PolicySpec::bang_bang(&params, driver, 1)?;
    let fit = g_rate_fit(
        &phi,
        &spec,
        &[16, 64, 256],
        &pde,
        &GridSpec::new(1e-3),
        &params,
    )?;
    for ((n, v), g) in fit.n_list.iter().zip(&fit.dp_values).zip(&fit.gaps) {
        println!("DP n={n:>3}: {v:.6} gap {g:.2e}");
    }
    println!("fitted slope {:.3}", fit.slope);

    let mc = sde_representation_mc(&phi, &params, &solution, 20_000, 256, Some(7))?;
    println!("Monte Carlo {:.4} +/- {:.4}", mc.estimate, mc.std_error);
    Ok(())
}
