//! Closed-form heat solution for a piecewise-linear terminal and the Stein
//! equation checks built on it.

use sublinear::stein::{
    gaussian_characterization_check, stein_residual, verify_f_second_derivative_bound,
    verify_gradient_identity, SteinContext, Sweep,
};
use sublinear::PiecewiseLinearFn;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let phi = PiecewiseLinearFn::clip(-1.0, 1.0)?;
    for t in [0.25, 1.0, 4.0] {
        let h = phi.heat_solution(t, 0.3)?;
        let ctx = SteinContext::new(phi.clone(), t, 0.3)?;
        let residual = (-10..=10)
            .map(|j| stein_residual(&ctx, 0.3 + 0.25 * j as f64 + 1e-3).map(f64::abs))
            .try_fold(0.0_f64, |m, r| r.map(|r| m.max(r)))?;
        let f2 = verify_f_second_derivative_bound(
            &ctx,
            &Sweep::new(0.3, 3.0 * t.sqrt(), t.sqrt() / 32.0),
        )?;
        let grad = verify_gradient_identity(&ctx)?;
        let charac = gaussian_characterization_check(t, 0.3, &phi)?;
        println!(
            "t={t}: V={:.6} Vx={:.6} Vxx={:.6} | residual {residual:.1e}, f'' ratio {:.3}, gradient gap {:.1e}, characterization gap {charac:.1e}",
            h.v,
            h.vx,
            h.vxx,
            f2.ratio(),
            grad.gap
        );
    }
    Ok(())
}
