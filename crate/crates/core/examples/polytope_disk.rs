//! Planar means: deviation from a polygonal mean set, and the polygon
//! approximation of a disk.

use sublinear::engine::EvalMode;
use sublinear::lln::{disk_bound_report, polytope_deviation_report};
use sublinear::polytope::Polytope2D;
use sublinear::{DiscreteDistribution, UncertaintyFamily};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let family = UncertaintyFamily::new(vec![
        DiscreteDistribution::planar(vec![[1.0, 0.0], [-1.0, 0.0]], vec![0.5, 0.5])?,
        DiscreteDistribution::planar(vec![[1.0, 1.0], [1.0, -1.0]], vec![0.5, 0.5])?,
    ])?;
    let segment = Polytope2D::new(vec![[0.0, 0.0], [1.0, 0.0]])?;
    for n in 1..=6 {
        let r = polytope_deviation_report(&family, &segment, n, &EvalMode::exact())?;
        println!(
            "n={n} deviation {:.5} <= {:.5} ({})",
            r.value, r.bound, r.satisfied
        );
    }
    for n in [32, 1024, 100_000] {
        let d = disk_bound_report(1.0, 1.0, n);
        println!(
            "disk n={n}: m={} excess {:.5} <= {:.5}, bound {:.4}",
            d.m, d.excess, d.excess_bound, d.bound
        );
    }
    Ok(())
}
