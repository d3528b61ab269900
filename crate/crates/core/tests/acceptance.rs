//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any criterion fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use sublinear::clt::{adaptive_clt_report, c1, convex_clt_report, iid_convex_bound, Shape};
use sublinear::engine::{adapted_sup, EvalMode, GridSpec, RunningSum, Schedule};
use sublinear::estimators::{block_experiment, StrategyMode};
use sublinear::gnormal::{
    g_rate_fit, gheat_solve, policy_consistency_check, policy_dp_value, sde_representation_mc,
    GParams, PdeGrid, PolicySpec,
};
use sublinear::lln::{
    adaptive_lln_report, disk_excess, interval_deviation_report, interval_deviation_value,
    polytope_deviation_report, SmoothTestFn,
};
use sublinear::polytope::Polytope2D;
use sublinear::stein::{
    gaussian_characterization_check, stein_residual, verify_f_second_derivative_bound,
    verify_gradient_identity, SteinContext, Sweep,
};
use sublinear::{presets, DiscreteDistribution, PiecewiseLinearFn, UncertaintyFamily};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn sci(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.2e}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn dist(atoms: &[f64], weights: &[f64]) -> DiscreteDistribution {
    DiscreteDistribution::new(atoms.to_vec(), weights.to_vec()).unwrap()
}

fn fair_driver() -> DiscreteDistribution {
    dist(&[-1.0, 1.0], &[0.5, 0.5])
}

fn skew_driver() -> DiscreteDistribution {
    let r = 0.5_f64.sqrt();
    dist(&[-r, 2.0 * r], &[2.0 / 3.0, 1.0 / 3.0])
}

fn clip1() -> PiecewiseLinearFn {
    PiecewiseLinearFn::clip(-1.0, 1.0).unwrap()
}

fn dyadic_family() -> UncertaintyFamily {
    UncertaintyFamily::new(vec![
        dist(&[-1.0, 0.0, 2.0], &[0.25, 0.5, 0.25]),
        dist(&[-2.0, 1.0], &[1.0 / 3.0, 2.0 / 3.0]),
        DiscreteDistribution::point_mass(0.5),
    ])
    .unwrap()
}

fn irregular_family() -> UncertaintyFamily {
    UncertaintyFamily::new(vec![
        dist(&[-0.7, 0.3, 1.1], &[0.2, 0.5, 0.3]),
        dist(&[-0.35, 0.9], &[0.6, 0.4]),
        DiscreteDistribution::point_mass(0.15),
    ])
    .unwrap()
}

fn powers_of_two() -> Vec<usize> {
    (0..=6).map(|k| 1 << k).collect()
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let grid = EvalMode::grid(1e-3);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    let lattice = [
        ("f1", presets::f1()),
        ("f2", presets::f2()),
        ("f3", presets::f3()),
        ("fair", presets::fair_coin()),
        ("dyadic", dyadic_family()),
    ];
    for (name, fam) in &lattice {
        for n in 1..=6 {
            for phi in [PiecewiseLinearFn::abs(), clip1(), PiecewiseLinearFn::ramp()] {
                let model = RunningSum::new(|s: f64| phi.eval(s));
                let schedule = Schedule::iid(fam, n);
                let e = adapted_sup(&schedule, &model, &EvalMode::exact())
                    .map_err(|e| e.to_string())?;
                let g = adapted_sup(&schedule, &model, &grid).map_err(|e| e.to_string())?;
                worst = worst.max((e - g).abs());
                ensure((e - g).abs() <= 1e-6, || {
                    format!("{name} n={n} {phi}: exact {e} grid {g}")
                })?;
                cases += 1;
            }
        }
    }
    let all = lattice
        .into_iter()
        .chain([("irregular", irregular_family())]);
    for (name, fam) in all {
        let s = fam.stats().unwrap();
        for n in 1..=6 {
            let e = interval_deviation_value(&fam, n, s.mu_lower, s.mu_upper, &EvalMode::exact())
                .map_err(|e| e.to_string())?;
            let g = interval_deviation_value(&fam, n, s.mu_lower, s.mu_upper, &grid)
                .map_err(|e| e.to_string())?;
            worst = worst.max((e - g).abs());
            ensure((e - g).abs() <= 1e-6, || {
                format!("{name} n={n} deviation: exact {e} grid {g}")
            })?;
            cases += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{cases} cases, max |grid - exact| = {worst:.2e}"))
}

fn interval_deviation() -> Outcome {
    let mut tightest: f64 = 0.0;
    for (name, fam) in [
        ("f1", presets::f1()),
        ("f2", presets::f2()),
        ("f3", presets::f3()),
    ] {
        for n in powers_of_two() {
            let r = interval_deviation_report(&fam, n, &EvalMode::grid(0.25))
                .map_err(|e| e.to_string())?;
            ensure(r.value <= r.bound, || {
                format!("{name} n={n}: {} > {}", r.value, r.bound)
            })?;
            tightest = tightest.max(r.value / r.bound);
        }
    }
    Ok(format!("max value/bound = {tightest:.4}"))
}

fn adaptive_lln() -> Outcome {
    let mut tightest: f64 = 0.0;
    for phi in [SmoothTestFn::quadratic(), SmoothTestFn::log_cosh()] {
        for (name, fam) in [
            ("f1", presets::f1()),
            ("f2", presets::f2()),
            ("f3", presets::f3()),
        ] {
            for n in powers_of_two() {
                let r = adaptive_lln_report(&fam, n, &phi, &EvalMode::grid(1.0 / 256.0))
                    .map_err(|e| e.to_string())?;
                ensure(r.satisfied, || format!("{name} n={n}: {r:?}"))?;
                tightest = tightest.max(r.gap / r.bound);
            }
        }
    }
    let r = adaptive_lln_report(
        &presets::f1(),
        1,
        &SmoothTestFn::quadratic(),
        &EvalMode::exact(),
    )
    .map_err(|e| e.to_string())?;
    ensure(r.value == 1.0 && r.bound == 1.0, || {
        format!("edge case {r:?}")
    })?;
    Ok(format!(
        "max gap/bound = {tightest:.4}; f1 n=1 value = bound = 1"
    ))
}

fn polytope_deviation() -> Outcome {
    let fam = UncertaintyFamily::new(vec![
        DiscreteDistribution::planar(vec![[1.0, 0.0], [-1.0, 0.0]], vec![0.5, 0.5]).unwrap(),
        DiscreteDistribution::planar(vec![[1.0, 1.0], [1.0, -1.0]], vec![0.5, 0.5]).unwrap(),
    ])
    .unwrap();
    let seg = Polytope2D::new(vec![[0.0, 0.0], [1.0, 0.0]]).unwrap();
    let mut tightest: f64 = 0.0;
    for n in 1..=6 {
        let r = polytope_deviation_report(&fam, &seg, n, &EvalMode::exact())
            .map_err(|e| e.to_string())?;
        ensure(r.satisfied, || format!("n={n}: {r:?}"))?;
        tightest = tightest.max(r.value / r.bound);
    }
    Ok(format!("n = 1..6, max value/bound = {tightest:.4}"))
}

fn disk_polygon() -> Outcome {
    for radius in [1.0, 2.5] {
        for m in 3..=10_000usize {
            let e = disk_excess(radius, m);
            let b = 7.0 * PI * PI * radius / (m * m) as f64;
            ensure(e <= b, || format!("R={radius} m={m}: {e} > {b}"))?;
        }
        let m = 10_000.0;
        let scaled = m * m * disk_excess(radius, 10_000);
        let limit = PI * PI * radius / 2.0;
        ensure((scaled / limit - 1.0).abs() <= 1e-3, || {
            format!("m^2 excess {scaled} vs {limit}")
        })?;
    }
    let scaled = 1e8 * disk_excess(1.0, 10_000);
    Ok(format!(
        "m^2(r_m - R) at m = 1e4: {scaled:.6} (limit {:.6})",
        PI * PI / 2.0
    ))
}

fn stein_suite() -> Outcome {
    let start = Instant::now();
    let (mut res, mut ratio, mut grad, mut charac) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for phi in [PiecewiseLinearFn::abs(), PiecewiseLinearFn::ramp(), clip1()] {
        for t in [0.25, 1.0, 4.0] {
            for x in [0.0, 0.4] {
                let ctx = SteinContext::new(phi.clone(), t, x).map_err(|e| e.to_string())?;
                let sd = t.sqrt();
                for j in -16..=16 {
                    let w = x + 0.2 * sd * j as f64 + 1e-3;
                    res = res.max(stein_residual(&ctx, w).map_err(|e| e.to_string())?.abs());
                }
                let check =
                    verify_f_second_derivative_bound(&ctx, &Sweep::new(x, 3.0 * sd, sd / 32.0))
                        .map_err(|e| e.to_string())?;
                ratio = ratio.max(check.ratio());
                grad = grad.max(
                    verify_gradient_identity(&ctx)
                        .map_err(|e| e.to_string())?
                        .gap,
                );
                charac = charac
                    .max(gaussian_characterization_check(t, x, &phi).map_err(|e| e.to_string())?);
            }
        }
    }
    ensure(res <= 1e-6, || format!("residual {res:e}"))?;
    ensure(ratio <= 1.0 + 1e-3, || format!("f'' ratio {ratio}"))?;
    ensure(grad <= 1e-6, || format!("gradient identity gap {grad:e}"))?;
    ensure(charac <= 1e-8, || {
        format!("characterization gap {charac:e}")
    })?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 30.0, || format!("took {secs:.1}s"))?;
    Ok(format!(
        "residual {res:.1e}, f'' ratio {ratio:.4}, gradient gap {grad:.1e}, characterization gap {charac:.1e}"
    ))
}

fn adaptive_clt() -> Outcome {
    let fam = presets::f3();
    let phi = PiecewiseLinearFn::clip(-2.0, 2.0).unwrap();
    let k = c1(fam.stats().unwrap());
    ensure(k == 20.0, || format!("C1 = {k}"))?;
    let mut gaps = Vec::new();
    let mut residual: f64 = 0.0;
    for n in [4usize, 16, 64, 256] {
        let out = adaptive_clt_report(&fam, n, &phi, &EvalMode::grid(1.0 / 128.0))
            .map_err(|e| e.to_string())?;
        let nf = n as f64;
        let bound = 20.0 * (nf.ln() + 1.0) / nf.sqrt();
        ensure(out.report.gap <= bound, || {
            format!("n={n}: gap {} > {bound}", out.report.gap)
        })?;
        residual = residual.max(out.max_residual);
        gaps.push(out.report.gap);
    }
    ensure(residual <= 1e-9, || {
        format!("zero-condition residual {residual:e}")
    })?;
    for w in gaps[1..].windows(2) {
        ensure(w[1] <= w[0] + 1e-3, || format!("gaps increase: {gaps:?}"))?;
    }
    Ok(format!(
        "gaps [{}], max residual {residual:.1e}",
        sci(&gaps)
    ))
}

fn convex_clt() -> Outcome {
    let abs = PiecewiseLinearFn::abs();
    let one = convex_clt_report(&[presets::f2()], &abs, Shape::Convex, &EvalMode::exact())
        .map_err(|e| e.to_string())?;
    ensure(one.value == 1.0 && one.bound == 3.0, || {
        format!("n=1: {one:?}")
    })?;
    ensure((one.gap - 0.2021).abs() < 1e-4, || {
        format!("n=1 gap {}", one.gap)
    })?;
    let mut line = Vec::new();
    for n in [1usize, 4, 16, 64] {
        let fams = vec![presets::f2(); n];
        let r = convex_clt_report(&fams, &abs, Shape::Convex, &EvalMode::grid(1.0 / 64.0))
            .map_err(|e| e.to_string())?;
        ensure(r.satisfied, || format!("n={n}: {r:?}"))?;
        let iid_form =
            iid_convex_bound(&presets::f2(), n, 1.0, Shape::Convex).map_err(|e| e.to_string())?;
        ensure(r.bound <= iid_form + 1e-12, || {
            format!("n={n}: {} > iid_form {iid_form}", r.bound)
        })?;
        line.push(format!("n={n} gap {:.4} bound {:.4}", r.gap, r.bound));
    }
    Ok(line.join("; "))
}

fn g_normal() -> Outcome {
    let dx = 1.0 / 64.0;
    let unit = GParams::new(1.0, 1.0).unwrap();
    let wide = GParams::new(1.0, 2.0).unwrap();
    let mut pde_err: f64 = 0.0;
    for phi in [PiecewiseLinearFn::abs(), clip1(), PiecewiseLinearFn::ramp()] {
        let v = gheat_solve(&phi, &unit, &PdeGrid::default_for(&phi, &unit, dx), 1)
            .map_err(|e| e.to_string())?
            .value();
        pde_err = pde_err.max((v - phi.heat_solution(1.0, 0.0).unwrap().v).abs());
    }
    for phi in [PiecewiseLinearFn::abs(), PiecewiseLinearFn::ramp()] {
        let v = gheat_solve(&phi, &wide, &PdeGrid::default_for(&phi, &wide, dx), 1)
            .map_err(|e| e.to_string())?
            .value();
        pde_err = pde_err.max((v - phi.heat_solution(4.0, 0.0).unwrap().v).abs());
    }
    ensure(pde_err <= 1e-3, || format!("PDE error {pde_err:e}"))?;

    let mut consistency: f64 = 0.0;
    for driver in [fair_driver(), skew_driver()] {
        for n in [1usize, 4, 16] {
            let spec =
                PolicySpec::bang_bang(&wide, driver.clone(), n).map_err(|e| e.to_string())?;
            for phi in [PiecewiseLinearFn::abs(), clip1()] {
                consistency = consistency.max(
                    policy_consistency_check(&phi, &spec, &GridSpec::new(1e-3))
                        .map_err(|e| e.to_string())?,
                );
            }
        }
    }
    ensure(consistency <= 1e-9, || {
        format!("consistency gap {consistency:e}")
    })?;

    let abs = PiecewiseLinearFn::abs();
    let spec = PolicySpec::bang_bang(&wide, fair_driver(), 1).map_err(|e| e.to_string())?;
    let fit = g_rate_fit(
        &abs,
        &spec,
        &[16, 64, 256],
        &PdeGrid::default_for(&abs, &wide, dx),
        &GridSpec::new(1e-3),
        &wide,
    )
    .map_err(|e| e.to_string())?;
    ensure(fit.gaps[2] < fit.gaps[0], || {
        format!("gap(256) {} >= gap(16) {}", fit.gaps[2], fit.gaps[0])
    })?;
    ensure(fit.slope < 0.0, || format!("fitted slope {}", fit.slope))?;
    let direct = policy_dp_value(&abs, &spec.with_n(256), &GridSpec::new(1e-3))
        .map_err(|e| e.to_string())?;
    ensure(direct == fit.dp_values[2], || {
        "rate fit disagrees with direct DP".into()
    })?;
    Ok(format!(
        "PDE err {pde_err:.1e}, consistency {consistency:.1e}, gaps [{}], slope {:.3}",
        sci(&fit.gaps),
        fit.slope
    ))
}

fn feedback_mc() -> Outcome {
    let start = Instant::now();
    let wide = GParams::new(1.0, 2.0).unwrap();
    let mut line = Vec::new();
    for (name, phi) in [("abs", PiecewiseLinearFn::abs()), ("clip", clip1())] {
        let sol = gheat_solve(
            &phi,
            &wide,
            &PdeGrid::default_for(&phi, &wide, 1.0 / 64.0),
            256,
        )
        .map_err(|e| e.to_string())?;
        let mc = sde_representation_mc(&phi, &wide, &sol, 100_000, 256, Some(20_240_601))
            .map_err(|e| e.to_string())?;
        let diff = (mc.estimate - sol.value()).abs();
        let tol = 3.0 * mc.std_error + 0.05;
        ensure(diff <= tol, || {
            format!("{name}: |{} - {}| > {tol}", mc.estimate, sol.value())
        })?;
        line.push(format!(
            "{name} |mc - pde| {diff:.4} (se {:.4})",
            mc.std_error
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 120.0, || format!("took {secs:.1}s"))?;
    Ok(line.join("; "))
}

fn block_concentration() -> Outcome {
    let mut tightest: f64 = 0.0;
    for (name, fam) in [
        ("f1", presets::f1()),
        ("f2", presets::f2()),
        ("f3", presets::f3()),
    ] {
        for n in [16usize, 64, 256] {
            for k in [1usize, 4, 16] {
                let r = block_experiment(&fam, n, k, &StrategyMode::ALL, 17, 2000)
                    .map_err(|e| e.to_string())?;
                ensure(r.report.satisfied, || {
                    format!("{name} n={n} k={k}: {:?}", r.report)
                })?;
                tightest = tightest.max(r.report.value / r.report.bound);
            }
        }
    }
    Ok(format!("27 cells, max estimate/bound = {tightest:.3}"))
}

fn reproducibility() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs: [&[&str]; 2] = [
        &[
            "gnormal",
            "--phi",
            "clip(-1,1)",
            "--n-list",
            "4,16",
            "--grid-step",
            "0.01",
            "--pde-dx",
            "0.05",
            "--mc-paths",
            "20000",
            "--mc-steps",
            "32",
            "--seed",
            "99",
        ],
        &[
            "estimate", "--family", "f3", "--n-list", "16,64", "--k", "4", "--trials", "300",
            "--seed", "99",
        ],
    ];
    for args in runs {
        let mut outputs = Vec::new();
        for attempt in 0..2 {
            let path = dir.path().join(format!("{}-{attempt}.csv", args[0]));
            let status = Command::new(env!("CARGO_BIN_EXE_sublinear"))
                .args(args)
                .arg("--out")
                .arg(&path)
                .status()
                .map_err(|e| e.to_string())?;
            ensure(status.code() == Some(0), || {
                format!("{} exited with {status}", args[0])
            })?;
            outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
        }
        ensure(outputs[0] == outputs[1], || {
            format!("{} CSVs differ", args[0])
        })?;
    }
    Ok("gnormal (with Monte Carlo) and estimate CSVs byte-identical".into())
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("oracle equivalence", oracle_equivalence),
        ("interval deviation bound", interval_deviation),
        ("adaptive-centering LLN", adaptive_lln),
        ("planar polytope deviation", polytope_deviation),
        ("disk circumscribed polygons", disk_polygon),
        ("Stein suite", stein_suite),
        ("adaptive CLT", adaptive_clt),
        ("convex CLT", convex_clt),
        ("G-normal PDE and DP", g_normal),
        ("feedback diffusion Monte Carlo", feedback_mc),
        ("block estimator concentration", block_concentration),
        ("CSV reproducibility", reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
