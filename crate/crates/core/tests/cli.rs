//! End-to-end checks of the `sublinear` binary: exit codes, CSV layout and
//! config-file handling.

use std::path::Path;
use std::process::{Command, Output};

use sublinear::family::parse_family;
use sublinear::harness::CSV_HEADER;
use sublinear::presets;

const IRREGULAR: &str = "\
# two non-lattice distributions
theta a: atoms=[-0.7,1.3] weights=[0.65,0.35]
theta b: atoms=[-1.1,0.4,2.2] weights=[0.25,0.5,0.25]
";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sublinear"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

/// Parsed data rows as `(suite, n, bound, satisfied)`.
fn rows(csv: &str) -> Vec<(String, usize, f64, bool)> {
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f.len(), CSV_HEADER.len(), "{l}");
            (
                f[0].to_string(),
                f[1].parse().unwrap(),
                f[5].parse().unwrap(),
                f[6].parse().unwrap(),
            )
        })
        .collect()
}

#[test]
fn help_exits_zero() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("oracle-check"));
}

#[test]
fn deviation_bound_column_matches_family_statistics() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "irr.fam", IRREGULAR);
    for (spec, fam) in [
        ("f2", presets::f2()),
        (file.as_str(), parse_family(IRREGULAR).unwrap()),
    ] {
        let o = run(&["lln", "--family", spec, "--n-list", "1,2,4", "--seed", "1"]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
        let s = fam.stats().unwrap();
        let c = 2.0 * (s.sigma_bar_sq + s.diam_means * s.diam_means);
        let r = rows(&stdout(&o));
        assert_eq!(r.len(), 3);
        for (suite, n, bound, ok) in r {
            assert_eq!(suite, "lln/deviation");
            assert!((bound - c / n as f64).abs() <= 1e-12 * c, "n={n}: {bound}");
            assert!(ok);
        }
    }
}

#[test]
fn unsatisfied_row_exits_one() {
    // a coarse grid on non-lattice atoms cannot match the tree to 1e-6
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "irr.fam", IRREGULAR);
    let o = run(&[
        "oracle-check",
        "--family",
        &file,
        "--phi",
        "clip(-1,1)",
        "--n-list",
        "1,2,3",
        "--seed",
        "1",
        "--grid-step",
        "0.25",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let r = rows(&stdout(&o));
    assert!(r.iter().any(|row| !row.3));
}

#[test]
fn parse_errors_exit_two() {
    let cases: [&[&str]; 5] = [
        &["lln", "--n-list", "1,2", "--seed", "1"],
        &[
            "clt", "--family", "f3", "--phi", "clip(-1,", "--n-list", "4", "--seed", "1",
        ],
        &["lln", "--family", "f2", "--n-list", "4,2", "--seed", "1"],
        &[
            "lln",
            "--family",
            "no-such-family.txt",
            "--n-list",
            "2",
            "--seed",
            "1",
        ],
        &["lln", "--bogus-flag"],
    ];
    for args in cases {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn config_file_matches_flags_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.cfg",
        "# oracle comparison\nsuite=oracle-check\nfamily=f2\nphi=abs\nn-list=1,2,3\nseed=7\n",
    );
    let from_cfg = run(&["--config", &cfg]);
    assert_eq!(
        from_cfg.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&from_cfg.stderr)
    );
    let from_flags = run(&[
        "oracle-check",
        "--family",
        "f2",
        "--phi",
        "abs",
        "--n-list",
        "1,2,3",
        "--seed",
        "7",
    ]);
    assert_eq!(stdout(&from_cfg), stdout(&from_flags));

    let overridden = run(&["--config", &cfg, "--n-list", "2"]);
    let r = rows(&stdout(&overridden));
    assert_eq!(r.len(), 1);
    assert_eq!(r[0].1, 2);

    let bad = write(dir.path(), "bad.cfg", "suite=lln\nfamily=f2\nwhatever=3\n");
    assert_eq!(run(&["--config", &bad]).status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rows.csv");
    let o = run(&[
        "clt",
        "--family",
        "f2",
        "--phi",
        "abs",
        "--convex",
        "--n-list",
        "1,2",
        "--seed",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let r = rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(r.len(), 2);
    assert!(r.iter().all(|row| row.0 == "clt/convex" && row.3));
}
