use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn grf(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grf"))
        .current_dir(dir)
        .args(args)
        .env_remove("GRF_THREADS")
        .output()
        .expect("run grf")
}

fn ok(dir: &Path, args: &[&str]) {
    let out = grf(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

/// Columns of a CSV file by header name.
fn column(path: &Path, name: &str) -> Vec<f64> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
}

const PROBE: &[&str] = &[
    "probe",
    "--mesh",
    "square:24",
    "--center",
    "0.03,0.5",
    "--section",
    "0,0.5:1,0:49",
];

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let code = |args: &[&str]| grf(d, args).status.code().unwrap();
    assert_eq!(
        code(&[
            "probe",
            "--bc",
            "dirichlet",
            "--normalize",
            "direct",
            "--center",
            "0.5,0.5",
            "--section",
            "0,0.5:1,0",
            "-o",
            "a.csv"
        ]),
        2
    );
    assert_eq!(
        code(&[
            "probe",
            "--mesh",
            "square:4",
            "--center",
            "1.5,0.5",
            "--section",
            "0,0.5:1,0",
            "-o",
            "a.csv"
        ]),
        2
    );
    assert_eq!(
        code(&[
            "probe",
            "--mesh",
            "square:4",
            "--center",
            "0.5,0.5,0.5",
            "--section",
            "0,0.5:1,0",
            "-o",
            "a.csv"
        ]),
        2
    );
    assert_eq!(code(&["variance", "--bc", "robin", "-o", "a.csv"]), 2);
    assert_eq!(code(&["variance", "--beta", "roininen", "-o", "a.csv"]), 2);
    assert_eq!(code(&["mesh", "--mesh", "missing.mesh", "-o", "a.txt"]), 1);
    fs::write(d.join("bad.mesh"), "not a mesh\n").unwrap();
    assert_eq!(code(&["mesh", "--mesh", "bad.mesh", "-o", "a.txt"]), 2);
    assert_eq!(code(&["mesh", "--mesh", "interval:3", "-o", "a.txt"]), 0);
}

#[test]
fn same_seed_same_samples() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = |o: &'static str| {
        [
            "sample",
            "--mesh",
            "square:6",
            "--seed",
            "11",
            "--count",
            "3",
            "--no-cache",
            "-o",
            o,
        ]
    };
    ok(d, &args("a.csv"));
    ok(d, &args("b.csv"));
    assert_eq!(fs::read(d.join("a.csv")).unwrap(), fs::read(d.join("b.csv")).unwrap());
    ok(
        d,
        &[
            "sample",
            "--mesh",
            "square:6",
            "--seed",
            "12",
            "--count",
            "1",
            "--no-cache",
            "-o",
            "c.csv",
        ],
    );
    // seed 12 is the second column of the first run
    assert_eq!(
        column(&d.join("a.csv"), "sample_12"),
        column(&d.join("c.csv"), "sample_12")
    );
    assert_ne!(
        column(&d.join("a.csv"), "sample_11"),
        column(&d.join("a.csv"), "sample_12")
    );
}

#[test]
fn replay_is_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut args = PROBE.to_vec();
    args.extend([
        "--bc",
        "robin",
        "--beta",
        "opt:centers",
        "--normalize",
        "stochastic:64",
        "--seed",
        "3",
        "--free-space",
        "-o",
        "p.csv",
    ]);
    ok(d, &args);
    ok(d, &["replay", "p.csv.json", "-o", "q.csv", "--no-cache"]);
    assert_eq!(fs::read(d.join("p.csv")).unwrap(), fs::read(d.join("q.csv")).unwrap());

    ok(
        d,
        &[
            "beta",
            "--mesh",
            "parallelogram:8",
            "--bc",
            "robin",
            "--beta",
            "opt:radial",
            "--stride",
            "2",
            "-o",
            "b.csv",
        ],
    );
    ok(d, &["replay", "b.csv.json", "-o", "c.csv", "--no-cache"]);
    assert_eq!(fs::read(d.join("b.csv")).unwrap(), fs::read(d.join("c.csv")).unwrap());
}

#[test]
fn cache_hits_match_fresh_results() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut args = PROBE.to_vec();
    args.extend([
        "--bc",
        "robin",
        "--beta",
        "opt:centers",
        "--normalize",
        "direct",
        "--cache-dir",
        "cache",
    ]);
    ok(d, &[&args[..], &["-o", "a.csv"]].concat());
    let files = fs::read_dir(d.join("cache")).unwrap().count();
    assert_eq!(files, 2);
    ok(d, &[&args[..], &["-o", "b.csv"]].concat());
    ok(
        d,
        &[
            &PROBE[..],
            &[
                "--bc",
                "robin",
                "--beta",
                "opt:centers",
                "--normalize",
                "direct",
                "--no-cache",
                "-o",
                "c.csv",
            ],
        ]
        .concat(),
    );
    let a = fs::read(d.join("a.csv")).unwrap();
    assert_eq!(a, fs::read(d.join("b.csv")).unwrap());
    assert_eq!(a, fs::read(d.join("c.csv")).unwrap());

    // a partial variance cache is extended, not replaced
    ok(
        d,
        &[
            "variance",
            "--mesh",
            "square:24",
            "--bc",
            "robin",
            "--beta",
            "opt:centers",
            "--normalize",
            "direct",
            "--cache-dir",
            "cache",
            "-o",
            "v.csv",
        ],
    );
    let g = column(&d.join("v.csv"), "g");
    assert!(g.iter().all(|v| v.is_finite() && *v > 0.0));
}

#[test]
fn boundary_treatments_order_near_the_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let run = |extra: &[&str], out: &str| {
        ok(d, &[&PROBE[..], extra, &["--free-space", "-o", out]].concat());
        let p = d.join(out);
        (column(&p, "value"), column(&p, "free"))
    };
    let (dir_v, free) = run(&["--bc", "dirichlet"], "d.csv");
    let (neu, _) = run(&["--bc", "neumann"], "n.csv");
    let (opt, _) = run(
        &["--bc", "robin", "--beta", "opt:centers", "--normalize", "direct"],
        "o.csv",
    );
    // s = 0 is on the boundary, next to the source
    assert_eq!(dir_v[0], 0.0);
    assert!(neu[0] > free[0]);
    let err = |v: &[f64]| (v[0] - free[0]).abs();
    assert!(
        err(&opt) < err(&neu) && err(&opt) < err(&dir_v),
        "{} {} {}",
        err(&opt),
        err(&neu),
        err(&dir_v)
    );
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let run = |threads: &str, out: &str| {
        let st = Command::new(env!("CARGO_BIN_EXE_grf"))
            .current_dir(d)
            .args([
                "variance",
                "--mesh",
                "square:8",
                "--method",
                "stochastic:200",
                "--no-cache",
                "-o",
                out,
            ])
            .env("GRF_THREADS", threads)
            .status()
            .unwrap();
        assert!(st.success());
    };
    run("1", "a.csv");
    run("3", "b.csv");
    assert_eq!(fs::read(d.join("a.csv")).unwrap(), fs::read(d.join("b.csv")).unwrap());
    let st = Command::new(env!("CARGO_BIN_EXE_grf"))
        .current_dir(d)
        .args(["mesh", "-o", "m.txt"])
        .env("GRF_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(2));
}
