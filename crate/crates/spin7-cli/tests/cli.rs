//! Binary-level contract tests: exit codes, output schemas, and
//! byte-identical reruns under a fixed seed.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn spin7() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spin7"))
}

fn run(args: &[&str]) -> Output {
    spin7().args(args).output().expect("binary runs")
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("spin7-cli-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn read_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn usage_errors_exit_2() {
    // negative c is rejected by validation
    let out = run(&["verify", "--c", "-1"]);
    assert_eq!(out.status.code(), Some(2), "{:?}", out);
    // unknown subcommand
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    // malformed grid
    let out = run(&["phase-portrait", "--grid", "7"]);
    assert_eq!(out.status.code(), Some(2));
    // malformed launch
    let out = run(&["fibrate-sp1", "--launch", "1.0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_passes_and_fails_with_the_documented_codes() {
    let out = run(&[
        "verify", "--chart", "so3", "--c", "1.0", "--points", "10", "--seed", "3",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    // an unreachable tolerance turns the same run into a failure (exit 1)
    let out = run(&[
        "verify",
        "--chart",
        "so3",
        "--c",
        "1.0",
        "--points",
        "10",
        "--seed",
        "3",
        "--tol-dphi",
        "1e-30",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("FAIL"));
}

#[test]
fn unwritable_output_exits_1() {
    let out = run(&[
        "moment-map",
        "--action",
        "fibre",
        "--c",
        "1",
        "--r",
        "0",
        "--output",
        "/proc/definitely/not/writable",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn export_schemas_are_stable() {
    let dir = tmp_dir("schema");
    let d = dir.to_str().unwrap();
    assert!(run(&[
        "fibrate-so3",
        "--c",
        "1",
        "--v",
        "1",
        "--f",
        "0.5",
        "--samples",
        "40",
        "--output",
        d,
    ])
    .status
    .success());
    assert!(
        run(&["phase-portrait", "--c", "1", "--grid", "8x8", "--output", d])
            .status
            .success()
    );
    assert!(run(&[
        "moment-map",
        "--action",
        "fibre",
        "--c",
        "1",
        "--r",
        "0",
        "--output",
        d,
    ])
    .status
    .success());
    assert!(run(&[
        "moment-map",
        "--action",
        "sp1",
        "--c",
        "1",
        "--grid",
        "6x6",
        "--output",
        d,
    ])
    .status
    .success());
    assert!(run(&[
        "fibrate-sp1",
        "--c",
        "1",
        "--launch",
        "0.3,0.5",
        "--r-max",
        "50",
        "--output",
        d,
    ])
    .status
    .success());

    let header = |name: &str| {
        let text = fs::read_to_string(dir.join(name)).unwrap();
        text.lines().next().unwrap().to_string()
    };
    assert_eq!(header("fibrate_so3_c1_F0.5.csv"), "alpha,u,F,eta_residual");
    assert_eq!(header("phase_portrait_c1.csv"), "alpha,r,f1,f2");
    assert_eq!(header("alpha_c_c1.csv"), "r,alpha");
    assert_eq!(header("beta_c_c1.csv"), "r,alpha");
    assert_eq!(header("moment_fibre_c1.csv"), "r,nu");
    assert_eq!(header("moment_sp1_c1.csv"), "alpha,r,nu");
    assert_eq!(
        header("fibrate_sp1_c1_a0.3_r0.5.csv"),
        "alpha,r,eta_residual,event"
    );

    // column counts match the headers on every row
    for name in [
        "fibrate_so3_c1_F0.5.csv",
        "phase_portrait_c1.csv",
        "moment_sp1_c1.csv",
    ] {
        let text = fs::read_to_string(dir.join(name)).unwrap();
        let cols = text.lines().next().unwrap().split(',').count();
        for line in text.lines().skip(1) {
            assert_eq!(line.split(',').count(), cols, "{name}: {line}");
        }
    }
    // the single-row moment-map anchor: nu(r = 0) = 0 exactly
    let text = fs::read_to_string(dir.join("moment_fibre_c1.csv")).unwrap();
    assert_eq!(text, "r,nu\n0,0\n");
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn json_format_is_emitted_when_requested() {
    let dir = tmp_dir("json");
    let d = dir.to_str().unwrap();
    assert!(run(&[
        "moment-map",
        "--action",
        "fibre",
        "--c",
        "1",
        "--r",
        "2",
        "--format",
        "json",
        "--output",
        d,
    ])
    .status
    .success());
    let text = fs::read_to_string(dir.join("moment_fibre_c1.json")).unwrap();
    assert!(text.contains("\"columns\": [\"r\", \"nu\"]"));
    assert!(text.contains("\"rows\""));
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn reruns_with_equal_seed_are_byte_identical() {
    let args_sets: Vec<Vec<&str>> = vec![
        vec![
            "fibrate-so3",
            "--c",
            "1",
            "--v",
            "1",
            "--f",
            "0.4,1.2",
            "--samples",
            "50",
            "--seed",
            "11",
        ],
        vec![
            "phase-portrait",
            "--c",
            "1",
            "--grid",
            "16x16",
            "--seed",
            "11",
        ],
        vec![
            "fibrate-sp1",
            "--c",
            "1",
            "--launch",
            "0.2,0.6",
            "--r-max",
            "50",
            "--seed",
            "11",
        ],
        vec![
            "moment-map",
            "--action",
            "so3",
            "--c",
            "0",
            "--grid",
            "12x12",
            "--seed",
            "11",
        ],
    ];
    let run_all = |tag: &str, jobs: &str| {
        let dir = tmp_dir(tag);
        for args in &args_sets {
            let mut full = args.clone();
            let d = dir.to_str().unwrap().to_string();
            let leaked: &'static str = Box::leak(d.into_boxed_str());
            full.extend_from_slice(&["--output", leaked, "--jobs", jobs]);
            let out = run(&full);
            assert!(out.status.success(), "{:?}", out);
        }
        dir
    };
    let a = run_all("det-a", "1");
    let b = run_all("det-b", "4");
    let fa = read_sorted(&a);
    let fb = read_sorted(&b);
    assert_eq!(fa.len(), fb.len());
    for ((na, ca), (nb, cb)) in fa.iter().zip(fb.iter()) {
        assert_eq!(na, nb);
        assert_eq!(ca, cb, "{na} differs between reruns/job counts");
    }
    let _ = fs::remove_dir_all(&a);
    let _ = fs::remove_dir_all(&b);

    // the verify report is byte-identical on stdout too, including
    // across worker counts
    let v1 = run(&[
        "verify", "--chart", "sp1", "--points", "8", "--seed", "5", "--json", "--jobs", "1",
    ]);
    let v2 = run(&[
        "verify", "--chart", "sp1", "--points", "8", "--seed", "5", "--json", "--jobs", "3",
    ]);
    assert_eq!(v1.stdout, v2.stdout);
}
