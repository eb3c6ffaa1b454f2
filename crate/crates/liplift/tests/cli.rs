use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const THREE: &str = "points 3\nbase 0\nlabels 0 a b\n0 1 2\n1 0 1\n2 1 0\n";

fn liplift(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liplift"))
        .current_dir(dir)
        .env_remove("LIPLIFT_MAX_POINTS")
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn value(report: &str, key: &str) -> String {
    let prefix = format!("{key} = ");
    report
        .lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no `{key}` in\n{report}"))
        .to_string()
}

fn without_duration(report: &str) -> String {
    report
        .lines()
        .filter(|l| !l.starts_with("duration_ms = "))
        .collect::<Vec<_>>()
        .join("\n")
}

fn fixture() -> TempDir {
    let dir = TempDir::new().unwrap();
    let put = |name: &str, text: &str| fs::write(dir.path().join(name), text).unwrap();
    put("s3.space", THREE);
    put("two.space", "points 2\nbase 0\nlabels 0 x\n0 1\n1 0\n");
    put(
        "bad.space",
        "points 3\nbase 0\nlabels 0 a b\n0 1 3\n1 0 1\n3 1 0\n",
    );
    put("id.op", "operator s3.space s3.space\n1 0\n0 1\n");
    put("zero.op", "operator s3.space s3.space\n0 0\n0 0\n");
    put("twice.op", "operator s3.space s3.space\n2 0\n0 2\n");
    put("mu.fv", "freevector s3.space\na 1\nb -1\n");
    dir
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

#[test]
fn validate_exit_codes() {
    let dir = fixture();
    let out = liplift(dir.path(), &["validate", "two.space"]);
    assert_eq!(code(&out), 0);
    assert_eq!(value(&stdout(&out), "status"), "valid");

    let out = liplift(dir.path(), &["validate", "bad.space"]);
    assert_eq!(code(&out), 2);
    let report = stdout(&out);
    assert_eq!(value(&report, "witness"), "0 a b");
    assert!(value(&report, "violation").contains("triangle"));

    fs::write(path(&dir, "header.space"), "pints 2\n").unwrap();
    let out = liplift(dir.path(), &["validate", "header.space"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1, column 1"));

    let out = liplift(dir.path(), &["validate", "missing.space"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn metric_violation_in_a_referenced_space_exits_2() {
    let dir = fixture();
    fs::write(
        path(&dir, "bad.op"),
        "operator bad.space bad.space\n1 0\n0 1\n",
    )
    .unwrap();
    let out = liplift(dir.path(), &["opnorm", "bad.op"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("witness: 0 a b"));
}

#[test]
fn lift_identity_zero_and_scaled() {
    let dir = fixture();
    for mode in ["float", "rational"] {
        let out = liplift(dir.path(), &["--mode", mode, "lift", "id.op"]);
        assert_eq!(code(&out), 0, "{mode}");
        let r = stdout(&out);
        assert_eq!(value(&r, "operator_norm"), "1");
        assert_eq!(value(&r, "lifting_norm"), "1");
        assert_eq!(value(&r, "commutation_residual"), "0");

        let r = stdout(&liplift(dir.path(), &["--mode", mode, "lift", "zero.op"]));
        for key in ["operator_norm", "lifting_norm", "commutation_residual"] {
            assert_eq!(value(&r, key), "0", "{mode} {key}");
        }

        let r = stdout(&liplift(dir.path(), &["--mode", mode, "lift", "twice.op"]));
        assert_eq!(value(&r, "operator_norm"), "2");
        assert_eq!(value(&r, "lifting_norm"), "2");
    }
}

#[test]
fn rational_reports_are_reproducible_and_independent_of_jobs() {
    let dir = fixture();
    fs::write(
        path(&dir, "mixed.op"),
        "operator s3.space s3.space\n1/3 -2\n5/7 1/2\n",
    )
    .unwrap();
    let args = ["--mode", "rational", "--emit-matrices", "lift", "mixed.op"];
    let a = stdout(&liplift(dir.path(), &args));
    let b = stdout(&liplift(dir.path(), &args));
    assert_eq!(without_duration(&a), without_duration(&b));
    let mut parallel = args.to_vec();
    parallel.splice(0..0, ["--jobs", "4"]);
    let c = stdout(&liplift(dir.path(), &parallel));
    assert_eq!(without_duration(&a), without_duration(&c));
    assert!(a.contains("begin matrix lifting"));
}

#[test]
fn lift_out_then_verify_and_tamper() {
    let dir = fixture();
    let out = liplift(
        dir.path(),
        &[
            "--mode",
            "rational",
            "lift",
            "twice.op",
            "--out",
            "twice.lift",
        ],
    );
    assert_eq!(code(&out), 0);
    let out = liplift(
        dir.path(),
        &["--mode", "rational", "verify", "twice.op", "twice.lift"],
    );
    assert_eq!(code(&out), 0);
    assert_eq!(value(&stdout(&out), "status"), "ok");

    let text = fs::read_to_string(path(&dir, "twice.lift")).unwrap();
    let tampered = text.replacen("(0,a) 2 ", "(0,a) 3 ", 1);
    assert_ne!(tampered, text);
    fs::write(path(&dir, "bad.lift"), tampered).unwrap();
    let out = liplift(
        dir.path(),
        &["--mode", "rational", "verify", "twice.op", "bad.lift"],
    );
    assert_eq!(code(&out), 1);
    let r = stdout(&out);
    assert_eq!(value(&r, "residual_ok"), "false");
    assert_eq!(value(&r, "status"), "failed");

    // A lifting over other spaces is an input error.
    fs::write(path(&dir, "other.op"), "operator two.space two.space\n1\n").unwrap();
    let out = liplift(dir.path(), &["verify", "other.op", "twice.lift"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn freenorm_reports_gap_and_trace() {
    let dir = fixture();
    let out = liplift(
        dir.path(),
        &[
            "--mode",
            "rational",
            "--lp-trace",
            "trace.log",
            "--emit-matrices",
            "freenorm",
            "mu.fv",
        ],
    );
    assert_eq!(code(&out), 0);
    let r = stdout(&out);
    assert_eq!(value(&r, "free_norm"), "1");
    assert_eq!(value(&r, "min_l1"), "1");
    assert_eq!(value(&r, "duality_gap"), "0");
    assert!(r.contains("begin decomposition\n(a,b) 1\nend decomposition"));
    assert!(fs::read_to_string(path(&dir, "trace.log"))
        .unwrap()
        .contains("phase 1"));
}

#[test]
fn lipnorm_deleeuw_and_opnorm() {
    let dir = fixture();
    fs::write(path(&dir, "f.fn"), "function s3.space\na 1\nb 3\n").unwrap();
    let r = stdout(&liplift(dir.path(), &["lipnorm", "f.fn"]));
    assert_eq!(value(&r, "lip_norm"), "2");
    assert_eq!(value(&r, "attained_at"), "(a,b)");

    let out = liplift(
        dir.path(),
        &[
            "--mode",
            "rational",
            "--emit-matrices",
            "deleeuw",
            "s3.space",
            "--function",
            "f.fn",
        ],
    );
    assert_eq!(code(&out), 0);
    let r = stdout(&out);
    assert_eq!(value(&r, "rows"), "6");
    assert_eq!(value(&r, "rank"), "2");
    assert_eq!(value(&r, "isometry_defect"), "0");
    assert!(r.contains("(0,a) -1 0\n"));

    let r = stdout(&liplift(
        dir.path(),
        &["--mode", "rational", "opnorm", "twice.op"],
    ));
    assert_eq!(value(&r, "operator_norm"), "2");
    assert_eq!(value(&r, "witness_lip_norm"), "1");
    assert_eq!(value(&r, "witness_image_lip_norm"), "2");
}

#[test]
fn lift_compose_attains_its_bound() {
    let dir = fixture();
    let out = liplift(
        dir.path(),
        &[
            "--mode",
            "rational",
            "lift-compose",
            "s3.space",
            "s3.space",
            "--map",
            "0,b,a",
            "--r",
            "-3/2",
        ],
    );
    assert_eq!(code(&out), 0);
    let r = stdout(&out);
    assert_eq!(value(&r, "composition_bound"), "3");
    assert_eq!(value(&r, "lifting_norm"), "3");
    assert_eq!(value(&r, "commutation_residual"), "0");

    let out = liplift(
        dir.path(),
        &["lift-compose", "s3.space", "s3.space", "--map", "a,b,0"],
    );
    assert_eq!(code(&out), 3);
    let out = liplift(
        dir.path(),
        &[
            "lift-compose",
            "s3.space",
            "s3.space",
            "--map",
            "0,a,a",
            "--r",
            "0",
        ],
    );
    assert_eq!(code(&out), 3);
}

#[test]
fn gen_ultrametric_writes_a_valid_cube() {
    let dir = fixture();
    let out = liplift(
        dir.path(),
        &[
            "--mode",
            "rational",
            "gen-ultrametric",
            "--depth",
            "3",
            "--out",
            "cube.space",
        ],
    );
    assert_eq!(code(&out), 0);
    let out = liplift(
        dir.path(),
        &["--mode", "rational", "validate", "cube.space"],
    );
    assert_eq!(code(&out), 0);
    let r = stdout(&out);
    assert_eq!(value(&r, "points"), "8");
    assert_eq!(value(&r, "ultrametric"), "true");
    assert_eq!(value(&r, "diameter"), "1/2");

    let out = Command::new(env!("CARGO_BIN_EXE_liplift"))
        .current_dir(dir.path())
        .env("LIPLIFT_MAX_POINTS", "4")
        .args(["gen-ultrametric", "--depth", "3"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
}

#[test]
fn suite_passes_on_seed_42() {
    let dir = fixture();
    let out = liplift(
        dir.path(),
        &[
            "suite",
            "--seed",
            "42",
            "--sizes",
            "1,2,3,4,5",
            "--trials",
            "200",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert_eq!(value(&stdout(&out), "status"), "ok");

    let out = liplift(
        dir.path(),
        &[
            "--mode", "rational", "suite", "--seed", "42", "--trials", "25",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stdout(&out));
}

#[test]
fn suite_covers_the_one_point_space() {
    let dir = fixture();
    let out = liplift(
        dir.path(),
        &[
            "--mode", "rational", "suite", "--sizes", "1", "--trials", "5",
        ],
    );
    assert_eq!(code(&out), 0);
    let out = liplift(dir.path(), &["suite", "--sizes", "1,2", "--trials", "20"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn suite_fault_injection_names_verify_commutation() {
    let dir = fixture();
    for mode in ["float", "rational"] {
        let out = liplift(
            dir.path(),
            &["--mode", mode, "suite", "--inject-fault", "--trials", "20"],
        );
        assert_eq!(code(&out), 5, "{mode}");
        let r = stdout(&out);
        assert_eq!(value(&r, "failed_property"), "verify_commutation");
        assert!(r.contains("begin witness\nspace domain\npoints "));
        assert!(r.contains("lifting domain codomain\ncolumns"));
    }
}

#[test]
fn usage_errors_exit_3_and_help_exits_0() {
    let dir = fixture();
    assert_eq!(code(&liplift(dir.path(), &["frobnicate"])), 3);
    assert_eq!(
        code(&liplift(
            dir.path(),
            &["--mode", "complex", "validate", "two.space"]
        )),
        3
    );
    assert_eq!(
        code(&liplift(dir.path(), &["--epsilon", "-1", "lift", "id.op"])),
        3
    );
    assert_eq!(
        code(&liplift(dir.path(), &["--tol", "-1", "lift", "id.op"])),
        3
    );
    assert_eq!(code(&liplift(dir.path(), &["suite", "--sizes", "0"])), 3);
    assert_eq!(code(&liplift(dir.path(), &[])), 3);
    assert_eq!(code(&liplift(dir.path(), &["--help"])), 0);
    assert_eq!(code(&liplift(dir.path(), &["--version"])), 0);
    fs::write(
        path(&dir, "frac.space"),
        "points 2\nbase 0\nlabels 0 x\n0 1/2\n1/2 0\n",
    )
    .unwrap();
    let out = liplift(dir.path(), &["validate", "frac.space"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--mode rational"));
}

#[test]
fn tolerances_are_echoed() {
    let dir = fixture();
    let r = stdout(&liplift(
        dir.path(),
        &["--tol", "1e-6", "--epsilon", "0.5", "lift", "id.op"],
    ));
    assert_eq!(value(&r, "tol"), "0.000001");
    assert_eq!(value(&r, "epsilon"), "0.5");
    let r = stdout(&liplift(
        dir.path(),
        &["--mode", "rational", "--epsilon", "1/4", "lift", "id.op"],
    ));
    assert_eq!(value(&r, "tol"), "0");
    assert_eq!(value(&r, "epsilon"), "1/4");
}
