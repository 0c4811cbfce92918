//! End-to-end tests of the `ovlf` binary: every subcommand's help, the
//! documented examples, exit codes, and byte-stable CSV output.

use std::process::{Command, Output};

fn ovlf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ovlf"))
        .args(args)
        .env_remove("OVLF_FORMAT")
        .env_remove("OVLF_HORIZON")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn every_subcommand_has_help() {
    for sub in [
        "gen",
        "sd",
        "sd-curve",
        "sigma",
        "decode",
        "validate",
        "classify",
        "enumerate",
        "overlap",
        "powerfree",
        "fragility",
        "weyl",
        "density",
        "verify",
        "sweep",
    ] {
        let out = ovlf(&[sub, "--help"]);
        assert!(out.status.success(), "{sub} --help failed");
        assert!(!stdout(&out).is_empty(), "{sub} --help printed nothing");
    }
    for sub in [
        "all",
        "lemma",
        "cor",
        "prop-h",
        "prop-edge",
        "mahler",
        "automaton",
    ] {
        let out = ovlf(&["verify", sub, "--help"]);
        assert!(out.status.success(), "verify {sub} --help failed");
    }
}

#[test]
fn documented_examples() {
    let out = ovlf(&["sd", "0110", "1101"]);
    assert_eq!(stdout(&out).trim(), "1/4");

    let out = ovlf(&["decode", "2(31)", "-n", "32"]);
    assert_eq!(stdout(&out).trim(), "00100110100101100110100110010110");

    let out = ovlf(&["gen", "t", "-n", "32"]);
    assert_eq!(stdout(&out).trim(), "01101001100101101001011001101001");

    let out = ovlf(&["gen", "t>>1", "-n", "4"]);
    assert_eq!(stdout(&out).trim(), "1101");
}

#[test]
fn exit_codes() {
    // 0 on success / valid / PASS.
    assert_eq!(ovlf(&["validate", "2(31)"]).status.code(), Some(0));
    assert_eq!(
        ovlf(&["verify", "lemma", "--n-max", "6"]).status.code(),
        Some(0)
    );
    // 1 on a negative answer.
    assert_eq!(ovlf(&["validate", "1(3)"]).status.code(), Some(1));
    assert_eq!(
        ovlf(&["powerfree", "0101", "--p", "2", "--q", "1", "--strict"])
            .status
            .code(),
        Some(1)
    );
    // 2 on usage errors.
    assert_eq!(ovlf(&["decode"]).status.code(), Some(2));
    assert_eq!(ovlf(&["no-such-command"]).status.code(), Some(2));
    // 3 on INCONCLUSIVE: flipping half a dyadic block complements it in
    // place, and the minimal legal window shows no overlap yet.
    let flips: Vec<String> = (32..64).map(|i| i.to_string()).collect();
    let out = ovlf(&["fragility", "--flips", &flips.join(","), "--window", "130"]);
    assert_eq!(out.status.code(), Some(3), "{}", stdout(&out));
    // A bigger window resolves it.
    let out = ovlf(&["fragility", "--flips", &flips.join(","), "--window", "1024"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn csv_outputs_are_byte_stable() {
    let dir = std::env::temp_dir();
    let a = dir.join("ovlf_test_curve_a.csv");
    let b = dir.join("ovlf_test_curve_b.csv");
    for p in [&a, &b] {
        let out = ovlf(&[
            "sd-curve",
            "t",
            "h",
            "-n",
            "512",
            "--csv",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let ca = std::fs::read(&a).unwrap();
    let cb = std::fs::read(&b).unwrap();
    assert_eq!(ca, cb, "curve CSV differs between runs");
    assert!(String::from_utf8_lossy(&ca).starts_with("# ovlf sd-curve"));
    let _ = std::fs::remove_file(&a);
    let _ = std::fs::remove_file(&b);

    let a = dir.join("ovlf_test_sweep_a.csv");
    let b = dir.join("ovlf_test_sweep_b.csv");
    for p in [&a, &b] {
        let out = ovlf(&[
            "sweep",
            "--depth",
            "8",
            "--length",
            "128",
            "--csv",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let ca = std::fs::read(&a).unwrap();
    let cb = std::fs::read(&b).unwrap();
    assert_eq!(ca, cb, "sweep CSV differs between runs");
    assert!(String::from_utf8_lossy(&ca)
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("path,case,sd_num,sd_den"));
    let _ = std::fs::remove_file(&a);
    let _ = std::fs::remove_file(&b);
}

#[test]
fn sweep_output_independent_of_jobs() {
    let one = ovlf(&["sweep", "--depth", "9", "--length", "256", "--jobs", "1"]);
    let four = ovlf(&["sweep", "--depth", "9", "--length", "256", "--jobs", "4"]);
    assert!(one.status.success() && four.status.success());
    assert_eq!(stdout(&one), stdout(&four));
}

#[test]
fn verify_all_jobs_order_is_fixed() {
    let one = ovlf(&["verify", "lemma", "--n-max", "4"]);
    assert!(stdout(&one).starts_with("lemma: PASS"));
}

#[test]
fn format_env_override() {
    let out = Command::new(env!("CARGO_BIN_EXE_ovlf"))
        .args(["sigma", "--max", "2"])
        .env("OVLF_FORMAT", "tsv")
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().next().unwrap().contains('\t'), "{text}");
}

#[test]
fn enumerate_emits_stable_columns() {
    let out = ovlf(&["enumerate", "--depth", "1"]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "path,end_state,decoded_length");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(
        rows,
        vec!["0,A,0", "1,B,1", "2,C,2", "3,D,1", "4,E,2"],
        "depth-1 enumeration is the start state's out-edges"
    );
}

#[test]
fn sigma_empirical_prints_both_values() {
    let out = ovlf(&["sigma", "--empirical", "1", "4096"]);
    let text = stdout(&out);
    assert!(text.contains("exact -1/3"), "{text}");
    assert!(text.contains("empirical "), "{text}");
}
