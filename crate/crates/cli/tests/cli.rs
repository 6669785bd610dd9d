use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hylo_cli::JsonReport;

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
}

fn hylo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hylo"))
        .args(args)
        .current_dir(corpus(""))
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn parse_prints_canonical_form() {
    let o = hylo(&["parse", "--sig", "smarties.sig", "@a D p"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "@a (D p)\n");
    let o = hylo(&["parse", "--sig", "smarties.sig", "~~p"]);
    assert_eq!(stdout(&o), "~~p\n");
}

#[test]
fn parse_rejects_undeclared_nominal() {
    let o = hylo(&["parse", "--sig", "smarties.sig", "@x p"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`x`"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
}

#[test]
fn check_accepts_sally_anne() {
    let o = hylo(&["check", "fig5.hlp", "--theory", "sallyanne.hlt"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("end: @a (B p(t1))\n"));
}

#[test]
fn check_reads_theory_from_header_relative_to_proof() {
    let o = Command::new(env!("CARGO_BIN_EXE_hylo"))
        .args(["check", corpus("fig3.hlp").to_str().unwrap()])
        .current_dir(std::env::temp_dir())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn check_rejects_bad_discharge() {
    let o = hylo(&["check", "fig3_bad_discharge.hlp", "--theory", "rain.hlt"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("verdict: REJECT\n"));
    assert!(out.contains("term side-condition-violation"), "{out}");
}

#[test]
fn check_input_errors_exit_2() {
    assert_eq!(hylo(&["check", "missing.hlp"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.hlp");
    std::fs::write(&bad, "(proof (assume 1 \"p &\"))").unwrap();
    let th = corpus("rain.hlt");
    let o = hylo(&[
        "check",
        bad.to_str().unwrap(),
        "--theory",
        th.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let no_theory = dir.path().join("no_theory.hlp");
    std::fs::write(&no_theory, "(proof (assume 1 \"p\"))").unwrap();
    assert_eq!(
        hylo(&["check", no_theory.to_str().unwrap()]).status.code(),
        Some(2)
    );
    assert_eq!(hylo(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn json_output_matches_golden_files() {
    for (proof, golden, code) in [
        ("fig3_bad_discharge.hlp", "fig3_bad_discharge.json", 1),
        ("fig5.hlp", "fig5.json", 0),
    ] {
        let o = hylo(&["check", proof, "--json"]);
        assert_eq!(o.status.code(), Some(code));
        let path = Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("tests/golden")
            .join(golden);
        let expected = std::fs::read_to_string(path).unwrap();
        assert_eq!(stdout(&o), expected, "{proof}");
        // Two runs print the same bytes.
        assert_eq!(stdout(&hylo(&["check", proof, "--json"])), expected);
        let parsed: JsonReport = serde_json::from_str(&expected).unwrap();
        assert_eq!(parsed.verdict, if code == 0 { "ACCEPT" } else { "REJECT" });
    }
}

#[test]
fn eval_on_model_file() {
    let o = hylo(&["eval", "--model", "m1.mod", "--world", "w0", "@a a"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "true\n"));
    // m1 has no edges, so every box holds.
    let o = hylo(&["eval", "--model", "m1.mod", "--world", "w0", "box box p"]);
    assert_eq!(stdout(&o), "true\n");
    let o = hylo(&["eval", "--model", "m1.mod", "--world", "w0", "p"]);
    assert_eq!(stdout(&o), "false\n");
    let o = hylo(&["eval", "--model", "m1.mod", "--world", "w9", "p"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("w9"));
}

#[test]
fn countermodel_output_is_a_falsifying_model_file() {
    let dir = tempfile::tempdir().unwrap();
    for formula in ["p", "@a p -> p", "box p -> p"] {
        let o = hylo(&[
            "countermodel",
            "--sig",
            "base.sig",
            "--max-worlds",
            "2",
            formula,
        ]);
        assert_eq!(o.status.code(), Some(1), "{formula}");
        let text = stdout(&o);
        let world = text
            .lines()
            .last()
            .unwrap()
            .strip_prefix("# falsified at ")
            .unwrap()
            .to_string();
        let file = dir.path().join("cm.mod");
        std::fs::write(&file, &text).unwrap();
        let e = hylo(&[
            "eval",
            "--model",
            file.to_str().unwrap(),
            "--world",
            &world,
            formula,
        ]);
        assert_eq!(stdout(&e), "false\n", "{formula}\n{text}");
    }
}

#[test]
fn countermodel_reports_validity_and_bad_bounds() {
    let o = hylo(&[
        "countermodel",
        "--sig",
        "base.sig",
        "--max-worlds",
        "3",
        "@a (p -> q) -> (@a p -> @a q)",
    ]);
    assert_eq!(
        (o.status.code(), stdout(&o).as_str()),
        (Some(0), "VALID up to 3\n")
    );
    let o = hylo(&[
        "countermodel",
        "--sig",
        "base.sig",
        "--max-worlds",
        "0",
        "p",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn enumeration_cap_comes_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_hylo"))
        .args([
            "countermodel",
            "--sig",
            "base.sig",
            "--max-worlds",
            "3",
            "box p -> box p",
        ])
        .env("HYLO_MAX_ENUM", "10")
        .current_dir(corpus(""))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("HYLO_MAX_ENUM"));
}

#[test]
fn audit_corpus_and_rejected_proofs() {
    for (proof, theory) in [("fig3.hlp", "rain.hlt"), ("fig4.hlp", "smarties.hlt")] {
        let o = hylo(&["audit", proof, "--theory", theory]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).contains("violations: 0\n"));
    }
    let o = hylo(&["audit", "fig3_bad_discharge.hlp"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("verdict: REJECT"));
    let o = hylo(&["audit", "fig4.hlp", "--lines"]);
    assert!(stdout(&o).lines().any(|l| l == "r.1.0 {2,3} a"));
}
