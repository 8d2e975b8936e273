use std::process::{Command, Output};

fn schouten(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schouten")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn write_temp(name: &str, text: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("schouten-{}-{name}", std::process::id()));
    std::fs::write(&path, text).expect("temp file writable");
    path
}

#[test]
fn ricci_g1_lc_matches_known_operator() {
    let out = schouten(&["ricci", "--family", "g1", "--kind", "lc"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("row1 = 1/2*beta^2, alpha*beta, alpha*beta"), "{text}");
    assert!(text.contains("row3 = -alpha*beta, -2*alpha^2, -2*alpha^2 + 1/2*beta^2"), "{text}");
    assert!(text.contains("s = 3/2*beta^2"), "{text}");
}

#[test]
fn g5_canonical_operator_vanishes() {
    let text = stdout(&schouten(&["ricci", "--family", "g5", "--kind", "canonical"]));
    for row in ["row1", "row2", "row3"] {
        assert!(text.contains(&format!("{row} = 0, 0, 0")), "{text}");
    }
    assert!(text.contains("s = 0"));
}

#[test]
fn machine_format_is_json() {
    let out = schouten(&["ricci", "--family", "g2", "--kind", "kn", "--format", "machine"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).expect("valid json");
    assert!(doc.is_object());
}

#[test]
fn custom_abelian_algebra_has_flat_operator() {
    let path = write_temp("abelian.txt", "bracket.12 = 0,0,0\nbracket.13 = 0,0,0\nbracket.23 = 0,0,0\n");
    let family = format!("custom:{}", path.display());
    let out = schouten(&["ricci", "--family", &family, "--kind", "lc"]);
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("s = 0"));
}

#[test]
fn malformed_custom_file_is_a_data_error() {
    let path = write_temp("broken.txt", "bracket.12 = 1,2\n");
    let family = format!("custom:{}", path.display());
    let out = schouten(&["ricci", "--family", &family, "--kind", "lc"]);
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn missing_custom_file_is_a_data_error() {
    let out = schouten(&["ricci", "--family", "custom:/nonexistent/algebra.txt", "--kind", "lc"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(schouten(&["bogus"]).status.code(), Some(2));
    assert_eq!(schouten(&["ricci", "--family", "g4", "--kind", "lc"]).status.code(), Some(2));
    assert_eq!(schouten(&["ricci", "--family", "g1", "--eta", "1", "--kind", "lc"]).status.code(), Some(2));
    assert_eq!(schouten(&["ricci", "--family", "g9", "--kind", "lc"]).status.code(), Some(2));
    assert_eq!(schouten(&["ricci", "--family", "g1", "--kind", "weyl"]).status.code(), Some(2));
    assert_eq!(schouten(&["scan", "--family", "g1", "--kind", "lc", "--count", "0"]).status.code(), Some(2));
}

#[test]
fn system_g4_negative_branch() {
    let out = schouten(&["system", "--family", "g4", "--eta", "-1", "--kind", "lc"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("eta = -1"));
    assert_eq!(text.lines().filter(|l| l.starts_with("residual.")).count(), 9);
}

#[test]
fn verify_failures_exit_1() {
    let out = schouten(&["verify", "--only", "3.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL  case         3.5.i "));
}

#[test]
fn verify_warns_on_suspect_cases() {
    let out = schouten(&["verify", "--only", "3.3"]);
    let text = stdout(&out);
    for id in ["3.3.vii", "3.3.viii", "3.3.xii"] {
        assert!(text.lines().any(|l| l.starts_with("warn  case") && l.contains(&format!(" {id} "))), "{id}");
    }
    assert!(text.contains("info  case         3.3.viii-variant"));
    assert!(text.lines().any(|l| l.starts_with("pass  case") && l.contains(" 3.3.ii ")));
}

#[test]
fn verify_non_existence_passes() {
    let out = schouten(&["verify", "--only", "4.8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("0 of 2500 scanned (point, lambda0) pairs solvable"));
    assert!(text.contains("summary: 4 passed, 0 failed"));
}

#[test]
fn scan_g4_kn_finds_nothing() {
    let out = schouten(&["scan", "--family", "g4", "--kind", "kn", "--count", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("g4(eta=1) kn: 0 of 50 points solvable"));
    assert!(text.contains("g4(eta=-1) kn: 0 of 50 points solvable"));
}

#[test]
fn scan_g5_kn_is_solvable_everywhere_with_c_zero() {
    let text = stdout(&schouten(&["scan", "--family", "g5", "--kind", "kn", "--count", "20", "--seed", "7"]));
    assert!(text.contains("g5 kn: 20 of 20 points solvable (100 of 100"));
    assert!(text.lines().filter(|l| l.contains("lambda0=")).all(|l| l.ends_with("c=0")));
}

#[test]
fn output_is_deterministic_per_seed() {
    let args = ["scan", "--family", "g3", "--kind", "lc", "--count", "40", "--seed", "3", "--format", "machine"];
    assert_eq!(schouten(&args).stdout, schouten(&args).stdout);
    let other = ["scan", "--family", "g3", "--kind", "lc", "--count", "40", "--seed", "4", "--format", "machine"];
    assert_ne!(schouten(&args).stdout, schouten(&other).stdout);
}

#[test]
fn families_lists_both_g4_branches() {
    let text = stdout(&schouten(&["families"]));
    assert!(text.contains("g4(eta=1)"));
    assert!(text.contains("g4(eta=-1)"));
    assert!(text.contains("g7"));
}

#[test]
fn jacobi_residuals_vanish() {
    let out = schouten(&["jacobi", "--family", "g7"]);
    assert_eq!(out.status.code(), Some(0));
}
