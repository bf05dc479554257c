//! End-to-end checks of the command-line surface: exit codes, determinism,
//! refusal on undetermined cells, and the golden gate.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn kqcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kqcalc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_gate_passes() {
    let out = kqcalc(&["verify", "--golden", "all"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("coeff-KQZ: 132 cells checked, 0 mismatches"), "{}", text);
}

#[test]
fn unknown_golden_set_fails() {
    let out = kqcalc(&["verify", "--golden", "nonsense"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_error_exits_two() {
    let out = kqcalc(&["compute", "--theory", "kq"]);
    assert_eq!(out.status.code(), Some(2), "missing required weight must be a usage error");
    let out = kqcalc(&["compute", "--weight", "2", "--page", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn table_output_is_deterministic_and_atomic() {
    let dir = std::env::temp_dir().join(format!("kqcalc-test-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let out_a = dir.join("a.csv");
    let out_b = dir.join("b.csv");
    for (path, _) in [(&out_a, 0), (&out_b, 1)] {
        let out = kqcalc(&[
            "compute",
            "--base",
            "Z",
            "--theory",
            "kq",
            "--weight",
            "0,1,2,3",
            "--range",
            "-8..24",
            "--format",
            "csv",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = fs::read(&out_a).unwrap();
    let b = fs::read(&out_b).unwrap();
    assert_eq!(a, b, "identical configurations must produce byte-identical files");
    // No temporary litter left behind.
    let leftovers: Vec<PathBuf> = fs::read_dir(&dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().map(|x| x == "tmp").unwrap_or(false))
        .collect();
    assert!(leftovers.is_empty(), "temporary files left: {:?}", leftovers);
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn ambiguous_cells_refused_without_allow_partial() {
    let dir = std::env::temp_dir().join(format!("kqcalc-prof-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let profile = dir.join("shared.json");
    let mut h = Vec::new();
    let mut h2 = Vec::new();
    for w in 1..=20i64 {
        h.push(format!("[1, {}, \"Z/5\"]", w));
        h.push(format!("[2, {}, \"Z/5\"]", w));
        h2.push(format!("[0, {}, \"Z/5\"]", w));
        h2.push(format!("[1, {}, \"Z/5\"]", w));
        h2.push(format!("[2, {}, \"Z/5\"]", w));
    }
    let doc = format!(
        "{{\"name\": \"shared\", \"tables\": {{\"H\": [{}], \"h2\": [{}], \"max_weight\": 24}}}}",
        h.join(", "),
        h2.join(", ")
    );
    fs::write(&profile, doc).unwrap();

    let validate = kqcalc(&["profile-validate", profile.to_str().unwrap()]);
    assert!(validate.status.success());

    let refused = kqcalc(&[
        "compute",
        "--base",
        profile.to_str().unwrap(),
        "--weight",
        "0",
        "--range",
        "0..16",
    ]);
    assert_eq!(refused.status.code(), Some(1), "must refuse to print an undetermined group");
    assert!(String::from_utf8_lossy(&refused.stderr).contains("refusing"));

    let partial = kqcalc(&[
        "compute",
        "--base",
        profile.to_str().unwrap(),
        "--weight",
        "0",
        "--range",
        "0..16",
        "--allow-partial",
        "--format",
        "csv",
    ]);
    assert!(partial.status.success());
    assert!(stdout(&partial).contains("Z/5 . Z/5"), "partial output must mark the ladder");
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn arithmetic_subcommands() {
    let out = kqcalc(&["bernoulli", "12"]);
    assert!(stdout(&out).contains("-691/2730"));
    let out = kqcalc(&["uv", "12"]);
    let text = stdout(&out);
    assert!(text.contains("u(12) = 691") && text.contains("v(12) = 65520"));
    let out = kqcalc(&["uv", "7"]);
    assert_eq!(out.status.code(), Some(1), "odd weights are rejected");
}

#[test]
fn charts_render() {
    let out = kqcalc(&[
        "chart", "--base", "Z", "--weight", "0", "--range", "-2..8", "--page", "e1", "--format",
        "svg",
    ]);
    assert!(out.status.success());
    let svg = stdout(&out);
    assert!(svg.starts_with("<svg") && svg.contains("</svg>"));
    let out2 = kqcalc(&[
        "chart", "--base", "Z", "--weight", "0", "--range", "-2..8", "--page", "e1", "--format",
        "svg",
    ]);
    assert_eq!(stdout(&out2), svg, "chart output must be deterministic");

    let text = kqcalc(&[
        "chart", "--base", "F5", "--weight", "2", "--range", "0..8", "--page", "e2", "--format",
        "text-chart",
    ]);
    assert!(text.status.success());
    assert!(stdout(&text).contains("page r=2 weight=2 base=F5"));
}

#[test]
fn bad_profile_rejected() {
    let dir = std::env::temp_dir().join(format!("kqcalc-bad-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let profile = dir.join("bad.json");
    fs::write(&profile, r#"{"name": "bad", "tables": {"H": [[3, 4, "Z/7"]]}}"#).unwrap();
    let out = kqcalc(&["profile-validate", profile.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    fs::remove_dir_all(&dir).ok();
}
