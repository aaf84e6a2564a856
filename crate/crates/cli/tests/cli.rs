use std::fs;
use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn convlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_convlab"))
        .args(args)
        .env_remove("CONVLAB_N_MAX")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("bad json ({e}): {}", stdout(o)))
}

#[test]
fn show_policy_prints_defaults_and_honours_env() {
    let o = convlab(&["--show-policy"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["n_max"], 1_000_000);
    let o = Command::new(env!("CARGO_BIN_EXE_convlab"))
        .arg("--show-policy")
        .env("CONVLAB_N_MAX", "5000")
        .output()
        .unwrap();
    assert_eq!(json(&o)["n_max"], 5000);
}

#[test]
fn unknown_mode_lists_valid_tags() {
    let o = convlab(&["diagnose", "--family", "ex33", "--modes", "s1d,bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("s1star-d"), "{}", stderr(&o));
}

#[test]
fn irrelevant_or_out_of_range_parameters_are_rejected() {
    let o = convlab(&["diagnose", "--family", "ex31", "--beta", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = convlab(&["diagnose", "--family", "ex32", "--alpha", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = convlab(&["--dyadic-window", "2", "diagnose", "--family", "ex33"]);
    assert_eq!(o.status.code(), Some(2));
    let o = convlab(&["diagnose"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ex33_s1d_fails_with_sine_witness() {
    let o = convlab(&["diagnose", "--family", "ex33", "--modes", "s1d", "--n-max", "100000", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["schema_version"], 1);
    let r = &v["reports"][0];
    assert_eq!(r["mode"], "s1d");
    assert_eq!(r["verdict"], "fails");
    assert_eq!(r["witness"], "f=sin");
    let p_hat = r["probes"][0]["outcome"]["fit"]["p_hat"].as_f64().unwrap();
    assert!((p_hat - 1.0).abs() < 0.01, "{p_hat}");
}

#[test]
fn constant_family_holds_everywhere() {
    let o = convlab(&["diagnose", "--family", "const", "--c", "0", "--modes", "all", "--n-max", "4096", "--format", "csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("family,mode,verdict"));
    for line in lines {
        assert_eq!(line.split(',').nth(2), Some("Holds"), "{line}");
    }
}

#[test]
fn harmonic_csv_diverges() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("harmonic.csv");
    let mut f = fs::File::create(&path).unwrap();
    writeln!(f, "term").unwrap();
    for n in 1..=100_000u32 {
        writeln!(f, "{}", 1.0 / n as f64).unwrap();
    }
    drop(f);
    let o = convlab(&["series", "--input", path.to_str().unwrap(), "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = json(&o);
    let verdict = &v["verdict"];
    assert_eq!(verdict["class"], "diverges");
    assert_eq!(verdict["evidence"]["kind"], "exponent_fit");
    assert_eq!(verdict["n_used"], 100_000);
    let p_hat = verdict["fit"]["p_hat"].as_f64().unwrap();
    assert!((p_hat - 1.0).abs() < 0.02, "{p_hat}");
    let s = verdict["partial_sum"].as_f64().unwrap();
    assert!((s - 12.090_146_129_863_4).abs() < 1e-9, "{s}");
}

#[test]
fn malformed_term_files_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [("neg.csv", "0.5\n-0.1\n"), ("text.csv", "0.5\nabc\n"), ("empty.csv", "")] {
        let path = dir.path().join(name);
        fs::write(&path, body).unwrap();
        let o = convlab(&["series", "--input", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(3), "{name}: {}", stderr(&o));
    }
    let o = convlab(&["series", "--input", dir.path().join("missing.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn term_export_is_long_format_and_bit_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = convlab(&[
            "diagnose", "--family", "ex32", "--alpha", "0.5", "--beta", "2", "--modes", "s-linf,s2d", "--n-max",
            "4096", "--terms-csv", p.to_str().unwrap(), "--terms-n", "50",
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("mode,probe,n,term"));
    let rows: Vec<&str> = lines.collect();
    // One sup-norm probe and nine grid points per index.
    assert_eq!(rows.len(), 50 * 10);
    assert_eq!(rows[0], "s-linf,sup,1,1");
    assert!(rows.contains(&"s-linf,sup,10,0.01"));
}

#[test]
fn matrix_agrees_with_individual_diagnoses() {
    let o = convlab(&["matrix", "--n-max", "4096", "--format", "json"]);
    assert!(matches!(o.status.code(), Some(0) | Some(5)), "{}", stderr(&o));
    let m = json(&o);
    assert_eq!(m["schema_version"], 1);
    let families = m["families"].as_array().unwrap();
    assert_eq!(families.len(), 6);
    let ex33 = families.iter().find(|f| f["label"] == "ex33").unwrap();
    let o = convlab(&["diagnose", "--family", "ex33", "--n-max", "4096", "--format", "json"]);
    let d = json(&o);
    let from_matrix: Vec<(Value, Value)> =
        ex33["reports"].as_array().unwrap().iter().map(|r| (r["mode"].clone(), r["verdict"].clone())).collect();
    let from_diag: Vec<(Value, Value)> =
        d["reports"].as_array().unwrap().iter().map(|r| (r["mode"].clone(), r["verdict"].clone())).collect();
    assert_eq!(from_matrix, from_diag);
    assert_eq!(ex33["reports"], d["reports"]);
}

#[test]
fn injected_false_edge_exits_with_violation_code() {
    let o = convlab(&["matrix", "--n-max", "4096", "--add-edge", "s2d,s1d", "--format", "json"]);
    assert_eq!(o.status.code(), Some(5), "{}", stderr(&o));
    let m = json(&o);
    let v = m["violations"].as_array().unwrap();
    assert_eq!(v.len(), 1);
    assert_eq!(v[0]["family"], "ex31(alpha=2)");
    assert_eq!(v[0]["antecedent"], "s2d");
    let o = convlab(&["matrix", "--n-max", "4096", "--add-edge", "s2d"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn list_emits_versioned_catalog() {
    let o = convlab(&["list", "--format", "json"]);
    assert!(o.status.success());
    let c = json(&o);
    assert_eq!(c["schema_version"], 1);
    assert_eq!(c["families"].as_array().unwrap().len(), 6);
    assert!(!c["diagram"]["edges"].as_array().unwrap().is_empty());
    let o = convlab(&["list"]);
    assert!(stdout(&o).contains("non-implications"));
}

#[test]
fn family_files_describe_custom_shift_families() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("fam.json");
    fs::write(
        &good,
        r#"{"id":"shift","base":{"pieces":[
            {"start":0.0,"end":0.5,"expr":{"kind":"constant","value":0.0}},
            {"start":0.5,"end":1.0,"expr":{"kind":"affine_in_omega","slope":2.0,"intercept":-1.0}}]},
            "constant":1.0,"exponent":3.0}"#,
    )
    .unwrap();
    let o = convlab(&["diagnose", "--family-file", good.to_str().unwrap(), "--modes", "s-linf", "--n-max", "4096", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(json(&o)["reports"][0]["verdict"], "holds");

    let gap = dir.path().join("gap.json");
    fs::write(
        &gap,
        r#"{"id":"shift","base":{"pieces":[{"start":0.0,"end":0.5,"expr":{"kind":"constant","value":0.0}}]},"constant":1.0,"exponent":2.0}"#,
    )
    .unwrap();
    let o = convlab(&["diagnose", "--family-file", gap.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cat.csv");
    let o = convlab(&["list", "--format", "csv", "--output", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert!(fs::read_to_string(&out).unwrap().starts_with("family,mode,expected,note"));
}
