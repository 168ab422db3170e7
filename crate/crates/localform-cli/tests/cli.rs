use serde_json::Value;
use std::process::{Command, Output};

fn localform(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_localform"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let o = localform(&all);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("json output")
}

#[test]
fn defect_of_three_over_q2() {
    let o = localform(&["defect", "--field", "Q2", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "d=1");
    assert_eq!(json(&["defect", "--field", "Q2", "5"])["d"], "2");
    assert_eq!(json(&["defect", "--field", "Q2", "2"])["d"], "0");
    assert_eq!(json(&["defect", "--field", "Q2", "9"])["d"], "inf");
}

#[test]
fn hyperbolic_pair_is_two_universal() {
    let v = json(&["universal", "test", "--field", "Q2", "--n", "2", "--lattice", "data/HH.json"]);
    assert_eq!(v["verdict"], true);
    assert_eq!(v["theorem_branch"], "even-n (ii)");
    let text = stdout(&localform(&["universal", "test", "--n", "2", "--lattice", "data/HH.json"]));
    assert!(text.starts_with("verdict=true"), "{text}");
}

#[test]
fn anisotropic_plane_becomes_universal_over_unramified_quadratic() {
    assert_eq!(json(&["universal", "test", "--n", "1", "--lattice", "data/A.json"])["verdict"], false);
    let v = json(&["universal", "test", "--n", "1", "--lattice", "data/A.json", "--ext", "Q2u2"]);
    assert_eq!(v["verdict"], true);
    assert_eq!(v["exception_flag"], true);
}

#[test]
fn witness_is_not_represented() {
    let v = json(&["universal", "witness", "--n", "2", "--bong", "1,1"]);
    assert_eq!(v["verdict"], false);
    let w: Vec<String> = v["witness"].as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect();
    let rep = json(&["rep", "test", "--bong", "1,1", "--sub-bong", &w.join(",")]);
    assert_eq!(rep["verdict"], false);
}

#[test]
fn hilbert_symbols_over_q2() {
    let cases = [("-1", "-1", -1), ("2", "3", -1), ("2", "7", 1), ("3", "5", 1), ("3", "7", -1), ("5", "5", 1)];
    for (a, b, h) in cases {
        assert_eq!(json(&["hilbert", "--field", "Q2", a, b])["hilbert"], h, "({a},{b})");
    }
}

#[test]
fn subgroups_over_q2() {
    assert_eq!(json(&["subgroup", "norm", "--field", "Q2", "-1"])["order"], 4);
    assert_eq!(json(&["subgroup", "units", "--field", "Q2"])["order"], 4);
    assert_eq!(json(&["subgroup", "radical", "--field", "Q2", "--h", "3"])["order"], 1);
    assert_eq!(json(&["subgroup", "radical", "--field", "Q2", "--h", "2"])["order"], 2);
    assert_eq!(json(&["subgroup", "complement", "--field", "Q2", "--gens", "-1"])["order"], 4);
    assert_eq!(json(&["subgroup", "contains", "--field", "Q2", "--gens", "-1,2", "--with", "-2"])["contains"], true);
    assert_eq!(json(&["subgroup", "equals", "--field", "Q2", "--gens", "3", "--with", "-3"])["equals"], false);
}

#[test]
fn representation_agrees_with_oracle() {
    for (m, n, want) in [("1,1", "5", true), ("1,1", "3", false), ("1,1,1", "7", false), ("1,1,1,1", "7", true)] {
        assert_eq!(json(&["rep", "test", "--bong", m, "--sub-bong", n])["verdict"], want, "{m} / {n}");
        if n.len() == 1 {
            assert_eq!(json(&["rep", "oracle", "--bong", m, "--sub-bong", n])["represents"], want, "{m} / {n}");
        }
    }
}

#[test]
fn lift_and_checks() {
    let v = json(&["lift", "invariants", "--bong", "1,2", "--ext", "Q2r2"]);
    assert_eq!(v["base"]["r"], serde_json::json!([0, 1]));
    assert_eq!(v["lifted"]["r"], serde_json::json!([0, 2]));
    let v = json(&["check", "springer", "--bong", "1,1,1", "--sub-bong", "7", "--ext", "Q2u3"]);
    assert_eq!(v["flip"], false);
    let v = json(&["check", "normprinciple", "--bong", "1,3", "--sub-bong", "1", "--ext", "Q2i"]);
    assert_eq!(v["theta"]["holds"], true);
}

#[test]
fn exit_codes_and_structured_errors() {
    assert_eq!(localform(&["bogus"]).status.code(), Some(2));
    assert_eq!(localform(&["defect", "--field", "Q7x", "1"]).status.code(), Some(2));
    let o = localform(&["--json", "defect", "--field", "Q2", "zz"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "Parse");
    let o = localform(&["check", "springer", "--bong", "1", "--sub-bong", "1", "--ext", "Q2u2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sweep_ledger_is_deterministic_and_clean() {
    let dir = std::env::temp_dir();
    let (a, b) = (dir.join("localform_sweep_a.json"), dir.join("localform_sweep_b.json"));
    for (p, threads) in [(&a, "1"), (&b, "2")] {
        let o = localform(&["--threads", threads, "sweep", "--max-rank", "2", "--pairs", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (ta, tb) = (std::fs::read_to_string(&a).unwrap(), std::fs::read_to_string(&b).unwrap());
    assert_eq!(ta, tb);
    let v: Value = serde_json::from_str(&ta).unwrap();
    assert_eq!(v["violations"], 0);
    assert_eq!(v["errors"], 0);
    assert!(v["checks"].as_u64().unwrap() > 0);
}
