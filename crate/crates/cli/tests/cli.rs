use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pairqe")).args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_pairqe"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap().trim_end().to_string()
}

fn ok(args: &[&str]) -> String {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    serde_json::from_str(&ok(&all)).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn is_rational(v: &Value) -> bool {
    let Some(s) = v.as_str() else { return false };
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    n.trim_start_matches('-').parse::<u64>().is_ok() && d.parse::<u64>().is_ok_and(|d| d > 0)
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn is_melem(v: &Value, allow_unit: bool) -> bool {
    v.as_object().is_some_and(|m| {
        m.iter().all(|(k, c)| {
            let k: u64 = k.parse().unwrap_or(1);
            ((k == 0 && allow_unit) || is_prime(k)) && is_rational(c) && c != "0"
        })
    })
}

fn is_endpoint(v: &Value) -> bool {
    v == "-inf" || v == "+inf" || is_melem(v, true)
}

fn is_piece(v: &Value) -> bool {
    is_endpoint(&v["a"])
        && is_endpoint(&v["b"])
        && (v["polarity"] == "finite" || v["polarity"] == "cofinite")
        && v["cosets"].as_array().is_some_and(|cs| cs.iter().all(|c| is_melem(c, false)))
}

fn is_decomposition(v: &Value, points: &str) -> bool {
    v[points].as_array().is_some_and(|ps| ps.iter().all(|p| is_melem(p, true)))
        && v["pieces"].as_array().is_some_and(|ps| ps.iter().all(is_piece))
}

#[test]
fn documented_examples() {
    assert_eq!(ok(&["qe", "--theory", "povs", "E x1. (0 < x1 & x1 < x2 & Q(x1))"]), "0 < x2");
    assert_eq!(ok(&["decide", "--theory", "povs", "E x1. (Q(x1) & !Q(x1))"]), "false");
    assert_eq!(ok(&["measure", "Q(x1)"]), "0");
}

#[test]
fn global_flags_go_anywhere_and_stdin_is_read() {
    assert_eq!(ok(&["--theory", "ovs", "decide", "A x1. E x2. x1 < x2"]), "true");
    let o = run_stdin(&["decide", "--verbose"], "E x1. (0 < x1 & x1 < 1 & !Q(x1))\n");
    assert_eq!(stdout(&o), "true");
    assert!(String::from_utf8_lossy(&o.stderr).contains("input: E x1."));
}

#[test]
fn exit_codes_follow_error_classes() {
    assert_eq!(code(&["qe", "E x1. (x1 < & x2)"]), 2);
    assert_eq!(code(&["qe", "x1 = u1"]), 2);
    assert_eq!(code(&["qe", "u1 prec 0_Q"]), 2);
    assert_eq!(code(&["qe", "Q(x1)", "--theory", "ovs"]), 2);
    assert_eq!(code(&["decompose", "x1 < 0", "--set", "x2"]), 2);
    assert_eq!(code(&["decide", "x1 < 0"]), 3);
    assert_eq!(code(&["decompose", "x1 < x2"]), 3);
    assert_eq!(code(&["code-fn", "x2 < x1"]), 3);
    assert_eq!(code(&["measure", "x1 < x2", "--buckets", "0", "--param", "x2=1"]), 3);
    assert_eq!(code(&["--model-dim", "1", "oracle-check"]), 2);
    let o = run(&["qe", "E x1. (x1 < & x2)"]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("byte 12") && err.contains("^"), "{err}");
}

#[test]
fn json_outputs_match_their_schemas() {
    assert_eq!(json(&["qe", "E x1. pi(x1) = u1"]), serde_json::json!({ "result": "true" }));
    assert_eq!(json(&["decide", "A x1. (Q(x1) -> x1 >= 0)"]), serde_json::json!({ "result": false }));

    let d = json(&["decompose", "x1 = r2 | (!Q(x1 - r2) & x1 > 0)"]);
    assert!(is_decomposition(&d, "points"), "{d}");
    assert_eq!(d["points"], serde_json::json!([{ "2": "1" }]));

    let m = json(&["measure", "x1 > r2 - 1 & x1 < 1"]);
    assert_eq!(m["exact"], serde_json::json!({ "0": "2", "2": "-1" }));
    assert!(m["decimal"].as_str().unwrap().starts_with("0.5857864"));

    let b = json(&["measure", "0 < x1 & x1 < x2", "--buckets", "10", "--param", "x2=1/4", "--param", "x2=3/10"]);
    assert_eq!(b["k"], 10);
    for e in b["entries"].as_array().unwrap() {
        assert_eq!(e["bucket"], 3);
        assert!(is_melem(&e["measure"], true) && is_melem(&e["params"]["x2"], true), "{e}");
    }

    assert_eq!(json(&["small", "Q(x1) | x1 = r2"]), serde_json::json!({ "small": true }));
    assert_eq!(json(&["generic", "!(u1 = 0_Q)"]), serde_json::json!({ "contains": true }));

    let c = json(&["code-set", "(0 < x1 & x1 < 1 & Q(x1)) | x1 = 3"]);
    assert!(is_decomposition(&c, "frontier"), "{c}");

    let f = json(&["code-fn", "(Q(x1) & x2 = 2*x1) | (!Q(x1) & x2 = x1) | (x1 = r2 & x2 = 0) & !Q(x1 - r2)"]);
    for p in f["pieces"].as_array().unwrap() {
        assert!(is_rational(&p["slope"]) && is_melem(&p["intercept"], true) && is_decomposition(&p["domain"], "frontier"), "{p}");
    }
    for pair in f["exceptional"].as_array().unwrap() {
        assert!(is_melem(&pair[0], true) && is_melem(&pair[1], true));
    }

    let s = json(&["split", "--theory", "povs-prec", "u2 prec pi(x1)"]);
    assert!(s["home"].is_null() && s["quotient"].is_string());
    assert_eq!(s["images"][0]["of"], "x1");

    let r = json(&["oracle-check", "--count", "10", "--seed", "3"]);
    assert_eq!(r["disagreements"], 0);
    assert_eq!(r["checks"], 200);
}

#[test]
fn oracle_check_is_reproducible() {
    let a = ok(&["oracle-check", "--count", "40", "--seed", "11", "--theory", "povs-prec"]);
    let b = ok(&["oracle-check", "--count", "40", "--seed", "11", "--theory", "povs-prec"]);
    assert_eq!(a, b);
    assert!(a.ends_with("800 agree, 0 disagree"), "{a}");
    assert_ne!(ok(&["oracle-check", "--count", "40", "--seed", "12", "--format", "json"]), "");
}

#[test]
fn parameters_reach_every_unary_command() {
    assert_eq!(ok(&["decompose", "x1 < x2 & Q(x1)", "--set", "x2=r3"]), "(-inf, r3) with pi in {0}");
    assert_eq!(ok(&["measure", "0 < x1 & x1 < x2", "--set", "x2=1/2"]), "1/2");
    assert_eq!(ok(&["small", "pi(x1) = u1", "--set", "u1=pi(r2)"]), "true");
    assert!(ok(&["code-fn", "x2 = x1 + x3", "--set", "x3=1", "--format", "json"]).contains("\"slope\":\"1\""));
}
