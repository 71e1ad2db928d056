use std::path::Path;
use std::process::Command;

use serde_json::Value;
use sumset_vc::cli::{run, OPERATION_COVERAGE};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cli(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("sumset-vc").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Checks the subset of JSON Schema used by the report schema.
fn validate(schema: &Value, value: &Value, at: &str) -> Result<(), String> {
    if let Some(types) = schema.get("type") {
        let allowed: Vec<&str> = match types {
            Value::String(t) => vec![t.as_str()],
            Value::Array(ts) => ts.iter().map(|t| t.as_str().unwrap()).collect(),
            _ => return Err(format!("{at}: bad type keyword")),
        };
        let actual = match value {
            Value::Null => "null",
            Value::Bool(_) => "boolean",
            Value::Number(n) if n.is_u64() || n.is_i64() => "integer",
            Value::Number(_) => "number",
            Value::String(_) => "string",
            Value::Array(_) => "array",
            Value::Object(_) => "object",
        };
        if !allowed.contains(&actual) {
            return Err(format!("{at}: {actual} not in {allowed:?}"));
        }
    }
    if let Some(c) = schema.get("const") {
        if c != value {
            return Err(format!("{at}: expected {c}"));
        }
    }
    if let Some(Value::Array(options)) = schema.get("enum") {
        if !options.contains(value) {
            return Err(format!("{at}: {value} not in enum"));
        }
    }
    if let (Some(min), Some(v)) = (
        schema.get("minimum").and_then(Value::as_i64),
        value.as_i64(),
    ) {
        if v < min {
            return Err(format!("{at}: {v} < {min}"));
        }
    }
    if let (Some(pattern), Some(s)) = (
        schema.get("pattern").and_then(Value::as_str),
        value.as_str(),
    ) {
        assert_eq!(
            pattern, "^[0-9a-f]{64}$",
            "validator only knows the digest pattern"
        );
        if s.len() != 64
            || !s
                .bytes()
                .all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
        {
            return Err(format!("{at}: '{s}' is not a digest"));
        }
    }
    if let Value::Object(map) = value {
        if let Some(Value::Array(required)) = schema.get("required") {
            for key in required {
                if !map.contains_key(key.as_str().unwrap()) {
                    return Err(format!("{at}: missing {key}"));
                }
            }
        }
        let properties = schema.get("properties").and_then(Value::as_object);
        for (key, v) in map {
            match properties.and_then(|p| p.get(key)) {
                Some(sub) => validate(sub, v, &format!("{at}.{key}"))?,
                None if schema.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    return Err(format!("{at}: unexpected {key}"))
                }
                None => {}
            }
        }
    }
    if let (Value::Array(items), Some(sub)) = (value, schema.get("items")) {
        for (i, v) in items.iter().enumerate() {
            validate(sub, v, &format!("{at}[{i}]"))?;
        }
    }
    Ok(())
}

#[test]
fn verify_example_reports_clean_scan() {
    let r = cli(&[
        "verify",
        "--theorem",
        "intdeg_le_vc",
        "--n",
        "3",
        "--mode",
        "exhaustive",
        "--quiet",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["instances_checked"], 255);
    assert_eq!(v["violations"], Value::Array(vec![]));
    assert_eq!(v["ok"], true);
}

#[test]
fn generated_low_weight_family_has_vc_dim_two() {
    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("fam.txt");
    let r = cli(&[
        "gen-family",
        "--n",
        "4",
        "--kind",
        "lowweight",
        "--d",
        "2",
        "--out",
        path_str(&fam),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.is_empty());
    let r = cli(&["vcdim", "--in", path_str(&fam)]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "2\n"));
}

#[test]
fn empty_family_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("empty.txt");
    std::fs::write(&fam, "n=3 p=2\n").unwrap();
    let r = cli(&["vcdim", "--in", path_str(&fam)]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("empty family"), "{}", r.stderr);
}

#[test]
fn malformed_inputs_exit_two_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("bad.txt");
    std::fs::write(&fam, "n=3 p=2\n010\n0110\n").unwrap();
    let r = cli(&["vcdim", "--in", path_str(&fam)]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 3"), "{}", r.stderr);
    assert_eq!(cli(&["vcdim", "--in", "/nonexistent/family.txt"]).code, 2);
    assert_eq!(cli(&["verify", "--bogus"]).code, 2);
    assert_eq!(cli(&["verify", "--theorem", "nope", "--n", "2"]).code, 2);
    assert_eq!(cli(&["verify", "--theorem", "main", "--n", "9"]).code, 2);
    assert_eq!(cli(&["clp-rank", "--n", "20", "--indicator-zero"]).code, 2);
    assert_eq!(cli(&["--help"]).code, 0);
}

#[test]
fn schema_validates_emitted_reports() {
    let schema: Value = serde_json::from_str(&cli(&["schema"]).stdout).unwrap();
    assert_eq!(schema["version"], env!("CARGO_PKG_VERSION"));
    assert!(schema["required"]
        .as_array()
        .unwrap()
        .contains(&Value::from("violations")));
    assert_eq!(schema["properties"]["violations"]["type"], "array");
    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("fam.txt");
    std::fs::write(&fam, "n=3 p=2\n000\n110\n011\n").unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec!["verify", "--theorem", "sauer", "--n", "2", "--quiet"],
        vec![
            "verify",
            "--theorem",
            "main",
            "--n",
            "5",
            "--mode",
            "random",
            "--samples",
            "50",
            "--seed",
            "3",
            "--quiet",
        ],
        vec![
            "verify",
            "--theorem",
            "psums",
            "--n",
            "3",
            "--p",
            "3",
            "--mode",
            "random",
            "--samples",
            "20",
            "--quiet",
        ],
        vec![
            "verify",
            "--theorem",
            "clp_bound",
            "--n",
            "3",
            "--mode",
            "random",
            "--samples",
            "20",
            "--quiet",
            "--timing",
        ],
        vec![
            "verify",
            "--theorem",
            "vc_monotone",
            "--mode",
            "instance",
            "--in",
            path_str(&fam),
        ],
    ];
    for args in runs {
        let r = cli(&args);
        assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
        let report: Value = serde_json::from_str(&r.stdout).unwrap();
        validate(&schema, &report, "$").unwrap_or_else(|e| panic!("{args:?}: {e}"));
    }
    let bad: Value = serde_json::json!({"tool_version": "0.1.0"});
    assert!(validate(&schema, &bad, "$").is_err());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("fam.txt");
    std::fs::write(&fam, "n=3 p=2\n000\n100\n110\n011\n").unwrap();
    let f = path_str(&fam);
    let commands: Vec<Vec<&str>> = vec![
        vec![
            "verify",
            "--theorem",
            "main",
            "--n",
            "6",
            "--mode",
            "random",
            "--samples",
            "300",
            "--seed",
            "42",
            "--quiet",
        ],
        vec![
            "verify",
            "--theorem",
            "main",
            "--n",
            "6",
            "--mode",
            "random",
            "--samples",
            "300",
            "--seed",
            "42",
            "--quiet",
            "--format",
            "csv",
        ],
        vec![
            "verify",
            "--theorem",
            "clp_bound",
            "--n",
            "4",
            "--p",
            "3",
            "--mode",
            "random",
            "--samples",
            "30",
            "--seed",
            "1",
            "--quiet",
        ],
        vec![
            "gen-family",
            "--n",
            "6",
            "--kind",
            "random",
            "--size",
            "20",
            "--seed",
            "9",
        ],
        vec![
            "clp-rank",
            "--p",
            "3",
            "--n",
            "3",
            "--random-degree",
            "4",
            "--seed",
            "2",
        ],
        vec![
            "slice-decompose",
            "--p",
            "3",
            "--k",
            "3",
            "--random-degree",
            "3",
            "--seed",
            "4",
            "--in",
            f,
        ],
        vec![
            "search",
            "--question",
            "q2",
            "--n",
            "5",
            "--mode",
            "heuristic",
            "--budget",
            "300",
            "--seed",
            "8",
            "--format",
            "csv",
        ],
        vec!["search", "--question", "q1", "--n", "3", "--format", "json"],
        vec![
            "demo-counterexample",
            "--op",
            "union",
            "--n",
            "10",
            "--d",
            "2",
        ],
        vec![
            "intdeg",
            "--in",
            f,
            "--represent",
            "111",
            "--basis",
            "2",
            "--format",
            "json",
        ],
        vec![
            "vcdim",
            "--in",
            f,
            "--levels",
            "--witness",
            "111",
            "--format",
            "json",
        ],
        vec![
            "family-op",
            "--in",
            f,
            "--op",
            "sum",
            "--k",
            "3",
            "--p",
            "3",
        ],
    ];
    for args in commands {
        let first = cli(&args);
        let second = cli(&args);
        assert_eq!(first.code, 0, "{args:?}: {}", first.stderr);
        assert_eq!(first.stdout, second.stdout, "{args:?}");
        let target = dir.path().join("report.out");
        let mut with_out = args.clone();
        with_out.extend(["--out", path_str(&target)]);
        assert_eq!(cli(&with_out).code, 0);
        let first_file = std::fs::read(&target).unwrap();
        assert_eq!(cli(&with_out).code, 0);
        assert_eq!(first_file, std::fs::read(&target).unwrap(), "{args:?}");
    }
}

#[test]
fn search_csv_is_labelled_as_finite_evidence() {
    let r = cli(&[
        "search",
        "--question",
        "q1",
        "--n",
        "2",
        "--d",
        "2",
        "--format",
        "csv",
    ]);
    assert_eq!(r.code, 0);
    let mut lines = r.stdout.lines();
    assert!(lines.next().unwrap().starts_with("# finite evidence"));
    assert_eq!(
        lines.next().unwrap(),
        "n,d,best_size,binom_sum_n_d,half_bound,verified,certificate"
    );
    assert!(lines.next().unwrap().starts_with("2,2,4,"));
}

#[test]
fn replay_reproduces_and_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let r = cli(&[
        "verify",
        "--theorem",
        "sauer",
        "--n",
        "6",
        "--mode",
        "random",
        "--samples",
        "100",
        "--seed",
        "5",
        "--quiet",
        "--timing",
        "--out",
        path_str(&report),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let replay = cli(&["replay", "--in", path_str(&report)]);
    assert_eq!(replay.code, 0, "{}", replay.stderr);
    let out: Value = serde_json::from_str(&replay.stdout).unwrap();
    assert_eq!(out["result"]["reproduced"], true);

    let original: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let tampered = dir.path().join("tampered.json");

    let mut planted = original.clone();
    planted["violations"] = serde_json::json!(["n=6 members=[0]: 2 > 1"]);
    planted["ok"] = Value::Bool(false);
    std::fs::write(&tampered, serde_json::to_string(&planted).unwrap()).unwrap();
    assert_eq!(cli(&["replay", "--in", path_str(&tampered)]).code, 1);

    let mut shifted = original.clone();
    shifted["instances_checked"] = Value::from(99);
    std::fs::write(&tampered, serde_json::to_string(&shifted).unwrap()).unwrap();
    let r = cli(&["replay", "--in", path_str(&tampered)]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("digest"), "{}", r.stderr);

    std::fs::write(&tampered, "{ not json").unwrap();
    assert_eq!(cli(&["replay", "--in", path_str(&tampered)]).code, 2);
}

#[test]
fn instance_reports_replay() {
    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("fam.txt");
    std::fs::write(&fam, "n=3 p=2\n000\n110\n011\n").unwrap();
    let report = dir.path().join("report.json");
    let r = cli(&[
        "verify",
        "--theorem",
        "main",
        "--mode",
        "instance",
        "--in",
        path_str(&fam),
        "--out",
        path_str(&report),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(cli(&["replay", "--in", path_str(&report)]).code, 0);
}

#[test]
fn bound_violations_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    cli(&[
        "verify",
        "--theorem",
        "sauer",
        "--n",
        "2",
        "--quiet",
        "--out",
        path_str(&report),
    ]);
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    v["violations"] = serde_json::json!(["planted"]);
    std::fs::write(&report, v.to_string()).unwrap();
    let r = cli(&["replay", "--in", path_str(&report)]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("violation"));
}

#[test]
fn every_library_operation_is_reachable() {
    let help = cli(&["--help"]).stdout;
    for (op, sub) in OPERATION_COVERAGE {
        assert!(help.contains(sub), "{op} -> {sub}");
        let sub_help = cli(&[sub, "--help"]);
        assert_eq!(sub_help.code, 0, "{sub}");
    }
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_sumset-vc");
    let ok = Command::new(bin)
        .args([
            "demo-counterexample",
            "--op",
            "intersect",
            "--n",
            "4",
            "--d",
            "2",
            "--format",
            "text",
        ])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(ok.stdout).unwrap(),
        "op=intersect n=4 d=2 family_size=11 vc_star=2 half_bound=10 witness=true\n"
    );
    let bad = Command::new(bin).args(["vcdim"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
