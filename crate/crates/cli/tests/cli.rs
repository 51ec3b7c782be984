use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jsonschema::{Registry, Validator};
use serde_json::{json, Value};
use tempfile::TempDir;

fn homcirc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homcirc"))
        .args(args)
        .env_remove("HOMCIRC_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

fn schemas_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas")
}

fn load_schema(name: &str) -> Value {
    let text = std::fs::read_to_string(schemas_dir().join(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn validator(name: &str) -> Validator {
    let instance = load_schema("instance.schema.json");
    let id = instance["$id"].as_str().unwrap().to_string();
    let registry = Registry::new()
        .add(id.as_str(), &instance)
        .unwrap()
        .prepare()
        .unwrap();
    jsonschema::options()
        .with_registry(&registry)
        .build(&load_schema(name))
        .unwrap()
}

fn assert_valid(schema: &str, value: &Value) {
    let v = validator(schema);
    let errors: Vec<String> = v.iter_errors(value).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{schema}: {errors:?}\n{value:#}");
}

struct Dir(TempDir);

impl Dir {
    fn new() -> Self {
        Dir(TempDir::new().unwrap())
    }

    fn path(&self, name: &str) -> String {
        self.0.path().join(name).display().to_string()
    }

    fn write(&self, name: &str, text: &str) -> String {
        let p = self.path(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn gen(&self, family: &str, params: &[&str]) -> String {
        let file = self.path(&format!("{family}-{}.json", params.join("-")));
        let mut args = vec!["gen", family];
        args.extend_from_slice(params);
        args.extend_from_slice(&["-o", &file]);
        let out = homcirc(&args);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        file
    }
}

/// `key: value` pairs of text output.
fn text_fields(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.split_once(": "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn field<'a>(fields: &'a [(String, String)], key: &str) -> &'a str {
    &fields
        .iter()
        .find(|(k, _)| k == key)
        .unwrap_or_else(|| panic!("no {key}"))
        .1
}

/// `id:v id:v ...` rendered from a `{id: v}` object.
fn pairs(v: &Value) -> String {
    let mut items: Vec<(u64, i64)> = v
        .as_object()
        .unwrap()
        .iter()
        .map(|(k, x)| (k.parse().unwrap(), x.as_i64().unwrap()))
        .collect();
    items.sort();
    items
        .iter()
        .map(|(k, x)| format!("{k}:{x}"))
        .collect::<Vec<_>>()
        .join(" ")
}

#[test]
fn info_projective_loop() {
    let d = Dir::new();
    let inst = d.gen("projective_loop", &[]);
    let out = homcirc(&["info", &inst]);
    assert_eq!(code(&out), 0);
    let f = text_fields(&stdout(&out));
    assert_eq!(field(&f, "genus"), "1");
    assert_eq!(field(&f, "orientable"), "false");
    assert_eq!(field(&f, "faces"), "1");

    let j = json_of(&homcirc(&["--format", "json", "info", &inst]));
    assert_valid("info.schema.json", &j);
    assert_eq!(
        j,
        json!({"nodes": 1, "arcs": 1, "faces": 1, "genus": 1, "orientable": false})
    );
}

#[test]
fn check_reflexive() {
    let d = Dir::new();
    let inst = d.gen("klein_grid", &["3", "3"]);
    let y = d.write(
        "y.json",
        r#"{"0": 2, "2": 2, "4": 2, "6": -1, "8": -1, "10": -1}"#,
    );
    let out = homcirc(&["check", &inst, &y, &y]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out), "homologous: true\n");

    let j = json_of(&homcirc(&[
        "check",
        &inst,
        &y,
        &y,
        "--witness",
        "--format",
        "json",
    ]));
    assert_valid("check.schema.json", &j);
    assert_eq!(j["homologous"], json!(true));
    assert!(j["witness"]
        .as_object()
        .unwrap()
        .values()
        .all(|v| v == &json!(0)));
}

#[test]
fn check_false_exits_one() {
    let d = Dir::new();
    let inst = d.gen("projective_loop", &[]);
    let one = d.write("one.json", r#"{"0": 1}"#);
    let zero = d.write("zero.json", r#"{"0": 0}"#);
    let out = homcirc(&["--format", "json", "check", &inst, &one, &zero]);
    assert_eq!(code(&out), 1);
    assert_eq!(json_of(&out)["homologous"], json!(false));

    // the projective face is traced twice along the loop
    let two = d.write("two.json", r#"{"0": 2}"#);
    let j = json_of(&homcirc(&[
        "--format",
        "json",
        "check",
        &inst,
        &two,
        &zero,
        "--witness",
    ]));
    assert_eq!(j, json!({"homologous": true, "witness": {"0": 1}}));
}

#[test]
fn solve_zero_is_optimal_zero() {
    let d = Dir::new();
    for (family, params) in [
        ("projective_loop", vec![]),
        ("torus_grid", vec!["3", "3"]),
        ("klein_grid", vec!["3", "4"]),
    ] {
        let inst = d.gen(family, &params);
        let out = homcirc(&["solve", &inst, "--format", "json"]);
        assert_eq!(code(&out), 0, "{family}");
        let j = json_of(&out);
        assert_valid("solve.schema.json", &j);
        assert_eq!(j["status"], json!("Optimal"));
        assert_eq!(j["objective"], json!("0"));
        assert!(j["x"].as_object().unwrap().values().all(|v| v == &json!(0)));
    }
}

#[test]
fn solve_infeasible_exits_one() {
    let d = Dir::new();
    let inst = d.gen("torus_grid", &["3", "3"]);
    // the first row, traversed against its arcs
    let y = d.write("neg.json", r#"{"0": -1, "2": -1, "4": -1}"#);
    let out = homcirc(&["--format", "json", "solve", &inst, "--y", &y]);
    assert_eq!(code(&out), 1);
    let j = json_of(&out);
    assert_valid("solve.schema.json", &j);
    assert_eq!(j["status"], json!("Infeasible"));
    assert_eq!(j["x"], Value::Null);
    let text = homcirc(&["solve", &inst, "--y", &y]);
    assert_eq!(code(&text), 1);
    assert_eq!(field(&text_fields(&stdout(&text)), "status"), "Infeasible");
}

#[test]
fn text_and_json_agree() {
    let d = Dir::new();
    let inst = d.gen("klein_grid", &["3", "3"]);
    let y = d.write("y.json", r#"{"0": -1, "2": -1, "4": -1}"#);
    for extra in [vec![], vec!["--witness"], vec!["--tube-radius", "6"]] {
        let mut args = vec!["solve", inst.as_str(), "--y", y.as_str()];
        args.extend_from_slice(&extra);
        let text = homcirc(&args);
        args.extend_from_slice(&["--format", "json"]);
        let j = json_of(&homcirc(&args));
        assert_eq!(code(&text), 0);
        let f = text_fields(&stdout(&text));
        assert_eq!(field(&f, "status"), j["status"].as_str().unwrap());
        assert_eq!(field(&f, "objective"), j["objective"].as_str().unwrap());
        assert_eq!(field(&f, "x"), pairs(&j["x"]));
        match j.get("eta") {
            Some(eta) => assert_eq!(field(&f, "eta"), pairs(eta)),
            None => assert!(f.iter().all(|(k, _)| k != "eta")),
        }
        for (k, v) in j["stats"].as_object().unwrap() {
            assert_eq!(field(&f, k), v.to_string(), "{k}");
        }
    }

    let text = homcirc(&["oracle", &inst, "--y", &y]);
    let j = json_of(&homcirc(&[
        "oracle", &inst, "--y", &y, "--format", "json", "--upper", "10",
    ]));
    let text_upper = homcirc(&["oracle", &inst, "--y", &y, "--upper", "10"]);
    assert_eq!(
        code(&text),
        2,
        "unbounded face coefficients need a cost bound"
    );
    assert_valid("oracle.schema.json", &j);
    let f = text_fields(&stdout(&text_upper));
    assert_eq!(field(&f, "objective"), j["objective"].as_str().unwrap());
    assert_eq!(field(&f, "x"), pairs(&j["x"]));
    assert_eq!(field(&f, "eta"), pairs(&j["eta"]));
    assert_eq!(field(&f, "conclusive"), "true");
}

#[test]
fn solver_and_oracle_agree_on_objective() {
    let d = Dir::new();
    let inst = d.gen("torus_grid", &["3", "3"]);
    // twice the first row, minus the second, plus the first column
    let y = d.write(
        "y.json",
        r#"{"0": 2, "2": 2, "4": 2, "6": -1, "8": -1, "10": -1, "1": 1, "7": 1, "13": 1}"#,
    );
    let s = homcirc(&["--format", "json", "solve", &inst, "--y", &y, "--witness"]);
    assert_eq!(code(&s), 0, "{}", String::from_utf8_lossy(&s.stderr));
    let o = homcirc(&["--format", "json", "oracle", &inst, "--y", &y]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json_of(&s)["objective"], json_of(&o)["objective"]);
}

#[test]
fn oracle_check_mode() {
    let d = Dir::new();
    let inst = d.gen("projective_loop", &[]);
    let one = d.write("one.json", r#"{"0": 1}"#);
    let zero = d.write("zero.json", r#"{"0": 0}"#);
    let two = d.write("two.json", r#"{"0": 2}"#);

    let out = homcirc(&[
        "--format", "json", "oracle", &inst, "--box", "2", "--check", &two, &zero,
    ]);
    assert_eq!(code(&out), 0);
    let j = json_of(&out);
    assert_valid("oracle.schema.json", &j);
    assert_eq!(
        j,
        json!({"homologous": true, "reason": null, "witness": {"0": 1}})
    );

    let out = homcirc(&["--format", "json", "oracle", &inst, "--check", &one, &zero]);
    assert_eq!(code(&out), 1);
    let j = json_of(&out);
    assert_valid("oracle.schema.json", &j);
    assert_eq!(j["reason"], json!("homologous over the reals only"));

    let out = homcirc(&["oracle", &inst, "--box", "1", "--solve"]);
    assert_eq!(code(&out), 0);
    assert_eq!(field(&text_fields(&stdout(&out)), "conclusive"), "false");
}

#[test]
fn every_json_output_matches_its_schema() {
    let d = Dir::new();
    for family in ["torus_grid", "klein_grid"] {
        let inst = d.gen(family, &["2", "3"]);
        let text = std::fs::read_to_string(&inst).unwrap();
        assert_valid(
            "instance.schema.json",
            &serde_json::from_str(&text).unwrap(),
        );
        let j = |args: &[&str]| {
            let mut a = vec!["--format", "json"];
            a.extend_from_slice(args);
            let out = homcirc(&a);
            assert_eq!(
                code(&out),
                0,
                "{args:?}: {}",
                String::from_utf8_lossy(&out.stderr)
            );
            json_of(&out)
        };
        assert_valid("info.schema.json", &j(&["info", &inst]));
        assert_valid("faces.schema.json", &j(&["faces", &inst]));
        assert_valid("basis.schema.json", &j(&["basis", &inst, "--seed", "3"]));
        assert_valid("instance.schema.json", &j(&["dual", &inst]));
        let dual = d.path(&format!("{family}-dual.json"));
        assert_valid("gen.schema.json", &j(&["dual", &inst, "-o", &dual]));
        assert_valid(
            "gen.schema.json",
            &j(&["gen", family, "2", "2", "-o", &d.path("g.json")]),
        );
        assert_valid("solve.schema.json", &j(&["solve", &inst, "--witness"]));
        assert_valid("oracle.schema.json", &j(&["oracle", &inst, "--box", "1"]));
    }
}

#[test]
fn dual_output_is_an_instance() {
    let d = Dir::new();
    let inst = d.gen("torus_grid", &["3", "3"]);
    let out = homcirc(&["dual", &inst]);
    assert_eq!(code(&out), 0);
    let dual = d.write("dual.json", &stdout(&out));
    let info = json_of(&homcirc(&["--format", "json", "info", &dual]));
    let primal = json_of(&homcirc(&["--format", "json", "info", &inst]));
    assert_eq!(info["genus"], primal["genus"]);
    assert_eq!(info["orientable"], primal["orientable"]);
    assert_eq!(info["nodes"], primal["faces"]);
    assert_eq!(info["faces"], primal["nodes"]);
    assert_eq!(info["arcs"], primal["arcs"]);
}

#[test]
fn gen_sat_from_dimacs() {
    let d = Dir::new();
    let cnf = d.write("f.cnf", "c tiny\np cnf 2 2\n1 2 -1 0\n-1 -2 2 0\n");
    let file = d.path("sat.json");
    let out = homcirc(&["--format", "json", "gen", "sat", "--cnf", &cnf, "-o", &file]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let j = json_of(&out);
    assert_valid("gen.schema.json", &j);
    let budget = j["budget"].as_str().unwrap().to_string();
    let s = json_of(&homcirc(&["--format", "json", "solve", &file]));
    assert_eq!(s["status"], json!("Optimal"));
    // satisfiable, so the optimum reaches the budget
    let obj: f64 = ratio(s["objective"].as_str().unwrap());
    assert!(obj <= ratio(&budget), "{obj} > {budget}");

    let out = homcirc(&["gen", "sat", "-o", &file]);
    assert_eq!(code(&out), 2);
}

fn ratio(s: &str) -> f64 {
    match s.split_once('/') {
        Some((p, q)) => p.parse::<f64>().unwrap() / q.parse::<f64>().unwrap(),
        None => s.parse().unwrap(),
    }
}

#[test]
fn input_errors_exit_two() {
    let d = Dir::new();
    let inst = d.gen("projective_loop", &[]);
    let bad_version = d.write(
        "v.json",
        r#"{"version": "homcirc-v0", "nodes": [], "arcs": [], "rotation": {}, "signature": {}}"#,
    );
    let broken = d.write("b.json", "{ not json");
    let bad_y = d.write("y.json", r#"{"7": 1}"#);
    for args in [
        vec!["info", bad_version.as_str()],
        vec!["info", broken.as_str()],
        vec!["info", "/nonexistent/file.json"],
        vec!["solve", inst.as_str(), "--y", bad_y.as_str()],
        vec!["solve", inst.as_str(), "--bogus-flag"],
        vec!["solve", inst.as_str(), "--tube-radius", "-1"],
        vec!["gen", "no_such_family", "-o", "/dev/null"],
        vec!["oracle", inst.as_str(), "--box", "1", "--upper", "2"],
    ] {
        let out = homcirc(&args);
        assert_eq!(code(&out), 2, "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn output_is_deterministic() {
    let d = Dir::new();
    let inst = d.gen("klein_grid", &["4", "4"]);
    let y = d.write("y.json", r#"{"0": -1, "2": -1, "4": -1, "6": -1}"#);
    let args = [
        "--format",
        "json",
        "solve",
        &inst,
        "--y",
        &y,
        "--witness",
        "--seed",
        "5",
    ];
    let a = homcirc(&args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, homcirc(&args).stdout);
    let threaded = Command::new(env!("CARGO_BIN_EXE_homcirc"))
        .args(args)
        .env("HOMCIRC_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, threaded.stdout);
}

#[test]
fn thread_cap_is_validated() {
    let d = Dir::new();
    let inst = d.gen("projective_loop", &[]);
    let out = Command::new(env!("CARGO_BIN_EXE_homcirc"))
        .args(["solve", &inst])
        .env("HOMCIRC_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert_eq!(code(&homcirc(&["solve", &inst, "--threads", "0"])), 2);
    assert_eq!(code(&homcirc(&["solve", &inst, "--threads", "2"])), 0);
}
