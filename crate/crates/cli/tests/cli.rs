use mpqg_cli::run;
use serde_json::Value;

fn mpqg(args: &[&str]) -> mpqg_cli::RunOutput {
    run(std::iter::once("mpqg").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> (Value, i32) {
    let out = mpqg(args);
    assert!(out.stderr.is_empty(), "{}", out.stderr);
    (serde_json::from_str(&out.stdout).expect("valid json"), out.code)
}

#[test]
fn flag_normal_form() {
    let out = mpqg(&["yflag", "nf", "--n", "3", "Y[3,2]*Y[2,1]", "--format", "text"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("(1 - q^-2)*Y[3,1] + (q^-2*q12*q13^-1*q23)*Y[2,1]*Y[3,2]"), "{}", out.stdout);
}

#[test]
fn rank2_determinant() {
    let out = mpqg(&["qmatrix", "minor", "--n", "2", "--rows", "1,2", "--cols", "1,2", "--format", "text"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("a[1,1]*a[2,2] + (-1)*a[2,1]*a[1,2]"));
    assert!(out.stdout.contains("normal form: a[1,1]*a[2,2] + (-q^-2*q12^2)*a[1,2]*a[2,1]"));
}

#[test]
fn closed_formula_verification_fails() {
    // the closed rank-3 formulas break [X+1, X-2] = 0
    let (doc, code) = json(&["rep", "verify", "--n", "3", "--degree", "2", "--closed3"]);
    assert_eq!(code, 1);
    let failed: Vec<&str> = doc["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "fail")
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"bracket X+1 X-2"), "{failed:?}");
}

#[test]
fn engine_verification_passes() {
    let (_, code) = json(&["rep", "verify", "--n", "3", "--degree", "2"]);
    assert_eq!(code, 0);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["yflag", "confluence", "--n", "3"][..],
        &["rep", "act", "--gen", "X+7", "--vec", "0,0,0"],
        &["yflag", "nf", "--n", "3", "Y[2,3]"],
        &["yflag", "rules", "--n", "4", "--split"],
        &["coeff", "normalize", "q^"],
        &["frobnicate"],
    ] {
        let out = mpqg(args);
        assert_eq!(out.code, 2, "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn help_exits_0() {
    let out = mpqg(&["--help"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("qmatrix"));
}

#[test]
fn recorded_checks_do_not_fail() {
    let (doc, code) = json(&["qmatrix", "gauss2"]);
    assert_eq!(code, 0);
    assert_eq!(doc["summary"]["fail"], 0);
    assert!(doc["summary"]["recorded"].as_u64().unwrap() >= 1);
}

#[test]
fn json_is_byte_stable_and_sorted() {
    let args = ["yflag", "confluence", "--n", "3", "--trials", "50", "--seed", "7"];
    let a = mpqg(&args);
    let b = mpqg(&args);
    assert_eq!(a, b);
    assert!(a.stdout.ends_with('\n'));
    let doc: Value = serde_json::from_str(&a.stdout).unwrap();
    let keys: Vec<&String> = doc.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert_eq!(doc["tool"], "mpqg");
    assert_eq!(doc["command"][0], "yflag");
}

#[test]
fn out_file() {
    let dir = std::env::temp_dir().join(format!("mpqg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("rules.json");
    let p = path.to_str().unwrap();
    let out = mpqg(&["qmatrix", "rules", "--n", "2", "--out", p]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written, mpqg(&["qmatrix", "rules", "--n", "2"]).stdout.replace("\"rules\",\n    \"--n\",\n    \"2\"\n", "\"rules\",\n    \"--n\",\n    \"2\",\n    \"--out\",\n    \"PATH\"\n").replace("PATH", p));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn numeric_evaluation() {
    let (doc, code) = json(&["coeff", "normalize", "q^2 - q^-2", "--params", "q=2"]);
    assert_eq!(code, 0);
    let s = doc["result"].to_string();
    assert!(s.contains("15/4"), "{s}");
}

#[test]
fn act_on_origin() {
    // -q q12^(1 - r1/2) (q/q12)^r2 [r1] is irrational here
    let out = mpqg(&["rep", "act", "--gen", "X+1", "--vec", "0,0,0", "--params", "q=2,q12=2,q13=2,q23=2,r1=1,r2=0"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("no exact rational value"));
    let (doc, _) = json(&["rep", "act", "--gen", "X+1", "--vec", "0,0,0", "--params", "q=2,q12=4,q13=2,q23=2,r1=2,r2=0"]);
    // -2 * 4^0 * [2] = -2 * (2 + 1/2) = -5
    assert!(doc["result"].to_string().contains("-5"), "{}", doc["result"]);
}
