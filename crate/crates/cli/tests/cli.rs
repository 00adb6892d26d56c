use std::path::PathBuf;
use std::process::{Command, Output};

fn forge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forge"))
        .args(args)
        .env_remove("FORGE_JOBS")
        .output()
        .expect("run forge")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("forge-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn build_verify_and_tamper() {
    let dir = scratch("e6");
    let file = dir.join("e6.json");
    let f = file.to_str().unwrap();
    let b = forge(&[
        "build",
        "--type",
        "E6",
        "--p",
        "13",
        "--n",
        "1",
        "--ramified",
        "-o",
        f,
    ]);
    assert_eq!(code(&b), 0, "{}", stdout(&b));
    assert!(stdout(&b).contains("case=E6-ram"));
    let v = forge(&["verify", f]);
    assert_eq!(code(&v), 0);

    let mut datum: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    datum["coords"][0] = serde_json::json!([0]);
    let bad = dir.join("bad.json");
    std::fs::write(&bad, datum.to_string()).unwrap();
    let t = forge(&["verify", bad.to_str().unwrap()]);
    assert_eq!(code(&t), 1);
    assert!(stdout(&t).contains("FAIL coroot"), "{}", stdout(&t));

    let j = forge(&["verify", "--json", bad.to_str().unwrap()]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&j)).unwrap();
    assert_eq!(report["report"]["verdict"], false);
    assert_eq!(report["case"], "E6-ram");
}

#[test]
fn invalid_input_exits_two() {
    let o = forge(&["build", "--type", "E6", "--p", "13", "--bogus"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(code(&forge(&["build", "--type", "E6", "--p", "7"])), 2);
    assert_eq!(code(&forge(&["build", "--type", "X9", "--p", "7"])), 2);
    assert_eq!(code(&forge(&["verify", "/nonexistent/forge.json"])), 2);
    assert_eq!(code(&forge(&["sweep", "--types", ""])), 2);
    assert_eq!(
        code(&forge(&["sweep", "--types", "G2", "--primes", "5"])),
        2
    );
    assert_eq!(code(&forge(&["congruence", "--model", "nope"])), 2);
}

#[test]
fn sweep_is_deterministic_across_jobs() {
    let args = ["sweep", "--max-rank", "4", "--twist", "--json"];
    let one = forge(&[&args[..], &["--jobs", "1"]].concat());
    let four = forge(&[&args[..], &["--jobs", "4"]].concat());
    assert_eq!(code(&one), 0);
    assert_eq!(stdout(&one), stdout(&four));
    let env = Command::new(env!("CARGO_BIN_EXE_forge"))
        .args([
            "sweep",
            "--max-rank",
            "4",
            "--twist",
            "--json",
            "--jobs",
            "1",
        ])
        .env("FORGE_JOBS", "3")
        .output()
        .unwrap();
    assert_eq!(stdout(&env), stdout(&one));
    let text = stdout(&forge(&["sweep", "--types", "A2,D5,E6", "--timing"]));
    for label in ["A ", "Dodd", "E6-unram"] {
        assert!(text.contains(label), "{text}");
    }
    assert!(text.lines().next().unwrap().ends_with("ms"));
}

#[test]
fn congruence_cusp_and_depth() {
    let c = forge(&["congruence", "--p", "3", "--m", "2", "-N", "2"]);
    assert_eq!(code(&c), 0, "{}", stdout(&c));
    let j = forge(&[
        "congruence",
        "--model",
        "non-free",
        "--p",
        "3",
        "--m",
        "1",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&j)).unwrap();
    assert_eq!(v["free"], false);
    assert_eq!(v["quotient"]["isomorphism"], false);

    let dir = scratch("rep");
    let rep = dir.join("rep.json");
    std::fs::write(
        &rep,
        r#"{"k": 3, "generators": [[[1, 9], [0, 1]], [[1, 0], [0, 1]], [[1, 0], [0, 1]]]}"#,
    )
    .unwrap();
    let n = forge(&[
        "congruence",
        "--p",
        "3",
        "--m",
        "2",
        "--rep",
        rep.to_str().unwrap(),
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&n)).unwrap();
    assert_eq!(v["nonconstant"]["outcome"], "pass");

    let k = forge(&["cusp", "--p", "5", "--m", "1", "--K", "8", "--samples", "8"]);
    assert_eq!(code(&k), 0, "{}", stdout(&k));
    assert_eq!(
        code(&forge(&["cusp", "--p", "5", "--m", "1", "--x", "5"])),
        2
    );

    let d = forge(&["depth", "--p", "5", "--e-f", "2", "--m", "2", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&d)).unwrap();
    assert_eq!(v["image_order"], "25");
    assert_eq!(v["in_window"], true);
}
