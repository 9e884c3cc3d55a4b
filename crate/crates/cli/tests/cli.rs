use std::process::{Command, Output};

fn realword(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_realword"))
        .args(args)
        .output()
        .expect("spawn realword")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn run_reports_halt_and_output() {
    let o = realword(&["run", "sign", "--input", "2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("HALTED"), "{}", stdout(&o));

    let o = realword(&["--format", "jsonl", "run", "sign", "--input", "2"]);
    let rec: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(rec["outcome"], "halted");
    assert_eq!(rec["steps"], 3);
}

#[test]
fn certificate_written_then_verified() {
    let dir = std::env::temp_dir().join(format!("realword-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cert = dir.join("torus.json");
    let cert = cert.to_str().unwrap();

    let word = "x(1/3) . x(2/3)";
    let o = realword(&["wp", "torus", "--word", word, "--certificate", cert]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("PROVED"), "{}", stdout(&o));

    let o = realword(&["verify", "torus", "--word", word, "--certificate", cert]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "VALID");

    let o = realword(&[
        "verify",
        "torus",
        "--word",
        "x(1/3) . x(1/3)",
        "--certificate",
        cert,
    ]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o).trim(), "INVALID");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn nontrivial_word_stays_unknown() {
    let o = realword(&["wp", "torus", "--word", "x(1/2)", "--fuel", "2000"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("UNKNOWN"));
}

#[test]
fn examples_decide_exactly() {
    for (ex, word, want) in [
        ("torus", "x(1/3) . x(2/3)", true),
        ("torus", "x(1/2)", false),
        ("circle", "x(3,4) . x(6,8)^-1", true),
        ("circle", "x(0,1)", false),
        ("rationals-b", "x(1,2) . x(1,3) . x(5,6)^-1", true),
    ] {
        let o = realword(&["--format", "jsonl", "examples", ex, "--word", word]);
        assert_eq!(code(&o), 0, "{ex} {word}");
        let rec: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
        assert_eq!(rec["identity"], want, "{ex} {word}");
    }
}

#[test]
fn hnn_reduce_pinches() {
    let o = realword(&["hnn-reduce", "--word", "t . a . t^-1 . a^-1 . a^-1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("identity: true"));
    let o = realword(&["hnn-reduce", "--word", "t . a . t^-1"]);
    assert!(stdout(&o).contains("identity: false"));
}

#[test]
fn reduce_agrees_and_fault_is_caught() {
    let o = realword(&["reduce", "recip", "--input", "1/3", "--input", "2"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = realword(&["reduce", "recip", "--input", "1/3", "--inject-fault"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("DISAGREE"));
}

#[test]
fn figure1_rows_pass() {
    let o = realword(&["figure1", "--samples", "5", "--seed", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(),
        8
    );
}

#[test]
fn paths_are_listed_in_index_order() {
    let o = realword(&["paths", "sign", "--count", "3"]);
    assert_eq!(code(&o), 0);
    let idx: Vec<u64> = stdout(&o)
        .lines()
        .map(|l| l.split(':').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(idx.len(), 3);
    assert!(idx.windows(2).all(|p| p[0] < p[1]));
}

#[test]
fn usage_errors_exit_2() {
    let o = realword(&["run", "sign", "--input", "abc"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: --input"));
    assert_eq!(code(&realword(&["frobnicate"])), 2);
    assert_eq!(
        code(&realword(&["run", "no-such-program", "--input", "1"])),
        2
    );
    assert_eq!(code(&realword(&["hnn-reduce", "--word", "x"])), 2);
}

#[test]
fn selftest_is_deterministic() {
    let args = ["selftest", "--seed", "11", "--quick", "--suite", "6"];
    let a = realword(&args);
    let b = realword(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn quick_selftest_lists_every_suite() {
    let o = realword(&["selftest", "--seed", "7", "--quick"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let out = stdout(&o);
    for name in [
        "free-reduction-confluence",
        "nielsen-freeness",
        "britton-oracle",
        "centralizer-membership",
        "certificate-round-trip",
        "operation-table",
        "stable-action-laws",
        "halting-reduction",
        "sl2-relations",
        "constant-hygiene",
    ] {
        assert!(out.contains(&format!(" {name} ")), "{name} missing");
    }
    assert!(out.contains("10 suites, 0 failed"));
}
