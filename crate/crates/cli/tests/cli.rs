use std::process::{Command, Output};

fn abott(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abott"))
        .args(args)
        .env_remove("ABOTT_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn quintic_conics() {
    let out = abott(&["--n", "4", "--d", "2", "--m", "0", "--class", "Hypersurface(5)"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "4876875/8");
}

#[test]
fn plane_cubics_through_eight_points() {
    let out = abott(&["--n", "2", "--d", "3", "--m", "8", "--class", "O1()^2", "--verify"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "12");
}

#[test]
fn several_classes_one_line_each() {
    let out = abott(&[
        "--n", "3", "--d", "1", "--m", "0",
        "--class", "Incidency(2)^3*Contact()",
        "--class", "Incidency(3)*Incidency(2)*Contact()",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().collect::<Vec<_>>(), ["2", "1"]);
}

#[test]
fn regression_suite_passes() {
    let out = abott(&["--regress", "quintic", "--max-d", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("ok")).count(), 3);
    assert!(!text.contains("FAIL"));
}

#[test]
fn json_output() {
    let out = abott(&[
        "--n", "4", "--d", "2", "--m", "0", "--class", "Hypersurface(5)", "--format", "json", "--seed", "5",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(doc["n"], 4);
    assert_eq!(doc["d"], 2);
    assert_eq!(doc["m"], 0);
    assert_eq!(doc["seed"], 5);
    assert!(doc["graphs"].as_u64().unwrap() > 0);
    assert!(doc["seconds"].as_f64().unwrap() >= 0.0);
    let r = &doc["results"][0];
    assert_eq!(r["expression"], "Hypersurface(5)");
    assert_eq!(r["numerator"], "4876875");
    assert_eq!(r["denominator"], "8");
}

#[test]
fn decimal_output() {
    let out = abott(&["--n", "1", "--d", "2", "--m", "0", "--class", "R1(-1)^2", "--format", "decimal"]);
    assert!(out.status.success());
    let line = stdout(&out);
    assert!(line.starts_with("approx 0.125"), "{line}");
}

#[test]
fn thread_count_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_abott"))
        .args(["--n", "4", "--d", "3", "--m", "0", "--class", "Hypersurface(5)"])
        .env("ABOTT_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "8564575000/27");
}

#[test]
fn rejects_bad_input() {
    let cases: [&[&str]; 5] = [
        &["--n", "2", "--d", "1", "--m", "0", "--class", "Incidency(2"],
        &["--n", "2", "--d", "1", "--m", "0", "--class", "Incidency(2)"],
        &["--n", "2", "--d", "1", "--m", "0"],
        &["--regress", "nonesuch"],
        &["--regress", "quintic", "--n", "4"],
    ];
    for args in cases {
        let out = abott(args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn lists_suites_and_trees() {
    let out = abott(&["--list-suites"]);
    assert!(out.status.success());
    assert!(stdout(&out).lines().any(|l| l.starts_with("quintic")));

    let out = abott(&["--trees", "6"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 6);
}
