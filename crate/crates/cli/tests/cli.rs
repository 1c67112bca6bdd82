use std::io::Write;
use std::process::{Command, Output};

use nacopula::{logpdf2, parse};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nacopula")).args(args).output().expect("binary runs")
}

fn data_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn independence_logpdf_is_zero() {
    let f = data_file("u1,u2,u3\n0.2,0.5,0.9\n0.7,0.1,0.3\n");
    let o = run(&["logpdf", "--structure", "G(1; 1, G(1; 2,3))", "--data", f.path().to_str().unwrap()]);
    assert!(o.status.success());
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines[0], "logpdf");
    for l in &lines[1..] {
        assert_eq!(l.parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn logpdf_matches_library_bitwise() {
    let f = data_file("0.3,0.5,0.7\n");
    let s = "G(1.3333333333333333; 1, G(2; 2, 3))";
    let o = run(&["--no-header", "logpdf", "--structure", s, "--data", f.path().to_str().unwrap()]);
    assert!(o.status.success());
    let got: f64 = stdout(&o).trim().parse().unwrap();
    let want = logpdf2(&parse(s).unwrap(), &[0.3, 0.5, 0.7]).unwrap().value;
    assert_eq!(got.to_bits(), want.to_bits());
}

#[test]
fn sample_then_logpdf_round_trip() {
    let s = "C(1; 1, C(3; 2, 3, 4))";
    let o = run(&["sample", "--structure", s, "--n", "200", "--seed", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("u1,u2,u3,u4\n"));
    assert_eq!(text.lines().count(), 201);
    let again = run(&["sample", "--structure", s, "--n", "200", "--seed", "4"]);
    assert_eq!(text, stdout(&again));
    let f = data_file(&text);
    let o = run(&["logpdf", "--structure", s, "--data", f.path().to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 201);
}

#[test]
fn exit_codes() {
    let f = data_file("0.3,0.5,0.7\n0.2,1.0,0.4\n");
    let p = f.path().to_str().unwrap();
    let o = run(&["--no-header", "logpdf", "--structure", "G(1.5; 1, G(2; 2, 3)", "--data", p]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["--no-header", "logpdf", "--structure", "G(1.5; 1, G(2; 2, 3))", "--data", p]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("row 2"));
    let o = run(&["sample", "--structure", "F(2; 1, F(3; 2, 3))", "--n", "5"]);
    assert_eq!(o.status.code(), Some(4));
    let o = run(&[
        "--no-header",
        "logpdf",
        "--structure",
        "G(1.1; 1, G(1.2; 2, G(1.3; 3, G(1.4; 4, 5))))",
        "--data",
        p,
    ]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn grid_and_fit() {
    let s = "G(1.3333333333333333; 1, G(2; 2, 3, 4))";
    let sample = stdout(&run(&["sample", "--structure", s, "--n", "60", "--seed", "2"]));
    let f = data_file(&sample);
    let p = f.path().to_str().unwrap();
    let o = run(&[
        "grid",
        "--structure",
        s,
        "--data",
        p,
        "--theta0-grid",
        "1.1:2:4",
        "--theta1-grid",
        "1.5:3:3",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("theta0,theta1,nll\n"));
    assert_eq!(text.lines().count(), 13);
    assert!(text.contains(",inf"));

    let o = run(&["fit", "--structure", s, "--data", p, "--init", "1.3,2.1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for key in ["theta0=", "theta1=", "nll=", "iterations=", "converged=true", "constraint_active="] {
        assert!(text.contains(key), "{key} missing in {text}");
    }
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("[PASS]")));
}
