use std::process::{Command, Output};

fn run(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bregman-lab"))
        .args(args)
        .env("BREGMAN_LAB_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const BURG_LN: [&str; 9] = ["eval", "--kernel", "burg", "--fn", "ln", "--lambda", "0.5", "--grid", "0.1:5:200"];

#[test]
fn eval_burg_ln_halves_the_point() {
    let o = run(&BURG_LN, "4");
    assert_eq!(o.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let head = rdr.headers().unwrap().clone();
    assert_eq!(head.iter().collect::<Vec<_>>(), ["x1", "env_left", "env_right", "hull_left", "prox_set", "status"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 200);
    for r in &rows {
        let y: f64 = r[0].parse().unwrap();
        let p: f64 = r[4].parse().unwrap();
        assert!((p - 0.5 * y).abs() < 1e-6 * (1.0 + y), "{r:?}");
        assert_eq!(&r[5], "nonempty");
        // env = ln(y/2) + 2(1 − ln 2)... via the closed form of the objective
        let env: f64 = r[1].parse().unwrap();
        let want = (0.5 * y).ln() + 2.0 * (0.5 - 1.0 - 0.5f64.ln());
        assert!((env - want).abs() < 1e-9 * (1.0 + want.abs()), "{r:?}");
    }
}

#[test]
fn row_order_does_not_depend_on_threads() {
    let a = run(&BURG_LN, "1");
    let b = run(&BURG_LN, "3");
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn infinite_literals_and_statuses() {
    let o = run(&["eval", "--kernel", "exp", "--fn", "id", "--lambda", "2", "--grid", "-1:1:3"], "1");
    let text = stdout(&o);
    let first = text.lines().nth(1).unwrap();
    assert!(first.starts_with("-1,-inf,"), "{first}");
    assert!(first.ends_with("unbounded_below"), "{first}");
    let o = run(&["eval", "--kernel", "boxed_quadratic", "--fn", "indicator:0.3", "--lambda", "1", "--grid", "-2:2:3"], "1");
    let text = stdout(&o);
    assert!(text.lines().nth(1).unwrap().contains(",inf,"), "{text}");
    assert!(text.lines().nth(1).unwrap().ends_with("prox_undefined"));
}

#[test]
fn usage_errors_exit_2() {
    let bad: [&[&str]; 6] = [
        &["eval", "--kernel", "burg", "--fn", "ln", "--lambda", "0", "--grid", "0.1:1:3"],
        &["eval", "--kernel", "burg", "--fn", "ln", "--lambda", "-1", "--grid", "0.1:1:3"],
        &["eval", "--kernel", "nope", "--fn", "ln", "--lambda", "1", "--grid", "0.1:1:3"],
        &["eval", "--kernel", "burg", "--fn", "nope", "--lambda", "1", "--grid", "0.1:1:3"],
        &["eval", "--kernel", "burg", "--fn", "ln", "--lambda", "1", "--grid", "0.1:1"],
        &["verify", "nope"],
    ];
    for args in bad {
        assert_eq!(run(args, "1").status.code(), Some(2), "{args:?}");
    }
    let o = run(&["eval", "--kernel", "burg", "--fn", "ln", "--lambda", "1", "--grid", "0.1:1:3", "--tol", "bogus=1"], "1");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn scan_threshold_reports() {
    let o = run(&["scan-threshold", "--kernel", "burg", "--fn", "zero"], "1");
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no upper bound found <= lambda_max"));
    let o = run(&["scan-threshold", "--kernel", "burg", "--fn", "ln", "--probe", "1"], "1");
    let err = String::from_utf8_lossy(&o.stderr).to_string();
    assert!(err.starts_with("threshold in ["), "{err}");
    assert!(stdout(&o).starts_with("lambda,finite\n"));
}

#[test]
fn verify_writes_to_a_file() {
    let dir = std::env::temp_dir().join(format!("bregman-lab-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("phi.txt");
    let o = run(&["verify", "phi", "--seed", "3", "--out", path.to_str().unwrap()], "1");
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("suite phi seed 3\n") && text.ends_with("5/5 checks passed\n"), "{text}");
    std::fs::remove_dir_all(&dir).unwrap();
}
