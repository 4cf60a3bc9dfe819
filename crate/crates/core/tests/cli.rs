use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const QAP: &str = env!("CARGO_BIN_EXE_qap");

fn qap(args: &[&str]) -> Output {
    Command::new(QAP).args(args).output().expect("run qap")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn store_read_check_flow() {
    let dir = tempfile::tempdir().unwrap();
    let (bank, key) = (p(dir.path(), "bank.json"), p(dir.path(), "key.json"));

    let out = qap(&[
        "store", "1011", "--seed", "42", "--bank", &bank, "--key", &key,
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "4");
    let first = (fs::read(&bank).unwrap(), fs::read(&key).unwrap());
    qap(&[
        "store", "1011", "--seed", "42", "--bank", &bank, "--key", &key,
    ]);
    assert_eq!(first, (fs::read(&bank).unwrap(), fs::read(&key).unwrap()));

    for _ in 0..2 {
        let out = qap(&["read", "--bank", &bank]);
        assert_eq!(code(&out), 0);
        assert_eq!(stdout(&out).trim(), "1011");
    }

    let out = qap(&["check", "--bank", &bank, "--key", &key, "--indices", "1,3"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("verdict: original"));
    let out = qap(&["check", "--bank", &bank, "--key", &key]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&qap(&["read", "--bank", &bank])).trim(), "1011");
}

#[test]
fn store_empty_and_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let (bank, key) = (p(dir.path(), "bank.json"), p(dir.path(), "key.json"));
    assert_eq!(
        code(&qap(&["store", "", "--bank", &bank, "--key", &key])),
        0
    );
    assert_eq!(stdout(&qap(&["read", "--bank", &bank])).trim(), "");
    assert_eq!(code(&qap(&["check", "--bank", &bank, "--key", &key])), 0);

    assert_eq!(
        code(&qap(&["store", "10a1", "--bank", &bank, "--key", &key])),
        2
    );
    let nowhere = p(dir.path(), "missing/dir/bank.json");
    assert_eq!(
        code(&qap(&["store", "10", "--bank", &nowhere, "--key", &key])),
        3
    );
}

#[test]
fn corrupt_inputs_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let (bank, key) = (p(dir.path(), "bank.json"), p(dir.path(), "key.json"));
    qap(&[
        "store", "110", "--seed", "1", "--bank", &bank, "--key", &key,
    ]);
    let text = fs::read_to_string(&bank).unwrap();
    fs::write(&bank, &text[..text.len() / 2]).unwrap();
    assert_eq!(code(&qap(&["read", "--bank", &bank])), 4);

    fs::write(&bank, text.replacen("0.0", "0.5", 1)).unwrap();
    assert_eq!(code(&qap(&["read", "--bank", &bank])), 4);

    assert_eq!(
        code(&qap(&["read", "--bank", &p(dir.path(), "nope.json")])),
        4
    );
}

#[test]
fn check_failures_and_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let bits = "10110100111010010110";
    qap(&[
        "store",
        bits,
        "--seed",
        "3",
        "--bank",
        &p(d, "bank.json"),
        "--key",
        &p(d, "key.json"),
    ]);
    // An independent store of the same bits is a guess forgery.
    qap(&[
        "store",
        bits,
        "--seed",
        "4",
        "--bank",
        &p(d, "forged.json"),
        "--key",
        &p(d, "k2.json"),
    ]);
    let out = qap(&[
        "check",
        "--bank",
        &p(d, "forged.json"),
        "--key",
        &p(d, "key.json"),
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("NOT original"));

    qap(&[
        "store",
        "101",
        "--bank",
        &p(d, "short.json"),
        "--key",
        &p(d, "k3.json"),
    ]);
    let out = qap(&[
        "check",
        "--bank",
        &p(d, "short.json"),
        "--key",
        &p(d, "key.json"),
    ]);
    assert_eq!(code(&out), 2);
    let out = qap(&[
        "check",
        "--bank",
        &p(d, "bank.json"),
        "--key",
        &p(d, "key.json"),
        "--indices",
        "0,0",
    ]);
    assert_eq!(code(&out), 2);
    let out = qap(&[
        "check",
        "--bank",
        &p(d, "bank.json"),
        "--key",
        &p(d, "key.json"),
        "--indices",
        "20",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn attack_and_sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = p(dir.path(), "a.csv");
    let out = qap(&[
        "attack",
        "measure-resend",
        "--n",
        "1",
        "--trials",
        "100000",
        "--seed",
        "1",
        "--out",
        &out_path,
    ]);
    assert_eq!(code(&out), 0);
    let csv = fs::read_to_string(&out_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,strategy,empirical_pass,analytic_pass,std_error,trials,seed"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "1");
    assert_eq!(row[1], "measure-resend");
    let emp: f64 = row[2].parse().unwrap();
    assert!((emp - 0.75).abs() < 0.006, "{emp}");
    assert_eq!(row[3], "0.75");

    let sweep_path = p(dir.path(), "s.csv");
    let out = qap(&[
        "sweep",
        "measure-resend",
        "--n-list",
        "1,2,4,8",
        "--trials",
        "50000",
        "--seed",
        "1",
        "--out",
        &sweep_path,
    ]);
    assert_eq!(code(&out), 0);
    let csv = fs::read_to_string(&sweep_path).unwrap();
    let rows: Vec<Vec<String>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        let n: i32 = r[0].parse().unwrap();
        let analytic: f64 = r[3].parse().unwrap();
        assert_eq!(analytic, 0.75f64.powi(n));
        let emp: f64 = r[2].parse().unwrap();
        let se = (analytic * (1.0 - analytic) / 50_000.0).sqrt();
        assert!((emp - analytic).abs() <= 4.0 * se, "n={n}: {emp}");
    }

    // A one-element sweep is the attack row.
    let one = p(dir.path(), "one.csv");
    qap(&[
        "sweep",
        "measure-resend",
        "--n-list",
        "1",
        "--trials",
        "100000",
        "--seed",
        "1",
        "--out",
        &one,
    ]);
    assert_eq!(fs::read(&one).unwrap(), fs::read(&out_path).unwrap());

    assert_eq!(
        code(&qap(&["attack", "clone", "--n", "1", "--out", &out_path])),
        2
    );
    assert_eq!(
        code(&qap(&[
            "sweep", "guess", "--n-list", "", "--out", &out_path
        ])),
        2
    );
    assert_eq!(
        code(&qap(&[
            "attack", "guess", "--trials", "0", "--n", "1", "--out", &out_path
        ])),
        2
    );
}

#[test]
fn auth_flow() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let (key, bank) = (p(d, "auth.json"), p(d, "signed.json"));
    assert_eq!(
        code(&qap(&["authgen", "--n", "8", "--seed", "5", "--key", &key])),
        0
    );
    let verifier_key = p(d, "verifier.json");
    fs::copy(&key, &verifier_key).unwrap();

    assert_eq!(
        code(&qap(&[
            "authsign", "01101001", "--key", &key, "--bank", &bank
        ])),
        0
    );
    // One message per key.
    assert_eq!(
        code(&qap(&[
            "authsign",
            "01101001",
            "--key",
            &key,
            "--bank",
            &p(d, "again.json")
        ])),
        2
    );

    let out = qap(&["authverify", "--bank", &bank, "--key", &verifier_key]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("01101001\n"));

    let csv = p(d, "flip.csv");
    let out = qap(&[
        "attack",
        "flip",
        "--key",
        &verifier_key,
        "--trials",
        "20000",
        "--seed",
        "2",
        "--out",
        &csv,
    ]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "index,theta0,theta1,empirical_detection,analytic_detection,std_error,trials,seed"
    );
    for line in lines {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        let (theta0, theta1, emp, analytic) = (f[1], f[2], f[3], f[4]);
        assert!((analytic - (1.0 - (theta0 - theta1).cos().powi(2))).abs() < 1e-12);
        let se = (analytic * (1.0 - analytic) / 20_000.0).sqrt();
        assert!((emp - analytic).abs() <= 4.0 * se, "{line}");
    }

    assert_eq!(
        code(&qap(&[
            "attack",
            "guess",
            "--key",
            &verifier_key,
            "--out",
            &csv
        ])),
        2
    );
    assert_eq!(
        code(&qap(&["check", "--bank", &bank, "--key", &verifier_key])),
        2
    );
}
