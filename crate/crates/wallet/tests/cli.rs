use std::path::Path;
use std::process::{Command, Output};

use zkbid_core::face::FEATURE_DIM;

fn zkbid(home: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zkbid"))
        .env("ZKBID_HOME", home)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn write_vec(path: &Path, v: &[f64]) {
    let json = serde_json::json!({"encoding": "float", "values": v});
    std::fs::write(path, json.to_string()).unwrap();
}

#[test]
fn command_line_flow_and_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let home = tmp.path().join("home");
    let p = |n: &str| tmp.path().join(n);

    let live: Vec<f64> = (0..FEATURE_DIM).map(|i| ((i * 37 % 101) as f64 - 50.0) / 50.0).collect();
    let card: Vec<f64> = live.iter().enumerate().map(|(i, x)| x + if i % 2 == 0 { 0.005 } else { -0.005 }).collect();
    let mut other = vec![0.0; FEATURE_DIM];
    for (i, o) in other.iter_mut().enumerate() {
        *o = if i % 2 == 0 { live[i + 1] } else { -live[i - 1] };
    }
    write_vec(&p("live.json"), &live);
    write_vec(&p("card.json"), &card);
    write_vec(&p("other.json"), &other);

    let o = zkbid(&home, &["status"]);
    assert_eq!(code(&o), 7, "{}", String::from_utf8_lossy(&o.stderr));

    let o = zkbid(&home, &["setup", "--seed", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&zkbid(&home, &["setup", "--seed", "1"])), 6);

    let o = zkbid(&home, &["status", "--json"]);
    let s: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(s["seed_accounts"], 0);

    assert_eq!(code(&zkbid(&home, &["register"])), 6);

    let (l, c, x) = (p("live.json"), p("card.json"), p("other.json"));
    let (l, c, x) = (l.to_str().unwrap(), c.to_str().unwrap(), x.to_str().unwrap());
    let o = zkbid(&home, &["enroll", "--id", "CLI-1", "--live", l, "--card", x]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!home.join("wallet/seed.json").exists());

    let o = zkbid(&home, &["enroll", "--id", "CLI-1", "--live", l, "--card", c]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    let seed_file = std::fs::read_to_string(home.join("wallet/seed.json")).unwrap();
    let sk: serde_json::Value = serde_json::from_str(&seed_file).unwrap();
    assert!(!stdout.contains(sk["account"]["sk"].as_str().unwrap()));

    assert_eq!(code(&zkbid(&home, &["register"])), 0);
    let o = zkbid(&home, &["register"]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stdout).contains("DuplicateIdentity"));

    assert_eq!(code(&zkbid(&home, &["certify"])), 5);
    let o = zkbid(&home, &["certify", "--ring-size", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&zkbid(&home, &["certify", "--ring-size", "1"])), 4);

    let o = zkbid(&home, &["status", "--json"]);
    let s: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((s["seed_accounts"].as_u64(), s["soul_accounts"].as_u64(), s["key_images"].as_u64()), (Some(1), Some(1), Some(1)));
    assert_eq!(s["height"], 4);

    assert_eq!(code(&zkbid(&home, &["bogus"])), 2);
}

#[test]
fn sweep_writes_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sweep.csv");
    let o = zkbid(tmp.path(), &["sweep", "--subjects", "20", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(out).unwrap();
    assert!(csv.starts_with("threshold,accuracy\n"));
    assert_eq!(csv.lines().count(), 102);
}
