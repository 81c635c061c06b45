use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const E1: &str = "avauction-instance v1
capacity 5
requested_seats 3
service splittable
bidder A available 5 prices 1:0.40 2:0.70 3:0.90 4:1.05 5:1.15
bidder B available 3 prices 1:0.30 2:0.55 3:0.78
";

fn avauction(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_avauction"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn solve_prints_winners() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "e1.txt", E1);
    let out = avauction(&["solve", &file]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "winner B size 3 total 0.780000\n");

    let out = avauction(&["solve", &file, "--service", "private"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "winner A size 5 total 1.150000\n");
}

const E2: &str = "avauction-instance v1
capacity 5
requested_seats 4
service splittable
bidder A available 5 prices 1:0.20 2:0.38 3:0.80 4:1.20 5:1.50
bidder B available 3 prices 1:0.22 2:0.40 3:0.85
bidder C available 5 prices 1:0.30 2:0.60 3:0.95 4:1.30 5:1.60
";

#[test]
fn e2_two_winners() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "e2.txt", E2);
    let out = avauction(&["solve", &file]);
    assert_eq!(
        stdout(&out),
        "winner A size 2 winner B size 2 total 0.780000\n"
    );
    let text = stdout(&avauction(&["charge", &file]));
    assert!(
        text.contains("charge A pivotal 1.000000 charge 0.600000\n"),
        "{text}"
    );
    assert!(text.contains("charge B pivotal "), "{text}");
    assert!(
        text.contains(" charge 0.600000\ncharge C pivotal 0.780000 charge 0.000000\n"),
        "{text}"
    );
    assert!(text.ends_with("total 1.200000\nfallback false\n"), "{text}");
}

#[test]
fn charge_reports_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "e1.txt", E1);
    let out = avauction(&["charge", &file]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(
        text.contains("charge B pivotal 0.900000 charge 0.900000\n"),
        "{text}"
    );
    assert!(text.ends_with("total 0.900000\nfallback false\n"), "{text}");

    let out = avauction(&["charge", &file, "--service", "private", "--concurrent"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(
        text.contains("charge A pivotal infeasible charge 1.150000\n"),
        "{text}"
    );
    assert!(text.ends_with("total 1.150000\nfallback true\n"), "{text}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let unservable = write(
        dir.path(),
        "u.txt",
        &E1.replace("requested_seats 3", "requested_seats 5")
            .replace("service splittable", "service nonsplittable")
            .replace(
                "bidder A available 5 prices 1:0.40 2:0.70 3:0.90 4:1.05 5:1.15\n",
                "",
            ),
    );
    let out = avauction(&["solve", &unservable]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout(&out), "unservable\n");
    assert_eq!(avauction(&["charge", &unservable]).status.code(), Some(2));

    let garbled = write(
        dir.path(),
        "g.txt",
        &E1.replace("prices 1:0.30", "prices 1;0.30"),
    );
    assert_eq!(avauction(&["solve", &garbled]).status.code(), Some(64));

    let invalid = write(dir.path(), "v.txt", &E1.replace("2:0.55", "2:0.25"));
    let out = avauction(&["solve", &invalid]);
    assert_eq!(out.status.code(), Some(65));
    assert!(!out.stderr.is_empty());
}

#[test]
fn generated_files_solve() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let out = avauction(&[
        "gen", "--k", "4", "--cases", "2", "--seed", "9", "--out", out_dir,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let files: Vec<String> = stdout(&out).lines().map(str::to_string).collect();
    assert_eq!(files.len(), 2);
    let text = fs::read_to_string(&files[0]).unwrap();
    assert!(text.contains("provenance seed=9 law=large"), "{text}");
    assert_eq!(avauction(&["solve", &files[0]]).status.code(), Some(0));
}

#[test]
fn study_tables_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, parallel) in [(&a, "on"), (&b, "off")] {
        let out = avauction(&[
            "study",
            "all",
            "--k",
            "1,3,8",
            "--cases",
            "12",
            "--seed",
            "5",
            "--parallel",
            parallel,
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    for name in [
        "servability.csv",
        "charges.csv",
        "truthfulness_winners.csv",
        "truthfulness_runs.csv",
        "asymptoticity.csv",
    ] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
    let timing = fs::read_to_string(a.path().join("timing.csv")).unwrap();
    assert!(timing.starts_with("k,service,mode,runs,mean_micros\n"));
}

#[test]
fn empty_vehicle_law() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = avauction(&[
        "study",
        "servability",
        "--k",
        "5",
        "--cases",
        "40",
        "--empty-vehicle",
        "1",
        "--out",
        d,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("servability.csv")).unwrap();
    // every vehicle is empty, so nothing is unservable
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",40,0")), "{csv}");

    let out = avauction(&["study", "servability", "--empty-vehicle", "1.5", "--out", d]);
    assert_eq!(out.status.code(), Some(65));
}
