use std::path::Path;
use std::process::{Command, Output};

use intpoints::store::{parse_table, SweepReport};
use intpoints::sweep::{CensusRow, MomentRow};

fn intpoints(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_intpoints"))
        .args(args)
        .env_remove(intpoints_cli::SHARDS_ENV)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

#[test]
fn invariants_command() {
    let out = intpoints(&["invariants", "--quartic", "1,0,-18,40,-27"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "I=0 J=3456 Delta=-442368\n");
}

#[test]
fn bijection_round_trips() {
    let out = intpoints(&["bijection", "--curve", "0,-2", "--point", "3,5"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "quartic=1,0,-18,40,-27\ncurve=0,-2 point=3,5\n");

    let out = intpoints(&["bijection", "--quartic", "1,0,-18,40,-27"]);
    assert!(out.status.success());
    assert!(stdout(&out).ends_with("curve=0,-2 point=3,5\n"));

    // the same form under Y -> X + Y; f(1, -1) = 1 undoes it
    let out = intpoints(&["bijection", "--quartic=-4,-24,-60,-68,-27", "--rep=1,-1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out), "quartic=1,0,-18,40,-27\ncurve=0,-2 point=3,5\n");

    let out = intpoints(&["bijection", "--quartic=-4,-24,-60,-68,-27"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn fibre_lists_identity_and_reflection() {
    let out = intpoints(&["fibre", "--quartic", "1,0,-18,40,-27", "--box", "50"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("1,0;1;1,0,-18,40,-27\n"));
    assert!(text.contains("-1,0;-1;1,0,-18,-40,-27\n"));
    assert!(text.lines().last().unwrap().starts_with("bound="));
    let refined = stdout(&intpoints(&["fibre", "--quartic", "1,0,-6,0,1", "--box", "20", "--refined"]));
    assert_eq!(refined.lines().count(), 5);
}

#[test]
fn points_command() {
    let out = intpoints(&["points", "--curve", "0,1", "--window", "10"]);
    assert_eq!(stdout(&out), "-1,0\n0,-1\n0,1\n2,-3\n2,3\n");
}

#[test]
fn sweep_emits_32_records_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = intpoints(&[
        "sweep", "--family", "univ", "--height-max", "108", "--window", "100", "--output", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let report = SweepReport::parse(&text).unwrap();
    assert_eq!(report.rows.len(), 32);
    assert_eq!(report.header, "A,B,Delta,H,points,window,classcount,n_smooth,d_selected,tau_n,tau_d");
    assert_eq!(report.render().unwrap(), text);
    let records = report.records().unwrap();
    assert!(records.iter().all(|r| r.window == Some(100) && r.height <= 108));
}

#[test]
fn shard_count_comes_from_environment() {
    let run = |shards: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_intpoints"))
            .args(["sweep", "--height-max", "5000", "--window", "50"])
            .env(intpoints_cli::SHARDS_ENV, shards)
            .output()
            .unwrap();
        assert!(out.status.success());
        SweepReport::parse(&stdout(&out)).unwrap()
    };
    let (a, b) = (run("3"), run("7"));
    assert!(a.config.contains("\"shards\":3") && b.config.contains("\"shards\":7"));
    assert_eq!(a.rows, b.rows);
    let bad = Command::new(env!("CARGO_BIN_EXE_intpoints"))
        .args(["sweep", "--height-max", "100"])
        .env(intpoints_cli::SHARDS_ENV, "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn sweep_cache_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("c");
    let args = ["sweep", "--height-max", "20000", "--window", "100", "--cache", cache.to_str().unwrap()];
    let first = stdout(&intpoints(&args));
    let second = stdout(&intpoints(&args));
    assert_eq!(first, second);
    let mismatched = intpoints(&["sweep", "--height-max", "20000", "--window", "99", "--cache", cache.to_str().unwrap()]);
    assert_eq!(mismatched.status.code(), Some(1));
}

#[test]
fn moments_and_census_reports_parse() {
    let out = intpoints(&["moments", "--heights", "108,1000", "--s", "0,1", "--t", "0,1", "--window", "100"]);
    assert!(out.status.success());
    let table = parse_table(&stdout(&out)).unwrap();
    assert_eq!(table.header, "T,statistic,exponent,count,value");
    let rows: Vec<MomentRow> = table.rows.iter().map(|r| r.parse().unwrap()).collect();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[0].to_string(), "108,points,0,32,1");

    let ranks = fixture("ranks.txt");
    let out = intpoints(&["moments", "--heights", "10000", "--window", "100", "--ranks", &ranks]);
    assert!(stdout(&out).contains("rank-partial"));

    let out = intpoints(&["census", "--height-max", "108", "--moduli", "2,4,3"]);
    assert!(out.status.success());
    let table = parse_table(&stdout(&out)).unwrap();
    let rows: Vec<CensusRow> = table.rows.iter().map(|r| r.parse().unwrap()).collect();
    assert_eq!(rows[0].count, 32);
    assert_eq!(rows[0].total, 32);
}

#[test]
fn ranks_command_checks_class_bound() {
    let out = intpoints(&["ranks", "--table", &fixture("ranks.txt"), "--window", "10000", "--box", "200"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out).lines().count(), 5);
}

#[test]
fn exit_codes() {
    assert_eq!(intpoints(&["invariants", "--quartic", "1,2,3"]).status.code(), Some(1));
    assert_eq!(intpoints(&["bijection", "--curve", "0,-2", "--point", "3,4"]).status.code(), Some(1));
    assert_eq!(intpoints(&["sweep", "--height-max", "100", "--delta", "2/1"]).status.code(), Some(1));
    assert_eq!(intpoints(&["ranks", "--table", "/nonexistent/ranks.txt"]).status.code(), Some(2));
    let dup = fixture("duplicate_ranks.txt");
    assert_eq!(intpoints(&["ranks", "--table", &dup]).status.code(), Some(1));
    // y^2 = x^3 - 28x + 1 has 8 classes at this box, more than 4 * 2^0
    let wrong = fixture("wrong_rank.txt");
    assert_eq!(intpoints(&["ranks", "--table", &wrong, "--window", "10000", "--box", "200"]).status.code(), Some(3));
    assert_eq!(intpoints(&["--help"]).status.code(), Some(0));
}
