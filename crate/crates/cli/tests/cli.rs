use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ssapprox_cli::format::ResultDocument;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ssapprox"));
    c.env_remove("SSAPPROX_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn ssapprox")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Everything except wall time, which is never reproducible.
fn stable(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with("wall_ms=")).collect::<Vec<_>>().join("\n")
}

#[test]
fn solve_small_subset_sum() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "a.txt", "3 10\n3 5 8\n");
    let o = run(&["solve", s(&input), "--epsilon", "0.25", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = ResultDocument::parse(&stdout(&o)).unwrap();
    assert!((6..=12).contains(&doc.value));
    let sum: u64 = doc.witness.iter().map(|&i| [3, 5, 8][i]).sum();
    assert_eq!(sum, doc.value);
}

#[test]
fn solve_partition_finds_five() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "p.txt", "4\n1 2 3 4\n");
    let o = run(&["solve", s(&input), "--mode", "partition", "--epsilon", "1/10", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = ResultDocument::parse(&stdout(&o)).unwrap();
    assert_eq!(doc.value, 5);
}

#[test]
fn fixed_seed_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("u.txt");
    assert!(run(&["gen", "--n", "18", "--max-x", "1000000", "--seed", "4", "--out", s(&input)]).status.success());
    let args = ["solve", s(&input), "--epsilon", "1/16", "--seed", "77"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(stable(&stdout(&a)), stable(&stdout(&b)));
    let env = bin().args(&args[..4]).env("SSAPPROX_SEED", "77").output().unwrap();
    assert_eq!(stable(&stdout(&a)), stable(&stdout(&env)));
}

#[test]
fn gen_is_byte_identical_under_seed() {
    for dist in ["uniform", "planted-perfect", "two-cluster"] {
        let a = run(&["gen", "--n", "15", "--dist", dist, "--seed", "9"]);
        let b = run(&["gen", "--n", "15", "--dist", dist, "--seed", "9"]);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{dist}");
    }
}

#[test]
fn gen_solve_oracle_round_trip() {
    let dir = TempDir::new().unwrap();
    for (k, dist) in ["uniform", "planted-perfect", "two-cluster"].iter().enumerate() {
        for (j, eps) in ["1/4", "1/16", "1/64"].iter().enumerate() {
            let seed = (10 * k + j).to_string();
            let input = dir.path().join(format!("{dist}-{j}.txt"));
            let result = dir.path().join(format!("{dist}-{j}.res"));
            let g = run(&["gen", "--n", "16", "--max-x", "100000", "--dist", dist, "--seed", &seed, "--out", s(&input)]);
            assert!(g.status.success());
            let o = run(&["solve", s(&input), "--epsilon", eps, "--seed", &seed, "--out", s(&result)]);
            assert!(matches!(o.status.code(), Some(0 | 2)), "{}", String::from_utf8_lossy(&o.stderr));
            let v = run(&["oracle", s(&input), "--check", s(&result)]);
            assert!(v.status.success(), "{dist} {eps}: {}", stdout(&v));
            assert!(stdout(&v).contains("verdict=pass"));
        }
    }
}

#[test]
fn tampered_witness_fails_the_oracle() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "a.txt", "5 20\n3 5 8 9 11\n");
    let result = dir.path().join("a.res");
    assert!(run(&["solve", s(&input), "-e", "1/8", "--out", s(&result)]).status.success());
    let text = std::fs::read_to_string(&result).unwrap();
    let mut doc = ResultDocument::parse(&text).unwrap();
    assert!(doc.witness.len() >= 2);
    doc.witness.pop();
    std::fs::write(&result, doc.to_text()).unwrap();
    let v = run(&["oracle", s(&input), "--check", s(&result)]);
    assert!(!v.status.success());
    let out = stdout(&v);
    assert!(out.contains("arithmetic mismatch") && out.contains("verdict=fail"), "{out}");
}

#[test]
fn oracle_reports_opt() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "a.txt", "3 10\n3 5 8\n");
    let o = run(&["oracle", s(&input)]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "opt=8");
}

#[test]
fn malformed_input_exits_one_and_names_the_line() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "bad.txt", "3 10\n3 five 8\n");
    let o = run(&["solve", s(&input), "--epsilon", "0.25"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let o = run(&["solve", s(&input), "--epsilon", "1.5"]);
    assert_eq!(o.status.code(), Some(1));
    let missing = write(&dir, "p.txt", "2\n1 1\n");
    let o = run(&["solve", s(&missing), "--mode", "subset-sum", "--epsilon", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn selftest_passes_and_corrupted_density_fails() {
    let o = run(&["selftest"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let o = run(&["selftest", "--density-c", "0"]);
    assert!(!o.status.success());
    let out = stdout(&o);
    let density = out.lines().find(|l| l.starts_with("density")).unwrap();
    assert!(density.ends_with("FAIL"), "{out}");
}

#[test]
fn bench_emits_doubling_ratios() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("bench.tsv");
    let o = run(&["bench", "--eps-sweep", "4,8,16", "--n-sweep", "10,20", "--repeats", "1", "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(&out).unwrap();
    assert!(table.lines().next().unwrap().contains("doubling_ratio"));
    assert_eq!(table.lines().count(), 1 + 3 + 2);
}
