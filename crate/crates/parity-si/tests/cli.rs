//! End-to-end tests of the solver binary: exit codes, file formats, and the
//! benchmark harness.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_parity-si")
}

struct TempDir(PathBuf);

impl TempDir {
    fn new(tag: &str) -> Self {
        let path = std::env::temp_dir().join(format!(
            "parity-si-test-{tag}-{}-{:x}",
            std::process::id(),
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_nanos())
        ));
        std::fs::create_dir_all(&path).unwrap();
        TempDir(path)
    }

    fn file(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn run(args: &[&str]) -> Output {
    Command::new(binary()).args(args).output().expect("binary runs")
}

fn write(path: &Path, content: &str) {
    std::fs::write(path, content).unwrap();
}

const G2: &str = "parity 2;\n0 2 0 1;\n1 1 1 0,2;\n2 4 0 1;\n";

#[test]
fn solve_writes_solution_and_stats() {
    let dir = TempDir::new("solve");
    let game = dir.file("g2.gm");
    let sol = dir.file("g2.sol");
    let stats = dir.file("g2.stats");
    write(&game, G2);
    let out = run(&[
        "solve",
        "--input",
        game.to_str().unwrap(),
        "--solution",
        sol.to_str().unwrap(),
        "--stats",
        stats.to_str().unwrap(),
        "--br",
        "si",
        "--val",
        "seq",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        std::fs::read_to_string(&sol).unwrap(),
        "paritysol 2;\n0 0 1;\n1 0;\n2 0 1;\n"
    );
    let record = parity_si::cli::parse_stats_record(&std::fs::read_to_string(&stats).unwrap());
    assert_eq!(record["vertices"], "3");
    assert_eq!(record["edges"], "4");
    assert_eq!(record["priorities"], "3");
    assert_eq!(record["major_iterations"], "2");
    assert_eq!(record["br_method"], "si");
    assert_eq!(record["val_backend"], "seq");
    for key in ["br_iterations", "time_total_ms", "time_valuation_ms", "threads", "seed"] {
        assert!(record.contains_key(key), "stats record lacks {key}");
    }
}

#[test]
fn solve_rejects_malformed_input() {
    let dir = TempDir::new("badinput");
    let game = dir.file("bad.gm");
    let sol = dir.file("bad.sol");
    write(&game, "parity 1;\n0 2 0 ;\n1 1 1 0;\n");
    let out = run(&["solve", "--input", game.to_str().unwrap(), "--solution", sol.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!sol.exists(), "no solution may be emitted on a parse error");
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty successor list"));
}

#[test]
fn solve_methods_agree_on_winners() {
    let dir = TempDir::new("methods");
    let game = dir.file("g2.gm");
    write(&game, G2);
    let mut solutions = Vec::new();
    let mut br_iters = Vec::new();
    for br in ["si", "bellman-ford"] {
        let sol = dir.file(&format!("{br}.sol"));
        let stats = dir.file(&format!("{br}.stats"));
        let out = run(&[
            "solve",
            "--input",
            game.to_str().unwrap(),
            "--br",
            br,
            "--val",
            "seq",
            "--solution",
            sol.to_str().unwrap(),
            "--stats",
            stats.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        solutions.push(std::fs::read_to_string(&sol).unwrap());
        let record =
            parity_si::cli::parse_stats_record(&std::fs::read_to_string(&stats).unwrap());
        br_iters.push(record["br_iterations"].clone());
    }
    assert_eq!(solutions[0], solutions[1], "winning sets must agree across methods");
    assert_ne!(br_iters[0], br_iters[1], "methods count different inner iterations here");
}

#[test]
fn verify_accepts_and_rejects() {
    let dir = TempDir::new("verify");
    let game = dir.file("g2.gm");
    let good = dir.file("good.sol");
    let bad = dir.file("bad.sol");
    write(&game, G2);
    write(&good, "paritysol 2;\n0 0 1;\n1 0;\n2 0 1;\n");
    write(&bad, "paritysol 2;\n0 1;\n1 1 0;\n2 1;\n");
    let out = run(&["verify", game.to_str().unwrap(), good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("ok"));
    let out = run(&["verify", game.to_str().unwrap(), bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("counterexample"), "{text}");
    assert!(text.contains("cycle"), "{text}");
    let out = run(&["verify", game.to_str().unwrap(), dir.file("missing.sol").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gen_is_deterministic_and_reparses() {
    let dir = TempDir::new("gen");
    let a = dir.file("a.gm");
    let b = dir.file("b.gm");
    for path in [&a, &b] {
        let out = run(&[
            "gen",
            "--n",
            "40",
            "--max-pri",
            "5",
            "--min-deg",
            "1",
            "--max-deg",
            "4",
            "--seed",
            "7",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let ta = std::fs::read_to_string(&a).unwrap();
    let tb = std::fs::read_to_string(&b).unwrap();
    assert_eq!(ta, tb, "same spec must produce byte-identical files");
    let g = parity_si::game::parse_pgsolver(&ta).unwrap();
    assert_eq!(g.vertex_count(), 40);
}

#[test]
fn gen_rejects_infeasible_degrees() {
    let dir = TempDir::new("genbad");
    let out = run(&[
        "gen",
        "--n",
        "3",
        "--max-pri",
        "2",
        "--min-deg",
        "4",
        "--max-deg",
        "5",
        "--out",
        dir.file("x.gm").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bench_reports_all_cells() {
    let dir = TempDir::new("bench");
    let corpus = dir.file("corpus");
    std::fs::create_dir_all(&corpus).unwrap();
    write(&corpus.join("g2.gm"), G2);
    let gen = run(&[
        "gen",
        "--n",
        "60",
        "--max-pri",
        "4",
        "--max-deg",
        "3",
        "--seed",
        "5",
        "--out",
        corpus.join("r.gm").to_str().unwrap(),
    ]);
    assert_eq!(gen.status.code(), Some(0));
    let out = run(&[
        "bench",
        "--corpus",
        corpus.to_str().unwrap(),
        "--configs",
        "si:seq,si-reset:seq,bellman-ford:listrank",
        "--reps",
        "2",
        "--timeout",
        "60s",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.contains("g2.gm"), "{table}");
    assert!(table.contains("r.gm"), "{table}");
    assert!(table.contains("si/seq"), "{table}");
    assert!(table.contains("bellman-ford/listrank"), "{table}");
    assert!(!table.contains("error"), "{table}");
    assert!(!table.contains("timeout"), "{table}");
}

#[test]
fn bench_marks_timeouts_and_continues() {
    let dir = TempDir::new("benchtimeout");
    let corpus = dir.file("corpus");
    std::fs::create_dir_all(&corpus).unwrap();
    let gen = run(&[
        "gen",
        "--n",
        "50000",
        "--max-pri",
        "6",
        "--max-deg",
        "4",
        "--seed",
        "1",
        "--out",
        corpus.join("big.gm").to_str().unwrap(),
    ]);
    assert_eq!(gen.status.code(), Some(0));
    let out = run(&[
        "bench",
        "--corpus",
        corpus.to_str().unwrap(),
        "--configs",
        "si:seq",
        "--reps",
        "1",
        "--timeout",
        "1ms",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.contains("timeout"), "{table}");
}

#[test]
fn usage_errors_exit_with_input_code() {
    let out = run(&["solve"]); // --input is required
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}
