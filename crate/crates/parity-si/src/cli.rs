//! Command-line front end: solving, verification, random game generation,
//! and a benchmark harness that runs instances through the solver binary and
//! assembles the reported statistics into a table.
//!
//! Exit codes are stable: 0 ok, 1 input error, 2 internal invariant
//! violation, 3 verification failure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::game::{
    augment_with_sink, parse_pgsolver, parse_solution_text, preprocess_admissible, ParityGame,
};
use crate::oracle::{gen_random_game, verify_solution, GeneratorSpec};
use crate::si_engine::{solve, BrMethod, SolveConfig, Solution, ValBackend};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "parity-si", version, about = "Parity game solver based on strategy improvement")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a game and write the winning partition with strategies.
    Solve(SolveArgs),
    /// Check a solution file against a game.
    Verify(VerifyArgs),
    /// Benchmark solver configurations over a directory of games.
    Bench(BenchArgs),
    /// Generate a random game.
    Gen(GenArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum BrArg {
    Si,
    SiReset,
    BellmanFord,
}

impl From<BrArg> for BrMethod {
    fn from(a: BrArg) -> BrMethod {
        match a {
            BrArg::Si => BrMethod::Si,
            BrArg::SiReset => BrMethod::SiReset,
            BrArg::BellmanFord => BrMethod::BellmanFord,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ValArg {
    Seq,
    Listrank,
}

impl From<ValArg> for ValBackend {
    fn from(a: ValArg) -> ValBackend {
        match a {
            ValArg::Seq => ValBackend::Seq,
            ValArg::Listrank => ValBackend::ListRank,
        }
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Game file in PGSolver format.
    #[arg(long)]
    input: PathBuf,
    /// Best response method.
    #[arg(long, value_enum, default_value = "si")]
    br: BrArg,
    /// Valuation backend.
    #[arg(long, value_enum, default_value = "listrank")]
    val: ValArg,
    /// Worker threads for the valuation backend; defaults to logical cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Seed for the splitter selection of the list-ranking backend.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the solution here (omitted: no solution file).
    #[arg(long)]
    solution: Option<PathBuf>,
    /// Write the stats record here (omitted: print to stdout).
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Game file in PGSolver format.
    game: PathBuf,
    /// Solution file.
    solution: PathBuf,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Directory of game files.
    #[arg(long)]
    corpus: PathBuf,
    /// Comma-separated `br:val` configurations, e.g. `si:listrank,bellman-ford:seq`.
    #[arg(long, default_value = "si:seq,si-reset:seq,bellman-ford:seq")]
    configs: String,
    /// Repetitions per instance; reported times are their mean.
    #[arg(long, default_value_t = 3)]
    reps: usize,
    /// Per-run time limit, e.g. `600s` or `10m`.
    #[arg(long, default_value = "600s")]
    timeout: String,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long = "max-pri")]
    max_pri: u32,
    #[arg(long = "min-deg", default_value_t = 1)]
    min_deg: usize,
    #[arg(long = "max-deg")]
    max_deg: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

/// Entry point used by `main`; parses `std::env::args`.
pub fn run() -> i32 {
    run_with_args(std::env::args_os())
}

/// Entry point for tests: parse an explicit argument list.
pub fn run_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Solve(args) => cmd_solve(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::Gen(args) => cmd_gen(&args),
    }
}

fn read_game(path: &Path) -> Result<ParityGame, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_pgsolver(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_solve(args: &SolveArgs) -> i32 {
    let game = match read_game(&args.input) {
        Ok(g) => g,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_INPUT;
        }
    };
    let vertices = game.vertex_count();
    let edges = game.edge_count();
    let priorities = game.domain().len();
    let prep_started = Instant::now();
    let (prepared, inserted) = preprocess_admissible(augment_with_sink(game));
    let prep_time = prep_started.elapsed();

    let cfg = SolveConfig {
        br_method: args.br.into(),
        val_backend: args.val.into(),
        threads: args
            .threads
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get())),
        seed: args.seed,
        ..SolveConfig::default()
    };
    let solution = match solve(&prepared, &cfg) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: solver invariant violated: {e}");
            return EXIT_INTERNAL;
        }
    };

    if let Some(path) = &args.solution {
        if let Err(e) = std::fs::write(path, solution.to_text()) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return EXIT_INPUT;
        }
    }
    let record = stats_record(vertices, edges, priorities, inserted, prep_time, &cfg, &solution);
    match &args.stats {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &record) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_INPUT;
            }
        }
        None => {
            print!("{record}");
            let _ = std::io::stdout().flush();
        }
    }
    eprintln!(
        "solved: {} vertices, |W_even| = {}, {} major iterations, {:.3} ms",
        vertices,
        solution.w_even().count(),
        solution.stats.major_iterations,
        solution.stats.total_time.as_secs_f64() * 1e3,
    );
    EXIT_OK
}

fn stats_record(
    vertices: usize,
    edges: usize,
    priorities: usize,
    inserted: usize,
    prep_time: Duration,
    cfg: &SolveConfig,
    solution: &Solution,
) -> String {
    let s = &solution.stats;
    let mut out = String::new();
    let _ = writeln!(out, "vertices={vertices}");
    let _ = writeln!(out, "edges={edges}");
    let _ = writeln!(out, "priorities={priorities}");
    let _ = writeln!(out, "inserted_vertices={inserted}");
    let _ = writeln!(out, "major_iterations={}", s.major_iterations);
    let _ = writeln!(out, "br_iterations={}", s.br_iterations);
    let _ = writeln!(out, "time_total_ms={:.3}", s.total_time.as_secs_f64() * 1e3);
    let _ = writeln!(out, "time_valuation_ms={:.3}", s.valuation_time.as_secs_f64() * 1e3);
    let _ = writeln!(out, "time_preprocess_ms={:.3}", prep_time.as_secs_f64() * 1e3);
    let _ = writeln!(out, "br_method={}", cfg.br_method.as_str());
    let _ = writeln!(out, "val_backend={}", cfg.val_backend.as_str());
    let _ = writeln!(out, "threads={}", cfg.threads);
    let _ = writeln!(out, "seed={}", cfg.seed);
    out
}

/// Parse a `key=value` stats record.
pub fn parse_stats_record(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .filter_map(|line| line.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

fn cmd_verify(args: &VerifyArgs) -> i32 {
    let game = match read_game(&args.game) {
        Ok(g) => g,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_INPUT;
        }
    };
    let text = match std::fs::read_to_string(&args.solution) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.solution.display());
            return EXIT_INPUT;
        }
    };
    let (winner, strategy) = match parse_solution_text(&text) {
        Ok(parts) => parts,
        Err(e) => {
            eprintln!("error: {}: {e}", args.solution.display());
            return EXIT_INPUT;
        }
    };
    if winner.len() != game.vertex_count() {
        eprintln!(
            "error: solution covers {} vertices, game has {}",
            winner.len(),
            game.vertex_count()
        );
        return EXIT_INPUT;
    }
    match verify_solution(&game, &winner, &strategy) {
        Ok(()) => {
            println!("ok");
            EXIT_OK
        }
        Err(cex) => {
            println!("counterexample: {cex}");
            EXIT_VERIFY
        }
    }
}

fn cmd_gen(args: &GenArgs) -> i32 {
    let spec = GeneratorSpec {
        n: args.n,
        max_priority: args.max_pri,
        min_degree: args.min_deg,
        max_degree: args.max_deg,
        seed: args.seed,
    };
    let game = match gen_random_game(&spec) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    if let Err(e) = std::fs::write(&args.out, game.to_pgsolver()) {
        eprintln!("error: cannot write {}: {e}", args.out.display());
        return EXIT_INPUT;
    }
    EXIT_OK
}

// ---------------------------------------------------------------------------
// Benchmark harness
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchConfig {
    pub br: BrMethod,
    pub val: ValBackend,
}

impl BenchConfig {
    pub fn label(&self) -> String {
        format!("{}/{}", self.br.as_str(), self.val.as_str())
    }
}

#[derive(Debug, Clone)]
pub enum BenchOutcome {
    Ok {
        /// Mean solve time over the repetitions, parse time excluded.
        time_ms: f64,
        major_iterations: u64,
        br_iterations: u64,
    },
    Timeout,
    Error(String),
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub game: String,
    pub vertices: u64,
    pub edges: u64,
    pub outcomes: Vec<BenchOutcome>,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub configs: Vec<BenchConfig>,
    pub rows: Vec<BenchRow>,
}

fn parse_configs(text: &str) -> Result<Vec<BenchConfig>, String> {
    let mut configs = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (br, val) = part
            .split_once(':')
            .ok_or_else(|| format!("config '{part}' is not of the form br:val"))?;
        let br = match br {
            "si" => BrMethod::Si,
            "si-reset" => BrMethod::SiReset,
            "bellman-ford" => BrMethod::BellmanFord,
            other => return Err(format!("unknown best-response method '{other}'")),
        };
        let val = match val {
            "seq" => ValBackend::Seq,
            "listrank" => ValBackend::ListRank,
            other => return Err(format!("unknown valuation backend '{other}'")),
        };
        configs.push(BenchConfig { br, val });
    }
    if configs.is_empty() {
        return Err("no configurations given".to_string());
    }
    Ok(configs)
}

fn parse_timeout(text: &str) -> Result<Duration, String> {
    let text = text.trim();
    let (value, unit) = match text.char_indices().find(|(_, c)| !c.is_ascii_digit()) {
        Some((i, _)) => text.split_at(i),
        None => (text, "s"),
    };
    let value: u64 = value.parse().map_err(|_| format!("bad timeout '{text}'"))?;
    match unit {
        "s" | "" => Ok(Duration::from_secs(value)),
        "m" => Ok(Duration::from_secs(value * 60)),
        "ms" => Ok(Duration::from_millis(value)),
        other => Err(format!("unknown timeout unit '{other}'")),
    }
}

fn cmd_bench(args: &BenchArgs) -> i32 {
    let configs = match parse_configs(&args.configs) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_INPUT;
        }
    };
    let timeout = match parse_timeout(&args.timeout) {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_INPUT;
        }
    };
    let mut entries: Vec<PathBuf> = match std::fs::read_dir(&args.corpus) {
        Ok(dir) => dir.filter_map(|e| e.ok()).map(|e| e.path()).filter(|p| p.is_file()).collect(),
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.corpus.display());
            return EXIT_INPUT;
        }
    };
    entries.sort();
    if entries.is_empty() {
        eprintln!("error: corpus {} has no files", args.corpus.display());
        return EXIT_INPUT;
    }
    match run_bench(&entries, &configs, args.reps.max(1), timeout, args.threads, args.seed) {
        Ok(report) => {
            print!("{}", render_report(&report));
            EXIT_OK
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_INPUT
        }
    }
}

/// Run every (game, config) cell `reps` times through the solver binary,
/// collect the reported statistics, and average the times. Iteration counts
/// must be identical across repetitions (the solver is deterministic for a
/// fixed seed); a mismatch is recorded as an instance error. Instances run
/// sequentially so timings do not disturb each other.
pub fn run_bench(
    games: &[PathBuf],
    configs: &[BenchConfig],
    reps: usize,
    timeout: Duration,
    threads: Option<usize>,
    seed: u64,
) -> Result<BenchReport, String> {
    let exe = std::env::current_exe().map_err(|e| format!("cannot find own binary: {e}"))?;
    let mut rows = Vec::new();
    for game in games {
        let name = game
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| game.display().to_string());
        let mut row = BenchRow { game: name, vertices: 0, edges: 0, outcomes: Vec::new() };
        for config in configs {
            let outcome = bench_cell(&exe, game, config, reps, timeout, threads, seed, &mut row);
            row.outcomes.push(outcome);
        }
        rows.push(row);
    }
    Ok(BenchReport { configs: configs.to_vec(), rows })
}

#[allow(clippy::too_many_arguments)]
fn bench_cell(
    exe: &Path,
    game: &Path,
    config: &BenchConfig,
    reps: usize,
    timeout: Duration,
    threads: Option<usize>,
    seed: u64,
    row: &mut BenchRow,
) -> BenchOutcome {
    let mut times = Vec::new();
    let mut iterations: Option<(u64, u64)> = None;
    for rep in 0..reps {
        let stats_path = std::env::temp_dir().join(format!(
            "parity-si-bench-{}-{rep}-{:x}",
            std::process::id(),
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_nanos())
        ));
        let mut cmd = std::process::Command::new(exe);
        cmd.arg("solve")
            .arg("--input")
            .arg(game)
            .arg("--br")
            .arg(config.br.as_str())
            .arg("--val")
            .arg(config.val.as_str())
            .arg("--seed")
            .arg(seed.to_string())
            .arg("--stats")
            .arg(&stats_path)
            .stdout(std::process::Stdio::null())
            .stderr(std::process::Stdio::piped());
        if let Some(t) = threads {
            cmd.arg("--threads").arg(t.to_string());
        }
        let mut child = match cmd.spawn() {
            Ok(c) => c,
            Err(e) => return BenchOutcome::Error(format!("spawn failed: {e}")),
        };
        let started = Instant::now();
        let status = loop {
            match child.try_wait() {
                Ok(Some(status)) => break Some(status),
                Ok(None) => {
                    if started.elapsed() > timeout {
                        let _ = child.kill();
                        let _ = child.wait();
                        break None;
                    }
                    std::thread::sleep(Duration::from_millis(10));
                }
                Err(e) => return BenchOutcome::Error(format!("wait failed: {e}")),
            }
        };
        let Some(status) = status else {
            let _ = std::fs::remove_file(&stats_path);
            return BenchOutcome::Timeout;
        };
        if !status.success() {
            let mut err = String::new();
            if let Some(mut stderr) = child.stderr.take() {
                use std::io::Read;
                let _ = stderr.read_to_string(&mut err);
            }
            let _ = std::fs::remove_file(&stats_path);
            return BenchOutcome::Error(format!("exit {status}: {}", err.trim()));
        }
        let record = match std::fs::read_to_string(&stats_path) {
            Ok(r) => r,
            Err(e) => return BenchOutcome::Error(format!("no stats record: {e}")),
        };
        let _ = std::fs::remove_file(&stats_path);
        let stats = parse_stats_record(&record);
        let get = |key: &str| -> Option<f64> { stats.get(key).and_then(|v| v.parse::<f64>().ok()) };
        let (Some(time), Some(major), Some(br)) =
            (get("time_total_ms"), get("major_iterations"), get("br_iterations"))
        else {
            return BenchOutcome::Error("stats record incomplete".to_string());
        };
        row.vertices = stats.get("vertices").and_then(|v| v.parse().ok()).unwrap_or(row.vertices);
        row.edges = stats.get("edges").and_then(|v| v.parse().ok()).unwrap_or(row.edges);
        let counts = (major as u64, br as u64);
        match iterations {
            None => iterations = Some(counts),
            Some(prev) if prev != counts => {
                return BenchOutcome::Error(format!(
                    "iteration counts differ across repetitions: {prev:?} vs {counts:?}"
                ));
            }
            Some(_) => {}
        }
        times.push(time);
    }
    let (major, br) = iterations.unwrap_or((0, 0));
    BenchOutcome::Ok {
        time_ms: times.iter().sum::<f64>() / times.len() as f64,
        major_iterations: major,
        br_iterations: br,
    }
}

/// Render the report as a fixed-width table: one row per game, a time and an
/// iteration column per configuration.
pub fn render_report(report: &BenchReport) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:<24} {:>10} {:>10} {:>6}", "game", "vertices", "edges", "maj");
    for config in &report.configs {
        let label = config.label();
        let _ = write!(out, " {:>20} {:>10}", format!("{label} t(ms)"), "iter");
    }
    out.push('\n');
    for row in &report.rows {
        let major = row
            .outcomes
            .iter()
            .find_map(|o| match o {
                BenchOutcome::Ok { major_iterations, .. } => Some(major_iterations.to_string()),
                _ => None,
            })
            .unwrap_or_else(|| "-".to_string());
        let _ = write!(out, "{:<24} {:>10} {:>10} {:>6}", row.game, row.vertices, row.edges, major);
        for outcome in &row.outcomes {
            match outcome {
                BenchOutcome::Ok { time_ms, br_iterations, .. } => {
                    let _ = write!(out, " {:>20.2} {:>10}", time_ms, br_iterations);
                }
                BenchOutcome::Timeout => {
                    let _ = write!(out, " {:>20} {:>10}", "timeout", "-");
                }
                BenchOutcome::Error(_) => {
                    let _ = write!(out, " {:>20} {:>10}", "error", "-");
                }
            }
        }
        out.push('\n');
        for (config, outcome) in report.configs.iter().zip(&row.outcomes) {
            if let BenchOutcome::Error(msg) = outcome {
                let _ = writeln!(out, "  [{}] {}: {}", row.game, config.label(), msg);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn configs_parse_all_arms() {
        let configs = parse_configs("si:seq,si-reset:listrank, bellman-ford:seq").unwrap();
        assert_eq!(configs.len(), 3);
        assert_eq!(configs[0], BenchConfig { br: BrMethod::Si, val: ValBackend::Seq });
        assert_eq!(configs[1], BenchConfig { br: BrMethod::SiReset, val: ValBackend::ListRank });
        assert!(parse_configs("nope:seq").is_err());
        assert!(parse_configs("").is_err());
    }

    #[test]
    fn timeouts_parse_units() {
        assert_eq!(parse_timeout("600s").unwrap(), Duration::from_secs(600));
        assert_eq!(parse_timeout("10m").unwrap(), Duration::from_secs(600));
        assert_eq!(parse_timeout("250ms").unwrap(), Duration::from_millis(250));
        assert_eq!(parse_timeout("42").unwrap(), Duration::from_secs(42));
        assert!(parse_timeout("ten").is_err());
    }

    #[test]
    fn stats_record_parses_back() {
        let record = "vertices=3\nedges=4\ntime_total_ms=1.250\nbr_method=si\n";
        let map = parse_stats_record(record);
        assert_eq!(map["vertices"], "3");
        assert_eq!(map["time_total_ms"], "1.250");
        assert_eq!(map["br_method"], "si");
    }
}
