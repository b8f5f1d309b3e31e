//! `ntacert` — search for satisfiability certificates of nonlinear real
//! formulas, validate such certificates with the independent checker, and
//! benchmark search configurations over a directory of problems.
//!
//! Exit codes: `solve` returns 0 on `sat` and 1 on `unknown`; `check`
//! returns 0 on `valid`, 1 on `invalid`, and 3 on `undetermined`; every
//! subcommand returns 2 on usage or input errors.

use clap::{Args, Parser, Subcommand, ValueEnum};
use ntacert_certificate::{
    check_certificate, deserialize_certificate, serialize_certificate, CheckReport, Outcome,
    Verdict,
};
use ntacert_formula::{parse_formula, Formula};
use ntacert_solver::{solve, BoxStrategy, SearchConfig, SearchOutcome, SolveResult};
use ntacert_topdeg::DEFAULT_FACE_BUDGET;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

#[derive(Parser)]
#[command(
    name = "ntacert",
    version,
    about = "A certifying satisfiability engine for nonlinear real arithmetic \
             with sin, cos, tan and exp"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a satisfiability certificate of an SMT-LIB formula.
    ///
    /// Prints `sat` and writes the certificate next to the input (or to
    /// --out) on success, `unknown` otherwise. Exit code 0 means sat,
    /// 1 unknown, 2 error.
    Solve(SolveArgs),
    /// Validate a certificate against a formula, printing one line per
    /// checked condition.
    ///
    /// Exit code 0 means valid, 1 invalid, 3 undetermined (budget ran out
    /// before any condition failed), 2 error.
    Check(CheckArgs),
    /// Solve every .smt2 file in a directory under one or more
    /// configurations, re-validating every sat answer.
    ///
    /// Emits a tab-separated record per (configuration, file) pair followed
    /// by solved counts and the check-to-solve time ratio, and writes the
    /// same summary as JSON. A certificate that fails re-validation aborts
    /// the whole run with exit code 2.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BoxesArg {
    /// Grow boxes around the candidate point until the degree certifies.
    Eps,
    /// Refine a start cube breadth-first.
    Grid,
    /// Inflation first, gridding as the fallback.
    #[value(name = "eps+grid")]
    EpsGrid,
}

impl BoxesArg {
    fn strategy(self) -> BoxStrategy {
        match self {
            BoxesArg::Eps => BoxStrategy::EpsInflation,
            BoxesArg::Grid => BoxStrategy::Gridding,
            BoxesArg::EpsGrid => BoxStrategy::EpsThenGridding,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Input formula (SMT-LIB 2 subset over the reals).
    input: PathBuf,
    /// Named preset 1a/1b/1c or 2–7 with b/c; each level adds one heuristic
    /// on top of the previous one. Without --config and without individual
    /// heuristic flags the strongest preset (7c) is used.
    #[arg(long, conflicts_with_all = ["sort_literals", "check_forced_literals",
        "filter_overconstr", "filter_overconstr_v", "filter_rank_deficient",
        "kearfott_ordering"])]
    config: Option<String>,
    /// Order each clause's candidate literals by objective value. Giving any
    /// individual heuristic flag starts from a base with all heuristics off.
    #[arg(long)]
    sort_literals: bool,
    /// Abandon points whose forced literals are symbolically contradictory.
    #[arg(long)]
    check_forced_literals: bool,
    /// Drop literal selections with an over-constrained equation subsystem.
    #[arg(long)]
    filter_overconstr: bool,
    /// Drop instantiations leaving a structurally unmatchable system.
    #[arg(long)]
    filter_overconstr_v: bool,
    /// Drop instantiations leaving a rank-deficient Jacobian.
    #[arg(long)]
    filter_rank_deficient: bool,
    /// Order instantiation candidates by null-space weight.
    #[arg(long)]
    kearfott_ordering: bool,
    /// Box search strategy.
    #[arg(long, value_enum)]
    boxes: Option<BoxesArg>,
    /// Threshold under which a literal counts as approximately satisfied.
    #[arg(long)]
    eps_lit: Option<f64>,
    /// Number of candidate points sampled by the optimizer.
    #[arg(long)]
    k: Option<usize>,
    /// RNG seed (falls back to the NTACERT_SEED environment variable).
    #[arg(long)]
    seed: Option<u64>,
    /// Wall-clock budget for the whole search.
    #[arg(long)]
    timeout_ms: Option<u64>,
    /// Where to write the certificate (default: input path with the
    /// extension replaced by .cert.json).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Formula the certificate claims to witness.
    formula: PathBuf,
    /// Certificate file produced by `solve`.
    certificate: PathBuf,
    /// Cell budget for each topological-degree computation.
    #[arg(long, default_value_t = DEFAULT_FACE_BUDGET)]
    budget: usize,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of .smt2 problems.
    dir: PathBuf,
    /// Comma-separated configuration names (presets as in solve --config).
    #[arg(long, default_value = "1a,1b,1c,2b,2c,3b,3c,4b,4c,5b,5c,6b,6c,7b,7c")]
    configs: String,
    /// Per-problem wall-clock budget.
    #[arg(long, default_value_t = 10_000)]
    timeout_ms: u64,
    /// Cell budget for certificate re-validation.
    #[arg(long, default_value_t = DEFAULT_FACE_BUDGET)]
    budget: usize,
    /// RNG seed used for every run.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the JSON summary.
    #[arg(long, default_value = "bench-summary.json")]
    summary: PathBuf,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Solve(args) => cmd_solve(args),
        Command::Check(args) => cmd_check(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn read_formula(path: &Path) -> Result<Formula, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_formula(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn env_seed() -> Option<u64> {
    std::env::var("NTACERT_SEED").ok()?.trim().parse().ok()
}

impl SolveArgs {
    fn build_config(&self) -> Result<SearchConfig, String> {
        let heuristics_given = self.sort_literals
            || self.check_forced_literals
            || self.filter_overconstr
            || self.filter_overconstr_v
            || self.filter_rank_deficient
            || self.kearfott_ordering;
        let mut cfg = match &self.config {
            Some(name) => SearchConfig::preset(name)
                .ok_or_else(|| format!("unknown configuration `{name}`"))?,
            // Individual flags compose from a base with every heuristic off,
            // so the command line lists exactly what is enabled.
            None if heuristics_given => SearchConfig {
                sort_literals: self.sort_literals,
                check_forced_literals: self.check_forced_literals,
                filter_overconstr: self.filter_overconstr,
                filter_overconstr_v: self.filter_overconstr_v,
                filter_rank_deficient: self.filter_rank_deficient,
                kearfott_ordering: self.kearfott_ordering,
                ..SearchConfig::default()
            },
            None => SearchConfig::default(),
        };
        if let Some(boxes) = self.boxes {
            cfg.box_strategy = boxes.strategy();
        }
        if let Some(eps) = self.eps_lit {
            cfg.eps_lit = eps;
        }
        if let Some(k) = self.k {
            cfg.k = k;
        }
        if let Some(seed) = self.seed.or_else(env_seed) {
            cfg.seed = seed;
        }
        if let Some(ms) = self.timeout_ms {
            cfg.timeout = Some(Duration::from_millis(ms));
        }
        Ok(cfg)
    }
}

fn certificate_path(input: &Path, out: Option<&Path>) -> PathBuf {
    match out {
        Some(p) => p.to_path_buf(),
        None => input.with_extension("cert.json"),
    }
}

fn cmd_solve(args: SolveArgs) -> ExitCode {
    let phi = match read_formula(&args.input) {
        Ok(phi) => phi,
        Err(e) => return fail(e),
    };
    let cfg = match args.build_config() {
        Ok(cfg) => cfg,
        Err(e) => return fail(e),
    };
    let outcome = solve(&phi, &cfg);
    match outcome.result {
        SolveResult::Sat(cert) => {
            let path = certificate_path(&args.input, args.out.as_deref());
            if let Err(e) = std::fs::write(&path, serialize_certificate(&cert)) {
                return fail(format!("cannot write {}: {e}", path.display()));
            }
            println!("sat");
            println!("certificate: {}", path.display());
            ExitCode::SUCCESS
        }
        SolveResult::Unknown => {
            println!("unknown");
            ExitCode::from(1)
        }
    }
}

fn print_report(report: &CheckReport) {
    for c in &report.conditions {
        let outcome = match c.outcome {
            Outcome::Pass => "ok",
            Outcome::Fail => "FAIL",
            Outcome::Undetermined => "undetermined",
            Outcome::Skipped => "skipped",
        };
        if c.detail.is_empty() {
            println!("{:<18} {outcome}", c.name);
        } else {
            println!("{:<18} {outcome} ({})", c.name, c.detail);
        }
    }
}

fn cmd_check(args: CheckArgs) -> ExitCode {
    let phi = match read_formula(&args.formula) {
        Ok(phi) => phi,
        Err(e) => return fail(e),
    };
    let text = match std::fs::read_to_string(&args.certificate) {
        Ok(t) => t,
        Err(e) => return fail(format!("cannot read {}: {e}", args.certificate.display())),
    };
    let cert = match deserialize_certificate(&text) {
        Ok(c) => c,
        Err(e) => return fail(format!("{}: {e}", args.certificate.display())),
    };
    let report = check_certificate(&phi, &cert, args.budget);
    print_report(&report);
    eprintln!("check wall time: {:.3} ms", report.elapsed.as_secs_f64() * 1e3);
    match report.verdict {
        Verdict::Valid => {
            println!("valid");
            ExitCode::SUCCESS
        }
        Verdict::Invalid => {
            println!("invalid");
            ExitCode::from(1)
        }
        Verdict::Undetermined => {
            println!("undetermined");
            ExitCode::from(3)
        }
    }
}

struct RunRecord {
    config: String,
    file: String,
    /// One of sat, unknown, timeout, error.
    verdict: &'static str,
    solve_ms: f64,
    /// Re-validation time; only meaningful for sat records.
    check_ms: f64,
}

fn bench_one(
    phi: &Formula,
    config: &str,
    cfg: &SearchConfig,
    budget: usize,
) -> Result<(&'static str, SearchOutcome, f64), String> {
    let outcome = solve(phi, cfg);
    match &outcome.result {
        SolveResult::Sat(cert) => {
            // Round-trip through the wire format so the re-validation sees
            // exactly what a separate check invocation would.
            let cert = deserialize_certificate(&serialize_certificate(cert))
                .map_err(|e| format!("certificate round trip failed: {e}"))?;
            let report = check_certificate(phi, &cert, budget);
            if report.verdict != Verdict::Valid {
                return Err(format!(
                    "config {config}: solver reported sat but re-validation says {:?}",
                    report.verdict
                ));
            }
            let check_ms = report.elapsed.as_secs_f64() * 1e3;
            Ok(("sat", outcome, check_ms))
        }
        SolveResult::Unknown if outcome.stats.timed_out => Ok(("timeout", outcome, 0.0)),
        SolveResult::Unknown => Ok(("unknown", outcome, 0.0)),
    }
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

fn cmd_bench(args: BenchArgs) -> ExitCode {
    let mut configs = Vec::new();
    for name in args.configs.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match SearchConfig::preset(name) {
            Some(mut cfg) => {
                cfg.seed = args.seed;
                cfg.timeout = Some(Duration::from_millis(args.timeout_ms));
                configs.push((name.to_string(), cfg));
            }
            None => return fail(format!("unknown configuration `{name}`")),
        }
    }

    let mut files: Vec<PathBuf> = match std::fs::read_dir(&args.dir) {
        Ok(entries) => entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "smt2"))
            .collect(),
        Err(e) => return fail(format!("cannot read {}: {e}", args.dir.display())),
    };
    files.sort();

    let mut records: Vec<RunRecord> = Vec::new();
    println!("config\tfile\tverdict\tsolve_ms\tcheck_ms");
    for (name, cfg) in &configs {
        for path in &files {
            let file = path
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let record = match read_formula(path) {
                Ok(phi) => match bench_one(&phi, name, cfg, args.budget) {
                    Ok((verdict, outcome, check_ms)) => RunRecord {
                        config: name.clone(),
                        file,
                        verdict,
                        solve_ms: outcome.elapsed.as_secs_f64() * 1e3,
                        check_ms,
                    },
                    Err(e) => return fail(format!("{}: {e}", path.display())),
                },
                Err(e) => {
                    eprintln!("error: {e}");
                    RunRecord {
                        config: name.clone(),
                        file,
                        verdict: "error",
                        solve_ms: 0.0,
                        check_ms: 0.0,
                    }
                }
            };
            println!(
                "{}\t{}\t{}\t{:.3}\t{:.3}",
                record.config, record.file, record.verdict, record.solve_ms, record.check_ms
            );
            records.push(record);
        }
    }

    let mut solved: Vec<(String, usize)> = Vec::new();
    for (name, _) in &configs {
        let n = records
            .iter()
            .filter(|r| &r.config == name && r.verdict == "sat")
            .count();
        solved.push((name.clone(), n));
    }
    let mut ratios: Vec<f64> = records
        .iter()
        .filter(|r| r.verdict == "sat" && r.solve_ms > 0.0)
        .map(|r| r.check_ms / r.solve_ms)
        .collect();
    ratios.sort_by(f64::total_cmp);
    let ratio_median = median(&ratios);
    let ratio_mean = if ratios.is_empty() {
        f64::NAN
    } else {
        ratios.iter().sum::<f64>() / ratios.len() as f64
    };

    println!("# solved per config ({} files)", files.len());
    for (name, n) in &solved {
        println!("# {name}\t{n}");
    }
    println!("# check/solve ratio over sat runs: median {ratio_median:.4}, mean {ratio_mean:.4}");

    let summary = serde_json::json!({
        "files": files.len(),
        "solved": solved
            .iter()
            .map(|(name, n)| serde_json::json!({ "config": name, "sat": n }))
            .collect::<Vec<_>>(),
        "check_solve_ratio": { "median": ratio_median, "mean": ratio_mean },
        "records": records
            .iter()
            .map(|r| serde_json::json!({
                "config": r.config,
                "file": r.file,
                "verdict": r.verdict,
                "solve_ms": r.solve_ms,
                "check_ms": r.check_ms,
            }))
            .collect::<Vec<_>>(),
    });
    match serde_json::to_string_pretty(&summary) {
        Ok(text) => {
            if let Err(e) = std::fs::write(&args.summary, text) {
                return fail(format!("cannot write {}: {e}", args.summary.display()));
            }
        }
        Err(e) => return fail(e),
    }
    ExitCode::SUCCESS
}
