//! Command-line frontend for the actmc model checker.
//!
//! Exit codes: 0 = all safe, 1 = bug found, 2 = usage or validation error,
//! 3 = budget exhausted.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use actmc::ctsearch;
use actmc::dsl;
use actmc::explorer::{
    Budget, ExploreOptions, Explorer, Outcome, Strategy, StrategyKind, Verdict,
};
use actmc::model::{classify_execution, Classification, Program};
use actmc::report::{self, StatsDoc};
use actmc::{bench, oracle};

#[derive(Parser)]
#[command(name = "actmc", version)]
#[command(about = "Stateless model checker for message-passing actor programs", long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Explore a program and report deadlocks, crashes, or safety.
    Verify {
        /// Program in DSL form.
        file: PathBuf,
        /// Exploration strategy: dfs, uniform-dfs, rfs-step or rfs-branch.
        #[arg(long, default_value = "dfs")]
        strategy: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Keep exploring after the first bug instead of stopping.
        #[arg(long)]
        exhaustive: bool,
        /// Locate the critical transition of the first bug (implies
        /// stopping at it).
        #[arg(long)]
        ct: bool,
        #[arg(long)]
        max_traces: Option<u64>,
        #[arg(long)]
        max_states: Option<u64>,
        #[arg(long)]
        timeout_s: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Disable exploration-tree garbage collection.
        #[arg(long)]
        no_gc: bool,
        /// Print the deterministic exploration transcript to stderr.
        #[arg(long)]
        transcript: bool,
    },
    /// Count distinct equivalence classes of maximal executions.
    CountTraces {
        file: PathBuf,
        /// Use the brute-force enumeration oracle instead of the reduced
        /// explorer.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value = "dfs")]
        strategy: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Interleaving budget for the oracle route.
        #[arg(long, default_value_t = 2_000_000)]
        budget: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Benchmark program generators.
    Bench {
        #[command(subcommand)]
        cmd: BenchCmd,
    },
}

#[derive(Subcommand)]
enum BenchCmd {
    /// Write a generated benchmark as a DSL file.
    Emit {
        /// One of: mpi_any, philosophers_mutex, philosophers_semaphore,
        /// factorial, polling_loop, random.
        name: String,
        #[arg(long)]
        scale: u32,
        /// Output path; defaults to <name>_<scale>.prog.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run strategies x seeds with stop-at-first-bug and emit per-seed
    /// states_before_first_bug as CSV.
    Sweep {
        name: String,
        #[arg(long)]
        scale: u32,
        /// Number of seeds (0..seeds).
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        /// Comma-separated strategy list; defaults to all four.
        #[arg(long, value_delimiter = ',')]
        strategies: Vec<String>,
        #[arg(long)]
        max_states: Option<u64>,
        #[arg(long)]
        timeout_s: Option<u64>,
        /// Output path; defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const EXIT_SAFE: u8 = 0;
const EXIT_BUG: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse()))
}

fn fail_usage(msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn run(cli: Cli) -> u8 {
    match cli.command {
        Command::Verify {
            file,
            strategy,
            seed,
            exhaustive,
            ct,
            max_traces,
            max_states,
            timeout_s,
            format,
            no_gc,
            transcript,
        } => {
            let program = match load_program(&file) {
                Ok(p) => p,
                Err(msg) => return fail_usage(msg),
            };
            let kind: StrategyKind = match strategy.parse() {
                Ok(k) => k,
                Err(msg) => return fail_usage(msg),
            };
            let mut options = ExploreOptions::new(Strategy::new(kind, seed));
            options.budget = Budget {
                max_traces,
                max_states,
                timeout: timeout_s.map(Duration::from_secs),
            };
            options.stop_at_first_bug = ct || !exhaustive;
            options.gc = !no_gc;
            let mut explorer = Explorer::new(&program, options);
            let verdict = match explorer.run() {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("internal error: {e}");
                    return EXIT_USAGE;
                }
            };
            let ct_report = if ct && verdict.outcome.is_bug() {
                match ctsearch::find_critical_transition(&mut explorer) {
                    Ok(r) => Some(r),
                    Err(e) => {
                        eprintln!("internal error: {e}");
                        return EXIT_USAGE;
                    }
                }
            } else {
                None
            };
            if transcript {
                eprint!("{}", explorer.render_transcript());
            }
            print_verify(&program, &verdict, ct_report.as_ref(), format);
            match verdict.outcome {
                Outcome::AllSafe => EXIT_SAFE,
                Outcome::Deadlock | Outcome::Crash => EXIT_BUG,
                Outcome::Exhausted(_) => EXIT_BUDGET,
            }
        }
        Command::CountTraces {
            file,
            oracle: use_oracle,
            strategy,
            seed,
            budget,
            format,
        } => {
            let program = match load_program(&file) {
                Ok(p) => p,
                Err(msg) => return fail_usage(msg),
            };
            let (doc, code) = if use_oracle {
                match count_with_oracle(&program, budget) {
                    Ok(doc) => (doc, EXIT_SAFE),
                    Err(e) => return fail_usage(e),
                }
            } else {
                let kind: StrategyKind = match strategy.parse() {
                    Ok(k) => k,
                    Err(msg) => return fail_usage(msg),
                };
                let mut options = ExploreOptions::new(Strategy::new(kind, seed));
                options.stop_at_first_bug = false;
                let mut explorer = Explorer::new(&program, options);
                match explorer.run() {
                    Ok(verdict) => {
                        let mut doc = StatsDoc::new(&verdict.stats, verdict.outcome);
                        doc.verdict = class_summary(
                            explorer.completed().iter().map(|t| t.class),
                        );
                        (doc, EXIT_SAFE)
                    }
                    Err(e) => {
                        eprintln!("internal error: {e}");
                        return EXIT_USAGE;
                    }
                }
            };
            match format {
                Format::Text => {
                    println!("{}", doc.traces_explored);
                    print!(
                        "states_visited={}\nssb_count={}\nverdict={}\n",
                        doc.states_visited, doc.ssb_count, doc.verdict
                    );
                }
                Format::Json => println!("{}", doc.to_json()),
            }
            code
        }
        Command::Bench { cmd } => run_bench(cmd),
    }
}

fn load_program(path: &PathBuf) -> Result<Program, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    dsl::parse_program(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn print_verify(program: &Program, verdict: &Verdict, ct: Option<&ctsearch::CtReport>, format: Format) {
    match format {
        Format::Json => {
            println!("{}", report::VerifyDoc::new(program, verdict, ct).to_json());
        }
        Format::Text => {
            println!("verdict: {}", verdict.outcome);
            if let Outcome::Exhausted(kind) = verdict.outcome {
                println!("budget exhausted: {kind}");
            }
            if let Some(cx) = &verdict.counterexample {
                println!("counterexample:");
                print!("{}", report::render_execution_text(program, cx));
            }
            print!("{}", report::render_stats_text(&verdict.stats, verdict.outcome));
            if let Some(ct) = ct {
                print!("{}", report::render_ct_text(program, ct));
            }
        }
    }
}

fn count_with_oracle(program: &Program, budget: u64) -> Result<StatsDoc, String> {
    let executions = oracle::enumerate_all(program, budget).map_err(|e| e.to_string())?;
    let classes = oracle::count_classes(program, budget).map_err(|e| e.to_string())?;
    let verdict = class_summary(executions.iter().map(|e| classify_execution(program, e)));
    Ok(StatsDoc {
        traces_explored: classes,
        states_visited: executions.iter().map(|e| e.len() as u64).sum(),
        states_before_first_bug: None,
        ssb_count: 0,
        verdict,
    })
}

/// Worst classification over all explored classes: crash > deadlock > safe.
fn class_summary(classes: impl Iterator<Item = Classification>) -> String {
    let mut summary = Classification::Safe;
    for c in classes {
        summary = summary.max(c);
    }
    match summary {
        Classification::Safe => "all_safe".to_owned(),
        other => other.to_string(),
    }
}

fn generate(name: &str, scale: u32) -> Result<Program, String> {
    match name {
        "mpi_any" => Ok(bench::mpi_any(scale)),
        "philosophers_mutex" => {
            if scale < 2 {
                return Err("philosophers_mutex needs --scale >= 2".into());
            }
            Ok(bench::philosophers_mutex(scale as usize))
        }
        "philosophers_semaphore" => {
            if scale < 2 {
                return Err("philosophers_semaphore needs --scale >= 2".into());
            }
            Ok(bench::philosophers_semaphore(scale as usize))
        }
        "factorial" => {
            if scale < 1 {
                return Err("factorial needs --scale >= 1".into());
            }
            Ok(bench::factorial_bench(scale as usize))
        }
        "polling_loop" => Ok(bench::polling_loop(scale as usize)),
        "random" => Ok(bench::random_program(
            u64::from(scale),
            bench::RandomBounds::default(),
        )),
        other => Err(format!(
            "unknown benchmark '{other}' (expected mpi_any, philosophers_mutex, \
             philosophers_semaphore, factorial, polling_loop or random)"
        )),
    }
}

fn run_bench(cmd: BenchCmd) -> u8 {
    match cmd {
        BenchCmd::Emit { name, scale, out } => {
            let program = match generate(&name, scale) {
                Ok(p) => p,
                Err(msg) => return fail_usage(msg),
            };
            let text = match dsl::emit_program(&program) {
                Ok(t) => t,
                Err(e) => return fail_usage(e),
            };
            let path = out.unwrap_or_else(|| PathBuf::from(format!("{name}_{scale}.prog")));
            if let Err(e) = fs::write(&path, text) {
                return fail_usage(format!("cannot write {}: {e}", path.display()));
            }
            println!("{}", path.display());
            EXIT_SAFE
        }
        BenchCmd::Sweep {
            name,
            scale,
            seeds,
            strategies,
            max_states,
            timeout_s,
            out,
        } => {
            let program = match generate(&name, scale) {
                Ok(p) => p,
                Err(msg) => return fail_usage(msg),
            };
            let kinds: Vec<StrategyKind> = if strategies.is_empty() {
                StrategyKind::ALL.to_vec()
            } else {
                let mut kinds = Vec::new();
                for s in &strategies {
                    match s.parse() {
                        Ok(k) => kinds.push(k),
                        Err(msg) => return fail_usage(msg),
                    }
                }
                kinds
            };
            let mut csv = String::from("seed,strategy,states_before_first_bug,verdict\n");
            for kind in &kinds {
                for seed in 0..seeds {
                    let mut options = ExploreOptions::new(Strategy::new(*kind, seed));
                    options.stop_at_first_bug = true;
                    options.budget = Budget {
                        max_traces: None,
                        max_states,
                        timeout: timeout_s.map(Duration::from_secs),
                    };
                    let mut explorer = Explorer::new(&program, options);
                    let verdict = match explorer.run() {
                        Ok(v) => v,
                        Err(e) => {
                            eprintln!("internal error: {e}");
                            return EXIT_USAGE;
                        }
                    };
                    // Budget-limited runs report the states explored so far,
                    // mirroring how timeout runs enter the comparison plots.
                    let states = verdict
                        .stats
                        .states_before_first_bug
                        .unwrap_or(verdict.stats.states_visited);
                    csv.push_str(&format!(
                        "{seed},{},{states},{}\n",
                        kind.name(),
                        verdict.outcome
                    ));
                }
            }
            match out {
                Some(path) => {
                    if let Err(e) = fs::write(&path, csv) {
                        return fail_usage(format!("cannot write {}: {e}", path.display()));
                    }
                    println!("{}", path.display());
                }
                None => print!("{csv}"),
            }
            EXIT_SAFE
        }
    }
}
