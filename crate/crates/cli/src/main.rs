//! `ics`: analyze, solve, minimize, reduce, generate and cross-check
//! interval-constrained scheduling instances.
//!
//! Exit codes: 0 feasible or success, 1 infeasible or mismatch, 2 usage,
//! parse or budget error.

mod report;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use thiserror::Error;

use ics_core::analysis::profile;
use ics_core::bounds::{self, min_machines_lower_bound, min_machines_with, run_driver, Driver, PrecheckMode};
use ics_core::dp::{SolveError, Solver, Strategy, DEFAULT_BUDGET};
use ics_core::instance::validate;
use ics_core::instances::{random_instance, reduce_bin_packing, suite_instance, verify_reduction, Style};
use ics_core::oracle::{brute_force_decide, BinPackingInstance, DEFAULT_JOB_CAP};
use ics_core::{verify_schedule, Feasibility, Instance};

use report::{Answer, Bounds, CrosscheckSummary, ReductionSummary, RunReport};

#[derive(Parser, Debug)]
#[command(
    name = "ics",
    version,
    about = "Exact feasibility for interval-constrained scheduling"
)]
struct Cli {
    /// Print one JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Cap on the projected DP state count of one gap-free part.
    #[arg(long, global = true, env = "SCHED_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the instance profile and both height bounds.
    Analyze { path: PathBuf },
    /// Decide feasibility.
    Decide {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = DriverArg::Plain)]
        driver: DriverArg,
        /// Include a verified schedule when feasible.
        #[arg(long)]
        witness: bool,
        #[arg(long, value_enum, default_value_t = StrategyArg::Frontier)]
        strategy: StrategyArg,
    },
    /// Find the fewest machines that make the instance feasible.
    Minimize {
        path: PathBuf,
        /// Largest machine count to try (default: number of jobs).
        #[arg(long)]
        max: Option<usize>,
    },
    /// Reduce a bin-packing instance to a scheduling instance.
    Reduce {
        path: PathBuf,
        #[arg(long, default_value_t = 1)]
        c: u32,
        /// Where to write the instance; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a seeded random instance.
    Generate {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// slack:<σ>, looseness:<p/q> or unconstrained.
        #[arg(long, default_value = "unconstrained")]
        style: Style,
        #[arg(long, default_value_t = 10)]
        horizon: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the DP, both drivers and the brute-force oracle on random instances.
    Crosscheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        count: u64,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[arg(long, default_value_t = 3)]
        m_max: usize,
        /// Latest deadline.
        #[arg(long, default_value_t = 12)]
        t_max: i64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DriverArg {
    Plain,
    Looseness,
    Slack,
}

impl From<DriverArg> for Driver {
    fn from(d: DriverArg) -> Self {
        match d {
            DriverArg::Plain => Driver::Plain,
            DriverArg::Looseness => Driver::Looseness,
            DriverArg::Slack => Driver::Slack,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    Frontier,
    Table,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.into(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.into(),
        source,
    })
}

fn load_instance(path: &Path) -> Result<Instance, CliError> {
    let inst = Instance::from_json(&read(path)?).map_err(|source| CliError::Parse {
        path: path.into(),
        source,
    })?;
    let report = validate(&inst);
    if !report.is_well_formed() {
        return Err(CliError::Invalid(report.to_string()));
    }
    Ok(inst)
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn analyze(report: &mut RunReport, path: &Path) -> Result<(), CliError> {
    let inst = load_instance(path)?;
    let p = profile(&inst);
    report.bounds = Bounds::for_profile(&p);
    report.bounds.machine_lower_bound = Some(min_machines_lower_bound(&inst));
    report.profile = Some(p);
    Ok(())
}

fn decide(
    report: &mut RunReport,
    path: &Path,
    driver: Driver,
    witness: bool,
    strategy: Strategy,
    budget: u64,
) -> Result<(), CliError> {
    let inst = load_instance(path)?;
    let p = profile(&inst);
    report.bounds = Bounds::for_profile(&p);
    report.profile = Some(p);

    let solver = Solver::default()
        .with_budget(budget)
        .with_strategy(strategy)
        .with_witness(witness);
    let start = Instant::now();
    let out = run_driver(&inst, driver, &solver)?;
    report.stats.wall_time_ms = elapsed_ms(start);
    report.bounds.precheck = out.precheck;
    report.stats.precheck_rejected = out.precheck.is_some_and(|p| p.rejects());
    report.stats.dp_invoked = out.dp_invoked();
    if let Some(solved) = out.solve {
        report.stats.memo_entries = solved.stats.memo_entries();
        report.stats.parts = solved.stats.parts;
        if let Some(s) = solved.schedule {
            if !verify_schedule(&inst, &s) {
                return Err(CliError::Usage(
                    "internal error: emitted schedule fails verification".into(),
                ));
            }
            report.schedule = Some(s.placements());
        }
    }
    if witness && out.feasibility.is_feasible() && report.schedule.is_none() {
        report.schedule = Some(Vec::new());
    }
    report.answer = match out.feasibility {
        Feasibility::Feasible => Answer::Feasible,
        Feasibility::Infeasible => Answer::Infeasible,
    };
    Ok(())
}

fn minimize(report: &mut RunReport, path: &Path, max: Option<usize>, budget: u64) -> Result<(), CliError> {
    let inst = load_instance(path)?;
    let m_max = max.unwrap_or(inst.len()).max(1);
    let start = Instant::now();
    let res = min_machines_with(&inst, m_max, &Solver::default().with_budget(budget))?;
    report.stats.wall_time_ms = elapsed_ms(start);
    report.stats.dp_invoked = !res.tried.is_empty();
    report.profile = Some(profile(&inst));
    report.bounds.machine_lower_bound = Some(res.lower_bound);
    report.minimum_machines = res.minimum;
    report.answer = if res.minimum.is_some() {
        Answer::Feasible
    } else {
        Answer::Infeasible
    };
    Ok(())
}

fn reduce(report: &mut RunReport, path: &Path, c: u32, out: Option<&Path>) -> Result<Option<String>, CliError> {
    let bp = BinPackingInstance::from_json(&read(path)?).map_err(|source| CliError::Parse {
        path: path.into(),
        source,
    })?;
    let reduced = reduce_bin_packing(&bp, c).map_err(|e| CliError::Usage(e.to_string()))?;
    let properties = verify_reduction(&bp, &reduced, c);
    let text = reduced.instance.to_json();
    if let Some(out) = out {
        write(out, &text)?;
    }
    report.profile = Some(profile(&reduced.instance));
    report.reduction = Some(ReductionSummary {
        a_sum: reduced.a_sum,
        big_b: reduced.big_b,
        trivial: reduced.trivial,
        jobs: reduced.instance.len(),
        summary: format!("A={} B={}, {}", reduced.a_sum, reduced.big_b, properties.summary()),
        properties,
        written_to: out.map(|p| p.display().to_string()),
    });
    report.answer = if report.reduction.as_ref().is_some_and(|r| r.properties.all_hold()) {
        Answer::Ok
    } else {
        Answer::Mismatch
    };
    if out.is_none() {
        report.instance = Some(reduced.instance);
        return Ok(Some(text));
    }
    Ok(None)
}

#[allow(clippy::too_many_arguments)]
fn generate(
    report: &mut RunReport,
    seed: u64,
    n: usize,
    m: usize,
    style: Style,
    horizon: i64,
    out: Option<&Path>,
) -> Result<Option<String>, CliError> {
    let inst = random_instance(seed, n, m, style, horizon).map_err(|e| CliError::Usage(e.to_string()))?;
    let text = inst.to_json();
    report.profile = Some(profile(&inst));
    match out {
        Some(path) => {
            write(path, &text)?;
            Ok(None)
        }
        None => {
            report.instance = Some(inst);
            Ok(Some(text))
        }
    }
}

enum Check {
    Agree { feasible: bool, rejections: usize },
    Mismatch(Instance),
    BoundViolation(Instance),
}

fn check_one(inst: Instance, budget: u64) -> Result<Check, CliError> {
    let solver = Solver::default().with_budget(budget).with_witness(true);
    let oracle = brute_force_decide(&inst).map_err(|e| CliError::Usage(e.to_string()))?;
    let plain = solver.solve(&inst)?;
    let witness_ok = match &plain.schedule {
        Some(s) => verify_schedule(&inst, s),
        None => !plain.feasibility.is_feasible(),
    };
    let loose = run_driver(&inst, Driver::Looseness, &solver)?;
    let slack = run_driver(&inst, Driver::Slack, &solver)?;
    if !witness_ok
        || [plain.feasibility, loose.feasibility, slack.feasibility]
            .iter()
            .any(|&a| a != oracle)
    {
        return Ok(Check::Mismatch(inst));
    }
    let rejections = [PrecheckMode::Looseness, PrecheckMode::Slack]
        .iter()
        .filter(|&&mode| bounds::precheck(&inst, mode).rejects())
        .count();
    if oracle.is_feasible() && rejections > 0 {
        return Ok(Check::BoundViolation(inst));
    }
    Ok(Check::Agree {
        feasible: oracle.is_feasible(),
        rejections,
    })
}

fn crosscheck(
    report: &mut RunReport,
    seed: u64,
    count: u64,
    (n_max, m_max, t_max): (usize, usize, i64),
    budget: u64,
) -> Result<Vec<Instance>, CliError> {
    if n_max > DEFAULT_JOB_CAP {
        return Err(CliError::Usage(format!(
            "--n-max {n_max} exceeds the oracle cap {DEFAULT_JOB_CAP}"
        )));
    }
    if m_max < 1 || t_max < 1 {
        return Err(CliError::Usage("--m-max and --t-max must be at least 1".into()));
    }
    let start = Instant::now();
    let results: Vec<(u64, Check)> = (0..count)
        .into_par_iter()
        .map(|k| {
            let s = seed.wrapping_add(k);
            let inst = suite_instance(s, n_max, m_max, t_max).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok((s, check_one(inst, budget)?))
        })
        .collect::<Result<_, CliError>>()?;
    report.stats.wall_time_ms = elapsed_ms(start);
    report.stats.dp_invoked = count > 0;

    let mut summary = CrosscheckSummary {
        instances: count,
        mismatches: 0,
        bound_violations: 0,
        feasible: 0,
        precheck_rejections: 0,
        failing_seeds: Vec::new(),
    };
    let mut offenders = Vec::new();
    for (s, check) in results {
        match check {
            Check::Agree { feasible, rejections } => {
                summary.feasible += usize::from(feasible);
                summary.precheck_rejections += rejections;
            }
            Check::Mismatch(inst) => {
                summary.mismatches += 1;
                summary.failing_seeds.push(s);
                offenders.push(inst);
            }
            Check::BoundViolation(inst) => {
                summary.bound_violations += 1;
                summary.failing_seeds.push(s);
                offenders.push(inst);
            }
        }
    }
    report.answer = if offenders.is_empty() {
        Answer::Ok
    } else {
        Answer::Mismatch
    };
    report.crosscheck = Some(summary);
    Ok(offenders)
}

fn command_echo() -> String {
    std::env::args().skip(1).collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut report = RunReport::new(command_echo());
    let mut payload: Option<String> = None;
    let mut offenders = Vec::new();

    let result = match &cli.command {
        Command::Analyze { path } => analyze(&mut report, path),
        Command::Decide {
            path,
            driver,
            witness,
            strategy,
        } => {
            let strategy = match strategy {
                StrategyArg::Frontier => Strategy::Frontier,
                StrategyArg::Table => Strategy::Table,
            };
            decide(&mut report, path, (*driver).into(), *witness, strategy, cli.budget)
        }
        Command::Minimize { path, max } => minimize(&mut report, path, *max, cli.budget),
        Command::Reduce { path, c, out } => reduce(&mut report, path, *c, out.as_deref()).map(|p| payload = p),
        Command::Generate {
            seed,
            n,
            m,
            style,
            horizon,
            out,
        } => generate(&mut report, *seed, *n, *m, *style, *horizon, out.as_deref()).map(|p| payload = p),
        Command::Crosscheck {
            seed,
            count,
            n_max,
            m_max,
            t_max,
        } => crosscheck(&mut report, *seed, *count, (*n_max, *m_max, *t_max), cli.budget).map(|o| offenders = o),
    };

    if let Err(e) = result {
        eprintln!("error: {e}");
        report.answer = Answer::Error;
        report.error = Some(e.to_string());
    }

    // A closed pipe on either stream is not worth a panic.
    let mut stdout = io::stdout().lock();
    let mut stderr = io::stderr().lock();
    if cli.json {
        let _ = writeln!(stdout, "{}", report.to_json());
    } else if let Some(text) = payload.filter(|_| report.answer != Answer::Error) {
        // The instance itself is the output; the summary goes to stderr.
        let _ = writeln!(stdout, "{text}");
        let _ = writeln!(stderr, "{}", report.render());
    } else {
        let _ = writeln!(stdout, "{}", report.render());
    }
    for inst in &offenders {
        let _ = writeln!(stderr, "offending instance:\n{}", inst.to_json());
    }
    ExitCode::from(report.exit_code())
}
