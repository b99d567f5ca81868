mod args;
mod config;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;

use nleq_core::harness::{Render, Table, CASCADE_GLOBALS};
use nleq_core::problems::{catalog, CatalogEntry};
use nleq_core::rootfind::Global;
use nleq_core::{lookup, run_cascade, run_comparison, run_grid, Method, OutputFormat, RootOptions, StartPoint};

use args::{CascadeArgs, Cli, Command, CompareArgs, GridArgs, SolveArgs, Tuning};
use config::{build_solvers, check_scales, Flags, UResult, Usage};

const DEFAULT_COMPARE: [&str; 4] = ["root", "dfsane", "lm", "vm"];

/// Outcome of a command that ran: whether every solve converged.
struct Done {
    converged: bool,
    strict: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(done) if done.strict && !done.converged => ExitCode::from(1),
        Ok(_) => ExitCode::SUCCESS,
        Err(Usage(msg)) => {
            eprintln!("nleq: error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> UResult<Done> {
    match command {
        Command::List { format } => {
            emit(&Catalog(catalog()), format)?;
            Ok(Done { converged: true, strict: false })
        }
        Command::Solve(a) => solve(a),
        Command::Grid(a) => grid(a),
        Command::Cascade(a) => cascade(a),
        Command::Compare(a) => compare(a),
    }
}

fn emit<R: Render>(report: &R, format: OutputFormat) -> UResult<()> {
    let text = report.render(format)?;
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    if !text.ends_with('\n') {
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn start_for(problem: &nleq_core::Problem, spec: Option<&str>) -> UResult<StartPoint> {
    Ok(match spec {
        Some(s) => StartPoint::resolve(problem, s)?,
        None => StartPoint::default_for(problem)?,
    })
}

/// Root options for grid and cascade; only root flags are accepted.
fn root_options(tuning: &Tuning, what: &str) -> UResult<RootOptions> {
    let mut flags = Flags::new(tuning);
    let opts = flags.root(RootOptions::default());
    flags.finish(what)?;
    Ok(opts)
}

fn or_all<T: Copy>(given: Vec<T>, all: &[T]) -> Vec<T> {
    if given.is_empty() {
        all.to_vec()
    } else {
        given
    }
}

fn solve(a: SolveArgs) -> UResult<Done> {
    let problem = lookup(&a.problem)?;
    check_scales(&a.tuning, &problem)?;
    let start = start_for(&problem, a.start.as_deref())?;
    let methods: Vec<Method> = a.method.into_iter().collect();
    let globals: Vec<Global> = a.global.into_iter().collect();
    let mut flags = Flags::new(&a.tuning);
    let solvers = build_solvers(std::slice::from_ref(&a.solver), &methods, &globals, &mut flags)?;
    flags.finish(&a.solver)?;
    // An inline start resolves the same way again inside the comparison.
    let spec = a.start.unwrap_or(start.name);
    let table = run_comparison(&[problem], &[spec], &solvers, a.reps)?;
    emit(&table, a.format)?;
    Ok(Done {
        converged: table.rows.iter().all(|r| r.converged),
        strict: a.strict,
    })
}

fn grid(a: GridArgs) -> UResult<Done> {
    let problem = lookup(&a.problem)?;
    let start = start_for(&problem, a.start.as_deref())?;
    let opts = root_options(&a.tuning, "grid")?;
    let methods = or_all(a.method, &Method::ALL);
    let globals = or_all(a.global, &Global::ALL);
    let report = run_grid(&problem, &start, &methods, &globals, &opts, a.parallel)?;
    emit(&report, a.format)?;
    Ok(Done {
        converged: report.rows.iter().all(|r| r.termcd == 1),
        strict: a.strict,
    })
}

fn cascade(a: CascadeArgs) -> UResult<Done> {
    let problem = lookup(&a.problem)?;
    let start = start_for(&problem, a.start.as_deref())?;
    let opts = root_options(&a.tuning, "cascade")?;
    let methods = or_all(a.method, &Method::ALL);
    let globals = or_all(a.global, &CASCADE_GLOBALS);
    let result = run_cascade(&problem, &start, &methods, &globals, &opts)?;
    emit(&result, a.format)?;
    Ok(Done {
        converged: result.winner.is_some(),
        strict: a.strict,
    })
}

fn compare(a: CompareArgs) -> UResult<Done> {
    let problems = a
        .problem
        .iter()
        .map(|p| lookup(p))
        .collect::<nleq_core::Result<Vec<_>>>()?;
    for p in &problems {
        check_scales(&a.tuning, p)?;
    }
    let names: Vec<String> = if a.solver.is_empty() {
        DEFAULT_COMPARE.iter().map(|s| s.to_string()).collect()
    } else {
        a.solver
    };
    let mut flags = Flags::new(&a.tuning);
    let solvers = build_solvers(&names, &a.method, &a.global, &mut flags)?;
    flags.finish(&names.join(", "))?;
    let table = run_comparison(&problems, &a.start, &solvers, a.reps)?;
    emit(&table, a.format)?;
    Ok(Done {
        converged: table.rows.iter().all(|r| r.converged),
        strict: a.strict,
    })
}

#[derive(Serialize)]
#[serde(transparent)]
struct Catalog(Vec<CatalogEntry>);

impl Render for Catalog {
    fn tables(&self) -> Vec<Table> {
        let records = self
            .0
            .iter()
            .map(|e| {
                vec![
                    e.name.clone(),
                    e.n_params.to_string(),
                    e.n_residuals.to_string(),
                    e.starts.join(" "),
                    e.has_known_solution.to_string(),
                ]
            })
            .collect();
        vec![Table {
            title: None,
            headers: vec!["Name", "Params", "Residuals", "Starts", "Solution"],
            records,
        }]
    }
}
