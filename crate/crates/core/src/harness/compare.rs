use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use serde::Serialize;

use super::{panic_text, StartPoint};
use crate::error::{Error, Result};
use crate::lsq::{solve_lsq, LsqOptions};
use crate::minimize::{minimize, MinimizeOptions, ScaledObjective};
use crate::problems::Problem;
use crate::rootfind::{solve_root, RootOptions};
use crate::spectral::{solve_spectral, SpectralOptions};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum SolverConfig {
    Root(RootOptions),
    Spectral(SpectralOptions),
    Lsq(LsqOptions),
    Minimize {
        options: MinimizeOptions,
        rscale: Option<Vec<f64>>,
    },
}

/// A configured solver with the label used in tables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverSpec {
    pub label: String,
    pub config: SolverConfig,
}

impl SolverSpec {
    pub fn new(label: impl Into<String>, config: SolverConfig) -> Self {
        Self {
            label: label.into(),
            config,
        }
    }

    pub fn root(opts: RootOptions) -> Self {
        let label = format!("{}/{}", opts.method.to_string().to_lowercase(), opts.global);
        Self::new(label, SolverConfig::Root(opts))
    }

    pub fn spectral(opts: SpectralOptions) -> Self {
        let label = if opts.acceleration {
            format!("dfsane-acc{}", opts.history)
        } else {
            "dfsane".to_string()
        };
        Self::new(label, SolverConfig::Spectral(opts))
    }

    pub fn lsq(opts: LsqOptions) -> Self {
        Self::new("lm", SolverConfig::Lsq(opts))
    }

    pub fn minimizer(options: MinimizeOptions, rscale: Option<Vec<f64>>) -> Self {
        let mut label = options.method.to_string();
        if options.parscale.is_some() {
            label.push_str("+parscale");
        }
        if rscale.is_some() {
            label.push_str("+rscale");
        }
        Self::new(label, SolverConfig::Minimize { options, rscale })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub problem: String,
    pub start: String,
    pub solver: String,
    /// `sum(r^2)` of the problem's own residuals at `x`, recomputed here;
    /// NaN when the run failed.
    pub sumsq: f64,
    pub converged: bool,
    pub fevals: usize,
    pub iterations: usize,
    pub message: String,
    pub x: Vec<f64>,
    /// Jacobian singular values at `x`, descending (lm rows only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub singvals: Option<Vec<f64>>,
    pub error: Option<String>,
    pub wall_us: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub problem: String,
    pub start: String,
    pub solver: String,
    pub reps: usize,
    pub min_us: f64,
    pub mean_us: f64,
    pub max_us: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
    pub timing: Vec<Timing>,
}

struct Solved {
    x: Vec<f64>,
    converged: bool,
    fevals: usize,
    iterations: usize,
    message: String,
    singvals: Option<Vec<f64>>,
}

fn solve_once(problem: &Problem, x0: &[f64], config: &SolverConfig) -> Result<Solved> {
    Ok(match config {
        SolverConfig::Root(o) => {
            let r = solve_root(problem, x0, o)?;
            Solved {
                converged: r.converged(),
                fevals: r.fcnt,
                iterations: r.iter,
                message: r.message,
                x: r.x,
                singvals: None,
            }
        }
        SolverConfig::Spectral(o) => {
            let r = solve_spectral(problem, x0, o)?;
            Solved {
                converged: r.converged,
                fevals: r.fevals,
                iterations: r.iterations,
                message: r.message,
                x: r.x,
                singvals: None,
            }
        }
        SolverConfig::Lsq(o) => {
            let r = solve_lsq(problem, x0, o)?;
            Solved {
                converged: r.converged,
                fevals: r.fn_evals,
                iterations: r.iterations,
                message: r.message,
                x: r.x,
                singvals: Some(r.singvals),
            }
        }
        SolverConfig::Minimize { options, rscale } => {
            let obj = match rscale {
                Some(w) => ScaledObjective::with_rscale(problem, w.clone())?,
                None => ScaledObjective::new(problem),
            };
            let r = minimize(&obj, x0, options)?;
            Solved {
                converged: r.converged,
                fevals: r.fevals,
                iterations: r.iterations,
                message: r.message,
                x: r.x,
                singvals: None,
            }
        }
    })
}

fn guarded(problem: &Problem, x0: &[f64], config: &SolverConfig) -> std::result::Result<Solved, String> {
    match catch_unwind(AssertUnwindSafe(|| solve_once(problem, x0, config))) {
        Ok(Ok(s)) => Ok(s),
        Ok(Err(e)) => Err(e.to_string()),
        Err(p) => Err(panic_text(p.as_ref())),
    }
}

/// Runs every solver from every start of every problem.
///
/// `starts` holds start specs (names or inline vectors) resolved per
/// problem; empty means all named starts. With `reps > 0` each cell is also
/// timed over `reps` further runs.
pub fn run_comparison(
    problems: &[Problem],
    starts: &[String],
    solvers: &[SolverSpec],
    reps: usize,
) -> Result<ComparisonTable> {
    if problems.is_empty() || solvers.is_empty() {
        return Err(Error::EmptyRequest("comparison needs at least one problem and one solver"));
    }
    let mut rows = Vec::new();
    let mut timing = Vec::new();
    for problem in problems {
        let points = if starts.is_empty() {
            StartPoint::all_for(problem)
        } else {
            starts
                .iter()
                .map(|s| StartPoint::resolve(problem, s))
                .collect::<Result<Vec<_>>>()?
        };
        for solver in solvers {
            for start in &points {
                let t = Instant::now();
                let out = guarded(problem, &start.x, &solver.config);
                let wall_us = t.elapsed().as_secs_f64() * 1e6;
                rows.push(make_row(problem, start, solver, out, wall_us));
                if reps > 0 {
                    let mut us = Vec::with_capacity(reps);
                    for _ in 0..reps {
                        let t = Instant::now();
                        let _ = guarded(problem, &start.x, &solver.config);
                        us.push(t.elapsed().as_secs_f64() * 1e6);
                    }
                    timing.push(Timing {
                        problem: problem.name().to_string(),
                        start: start.name.clone(),
                        solver: solver.label.clone(),
                        reps,
                        min_us: us.iter().copied().fold(f64::INFINITY, f64::min),
                        mean_us: us.iter().sum::<f64>() / reps as f64,
                        max_us: us.iter().copied().fold(0.0, f64::max),
                    });
                }
            }
        }
    }
    Ok(ComparisonTable { rows, timing })
}

fn make_row(
    problem: &Problem,
    start: &StartPoint,
    solver: &SolverSpec,
    out: std::result::Result<Solved, String>,
    wall_us: f64,
) -> ComparisonRow {
    let base = |sumsq, converged, fevals, iterations, message, x, singvals, error| ComparisonRow {
        problem: problem.name().to_string(),
        start: start.name.clone(),
        solver: solver.label.clone(),
        sumsq,
        converged,
        fevals,
        iterations,
        message,
        x,
        singvals,
        error,
        wall_us,
    };
    match out {
        Ok(s) => match problem.sum_squares(&s.x) {
            Ok(ss) => base(ss, s.converged, s.fevals, s.iterations, s.message, s.x, s.singvals, None),
            Err(e) => {
                let err = Some(e.to_string());
                base(f64::NAN, false, s.fevals, s.iterations, s.message, s.x, s.singvals, err)
            }
        },
        Err(e) => base(f64::NAN, false, 0, 0, "Failed".into(), Vec::new(), None, Some(e)),
    }
}
