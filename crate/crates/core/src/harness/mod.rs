//! Batch runs: the method x global grid, the first-success cascade and
//! cross-solver comparisons with timing.

mod compare;
mod format;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::thread;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::problems::Problem;
use crate::rootfind::{solve_root, Global, Method, RootOptions, RootResult, Termination};

pub use compare::{run_comparison, ComparisonRow, ComparisonTable, SolverConfig, SolverSpec, Timing};
pub use format::{num, OutputFormat, Render, Table};

/// A starting point: one of the problem's named starts or an inline vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StartPoint {
    pub name: String,
    pub x: Vec<f64>,
}

impl StartPoint {
    pub fn new(name: impl Into<String>, x: Vec<f64>) -> Self {
        Self { name: name.into(), x }
    }

    /// Resolves a start name, or a comma-separated list of reals.
    pub fn resolve(problem: &Problem, spec: &str) -> Result<Self> {
        if let Ok(x) = problem.start(spec) {
            return Ok(Self::new(spec, x.to_vec()));
        }
        let looks_numeric = spec
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_digit() || matches!(c, '-' | '+' | '.'));
        if !looks_numeric {
            return Err(Error::UnknownStart {
                problem: problem.name().to_string(),
                start: spec.to_string(),
            });
        }
        let x = parse_vector(spec)?;
        if x.len() != problem.n_params() {
            return Err(Error::Dimension {
                context: "inline start",
                expected: problem.n_params(),
                got: x.len(),
            });
        }
        Ok(Self::new(spec, x))
    }

    /// The problem's default (first) start.
    pub fn default_for(problem: &Problem) -> Result<Self> {
        problem
            .default_start()
            .map(|s| Self::new(s.name.clone(), s.x.clone()))
            .ok_or_else(|| Error::UnknownStart {
                problem: problem.name().to_string(),
                start: "<default>".into(),
            })
    }

    /// All named starts of the problem.
    pub fn all_for(problem: &Problem) -> Vec<Self> {
        problem
            .starts()
            .iter()
            .map(|s| Self::new(s.name.clone(), s.x.clone()))
            .collect()
    }
}

/// Parses `"1.5,-2,3e-4"`.
pub fn parse_vector(spec: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::InvalidOption(format!("`{t}` is not a finite number")))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRow {
    pub method: Method,
    pub global: Global,
    pub termcd: i32,
    pub fcnt: usize,
    pub jcnt: usize,
    pub iter: usize,
    pub message: String,
    /// `0.5 * sum(r^2)`; NaN when the cell failed.
    pub fnorm: f64,
    pub x: Vec<f64>,
    /// Failure detail for termcd = -1 rows raised as errors or panics.
    pub error: Option<String>,
    pub wall_us: f64,
}

impl GridRow {
    fn from_outcome(method: Method, global: Global, out: CellOutcome, wall_us: f64) -> Self {
        match out {
            Ok(r) => Self {
                method,
                global,
                termcd: r.termcd,
                fcnt: r.fcnt,
                jcnt: r.jcnt,
                iter: r.iter,
                message: r.message,
                fnorm: r.fnorm,
                x: r.x,
                error: None,
                wall_us,
            },
            Err(detail) => Self {
                method,
                global,
                termcd: Termination::EvalFailure.code(),
                fcnt: 0,
                jcnt: 0,
                iter: 0,
                message: Termination::EvalFailure.message().to_string(),
                fnorm: f64::NAN,
                x: Vec::new(),
                error: Some(detail),
                wall_us,
            },
        }
    }

    /// Equality of everything except the wall time.
    pub fn same_result(&self, other: &GridRow) -> bool {
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        self.method == other.method
            && self.global == other.global
            && self.termcd == other.termcd
            && self.fcnt == other.fcnt
            && self.jcnt == other.jcnt
            && self.iter == other.iter
            && self.message == other.message
            && self.fnorm.to_bits() == other.fnorm.to_bits()
            && bits(&self.x) == bits(&other.x)
            && self.error == other.error
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridReport {
    pub problem: String,
    pub start: String,
    pub rows: Vec<GridRow>,
}

impl GridReport {
    pub fn same_results(&self, other: &GridReport) -> bool {
        self.problem == other.problem
            && self.start == other.start
            && self.rows.len() == other.rows.len()
            && self.rows.iter().zip(&other.rows).all(|(a, b)| a.same_result(b))
    }
}

type CellOutcome = std::result::Result<RootResult, String>;

/// Runs one solve, turning errors and panics into a failure description.
fn run_cell(problem: &Problem, x0: &[f64], opts: &RootOptions) -> (CellOutcome, f64) {
    let t = Instant::now();
    let out = catch_unwind(AssertUnwindSafe(|| solve_root(problem, x0, opts)));
    let wall_us = t.elapsed().as_secs_f64() * 1e6;
    let out = match out {
        Ok(Ok(r)) => Ok(r),
        Ok(Err(e)) => Err(e.to_string()),
        Err(payload) => Err(panic_text(payload.as_ref())),
    };
    (out, wall_us)
}

pub(crate) fn panic_text(payload: &(dyn std::any::Any + Send)) -> String {
    let text = payload
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".into());
    format!("panic: {text}")
}

fn require_square(problem: &Problem) -> Result<()> {
    if problem.is_square() {
        Ok(())
    } else {
        Err(Error::Dimension {
            context: "root finding needs a square system",
            expected: problem.n_params(),
            got: problem.n_residuals(),
        })
    }
}

/// Runs every (method, global) pair, methods outer. `opts` supplies the
/// tolerances, budget and Jacobian scheme; its method/global are overridden.
///
/// With `parallel` the cells run on scoped threads; rows keep request order.
pub fn run_grid(
    problem: &Problem,
    start: &StartPoint,
    methods: &[Method],
    globals: &[Global],
    opts: &RootOptions,
    parallel: bool,
) -> Result<GridReport> {
    require_square(problem)?;
    if methods.is_empty() || globals.is_empty() {
        return Err(Error::EmptyRequest("grid needs at least one method and one global"));
    }
    opts.validate()?;
    let cells: Vec<(Method, Global)> = methods
        .iter()
        .flat_map(|&m| globals.iter().map(move |&g| (m, g)))
        .collect();
    let cell_opts = |m, g| RootOptions {
        method: m,
        global: g,
        ..*opts
    };

    let outcomes: Vec<(CellOutcome, f64)> = if parallel {
        thread::scope(|scope| {
            let handles: Vec<_> = cells
                .iter()
                .map(|&(m, g)| {
                    let o = cell_opts(m, g);
                    scope.spawn(move || run_cell(problem, &start.x, &o))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or_else(|p| (Err(panic_text(p.as_ref())), 0.0)))
                .collect()
        })
    } else {
        cells
            .iter()
            .map(|&(m, g)| run_cell(problem, &start.x, &cell_opts(m, g)))
            .collect()
    };

    let rows = cells
        .into_iter()
        .zip(outcomes)
        .map(|((m, g), (out, us))| GridRow::from_outcome(m, g, out, us))
        .collect();
    Ok(GridReport {
        problem: problem.name().to_string(),
        start: start.name.clone(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CascadeAttempt {
    pub method: Method,
    pub global: Global,
    pub termcd: i32,
    /// `sum(r^2)` at the returned point; NaN for failed attempts.
    pub sumsq: f64,
}

/// Default cascade trial order for globals.
pub const CASCADE_GLOBALS: [Global; 7] = [
    Global::Qline,
    Global::Cline,
    Global::Gline,
    Global::Pwldog,
    Global::Dbldog,
    Global::Hook,
    Global::None,
];

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeResult {
    pub problem: String,
    pub start: String,
    pub winner: Option<(Method, Global)>,
    pub result: Option<RootResult>,
    pub trace: Vec<CascadeAttempt>,
}

impl CascadeResult {
    pub fn sumsq(&self) -> Option<f64> {
        self.result.as_ref().map(RootResult::sum_squares)
    }
}

#[derive(Serialize)]
struct Winner {
    method: Method,
    global: Global,
}

impl Serialize for CascadeResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CascadeResult", 6)?;
        st.serialize_field("problem", &self.problem)?;
        st.serialize_field("start", &self.start)?;
        st.serialize_field(
            "winner",
            &self.winner.map(|(method, global)| Winner { method, global }),
        )?;
        st.serialize_field("sumsq", &self.sumsq())?;
        st.serialize_field("result", &self.result)?;
        st.serialize_field("trace", &self.trace)?;
        st.end()
    }
}

/// Tries methods (outer) x globals (inner) in order and stops at the first
/// run with termcd = 1.
pub fn run_cascade(
    problem: &Problem,
    start: &StartPoint,
    methods: &[Method],
    globals: &[Global],
    opts: &RootOptions,
) -> Result<CascadeResult> {
    require_square(problem)?;
    opts.validate()?;
    let mut trace = Vec::new();
    for &method in methods {
        for &global in globals {
            let o = RootOptions {
                method,
                global,
                ..*opts
            };
            let (out, _) = run_cell(problem, &start.x, &o);
            let (termcd, sumsq) = match &out {
                Ok(r) => (r.termcd, r.sum_squares()),
                Err(_) => (Termination::EvalFailure.code(), f64::NAN),
            };
            trace.push(CascadeAttempt {
                method,
                global,
                termcd,
                sumsq,
            });
            if let Ok(r) = out {
                if r.converged() {
                    return Ok(CascadeResult {
                        problem: problem.name().to_string(),
                        start: start.name.clone(),
                        winner: Some((method, global)),
                        result: Some(r),
                        trace,
                    });
                }
            }
        }
    }
    Ok(CascadeResult {
        problem: problem.name().to_string(),
        start: start.name.clone(),
        winner: None,
        result: None,
        trace,
    })
}
