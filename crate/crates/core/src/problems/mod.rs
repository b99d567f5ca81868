//! Test problems and the name-keyed registry.
//!
//! Registry names:
//!
//! | name                  | unknowns | starts                       |
//! |-----------------------|----------|------------------------------|
//! | `dgv-full:<pid>`      | 8        | `x0`, `x0x10`, `x0x100`      |
//! | `dgv-reduced:<pid>`   | 6        | `x0`, `x0x10`, `x0x100`      |
//! | `simple2`             | 2        | `xstart3`, `xbasin`, `xbeyond` |
//! | `trigexp[:<n>]`       | n (500)  | `zeros`                      |
//! | `brent[:<n>]`         | n (50)   | `ones`                       |

mod dgv;
mod families;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{check_len, Error, Result};

pub use dgv::{
    dgv_full_residual, dgv_prep, dgv_reduce, dgv_reduced_residual, dgv_unreduce, DgvData,
    PROBLEM_IDS as DGV_PROBLEM_IDS, SIGMA_NAMES as DGV_SIGMA_NAMES,
};
pub use families::{brent_residual, simple2_residual, trigexp_residual};

pub const DEFAULT_TRIGEXP_N: usize = 500;
pub const DEFAULT_BRENT_N: usize = 50;

/// Residual callback: `(x, rhs) -> r(x)`.
pub type ResidualFn = dyn Fn(&[f64], &[f64]) -> Result<Vec<f64>> + Send + Sync;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedStart {
    pub name: String,
    pub x: Vec<f64>,
}

/// A named nonlinear-equations problem `r(x) = 0`.
///
/// The right-hand side is bound at construction and passed to the residual
/// callback on every evaluation, so solvers only ever see `x -> r(x)`.
#[derive(Clone)]
pub struct Problem {
    name: String,
    n_params: usize,
    n_residuals: usize,
    residual: Arc<ResidualFn>,
    rhs: Vec<f64>,
    starts: Vec<NamedStart>,
    known_solution: Option<Vec<f64>>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("n_params", &self.n_params)
            .field("n_residuals", &self.n_residuals)
            .field("rhs", &self.rhs)
            .field("starts", &self.starts)
            .field("known_solution", &self.known_solution)
            .finish_non_exhaustive()
    }
}

impl Problem {
    pub fn new<F>(name: impl Into<String>, n_params: usize, n_residuals: usize, residual: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> Result<Vec<f64>> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            n_params,
            n_residuals,
            residual: Arc::new(residual),
            rhs: Vec::new(),
            starts: Vec::new(),
            known_solution: None,
        }
    }

    pub fn with_rhs(mut self, rhs: Vec<f64>) -> Self {
        self.rhs = rhs;
        self
    }

    pub fn with_start(mut self, name: impl Into<String>, x: Vec<f64>) -> Self {
        self.starts.push(NamedStart {
            name: name.into(),
            x,
        });
        self
    }

    pub fn with_known_solution(mut self, x: Vec<f64>) -> Self {
        self.known_solution = Some(x);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn n_residuals(&self) -> usize {
        self.n_residuals
    }

    pub fn is_square(&self) -> bool {
        self.n_params == self.n_residuals
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn starts(&self) -> &[NamedStart] {
        &self.starts
    }

    pub fn known_solution(&self) -> Option<&[f64]> {
        self.known_solution.as_deref()
    }

    /// First listed start.
    pub fn default_start(&self) -> Option<&NamedStart> {
        self.starts.first()
    }

    pub fn start(&self, name: &str) -> Result<&[f64]> {
        self.starts
            .iter()
            .find(|s| s.name == name)
            .map(|s| s.x.as_slice())
            .ok_or_else(|| Error::UnknownStart {
                problem: self.name.clone(),
                start: name.to_string(),
            })
    }

    /// Evaluates `r(x)`, rejecting wrong lengths and non-finite output.
    pub fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("problem parameters", self.n_params, x.len())?;
        let r = (self.residual)(x, &self.rhs)?;
        check_len("problem residuals", self.n_residuals, r.len())?;
        if r.iter().all(|v| v.is_finite()) {
            Ok(r)
        } else {
            Err(Error::Evaluation { x: x.to_vec() })
        }
    }

    /// `sum r_i(x)^2`
    pub fn sum_squares(&self, x: &[f64]) -> Result<f64> {
        Ok(self.residual(x)?.iter().map(|v| v * v).sum())
    }

    pub fn catalog_entry(&self) -> CatalogEntry {
        CatalogEntry {
            name: self.name.clone(),
            n_params: self.n_params,
            n_residuals: self.n_residuals,
            starts: self.starts.iter().map(|s| s.name.clone()).collect(),
            has_known_solution: self.known_solution.is_some(),
        }
    }
}

/// One line of the machine-readable problem listing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub n_params: usize,
    pub n_residuals: usize,
    pub starts: Vec<String>,
    pub has_known_solution: bool,
}

pub fn dgv_full_problem(pid: &str) -> Result<Problem> {
    let data = dgv_prep(pid, false)?;
    Ok(dgv_with_starts(
        Problem::new(format!("dgv-full:{pid}"), 8, 8, dgv_full_residual),
        &data.x0,
    )
    .with_rhs(data.sigma.to_vec())
    .with_known_solution(data.xstar.to_vec()))
}

pub fn dgv_reduced_problem(pid: &str) -> Result<Problem> {
    let data = dgv_prep(pid, true)?;
    Ok(dgv_with_starts(
        Problem::new(format!("dgv-reduced:{pid}"), 6, 6, dgv_reduced_residual),
        &data.x0,
    )
    .with_rhs(data.sigma.to_vec())
    .with_known_solution(dgv_reduce(&data.xstar)?))
}

fn dgv_with_starts(problem: Problem, x0: &[f64]) -> Problem {
    let scaled = |k: f64| x0.iter().map(|v| k * v).collect::<Vec<_>>();
    problem
        .with_start("x0", x0.to_vec())
        .with_start("x0x10", scaled(10.0))
        .with_start("x0x100", scaled(100.0))
}

/// Start that traps sum-of-squares minimizers at a non-root stationary point.
pub const SIMPLE2_XSTART3: [f64; 2] = [1.48508, -1.0886e-06];
/// Start inside the basin of the root `(1, 1)`.
pub const SIMPLE2_XBASIN: [f64; 2] = [1.5, 1.5];
/// Start on the far side of the local minimum from the root.
pub const SIMPLE2_XBEYOND: [f64; 2] = [3.0, -1.5];

pub fn simple2_problem() -> Problem {
    Problem::new("simple2", 2, 2, |x, _| simple2_residual(x))
        .with_start("xstart3", SIMPLE2_XSTART3.to_vec())
        .with_start("xbasin", SIMPLE2_XBASIN.to_vec())
        .with_start("xbeyond", SIMPLE2_XBEYOND.to_vec())
        .with_known_solution(vec![1.0, 1.0])
}

pub fn trigexp_problem(n: usize) -> Result<Problem> {
    if n < 3 {
        return Err(Error::Dimension {
            context: "trigexp size (minimum 3)",
            expected: 3,
            got: n,
        });
    }
    Ok(
        Problem::new(format!("trigexp:{n}"), n, n, |x, _| trigexp_residual(x))
            .with_start("zeros", vec![0.0; n])
            .with_known_solution(vec![1.0; n]),
    )
}

pub fn brent_problem(n: usize) -> Result<Problem> {
    if n < 3 {
        return Err(Error::Dimension {
            context: "brent size (minimum 3)",
            expected: 3,
            got: n,
        });
    }
    Ok(Problem::new(format!("brent:{n}"), n, n, |x, _| brent_residual(x))
        .with_start("ones", vec![1.0; n]))
}

/// Resolves a registry name such as `dgv-full:0121a` or `trigexp:100`.
pub fn lookup(name: &str) -> Result<Problem> {
    let unknown = || Error::UnknownProblem(name.to_string());
    let (family, arg) = match name.split_once(':') {
        Some((f, a)) => (f, Some(a)),
        None => (name, None),
    };
    let size = |default: usize| -> Result<usize> {
        match arg {
            None => Ok(default),
            Some(a) => a.parse::<usize>().map_err(|_| unknown()),
        }
    };
    match family {
        "dgv-full" => dgv_full_problem(arg.ok_or_else(unknown)?).map_err(|_| unknown()),
        "dgv-reduced" => dgv_reduced_problem(arg.ok_or_else(unknown)?).map_err(|_| unknown()),
        "simple2" if arg.is_none() => Ok(simple2_problem()),
        "trigexp" => trigexp_problem(size(DEFAULT_TRIGEXP_N)?).map_err(|_| unknown()),
        "brent" => brent_problem(size(DEFAULT_BRENT_N)?).map_err(|_| unknown()),
        _ => Err(unknown()),
    }
}

/// Every registry problem at its default size.
pub fn all_problems() -> Vec<Problem> {
    let mut out = Vec::new();
    for pid in dgv::PROBLEM_IDS {
        out.push(dgv_full_problem(pid).expect("known pid"));
    }
    for pid in dgv::PROBLEM_IDS {
        out.push(dgv_reduced_problem(pid).expect("known pid"));
    }
    out.push(simple2_problem());
    out.push(trigexp_problem(DEFAULT_TRIGEXP_N).expect("valid size"));
    out.push(brent_problem(DEFAULT_BRENT_N).expect("valid size"));
    out
}

pub fn catalog() -> Vec<CatalogEntry> {
    all_problems().iter().map(Problem::catalog_entry).collect()
}
