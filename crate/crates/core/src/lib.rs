//! Solvers for systems of nonlinear equations `r(x) = 0`: Newton and Broyden
//! with line-search and trust-region globalization, the DF-SANE spectral
//! residual method, Levenberg-Marquardt least squares and sum-of-squares
//! minimizers, plus a set of test problems and a benchmarking harness.

pub mod diff;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod lsq;
pub mod minimize;
pub mod problems;
pub mod rootfind;
pub mod spectral;

pub use diff::{FdScheme, JacobianScheme};
pub use error::{Error, Result};
pub use harness::{
    run_cascade, run_comparison, run_grid, CascadeResult, ComparisonTable, GridReport, OutputFormat,
    Render, SolverConfig, SolverSpec, StartPoint,
};
pub use lsq::{solve_lsq, LsqOptions, LsqResult};
pub use minimize::{minimize, sumsq, GradientSource, MinMethod, MinimizeOptions, MinimizeResult, ScaledObjective};
pub use problems::{lookup, Problem};
pub use rootfind::{solve_root, Global, Method, RootOptions, RootResult};
pub use spectral::{solve_spectral, solve_spectral_accelerated, SpectralOptions, SpectralResult};
