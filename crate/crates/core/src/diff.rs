//! Finite-difference Jacobians and gradients.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FdScheme {
    Forward,
    Backward,
    Central,
}

impl FdScheme {
    /// Relative step balancing truncation and roundoff error for the scheme.
    pub fn default_step(self) -> f64 {
        match self {
            FdScheme::Forward | FdScheme::Backward => f64::EPSILON.sqrt(),
            FdScheme::Central => f64::EPSILON.cbrt(),
        }
    }
}

impl fmt::Display for FdScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FdScheme::Forward => "forward",
            FdScheme::Backward => "backward",
            FdScheme::Central => "central",
        })
    }
}

impl FromStr for FdScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forward" => Ok(FdScheme::Forward),
            "backward" => Ok(FdScheme::Backward),
            "central" => Ok(FdScheme::Central),
            other => Err(Error::InvalidOption(format!(
                "unknown difference scheme `{other}`"
            ))),
        }
    }
}

/// Difference scheme plus the relative step `h_j = step * max(|x_j|, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobianScheme {
    pub scheme: FdScheme,
    step: f64,
}

impl JacobianScheme {
    pub fn new(scheme: FdScheme) -> Self {
        Self {
            scheme,
            step: scheme.default_step(),
        }
    }

    pub fn forward() -> Self {
        Self::new(FdScheme::Forward)
    }

    pub fn backward() -> Self {
        Self::new(FdScheme::Backward)
    }

    pub fn central() -> Self {
        Self::new(FdScheme::Central)
    }

    pub fn with_step(scheme: FdScheme, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidOption(format!(
                "finite-difference step must be positive, got {step}"
            )));
        }
        Ok(Self { scheme, step })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Number of function evaluations one Jacobian costs, given `f(x)`.
    pub fn evals_per_jacobian(&self, n: usize) -> usize {
        match self.scheme {
            FdScheme::Central => 2 * n,
            _ => n,
        }
    }

    fn perturbation(&self, xj: f64) -> f64 {
        self.step * xj.abs().max(1.0)
    }
}

impl Default for JacobianScheme {
    fn default() -> Self {
        Self::central()
    }
}

fn finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Finite-difference Jacobian of `f` at `x`, where `fx = f(x)` is already
/// known. Column `j` approximates `df/dx_j`.
pub fn fd_jacobian_at<F>(f: F, x: &[f64], fx: &[f64], scheme: JacobianScheme) -> Result<Matrix>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = x.len();
    let m = fx.len();
    let mut jac = Matrix::zeros(m, n);
    let mut xp = x.to_vec();
    let eval = |xp: &[f64], column: usize| -> Result<Vec<f64>> {
        match f(xp) {
            Ok(v) if v.len() == m && finite(&v) => Ok(v),
            _ => Err(Error::FdEvaluation { column }),
        }
    };
    for j in 0..n {
        let xj = x[j];
        let h = scheme.perturbation(xj);
        let col: Vec<f64> = match scheme.scheme {
            FdScheme::Forward => {
                xp[j] = xj + h;
                let dh = xp[j] - xj;
                let fp = eval(&xp, j)?;
                fp.iter().zip(fx).map(|(a, b)| (a - b) / dh).collect()
            }
            FdScheme::Backward => {
                xp[j] = xj - h;
                let dh = xj - xp[j];
                let fm = eval(&xp, j)?;
                fx.iter().zip(&fm).map(|(a, b)| (a - b) / dh).collect()
            }
            FdScheme::Central => {
                xp[j] = xj + h;
                let up = xp[j];
                let fp = eval(&xp, j)?;
                xp[j] = xj - h;
                let dh = up - xp[j];
                let fm = eval(&xp, j)?;
                fp.iter().zip(&fm).map(|(a, b)| (a - b) / dh).collect()
            }
        };
        xp[j] = xj;
        jac.set_column(j, &col);
    }
    Ok(jac)
}

/// Finite-difference Jacobian of `f` at `x`.
pub fn fd_jacobian<F>(f: F, x: &[f64], scheme: JacobianScheme) -> Result<Matrix>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let fx = f(x)?;
    if !finite(&fx) {
        return Err(Error::Evaluation { x: x.to_vec() });
    }
    fd_jacobian_at(f, x, &fx, scheme)
}

/// Finite-difference gradient of a scalar function.
pub fn fd_gradient<G>(g: G, x: &[f64], scheme: JacobianScheme) -> Result<Vec<f64>>
where
    G: Fn(&[f64]) -> Result<f64>,
{
    let wrapped = |z: &[f64]| g(z).map(|v| vec![v]);
    let jac = fd_jacobian(wrapped, x, scheme)?;
    Ok(jac.row(0).to_vec())
}

/// As [`fd_gradient`] with `g(x)` already known.
pub fn fd_gradient_at<G>(g: G, x: &[f64], gx: f64, scheme: JacobianScheme) -> Result<Vec<f64>>
where
    G: Fn(&[f64]) -> Result<f64>,
{
    let wrapped = |z: &[f64]| g(z).map(|v| vec![v]);
    let jac = fd_jacobian_at(wrapped, x, &[gx], scheme)?;
    Ok(jac.row(0).to_vec())
}
