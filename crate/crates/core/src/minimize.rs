//! Sum-of-squares objectives and unconstrained minimizers: variable metric
//! (BFGS), nonlinear conjugate gradients (Polak-Ribiere+) and Nelder-Mead.
//!
//! All methods work in scaled coordinates `z = x / parscale` and report `x`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diff::{fd_gradient, fd_gradient_at, fd_jacobian_at, FdScheme, JacobianScheme};
use crate::error::{check_len, Error, Result};
use crate::linalg::{dot, norm2, norm_inf, sum_squares, Matrix};
use crate::problems::Problem;

const ARMIJO: f64 = 1e-4;
const CURVATURE_SKIP: f64 = 1e-10;

/// `sum((rscale_i * r_i(x))^2)`, or plain `sum(r_i^2)` without `rscale`.
pub fn sumsq(problem: &Problem, x: &[f64], rscale: Option<&[f64]>) -> Result<f64> {
    let r = problem.residual(x)?;
    match rscale {
        None => Ok(r.iter().map(|v| v * v).sum()),
        Some(w) => {
            check_len("rscale", r.len(), w.len())?;
            Ok(r.iter().zip(w).map(|(v, s)| (s * v) * (s * v)).sum())
        }
    }
}

/// A problem's sum of squares with optional residual multipliers.
#[derive(Clone)]
pub struct ScaledObjective<'a> {
    problem: &'a Problem,
    rscale: Option<Vec<f64>>,
}

impl<'a> ScaledObjective<'a> {
    pub fn new(problem: &'a Problem) -> Self {
        Self {
            problem,
            rscale: None,
        }
    }

    pub fn with_rscale(problem: &'a Problem, rscale: Vec<f64>) -> Result<Self> {
        check_len("rscale", problem.n_residuals(), rscale.len())?;
        if rscale.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidOption("rscale entries must be finite".into()));
        }
        Ok(Self {
            problem,
            rscale: Some(rscale),
        })
    }

    pub fn problem(&self) -> &Problem {
        self.problem
    }

    pub fn rscale(&self) -> Option<&[f64]> {
        self.rscale.as_deref()
    }

    pub fn n_params(&self) -> usize {
        self.problem.n_params()
    }

    /// Residuals multiplied by `rscale`.
    pub fn weighted_residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut r = self.problem.residual(x)?;
        if let Some(w) = &self.rscale {
            r.iter_mut().zip(w).for_each(|(v, s)| *v *= s);
        }
        Ok(r)
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        let v = sum_squares(&self.weighted_residual(x)?);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation { x: x.to_vec() })
        }
    }

    /// Finite-difference gradient of the scalar objective.
    pub fn gradient(&self, x: &[f64], scheme: JacobianScheme) -> Result<Vec<f64>> {
        fd_gradient(|v: &[f64]| self.value(v), x, scheme)
    }

    /// `2 J^T r` with a finite-difference Jacobian of the weighted residuals.
    pub fn jtr_gradient(&self, x: &[f64], scheme: JacobianScheme) -> Result<Vec<f64>> {
        let r = self.weighted_residual(x)?;
        let jac = fd_jacobian_at(|v: &[f64]| self.weighted_residual(v), x, &r, scheme)?;
        Ok(jac.tr_matvec(&r).iter().map(|g| 2.0 * g).collect())
    }
}

/// Where minimizer gradients come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GradientSource {
    /// Differences of the scalar sum of squares.
    #[default]
    Objective,
    /// `2 J^T r` from differences of the residual vector.
    Residuals,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MinMethod {
    Vm,
    Cg,
    NelderMead,
}

impl MinMethod {
    pub const ALL: [MinMethod; 3] = [MinMethod::Vm, MinMethod::Cg, MinMethod::NelderMead];

    pub fn as_str(self) -> &'static str {
        match self {
            MinMethod::Vm => "vm",
            MinMethod::Cg => "cg",
            MinMethod::NelderMead => "neldermead",
        }
    }
}

impl fmt::Display for MinMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MinMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MinMethod::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidOption(format!("unknown minimizer `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOptions {
    pub method: MinMethod,
    pub gradient: JacobianScheme,
    pub gradient_source: GradientSource,
    pub parscale: Option<Vec<f64>>,
    pub max_iter: usize,
    pub max_feval: usize,
    /// Gradient tolerance; `None` means `1e-10 * sqrt(n)`.
    pub gtol: Option<f64>,
    /// Nelder-Mead stops once the simplex diameter (max-norm, scaled
    /// coordinates) is at most this.
    pub simplex_tol: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            method: MinMethod::Vm,
            gradient: default_gradient_scheme(),
            gradient_source: GradientSource::Objective,
            parscale: None,
            max_iter: 20000,
            max_feval: 25000,
            gtol: None,
            simplex_tol: 1e-10,
        }
    }
}

/// Central differences with a 1e-7 step, relative for `|x_j| > 1`.
pub fn default_gradient_scheme() -> JacobianScheme {
    JacobianScheme::with_step(FdScheme::Central, 1e-7).expect("valid step")
}

impl MinimizeOptions {
    pub fn new(method: MinMethod) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }

    pub fn gtol_for(&self, n: usize) -> f64 {
        self.gtol.unwrap_or(1e-10 * (n as f64).sqrt())
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if let Some(ps) = &self.parscale {
            check_len("parscale", n, ps.len())?;
            if ps.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(Error::InvalidOption(
                    "parscale entries must be strictly positive".into(),
                ));
            }
        }
        if self.max_iter == 0 || self.max_feval == 0 {
            return Err(Error::InvalidOption("budgets must be positive".into()));
        }
        if !(self.gtol_for(n) > 0.0) || !(self.simplex_tol > 0.0) {
            return Err(Error::InvalidOption("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// One accepted line-search step (scaled coordinates).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineStep {
    pub f_before: f64,
    pub f_after: f64,
    pub t: f64,
    /// Directional derivative `g^T d` at the start of the step.
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizeResult {
    pub method: MinMethod,
    pub x: Vec<f64>,
    /// Objective value at `x` (including any residual scaling).
    pub value: f64,
    pub iterations: usize,
    pub fevals: usize,
    pub gevals: usize,
    pub converged: bool,
    /// Max-norm of the finite-difference objective gradient in `x`.
    pub kkt_grad_norm: f64,
    pub message: String,
    #[serde(skip)]
    pub line_steps: Vec<LineStep>,
}

/// The objective seen in scaled coordinates, with evaluation counting.
struct Scaled<'a, 'b> {
    obj: &'b ScaledObjective<'a>,
    parscale: Vec<f64>,
    scheme: JacobianScheme,
    source: GradientSource,
    fevals: usize,
    gevals: usize,
    max_feval: usize,
}

impl Scaled<'_, '_> {
    fn to_x(&self, z: &[f64]) -> Vec<f64> {
        z.iter().zip(&self.parscale).map(|(a, b)| a * b).collect()
    }

    fn value(&mut self, z: &[f64]) -> Result<f64> {
        self.fevals += 1;
        self.obj.value(&self.to_x(z))
    }

    /// Value at a trial point; non-finite values count as `+inf` so the
    /// caller backtracks or discards the point.
    fn trial_value(&mut self, z: &[f64]) -> Result<f64> {
        match self.value(z) {
            Err(Error::Evaluation { .. }) => Ok(f64::INFINITY),
            other => other,
        }
    }

    /// Gradient in scaled coordinates.
    fn gradient(&mut self, z: &[f64], fz: f64) -> Result<Vec<f64>> {
        self.gevals += 1;
        match self.source {
            GradientSource::Objective => {
                let obj = self.obj;
                let ps = &self.parscale;
                fd_gradient_at(
                    |w: &[f64]| {
                        let x: Vec<f64> = w.iter().zip(ps).map(|(a, b)| a * b).collect();
                        obj.value(&x)
                    },
                    z,
                    fz,
                    self.scheme,
                )
            }
            // Chain rule: d/dz = parscale * d/dx.
            GradientSource::Residuals => {
                let g = self.obj.jtr_gradient(&self.to_x(z), self.scheme)?;
                Ok(g.iter().zip(&self.parscale).map(|(a, b)| a * b).collect())
            }
        }
    }

    fn out_of_budget(&self) -> bool {
        self.fevals >= self.max_feval
    }
}

struct Outcome {
    z: Vec<f64>,
    value: f64,
    iterations: usize,
    converged: bool,
    message: &'static str,
    line_steps: Vec<LineStep>,
}

/// Minimizes the objective from `x0`.
///
/// Budget exhaustion and stalled line searches end the run normally with
/// `converged = false`. Trial points with a non-finite objective are
/// rejected; a non-finite value at the start or inside a gradient evaluation
/// is an evaluation error.
pub fn minimize(obj: &ScaledObjective, x0: &[f64], opts: &MinimizeOptions) -> Result<MinimizeResult> {
    let n = obj.n_params();
    opts.validate(n)?;
    check_len("starting point", n, x0.len())?;
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Evaluation { x: x0.to_vec() });
    }
    let parscale = opts.parscale.clone().unwrap_or_else(|| vec![1.0; n]);
    let z0: Vec<f64> = x0.iter().zip(&parscale).map(|(a, b)| a / b).collect();
    let mut sc = Scaled {
        obj,
        parscale,
        scheme: opts.gradient,
        source: opts.gradient_source,
        fevals: 0,
        gevals: 0,
        max_feval: opts.max_feval,
    };
    let gtol = opts.gtol_for(n);
    let out = match opts.method {
        MinMethod::Vm => variable_metric(&mut sc, z0, opts.max_iter, gtol)?,
        MinMethod::Cg => conjugate_gradient(&mut sc, z0, opts.max_iter, gtol)?,
        MinMethod::NelderMead => nelder_mead(&mut sc, z0, opts.max_iter, opts.simplex_tol)?,
    };
    let x = sc.to_x(&out.z);
    let kkt = obj.gradient(&x, opts.gradient)?;
    Ok(MinimizeResult {
        method: opts.method,
        x,
        value: out.value,
        iterations: out.iterations,
        fevals: sc.fevals,
        gevals: sc.gevals,
        converged: out.converged,
        kkt_grad_norm: norm_inf(&kkt),
        message: out.message.to_string(),
        line_steps: out.line_steps,
    })
}

fn gradient_small(g: &[f64], f: f64, gtol: f64) -> bool {
    norm_inf(g) <= gtol * (1.0 + f.abs())
}

/// Backtracking Armijo search along `d`. Returns the accepted point, or
/// `None` when the step shrinks to nothing or the budget runs out.
fn armijo(
    sc: &mut Scaled,
    z: &[f64],
    f: f64,
    d: &[f64],
    slope: f64,
    t0: f64,
) -> Result<Option<(Vec<f64>, f64, f64)>> {
    let mut t = t0;
    loop {
        if sc.out_of_budget() {
            return Ok(None);
        }
        let trial: Vec<f64> = z.iter().zip(d).map(|(a, b)| a + t * b).collect();
        if trial == z {
            return Ok(None);
        }
        let ft = sc.trial_value(&trial)?;
        if ft <= f + ARMIJO * t * slope {
            return Ok(Some((trial, ft, t)));
        }
        // Quadratic model minimizer, kept within [0.1, 0.5] of the current step.
        let q = -slope * t * t / (2.0 * (ft - f - slope * t));
        t = if q.is_finite() {
            q.clamp(0.1 * t, 0.5 * t)
        } else {
            0.5 * t
        };
    }
}

fn variable_metric(sc: &mut Scaled, mut z: Vec<f64>, max_iter: usize, gtol: f64) -> Result<Outcome> {
    let n = z.len();
    let mut f = sc.value(&z)?;
    let mut g = sc.gradient(&z, f)?;
    let mut h = Matrix::identity(n);
    let mut fresh = true;
    let mut steps = Vec::new();
    let done = |z, f, it, conv, msg, steps| Outcome {
        z,
        value: f,
        iterations: it,
        converged: conv,
        message: msg,
        line_steps: steps,
    };

    for iter in 0..max_iter {
        if gradient_small(&g, f, gtol) {
            return Ok(done(z, f, iter, true, "Gradient below tolerance", steps));
        }
        let mut d: Vec<f64> = h.matvec(&g).iter().map(|v| -v).collect();
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            h = Matrix::identity(n);
            fresh = true;
            d = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        let Some((z_new, f_new, t)) = armijo(sc, &z, f, &d, slope, 1.0)? else {
            if sc.out_of_budget() {
                return Ok(done(z, f, iter, false, "Function evaluation limit reached", steps));
            }
            if fresh {
                return Ok(done(z, f, iter, false, "Line search stalled", steps));
            }
            h = Matrix::identity(n);
            fresh = true;
            continue;
        };
        steps.push(LineStep {
            f_before: f,
            f_after: f_new,
            t,
            slope,
        });
        let g_new = sc.gradient(&z_new, f_new)?;
        let s: Vec<f64> = z_new.iter().zip(&z).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > CURVATURE_SKIP * norm2(&s) * norm2(&y) {
            bfgs_inverse_update(&mut h, &s, &y, sy);
            fresh = false;
        }
        z = z_new;
        f = f_new;
        g = g_new;
    }
    let conv = gradient_small(&g, f, gtol);
    Ok(done(z, f, max_iter, conv, "Iteration limit reached", steps))
}

/// `H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T`, `rho = 1 / s^T y`.
fn bfgs_inverse_update(h: &mut Matrix, s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let hy = h.matvec(y);
    let yhy = dot(y, &hy);
    let coef = (1.0 + rho * yhy) * rho;
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] += coef * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
    // Restore exact symmetry lost to roundoff.
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (h[(i, j)] + h[(j, i)]);
            h[(i, j)] = avg;
            h[(j, i)] = avg;
        }
    }
}

fn conjugate_gradient(sc: &mut Scaled, mut z: Vec<f64>, max_iter: usize, gtol: f64) -> Result<Outcome> {
    let n = z.len();
    let mut f = sc.value(&z)?;
    let mut g = sc.gradient(&z, f)?;
    let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
    let mut since_restart = 0usize;
    let mut prev: Option<(f64, f64)> = None; // (t, slope) of the last step
    let mut restarted = true;
    let mut steps = Vec::new();

    for iter in 0..max_iter {
        if gradient_small(&g, f, gtol) {
            return Ok(Outcome {
                z,
                value: f,
                iterations: iter,
                converged: true,
                message: "Gradient below tolerance",
                line_steps: steps,
            });
        }
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) || since_restart >= n {
            d = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
            since_restart = 0;
            restarted = true;
        }
        let t0 = match prev {
            Some((t, s)) => (t * s / slope).clamp(1e-20, 1e20),
            None => 1.0,
        };
        let Some((z_new, f_new, t)) = armijo(sc, &z, f, &d, slope, t0)? else {
            let msg = if sc.out_of_budget() {
                "Function evaluation limit reached"
            } else if restarted {
                "Line search stalled"
            } else {
                d = g.iter().map(|v| -v).collect();
                since_restart = 0;
                restarted = true;
                prev = None;
                continue;
            };
            return Ok(Outcome {
                z,
                value: f,
                iterations: iter,
                converged: false,
                message: msg,
                line_steps: steps,
            });
        };
        steps.push(LineStep {
            f_before: f,
            f_after: f_new,
            t,
            slope,
        });
        let g_new = sc.gradient(&z_new, f_new)?;
        let gg = dot(&g, &g);
        let beta = if gg > 0.0 {
            let diff: f64 = g_new.iter().zip(&g).map(|(a, b)| a * (a - b)).sum();
            (diff / gg).max(0.0)
        } else {
            0.0
        };
        d = g_new.iter().zip(&d).map(|(gi, di)| -gi + beta * di).collect();
        prev = Some((t, slope));
        since_restart += 1;
        restarted = false;
        z = z_new;
        f = f_new;
        g = g_new;
    }
    let conv = gradient_small(&g, f, gtol);
    Ok(Outcome {
        z,
        value: f,
        iterations: max_iter,
        converged: conv,
        message: "Iteration limit reached",
        line_steps: steps,
    })
}

/// Max-norm distance from the best vertex to the others.
fn simplex_diameter(simplex: &[(Vec<f64>, f64)]) -> f64 {
    let best = &simplex[0].0;
    simplex[1..]
        .iter()
        .map(|(v, _)| v.iter().zip(best).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
}

fn nelder_mead(sc: &mut Scaled, z0: Vec<f64>, max_iter: usize, size_tol: f64) -> Result<Outcome> {
    let n = z0.len();
    let f0 = sc.value(&z0)?;
    let mut simplex = vec![(z0.clone(), f0)];
    for i in 0..n {
        let mut v = z0.clone();
        v[i] += 0.1 * z0[i].abs().max(1.0);
        let fv = sc.value(&v)?;
        simplex.push((v, fv));
    }
    // Stable sort: equal values keep the lower index first.
    let order = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));
    order(&mut simplex);

    let point = |c: &[f64], w: &[f64], k: f64| -> Vec<f64> {
        c.iter().zip(w).map(|(a, b)| a + k * (b - a)).collect()
    };
    let mut iter = 0;
    let (converged, message) = loop {
        if simplex_diameter(&simplex) <= size_tol {
            break (true, "Simplex size below tolerance");
        }
        if iter >= max_iter {
            break (false, "Iteration limit reached");
        }
        if sc.out_of_budget() {
            break (false, "Function evaluation limit reached");
        }
        iter += 1;
        let mut centroid = vec![0.0; n];
        for (v, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let (worst, f_worst) = simplex[n].clone();
        let reflected = point(&centroid, &worst, -1.0);
        let f_r = sc.trial_value(&reflected)?;
        if f_r < simplex[0].1 {
            let expanded = point(&centroid, &worst, -2.0);
            let f_e = sc.trial_value(&expanded)?;
            simplex[n] = if f_e < f_r {
                (expanded, f_e)
            } else {
                (reflected, f_r)
            };
        } else if f_r < simplex[n - 1].1 {
            simplex[n] = (reflected, f_r);
        } else {
            // Outside contraction if the reflection helped at all, else inside.
            let target = if f_r < f_worst {
                point(&centroid, &worst, -0.5)
            } else {
                point(&centroid, &worst, 0.5)
            };
            let f_c = sc.trial_value(&target)?;
            if f_c < f_r.min(f_worst) {
                simplex[n] = (target, f_c);
            } else {
                let best = simplex[0].0.clone();
                for k in 1..=n {
                    let v = point(&best, &simplex[k].0, 0.5);
                    let fv = sc.trial_value(&v)?;
                    simplex[k] = (v, fv);
                }
            }
        }
        order(&mut simplex);
    };
    let (z, value) = simplex.swap_remove(0);
    Ok(Outcome {
        z,
        value,
        iterations: iter,
        converged,
        message,
        line_steps: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{lookup, simple2_problem};

    fn quadratic(n: usize) -> Problem {
        Problem::new("quad", n, n, |x, _| {
            Ok(x.iter().enumerate().map(|(i, v)| v - (i + 1) as f64).collect())
        })
    }

    #[test]
    fn sumsq_matches_definition() {
        let p = simple2_problem();
        let x = [0.5, 2.0];
        let r = p.residual(&x).unwrap();
        assert_eq!(sumsq(&p, &x, None).unwrap(), r[0] * r[0] + r[1] * r[1]);
        assert_eq!(sumsq(&p, &x, Some(&[0.0, 0.0])).unwrap(), 0.0);
        assert!(sumsq(&p, &x, Some(&[1.0])).is_err());
    }

    #[test]
    fn parscale_leaves_objective_unchanged() {
        let p = lookup("dgv-reduced:0121a").unwrap();
        let obj = ScaledObjective::new(&p);
        let x = p.start("x0").unwrap().to_vec();
        let ps = vec![0.001, 0.0001, 1.0, 1.0, 10.0, 1.0];
        let sc = Scaled {
            obj: &obj,
            parscale: ps.clone(),
            scheme: JacobianScheme::central(),
            source: GradientSource::Objective,
            fevals: 0,
            gevals: 0,
            max_feval: 10,
        };
        let z: Vec<f64> = x.iter().zip(&ps).map(|(a, b)| a / b).collect();
        let back = sc.to_x(&z);
        assert_eq!(obj.value(&back).unwrap(), sumsq(&p, &back, None).unwrap());
        for (a, b) in back.iter().zip(&x) {
            assert!((a - b).abs() <= 1e-15 * b.abs().max(1.0));
        }
    }

    #[test]
    fn every_method_finds_quadratic_minimum() {
        let p = quadratic(4);
        let obj = ScaledObjective::new(&p);
        for m in MinMethod::ALL {
            let res = minimize(&obj, &[0.0; 4], &MinimizeOptions::new(m)).unwrap();
            for (i, v) in res.x.iter().enumerate() {
                assert!((v - (i + 1) as f64).abs() <= 1e-6, "{m}: {:?}", res.x);
            }
        }
    }

    #[test]
    fn armijo_on_every_accepted_step() {
        let p = simple2_problem();
        let obj = ScaledObjective::new(&p);
        for m in [MinMethod::Vm, MinMethod::Cg] {
            let res = minimize(&obj, &[2.0, 0.5], &MinimizeOptions::new(m)).unwrap();
            assert!(!res.line_steps.is_empty());
            for st in &res.line_steps {
                assert!(st.f_after <= st.f_before + ARMIJO * st.t * st.slope, "{m}: {st:?}");
            }
        }
    }

    #[test]
    fn bfgs_update_keeps_symmetric_secant() {
        let mut h = Matrix::identity(3);
        let s = [0.1, -0.3, 0.2];
        let y = [0.4, -0.5, 0.9];
        let sy = dot(&s, &y);
        bfgs_inverse_update(&mut h, &s, &y, sy);
        let hy = h.matvec(&y);
        for k in 0..3 {
            assert!((hy[k] - s[k]).abs() <= 1e-14);
        }
        assert_eq!(h, h.transpose());
    }

    #[test]
    fn nelder_mead_converged_simplex_is_small() {
        let p = quadratic(3);
        let obj = ScaledObjective::new(&p);
        let opts = MinimizeOptions {
            simplex_tol: 1e-8,
            ..MinimizeOptions::new(MinMethod::NelderMead)
        };
        let res = minimize(&obj, &[0.0; 3], &opts).unwrap();
        assert!(res.converged);
    }

    #[test]
    fn invalid_parscale_rejected() {
        let p = simple2_problem();
        let obj = ScaledObjective::new(&p);
        let opts = MinimizeOptions {
            parscale: Some(vec![1.0, 0.0]),
            ..MinimizeOptions::default()
        };
        assert!(minimize(&obj, &[1.0, 1.0], &opts).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in MinMethod::ALL {
            assert_eq!(m.to_string().parse::<MinMethod>().unwrap(), m);
        }
        assert!("bfgs".parse::<MinMethod>().is_err());
    }
}
