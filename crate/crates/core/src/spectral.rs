//! Derivative-free spectral residual method (DF-SANE) with a nonmonotone
//! line search, and a secant-accelerated variant.
//!
//! The merit function here is `f(x) = sum(r^2)`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg::{lstsq_truncated, norm2, norm_inf, sum_squares, Matrix};
use crate::problems::Problem;

const GAMMA: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;
const EXTRAPOLATION_HALVINGS: usize = 20;
const LSTSQ_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralOptions {
    /// Number of past merit values in the nonmonotone reference.
    pub memory: usize,
    pub max_iter: usize,
    /// Converged when `||r||_2 / sqrt(n) <= tol` or `||r||_inf <= tol`.
    pub tol: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub acceleration: bool,
    /// Number of step/residual-change pairs used by the extrapolation.
    pub history: usize,
    /// Clear the extrapolation history after this many iterations without
    /// a new best sum of squares; 0 disables restarts.
    pub restart_window: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            memory: 10,
            max_iter: 1500,
            tol: 1e-7,
            sigma_min: 1e-10,
            sigma_max: 1e10,
            acceleration: false,
            history: 6,
            restart_window: 200,
        }
    }
}

impl SpectralOptions {
    pub fn accelerated(history: usize) -> Self {
        Self {
            acceleration: true,
            history,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.memory == 0 || self.history == 0 || self.max_iter == 0 {
            return Err(Error::InvalidOption(
                "memory, history and max_iter must be at least 1".into(),
            ));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidOption("tol must be positive".into()));
        }
        if !(self.sigma_min > 0.0 && self.sigma_min < self.sigma_max && self.sigma_max.is_finite())
        {
            return Err(Error::InvalidOption(
                "sigma bounds must satisfy 0 < sigma_min < sigma_max < inf".into(),
            ));
        }
        Ok(())
    }
}

/// Line-search acceptance record for one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralStep {
    pub iter: usize,
    /// Spectral coefficient used for the direction `-sigma * r`.
    pub sigma: f64,
    pub lambda: f64,
    /// Merit at the line-search point.
    pub merit: f64,
    /// Right-hand side of the nonmonotone test that `merit` satisfied.
    pub bound: f64,
    /// Merit at the extrapolated point when it replaced the line-search point.
    pub extrapolated: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralResult {
    pub x: Vec<f64>,
    pub fvec: Vec<f64>,
    /// `sum(fvec^2)`
    pub ss: f64,
    pub iterations: usize,
    pub fevals: usize,
    pub converged: bool,
    pub message: String,
    #[serde(skip)]
    pub trace: Vec<SpectralStep>,
}

fn converged(r: &[f64], tol: f64) -> bool {
    let n = r.len().max(1) as f64;
    norm2(r) / n.sqrt() <= tol || norm_inf(r) <= tol
}

fn clamp_sigma(sigma: f64, lo: f64, hi: f64) -> f64 {
    let mag = sigma.abs().clamp(lo, hi);
    if sigma < 0.0 {
        -mag
    } else {
        mag
    }
}

fn axpy(x: &[f64], a: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(xi, di)| xi + a * di).collect()
}

/// Runs DF-SANE from `x0`; the secant extrapolation is used when
/// `opts.acceleration` is set.
///
/// Non-convergence is reported with `converged = false` and the best iterate
/// seen. A non-finite residual anywhere is an evaluation error.
pub fn solve_spectral(problem: &Problem, x0: &[f64], opts: &SpectralOptions) -> Result<SpectralResult> {
    opts.validate()?;
    if !problem.is_square() {
        return Err(Error::Dimension {
            context: "spectral solver needs a square system",
            expected: problem.n_params(),
            got: problem.n_residuals(),
        });
    }
    check_len("starting point", problem.n_params(), x0.len())?;
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Evaluation { x: x0.to_vec() });
    }
    Dfsane::new(problem, opts, x0)?.run()
}

/// [`solve_spectral`] with acceleration switched on.
pub fn solve_spectral_accelerated(
    problem: &Problem,
    x0: &[f64],
    opts: &SpectralOptions,
) -> Result<SpectralResult> {
    let opts = SpectralOptions {
        acceleration: true,
        ..*opts
    };
    solve_spectral(problem, x0, &opts)
}

struct Dfsane<'a> {
    problem: &'a Problem,
    opts: &'a SpectralOptions,
    x: Vec<f64>,
    r: Vec<f64>,
    f: f64,
    fevals: usize,
    best: (f64, Vec<f64>, Vec<f64>),
    trace: Vec<SpectralStep>,
}

impl<'a> Dfsane<'a> {
    fn new(problem: &'a Problem, opts: &'a SpectralOptions, x0: &[f64]) -> Result<Self> {
        let r = problem.residual(x0)?;
        let f = sum_squares(&r);
        Ok(Self {
            problem,
            opts,
            best: (f, x0.to_vec(), r.clone()),
            x: x0.to_vec(),
            r,
            f,
            fevals: 1,
            trace: Vec::new(),
        })
    }

    fn eval(&mut self, x: &[f64]) -> Result<Vec<f64>> {
        self.fevals += 1;
        self.problem.residual(x)
    }

    fn finish(self, iterations: usize, converged: bool, message: &str) -> SpectralResult {
        let (x, fvec, ss) = if converged {
            (self.x, self.r, self.f)
        } else {
            let (ss, x, r) = self.best;
            (x, r, ss)
        };
        SpectralResult {
            x,
            fvec,
            ss,
            iterations,
            fevals: self.fevals,
            converged,
            message: message.to_string(),
            trace: self.trace,
        }
    }

    fn run(mut self) -> Result<SpectralResult> {
        let opts = *self.opts;
        let eta0 = self.f.sqrt();
        let mut sigma = clamp_sigma(1.0 / eta0.max(1.0), opts.sigma_min, opts.sigma_max);
        let mut merits: VecDeque<f64> = VecDeque::with_capacity(opts.memory);
        merits.push_back(self.f);
        let mut pairs: VecDeque<(Vec<f64>, Vec<f64>)> = VecDeque::with_capacity(opts.history);
        let mut since_best = 0usize;

        for k in 0..opts.max_iter {
            if converged(&self.r, opts.tol) {
                return Ok(self.finish(k, true, "Successful convergence"));
            }
            let eta = eta0 / ((1 + k) as f64).powi(2);
            let fbar = merits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let dir: Vec<f64> = self.r.iter().map(|v| -sigma * v).collect();

            let Some((mut x_new, mut r_new, mut f_new, lambda, bound)) =
                self.nonmonotone_search(&dir, fbar, eta)?
            else {
                return Ok(self.finish(k, false, "Line search failed"));
            };
            let merit = f_new;
            let mut extrapolated = None;
            if opts.acceleration {
                let s = self.x.iter().zip(&x_new).map(|(a, b)| b - a).collect();
                let y = self.r.iter().zip(&r_new).map(|(a, b)| b - a).collect();
                let mut trial_pairs = pairs.clone();
                push_bounded(&mut trial_pairs, (s, y), opts.history);
                if let Some((xa, ra, fa)) = self.extrapolate(&trial_pairs, &x_new, &r_new, f_new)? {
                    x_new = xa;
                    r_new = ra;
                    f_new = fa;
                    extrapolated = Some(fa);
                }
            }
            self.trace.push(SpectralStep {
                iter: k + 1,
                sigma,
                lambda,
                merit,
                bound,
                extrapolated,
            });

            let s: Vec<f64> = self.x.iter().zip(&x_new).map(|(a, b)| b - a).collect();
            let y: Vec<f64> = self.r.iter().zip(&r_new).map(|(a, b)| b - a).collect();
            let sty: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
            let sts = sum_squares(&s);
            let raw = if sty != 0.0 { sts / sty } else { 1.0 };
            sigma = clamp_sigma(if raw.is_finite() { raw } else { 1.0 }, opts.sigma_min, opts.sigma_max);
            if opts.acceleration {
                push_bounded(&mut pairs, (s, y), opts.history);
            }

            self.x = x_new;
            self.r = r_new;
            self.f = f_new;
            if self.f < self.best.0 {
                self.best = (self.f, self.x.clone(), self.r.clone());
                since_best = 0;
            } else {
                since_best += 1;
                if opts.restart_window > 0 && since_best >= opts.restart_window {
                    pairs.clear();
                    since_best = 0;
                }
            }
            push_bounded(&mut merits, self.f, opts.memory);
        }
        if converged(&self.r, opts.tol) {
            return Ok(self.finish(opts.max_iter, true, "Successful convergence"));
        }
        Ok(self.finish(opts.max_iter, false, "Maximum number of iterations exceeded"))
    }

    /// Tries `x + lambda d` and `x - lambda d` with shrinking `lambda` until
    /// one satisfies `f <= fbar + eta - gamma lambda^2 f(x)`.
    #[allow(clippy::type_complexity)]
    fn nonmonotone_search(
        &mut self,
        dir: &[f64],
        fbar: f64,
        eta: f64,
    ) -> Result<Option<(Vec<f64>, Vec<f64>, f64, f64, f64)>> {
        let f = self.f;
        let (mut ap, mut am) = (1.0f64, 1.0f64);
        for _ in 0..MAX_BACKTRACKS {
            let xp = axpy(&self.x, ap, dir);
            let rp = self.eval(&xp)?;
            let fp = sum_squares(&rp);
            let bound = fbar + eta - GAMMA * ap * ap * f;
            if fp <= bound {
                return Ok(Some((xp, rp, fp, ap, bound)));
            }
            let xm = axpy(&self.x, -am, dir);
            let rm = self.eval(&xm)?;
            let fm = sum_squares(&rm);
            let bound = fbar + eta - GAMMA * am * am * f;
            if fm <= bound {
                return Ok(Some((xm, rm, fm, am, bound)));
            }
            ap = shrink(ap, fp, f);
            am = shrink(am, fm, f);
        }
        Ok(None)
    }

    /// Secant extrapolation `x - S g` with `g` the truncated least-squares
    /// solution of `Y g ~ r`, backtracked towards `x` until the sum of squares
    /// drops below `f`.
    fn extrapolate(
        &mut self,
        pairs: &VecDeque<(Vec<f64>, Vec<f64>)>,
        x: &[f64],
        r: &[f64],
        f: f64,
    ) -> Result<Option<(Vec<f64>, Vec<f64>, f64)>> {
        let s_cols: Vec<Vec<f64>> = pairs.iter().map(|(s, _)| s.clone()).collect();
        let y_cols: Vec<Vec<f64>> = pairs.iter().map(|(_, y)| y.clone()).collect();
        let s_mat = Matrix::from_columns(&s_cols)?;
        let y_mat = Matrix::from_columns(&y_cols)?;
        if !y_mat.is_finite() {
            return Ok(None);
        }
        let g = lstsq_truncated(&y_mat, r, LSTSQ_RTOL);
        let step: Vec<f64> = s_mat.matvec(&g).iter().map(|v| -v).collect();
        if step.iter().all(|v| *v == 0.0) || step.iter().any(|v| !v.is_finite()) {
            return Ok(None);
        }
        let mut t = 1.0;
        for _ in 0..=EXTRAPOLATION_HALVINGS {
            let xa = axpy(x, t, &step);
            self.fevals += 1;
            if let Ok(ra) = self.problem.residual(&xa) {
                let fa = sum_squares(&ra);
                if fa < f {
                    return Ok(Some((xa, ra, fa)));
                }
            }
            t *= 0.5;
        }
        Ok(None)
    }
}

/// Quadratic-interpolation backtrack, safeguarded to `[0.1, 0.5] * alpha`.
fn shrink(alpha: f64, f_trial: f64, f: f64) -> f64 {
    let t = alpha * alpha * f / (f_trial + (2.0 * alpha - 1.0) * f);
    if t.is_finite() {
        t.clamp(0.1 * alpha, 0.5 * alpha)
    } else {
        0.5 * alpha
    }
}

fn push_bounded<T>(q: &mut VecDeque<T>, item: T, cap: usize) {
    if q.len() == cap {
        q.pop_front();
    }
    q.push_back(item);
}
