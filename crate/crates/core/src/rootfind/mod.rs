//! Newton and Broyden solvers for square systems `r(x) = 0`.
//!
//! Each method is wrapped in one of seven global strategies: three
//! backtracking line searches (`cline`, `qline`, `gline`), three trust-region
//! schemes (`pwldog`, `dbldog`, `hook`) and the raw full step (`none`).
//!
//! The merit function throughout is `fnorm = 0.5 * sum(r^2)`.
//!
//! Termination codes:
//!
//! | code | message   | meaning                                              |
//! |------|-----------|------------------------------------------------------|
//! | 1    | Fcrit     | `max |r_i| <= ftol`                                  |
//! | 2    | Xcrit     | relative step `<= xtol` without meeting `ftol`      |
//! | 3    | Stalled   | line search could not find an acceptable point       |
//! | 4    | Maxiter   | iteration limit reached                              |
//! | 5    | TRcollapse| trust radius fell below `xtol * (1 + ||x||)`         |
//! | -1   | Evalfail  | residual or Jacobian evaluation failed mid-run       |

mod linesearch;
mod trust;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diff::{fd_jacobian_at, JacobianScheme};
use crate::error::{check_len, Error, Result};
use crate::linalg::{dot, norm2, norm_inf, solve_linear, Matrix};
use crate::problems::Problem;

use linesearch::{line_search, LineSearchOutcome};
use trust::{Trial, TrustRegion, TrustStep, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Newton,
    Broyden,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::Newton, Method::Broyden];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Newton => "Newton",
            Method::Broyden => "Broyden",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "newton" => Ok(Method::Newton),
            "broyden" => Ok(Method::Broyden),
            _ => Err(Error::InvalidOption(format!("unknown method `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Global {
    /// Backtracking with cubic interpolation.
    Cline,
    /// Backtracking with quadratic interpolation.
    Qline,
    /// Backtracking by halving.
    Gline,
    /// Powell single dogleg.
    Pwldog,
    /// Double dogleg.
    Dbldog,
    /// More-Hebden shifted step.
    Hook,
    /// Full step, no safeguard.
    None,
}

impl Global {
    /// Grid order.
    pub const ALL: [Global; 7] = [
        Global::Cline,
        Global::Qline,
        Global::Gline,
        Global::Pwldog,
        Global::Dbldog,
        Global::Hook,
        Global::None,
    ];

    pub fn is_line_search(self) -> bool {
        matches!(self, Global::Cline | Global::Qline | Global::Gline)
    }

    pub fn is_trust_region(self) -> bool {
        matches!(self, Global::Pwldog | Global::Dbldog | Global::Hook)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Global::Cline => "cline",
            Global::Qline => "qline",
            Global::Gline => "gline",
            Global::Pwldog => "pwldog",
            Global::Dbldog => "dbldog",
            Global::Hook => "hook",
            Global::None => "none",
        }
    }
}

impl fmt::Display for Global {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Global {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Global::ALL
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| Error::InvalidOption(format!("unknown global strategy `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootOptions {
    pub method: Method,
    pub global: Global,
    /// Residual tolerance on `max |r_i|`.
    pub ftol: f64,
    /// Relative step tolerance.
    pub xtol: f64,
    pub max_iter: usize,
    pub jacobian: JacobianScheme,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            method: Method::Broyden,
            global: Global::Dbldog,
            ftol: 1e-8,
            xtol: 1e-8,
            max_iter: 150,
            jacobian: JacobianScheme::central(),
        }
    }
}

impl RootOptions {
    pub fn new(method: Method, global: Global) -> Self {
        Self {
            method,
            global,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ftol > 0.0) || !(self.xtol > 0.0) {
            return Err(Error::InvalidOption(
                "ftol and xtol must be strictly positive".into(),
            ));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidOption("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    Fcrit,
    Xcrit,
    Stalled,
    MaxIter,
    TrustRegionCollapse,
    EvalFailure,
}

impl Termination {
    pub fn code(self) -> i32 {
        match self {
            Termination::Fcrit => 1,
            Termination::Xcrit => 2,
            Termination::Stalled => 3,
            Termination::MaxIter => 4,
            Termination::TrustRegionCollapse => 5,
            Termination::EvalFailure => -1,
        }
    }

    pub fn message(self) -> &'static str {
        match self {
            Termination::Fcrit => "Fcrit",
            Termination::Xcrit => "Xcrit",
            Termination::Stalled => "Stalled",
            Termination::MaxIter => "Maxiter",
            Termination::TrustRegionCollapse => "TRcollapse",
            Termination::EvalFailure => "Evalfail",
        }
    }
}

/// One accepted step, kept for diagnostics and property checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub iter: usize,
    pub fnorm_before: f64,
    pub fnorm_after: f64,
    /// Max-norm of the residual after the step.
    pub fmax_after: f64,
    pub step_norm: f64,
    /// Line-search step fraction and directional derivative `g^T d`.
    /// `lambda` is `None` for full steps taken without a line search.
    pub lambda: Option<f64>,
    pub slope: Option<f64>,
    /// Trust radius in force when the step was computed.
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootResult {
    pub x: Vec<f64>,
    pub fvec: Vec<f64>,
    pub termcd: i32,
    pub message: String,
    pub fcnt: usize,
    pub jcnt: usize,
    pub iter: usize,
    /// `0.5 * sum(fvec^2)`
    pub fnorm: f64,
    #[serde(skip)]
    pub steps: Vec<StepRecord>,
}

impl RootResult {
    pub fn sum_squares(&self) -> f64 {
        dot(&self.fvec, &self.fvec)
    }

    pub fn converged(&self) -> bool {
        self.termcd == 1
    }
}

/// Solves `J d = -r`.
pub fn newton_step(jac: &Matrix, r: &[f64]) -> Result<Vec<f64>> {
    let neg: Vec<f64> = r.iter().map(|v| -v).collect();
    solve_linear(jac, &neg)
}

/// Good Broyden rank-one update `B + (y - B s) s^T / (s^T s)`.
pub fn broyden_update(b: &Matrix, s: &[f64], y: &[f64]) -> Result<Matrix> {
    check_len("Broyden step", b.cols(), s.len())?;
    check_len("Broyden residual change", b.rows(), y.len())?;
    let sts = dot(s, s);
    if sts == 0.0 {
        return Err(Error::DegenerateStep);
    }
    let bs = b.matvec(s);
    let mut out = b.clone();
    for i in 0..b.rows() {
        let coef = (y[i] - bs[i]) / sts;
        if coef == 0.0 {
            continue;
        }
        for j in 0..b.cols() {
            out[(i, j)] += coef * s[j];
        }
    }
    Ok(out)
}

fn half_ss(v: &[f64]) -> f64 {
    0.5 * dot(v, v)
}

/// Counts residual evaluations and maps failures to `None`.
struct Evaluator<'a> {
    problem: &'a Problem,
    fcnt: usize,
}

impl Evaluator<'_> {
    fn eval(&mut self, x: &[f64]) -> Option<Vec<f64>> {
        self.fcnt += 1;
        self.problem.residual(x).ok()
    }
}

struct State {
    x: Vec<f64>,
    fvec: Vec<f64>,
    fnorm: f64,
}

/// Solves `r(x) = 0` from `x0`.
///
/// Non-convergence is reported through `termcd`. Errors are returned for
/// invalid input, a non-finite residual at `x0`, or a singular Jacobian when
/// `global` is `none` (the globalized strategies fall back to the steepest
/// descent direction instead).
pub fn solve_root(problem: &Problem, x0: &[f64], opts: &RootOptions) -> Result<RootResult> {
    opts.validate()?;
    if !problem.is_square() {
        return Err(Error::Dimension {
            context: "root finding needs a square system",
            expected: problem.n_params(),
            got: problem.n_residuals(),
        });
    }
    check_len("starting point", problem.n_params(), x0.len())?;
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Evaluation { x: x0.to_vec() });
    }
    let fvec0 = problem.residual(x0)?;
    Solver::new(problem, opts, x0.to_vec(), fvec0).run()
}

struct Solver<'a> {
    opts: &'a RootOptions,
    ev: Evaluator<'a>,
    st: State,
    jcnt: usize,
    iter: usize,
    steps: Vec<StepRecord>,
}

enum Flow {
    Continue,
    Stop(Termination),
}

impl<'a> Solver<'a> {
    fn new(problem: &'a Problem, opts: &'a RootOptions, x: Vec<f64>, fvec: Vec<f64>) -> Self {
        let fnorm = half_ss(&fvec);
        Self {
            opts,
            ev: Evaluator { problem, fcnt: 1 },
            st: State { x, fvec, fnorm },
            jcnt: 0,
            iter: 0,
            steps: Vec::new(),
        }
    }

    fn finish(self, why: Termination) -> RootResult {
        RootResult {
            fnorm: half_ss(&self.st.fvec),
            x: self.st.x,
            fvec: self.st.fvec,
            termcd: why.code(),
            message: why.message().to_string(),
            fcnt: self.ev.fcnt,
            jcnt: self.jcnt,
            iter: self.iter,
            steps: self.steps,
        }
    }

    fn jacobian(&mut self) -> Option<Matrix> {
        self.jcnt += 1;
        let problem = self.ev.problem;
        fd_jacobian_at(
            |z: &[f64]| problem.residual(z),
            &self.st.x,
            &self.st.fvec,
            self.opts.jacobian,
        )
        .ok()
    }

    fn run(mut self) -> Result<RootResult> {
        if norm_inf(&self.st.fvec) <= self.opts.ftol {
            return Ok(self.finish(Termination::Fcrit));
        }
        let broyden = self.opts.method == Method::Broyden;
        let Some(mut jac) = self.jacobian() else {
            return Ok(self.finish(Termination::EvalFailure));
        };
        let mut fresh = true;
        let mut tr = if self.opts.global.is_trust_region() {
            Some(TrustRegion::new(&jac, &self.st.fvec, &self.st.x))
        } else {
            None
        };

        while self.iter < self.opts.max_iter {
            self.iter += 1;
            if !fresh && !broyden {
                match self.jacobian() {
                    Some(j) => jac = j,
                    None => return Ok(self.finish(Termination::EvalFailure)),
                }
            }

            let x_old = self.st.x.clone();
            let f_old = self.st.fvec.clone();
            let accepted = if let Some(tr) = tr.as_mut() {
                self.trust_region_iteration(tr, &mut jac, &mut fresh)
            } else {
                self.line_search_iteration(&mut jac, &mut fresh)?
            };
            match accepted {
                Flow::Stop(why) => return Ok(self.finish(why)),
                Flow::Continue => {}
            }

            let s: Vec<f64> = self.st.x.iter().zip(&x_old).map(|(a, b)| a - b).collect();
            if norm_inf(&self.st.fvec) <= self.opts.ftol {
                return Ok(self.finish(Termination::Fcrit));
            }
            let rel_step = s
                .iter()
                .zip(&self.st.x)
                .map(|(si, xi)| si.abs() / xi.abs().max(1.0))
                .fold(0.0, f64::max);
            if rel_step <= self.opts.xtol {
                return Ok(self.finish(Termination::Xcrit));
            }

            if broyden {
                let y: Vec<f64> = self.st.fvec.iter().zip(&f_old).map(|(a, b)| a - b).collect();
                if let Ok(updated) = broyden_update(&jac, &s, &y) {
                    jac = updated;
                }
            }
            fresh = false;
        }
        Ok(self.finish(Termination::MaxIter))
    }

    fn refresh(&mut self, jac: &mut Matrix, fresh: &mut bool) -> bool {
        match self.jacobian() {
            Some(j) => {
                *jac = j;
                *fresh = true;
                true
            }
            None => false,
        }
    }

    fn line_search_iteration(&mut self, jac: &mut Matrix, fresh: &mut bool) -> Result<Flow> {
        let global = self.opts.global;
        loop {
            let grad = jac.tr_matvec(&self.st.fvec);
            let mut dir = match newton_step(jac, &self.st.fvec) {
                Ok(d) => d,
                Err(e) if global == Global::None => return Err(e),
                Err(_) => grad.iter().map(|g| -g).collect(),
            };
            let mut slope = dot(&grad, &dir);
            if !(slope < 0.0) && global != Global::None {
                if self.opts.method == Method::Broyden && !*fresh {
                    if !self.refresh(jac, fresh) {
                        return Ok(Flow::Stop(Termination::EvalFailure));
                    }
                    continue;
                }
                dir = grad.iter().map(|g| -g).collect();
                slope = -dot(&grad, &grad);
            }

            if global == Global::None {
                let x_new: Vec<f64> = self.st.x.iter().zip(&dir).map(|(a, b)| a + b).collect();
                let Some(f_new) = self.ev.eval(&x_new) else {
                    return Ok(Flow::Stop(Termination::EvalFailure));
                };
                self.accept(x_new, f_new, norm2(&dir), None, Some(slope), None);
                return Ok(Flow::Continue);
            }

            let outcome = line_search(
                global,
                &self.st.x,
                self.st.fnorm,
                &dir,
                slope,
                self.opts.xtol,
                |z| self.ev.eval(z),
            );
            match outcome {
                LineSearchOutcome::Accepted {
                    x,
                    fvec,
                    lambda,
                    slope,
                    step_norm,
                } => {
                    self.accept(x, fvec, step_norm, Some(lambda), Some(slope), None);
                    return Ok(Flow::Continue);
                }
                LineSearchOutcome::Failed => {
                    if self.opts.method == Method::Broyden && !*fresh {
                        if !self.refresh(jac, fresh) {
                            return Ok(Flow::Stop(Termination::EvalFailure));
                        }
                        continue;
                    }
                    return Ok(Flow::Stop(Termination::Stalled));
                }
            }
        }
    }

    fn trust_region_iteration(
        &mut self,
        tr: &mut TrustRegion,
        jac: &mut Matrix,
        fresh: &mut bool,
    ) -> Flow {
        let global = self.opts.global;
        let mut rejections = 0usize;
        let mut rejected = false;
        // Point accepted before the radius was doubled: (x, fvec, |s|, slope, radius).
        let mut tentative: Option<(Vec<f64>, Vec<f64>, f64, f64, f64)> = None;
        loop {
            let radius = tr.radius();
            let TrustStep {
                s,
                predicted,
                newton,
            } = tr.step(global, jac, &self.st.fvec);
            let x_new: Vec<f64> = self.st.x.iter().zip(&s).map(|(a, b)| a + b).collect();
            let f_new = self.ev.eval(&x_new);
            let grad = jac.tr_matvec(&self.st.fvec);
            let trial = Trial {
                fc: self.st.fnorm,
                fnew: f_new.as_deref().map_or(f64::INFINITY, half_ss),
                slope: dot(&grad, &s),
                predicted,
                step_norm: norm2(&s),
                newton,
            };
            let prev = tentative.as_ref().map(|t| half_ss(&t.1));
            match tr.assess(&trial, prev, !rejected) {
                Verdict::Accept => {
                    let f_new = f_new.expect("accepted steps have finite residuals");
                    self.accept(x_new, f_new, trial.step_norm, None, Some(trial.slope), Some(radius));
                    return Flow::Continue;
                }
                Verdict::Expand => {
                    let f_new = f_new.expect("accepted steps have finite residuals");
                    tentative = Some((x_new, f_new, trial.step_norm, trial.slope, radius));
                    continue;
                }
                Verdict::Revert => {
                    let (x, f, len, slope, r) = tentative.take().expect("revert needs a tentative point");
                    self.accept(x, f, len, None, Some(slope), Some(r));
                    return Flow::Continue;
                }
                Verdict::Reject => {}
            }
            rejected = true;
            rejections += 1;
            let floor = self.opts.xtol * (1.0 + norm2(&self.st.x));
            let stale = self.opts.method == Method::Broyden && !*fresh;
            if stale && (rejections >= 2 || tr.radius() < floor) {
                if !self.refresh(jac, fresh) {
                    return Flow::Stop(Termination::EvalFailure);
                }
                rejections = 0;
                tr.clamp_below(floor);
                continue;
            }
            if tr.radius() < floor {
                return Flow::Stop(Termination::TrustRegionCollapse);
            }
        }
    }

    fn accept(
        &mut self,
        x: Vec<f64>,
        fvec: Vec<f64>,
        step_norm: f64,
        lambda: Option<f64>,
        slope: Option<f64>,
        radius: Option<f64>,
    ) {
        let fnorm = half_ss(&fvec);
        self.steps.push(StepRecord {
            iter: self.iter,
            fnorm_before: self.st.fnorm,
            fnorm_after: fnorm,
            fmax_after: norm_inf(&fvec),
            step_norm,
            lambda,
            slope,
            radius,
        });
        self.st = State { x, fvec, fnorm };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::singular_values;
    use crate::problems::{lookup, simple2_problem, SIMPLE2_XBASIN};

    #[test]
    fn newton_step_identity_and_diagonal() {
        let d = newton_step(&Matrix::identity(3), &[1.0, -2.0, 3.0]).unwrap();
        assert_eq!(d, vec![-1.0, 2.0, -3.0]);
        let d = newton_step(&Matrix::from_diag(&[2.0, 4.0]), &[2.0, 8.0]).unwrap();
        assert_eq!(d, vec![-1.0, -2.0]);
    }

    #[test]
    fn newton_step_simple2_matches_analytic_jacobian() {
        // Analytic Jacobian of simple2 at (2, 0.5): [[2x1, 2x2], [e^(x1-1), 3x2^2]].
        let x = [2.0f64, 0.5];
        let r = crate::problems::simple2_residual(&x).unwrap();
        let e = (x[0] - 1.0).exp();
        let (a, b, c, d) = (2.0 * x[0], 2.0 * x[1], e, 3.0 * x[1] * x[1]);
        let det = a * d - b * c;
        let oracle = [(-d * r[0] + b * r[1]) / det, (c * r[0] - a * r[1]) / det];

        let p = simple2_problem();
        let jac =
            crate::diff::fd_jacobian(|z: &[f64]| p.residual(z), &x, JacobianScheme::central())
                .unwrap();
        let step = newton_step(&jac, &r).unwrap();
        for k in 0..2 {
            assert!((step[k] - oracle[k]).abs() <= 1e-8, "{step:?} vs {oracle:?}");
        }
    }

    #[test]
    fn newton_step_singular() {
        let j = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(newton_step(&j, &[1.0, 1.0]), Err(Error::Singular { .. })));
    }

    #[test]
    fn broyden_secant_condition() {
        let b = Matrix::from_rows(&[
            vec![1.0, 0.5, -0.3, 2.0],
            vec![0.1, 3.0, 0.7, -1.0],
            vec![-2.0, 0.4, 1.1, 0.0],
            vec![0.6, -0.9, 0.2, 1.7],
        ])
        .unwrap();
        let s = [0.3, -1.2, 0.8, 0.05];
        let y = [1.0, -0.4, 2.2, 0.9];
        let b2 = broyden_update(&b, &s, &y).unwrap();
        let bs = b2.matvec(&s);
        for k in 0..4 {
            assert!((bs[k] - y[k]).abs() <= 1e-12);
        }
        let sv = singular_values(&b2.sub(&b).unwrap());
        assert!(sv[1] <= 1e-10, "{sv:?}");
    }

    #[test]
    fn broyden_consistent_pair_leaves_matrix() {
        let b = Matrix::from_rows(&[vec![2.0, 1.0], vec![0.0, 3.0]]).unwrap();
        let s = [1.0, 2.0];
        let y = b.matvec(&s);
        assert_eq!(broyden_update(&b, &s, &y).unwrap(), b);
    }

    #[test]
    fn broyden_zero_step() {
        let b = Matrix::identity(2);
        assert_eq!(
            broyden_update(&b, &[0.0, 0.0], &[1.0, 1.0]).unwrap_err(),
            Error::DegenerateStep
        );
    }

    #[test]
    fn start_at_root_returns_immediately() {
        let p = simple2_problem();
        for g in Global::ALL {
            for m in Method::ALL {
                let res = solve_root(&p, &[1.0, 1.0], &RootOptions::new(m, g)).unwrap();
                assert_eq!(res.termcd, 1);
                assert_eq!(res.iter, 0);
                assert_eq!(res.fnorm, 0.0);
            }
        }
    }

    #[test]
    fn non_finite_start_rejected() {
        let p = simple2_problem();
        assert!(solve_root(&p, &[f64::NAN, 1.0], &RootOptions::default()).is_err());
        assert!(solve_root(&p, &[1.0], &RootOptions::default()).is_err());
    }

    #[test]
    fn invalid_options_rejected() {
        let p = simple2_problem();
        let mut o = RootOptions::default();
        o.ftol = 0.0;
        assert!(matches!(solve_root(&p, &[2.0, 0.5], &o), Err(Error::InvalidOption(_))));
        let mut o = RootOptions::default();
        o.max_iter = 0;
        assert!(solve_root(&p, &[2.0, 0.5], &o).is_err());
    }

    #[test]
    fn singular_jacobian_with_no_global_is_an_error() {
        // r(x) = (x1 + x2 - 1, 2 x1 + 2 x2 - 3) has a singular Jacobian everywhere.
        let p = Problem::new("sing", 2, 2, |x, _| {
            Ok(vec![x[0] + x[1] - 1.0, 2.0 * x[0] + 2.0 * x[1] - 3.0])
        });
        let opts = RootOptions::new(Method::Newton, Global::None);
        assert!(matches!(
            solve_root(&p, &[0.0, 0.0], &opts),
            Err(Error::Singular { .. })
        ));
        // Globalized: falls back to steepest descent and terminates normally.
        let res = solve_root(&p, &[0.0, 0.0], &RootOptions::new(Method::Newton, Global::Qline))
            .unwrap();
        assert_ne!(res.termcd, 1);
    }

    #[test]
    fn every_strategy_solves_simple2_from_basin() {
        let p = simple2_problem();
        for m in Method::ALL {
            for g in Global::ALL {
                let res = solve_root(&p, &SIMPLE2_XBASIN, &RootOptions::new(m, g)).unwrap();
                assert_eq!(res.termcd, 1, "{m}/{g}: {res:?}");
                assert!((res.x[0] - 1.0).abs() < 1e-6 && (res.x[1] - 1.0).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn newton_is_quadratic_on_simple2() {
        let p = simple2_problem();
        let res = solve_root(&p, &SIMPLE2_XBASIN, &RootOptions::new(Method::Newton, Global::None))
            .unwrap();
        assert_eq!(res.termcd, 1);
        let f: Vec<f64> = res.steps.iter().map(|s| s.fmax_after).collect();
        assert!(f.len() >= 3);
        let n = f.len();
        // e_{k+1} <= C e_k^2 with a modest constant over the final three iterates.
        let (a, b, c) = (f[n - 3], f[n - 2], f[n - 1]);
        assert!(b <= 10.0 * a * a, "{a} {b}");
        assert!(c <= 10.0 * b * b, "{b} {c}");
    }

    #[test]
    fn trust_region_steps_respect_radius() {
        let p = lookup("dgv-full:0121a").unwrap();
        let x0 = p.start("x0").unwrap().to_vec();
        for g in [Global::Pwldog, Global::Dbldog, Global::Hook] {
            for m in Method::ALL {
                let res = solve_root(&p, &x0, &RootOptions::new(m, g)).unwrap();
                for s in &res.steps {
                    let r = s.radius.unwrap();
                    assert!(s.step_norm <= r * (1.0 + 1e-10), "{m}/{g}: {s:?}");
                }
            }
        }
    }

    #[test]
    fn fnorm_is_half_sum_of_squares() {
        let p = lookup("dgv-full:0121a").unwrap();
        let x0 = p.start("x0").unwrap().to_vec();
        for m in Method::ALL {
            for g in Global::ALL {
                if let Ok(res) = solve_root(&p, &x0, &RootOptions::new(m, g)) {
                    assert_eq!(res.fnorm, 0.5 * res.sum_squares());
                }
            }
        }
    }
}
