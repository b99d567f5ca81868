//! Levenberg-Marquardt nonlinear least squares.

use serde::{Deserialize, Serialize};

use crate::diff::{fd_jacobian_at, JacobianScheme};
use crate::error::{check_len, Error, Result};
use crate::linalg::{norm_inf, singular_values, solve_linear, sum_squares, Matrix};
use crate::problems::Problem;

const DIAG_FLOOR: f64 = 1e-10;
const STEP_TOL: f64 = 1e-12;
const LAMBDA_MAX: f64 = 1e20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LsqOptions {
    pub jacobian: JacobianScheme,
    pub lambda_init: f64,
    pub lambda_up: f64,
    pub lambda_down: f64,
    pub max_jac: usize,
    pub max_feval: usize,
    /// Stop when an accepted step lowers the sum of squares by less than this
    /// fraction.
    pub tol: f64,
}

impl Default for LsqOptions {
    fn default() -> Self {
        Self {
            jacobian: JacobianScheme::central(),
            lambda_init: 1e-4,
            lambda_up: 10.0,
            lambda_down: 0.4,
            max_jac: 500,
            max_feval: 2000,
            tol: 1e-12,
        }
    }
}

impl LsqOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_up > 1.0 && self.lambda_down > 0.0 && self.lambda_down < 1.0) {
            return Err(Error::InvalidOption(
                "damping factors need lambda_up > 1 and 0 < lambda_down < 1".into(),
            ));
        }
        if !(self.lambda_init > 0.0) || !(self.tol >= 0.0) {
            return Err(Error::InvalidOption(
                "lambda_init must be positive and tol nonnegative".into(),
            ));
        }
        if self.max_jac == 0 || self.max_feval == 0 {
            return Err(Error::InvalidOption("evaluation budgets must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LsqResult {
    pub x: Vec<f64>,
    pub fvec: Vec<f64>,
    /// `sum(fvec^2)`
    pub ss: f64,
    pub iterations: usize,
    pub jac_evals: usize,
    pub fn_evals: usize,
    /// Singular values of the Jacobian at `x`, descending.
    pub singvals: Vec<f64>,
    /// `2 J^T r` at `x`.
    pub gradient: Vec<f64>,
    /// False when an evaluation budget or the damping limit stopped the run.
    pub converged: bool,
    pub message: String,
    /// Sum of squares after each accepted step, starting with the initial one.
    #[serde(skip)]
    pub history: Vec<f64>,
}

/// Solves `(J^T J + lambda D) d = -J^T r` with `D = diag(J^T J)` floored at
/// 1e-10.
pub fn lm_step(jac: &Matrix, r: &[f64], lambda: f64) -> Result<Vec<f64>> {
    check_len("LM residual", jac.rows(), r.len())?;
    if !(lambda >= 0.0) {
        return Err(Error::InvalidOption(format!("damping must be nonnegative, got {lambda}")));
    }
    let g = jac.tr_matvec(r);
    damped_solve(&jac.gram(), &g, lambda)
}

fn damped_solve(gram: &Matrix, g: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let mut a = gram.clone();
    for i in 0..a.rows() {
        a[(i, i)] += lambda * gram[(i, i)].max(DIAG_FLOOR);
    }
    let neg: Vec<f64> = g.iter().map(|v| -v).collect();
    solve_linear(&a, &neg)
}

/// Minimizes `sum(r(x)^2)` from `x0`.
pub fn solve_lsq(problem: &Problem, x0: &[f64], opts: &LsqOptions) -> Result<LsqResult> {
    opts.validate()?;
    if problem.n_residuals() < problem.n_params() {
        return Err(Error::Dimension {
            context: "least squares needs at least as many residuals as parameters",
            expected: problem.n_params(),
            got: problem.n_residuals(),
        });
    }
    check_len("starting point", problem.n_params(), x0.len())?;
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Evaluation { x: x0.to_vec() });
    }

    let jacobian = |x: &[f64], r: &[f64]| {
        fd_jacobian_at(|z: &[f64]| problem.residual(z), x, r, opts.jacobian)
    };
    let mut x = x0.to_vec();
    let mut r = problem.residual(&x)?;
    let mut ss = sum_squares(&r);
    let mut fn_evals = 1usize;
    let mut jac_evals = 0usize;
    let mut iterations = 0usize;
    let mut lambda = opts.lambda_init;
    // Jacobian at the current x, if already computed.
    let mut current: Option<Matrix> = None;
    let mut history = vec![ss];

    let (converged, message) = 'outer: loop {
        if ss == 0.0 {
            break (true, "Zero residual");
        }
        if jac_evals >= opts.max_jac {
            break (false, "Jacobian evaluation limit reached");
        }
        let jac = jacobian(&x, &r)?;
        jac_evals += 1;
        let gram = jac.gram();
        let g = jac.tr_matvec(&r);
        current = Some(jac);
        iterations += 1;
        loop {
            let d = match damped_solve(&gram, &g, lambda) {
                Ok(d) => d,
                Err(Error::Singular { .. }) => {
                    lambda *= opts.lambda_up;
                    if lambda > LAMBDA_MAX {
                        break 'outer (false, "Damping limit reached");
                    }
                    continue;
                }
                Err(e) => return Err(e),
            };
            if norm_inf(&d) < STEP_TOL * (1.0 + norm_inf(&x)) {
                break 'outer (true, "Small step");
            }
            if fn_evals >= opts.max_feval {
                break 'outer (false, "Function evaluation limit reached");
            }
            let x_new: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + b).collect();
            let r_new = problem.residual(&x_new)?;
            fn_evals += 1;
            let ss_new = sum_squares(&r_new);
            if ss_new < ss {
                let rel = (ss - ss_new) / ss;
                x = x_new;
                r = r_new;
                ss = ss_new;
                history.push(ss);
                current = None;
                lambda *= opts.lambda_down;
                if rel < opts.tol {
                    break 'outer (true, "Relative sum-of-squares decrease below tolerance");
                }
                break;
            }
            lambda *= opts.lambda_up;
            if lambda > LAMBDA_MAX {
                break 'outer (false, "Damping limit reached");
            }
        }
    };

    let jac = match current {
        Some(j) => j,
        None => {
            jac_evals += 1;
            jacobian(&x, &r)?
        }
    };
    let gradient = jac.tr_matvec(&r).iter().map(|v| 2.0 * v).collect();
    Ok(LsqResult {
        singvals: singular_values(&jac),
        gradient,
        x,
        fvec: r,
        ss,
        iterations,
        jac_evals,
        fn_evals,
        converged,
        message: message.to_string(),
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{lookup, simple2_problem};

    fn sample(rows: usize, cols: usize, seed: u64) -> Matrix {
        // Small LCG so the test has no RNG dependency.
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let data = (0..rows * cols).map(|_| next()).collect();
        Matrix::from_row_major(rows, cols, data).unwrap()
    }

    #[test]
    fn identity_gauss_newton() {
        assert_eq!(lm_step(&Matrix::identity(2), &[1.0, 2.0], 0.0).unwrap(), vec![-1.0, -2.0]);
    }

    #[test]
    fn heavy_damping_shrinks_step() {
        let j = sample(6, 4, 7);
        let r = [0.3, -1.0, 0.5, 2.0, -0.7, 0.1];
        let d0 = lm_step(&j, &r, 0.0).unwrap();
        let dinf = lm_step(&j, &r, 1e12).unwrap();
        let n = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(n(&dinf) <= 1e-9 * n(&d0));
    }

    #[test]
    fn matches_direct_augmented_solve() {
        let j = sample(6, 4, 11);
        let r = [1.0, 0.5, -0.25, 2.0, 0.0, -1.5];
        let lambda = 0.37;
        let d = lm_step(&j, &r, lambda).unwrap();
        // Oracle: build J^T J + lambda diag(J^T J) by explicit sums.
        let mut a = Matrix::zeros(4, 4);
        let mut rhs = vec![0.0; 4];
        for p in 0..4 {
            for q in 0..4 {
                a[(p, q)] = (0..6).map(|i| j[(i, p)] * j[(i, q)]).sum();
            }
            rhs[p] = -(0..6).map(|i| j[(i, p)] * r[i]).sum::<f64>();
        }
        for p in 0..4 {
            a[(p, p)] *= 1.0 + lambda;
        }
        let oracle = solve_linear(&a, &rhs).unwrap();
        for k in 0..4 {
            assert!((d[k] - oracle[k]).abs() <= 1e-10, "{d:?} vs {oracle:?}");
        }
    }

    #[test]
    fn rank_deficient_gauss_newton_is_singular() {
        let j = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 6.0]]).unwrap();
        assert!(matches!(lm_step(&j, &[1.0, 1.0, 1.0], 0.0), Err(Error::Singular { .. })));
        assert!(lm_step(&j, &[1.0, 1.0, 1.0], 1e-3).is_ok());
    }

    #[test]
    fn linear_problem_one_gauss_newton_step() {
        // Overdetermined linear residual A x - b.
        let a = sample(5, 3, 3);
        let b = [1.0, -2.0, 0.5, 3.0, 0.25];
        let a2 = a.clone();
        let p = Problem::new("linear", 3, 5, move |x, _| {
            Ok(a2.matvec(x).iter().zip(&b).map(|(u, v)| u - v).collect())
        });
        let r0 = p.residual(&[0.0; 3]).unwrap();
        let d = lm_step(&a, &r0, 0.0).unwrap();
        let g = a.tr_matvec(&p.residual(&d).unwrap());
        assert!(norm_inf(&g) <= 1e-10, "{g:?}");
    }

    #[test]
    fn zero_residual_start_returns_immediately() {
        let p = simple2_problem();
        let res = solve_lsq(&p, &[1.0, 1.0], &LsqOptions::default()).unwrap();
        assert!(res.ss <= 1e-20);
        assert!(res.jac_evals <= 1);
        assert_eq!(res.gradient.len(), 2);
    }

    #[test]
    fn singvals_descending_and_match_linalg() {
        let p = lookup("dgv-reduced:0121a").unwrap();
        let x0 = p.start("x0").unwrap().to_vec();
        let res = solve_lsq(&p, &x0, &LsqOptions::default()).unwrap();
        assert!(res.singvals.windows(2).all(|w| w[0] >= w[1]));
        assert!(res.singvals.iter().all(|s| *s >= 0.0));
        let jac = crate::diff::fd_jacobian(|z: &[f64]| p.residual(z), &res.x, JacobianScheme::central())
            .unwrap();
        assert_eq!(singular_values(&jac), res.singvals);
    }

    #[test]
    fn options_validated() {
        let mut o = LsqOptions::default();
        o.lambda_down = 1.5;
        assert!(o.validate().is_err());
        let mut o = LsqOptions::default();
        o.lambda_up = 1.0;
        assert!(o.validate().is_err());
    }
}
