use super::{half_ss, Global};
use crate::linalg::norm2;

const ALPHA: f64 = 1e-4;

pub(super) enum LineSearchOutcome {
    Accepted {
        x: Vec<f64>,
        fvec: Vec<f64>,
        lambda: f64,
        slope: f64,
        step_norm: f64,
    },
    Failed,
}

/// Backtracks along `dir` from `x` until the Armijo condition
/// `f(x + lambda dir) <= f(x) + 1e-4 lambda slope` holds.
pub(super) fn line_search<E>(
    kind: Global,
    x: &[f64],
    fc: f64,
    dir: &[f64],
    slope: f64,
    xtol: f64,
    mut eval: E,
) -> LineSearchOutcome
where
    E: FnMut(&[f64]) -> Option<Vec<f64>>,
{
    let mut dir = dir.to_vec();
    let mut slope = slope;
    let max_step = 1e3 * norm2(x).max(1.0);
    let len = norm2(&dir);
    if len > max_step {
        let scale = max_step / len;
        dir.iter_mut().for_each(|d| *d *= scale);
        slope *= scale;
    }
    let rel_len = dir
        .iter()
        .zip(x)
        .map(|(d, xi)| d.abs() / xi.abs().max(1.0))
        .fold(0.0, f64::max);
    if rel_len == 0.0 {
        return LineSearchOutcome::Failed;
    }
    let min_lambda = xtol / rel_len;

    let mut lambda = 1.0f64;
    let mut prev: Option<(f64, f64)> = None;
    loop {
        let trial: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + lambda * d).collect();
        let fvec = eval(&trial);
        let fplus = fvec.as_deref().map_or(f64::INFINITY, half_ss);
        if fplus <= fc + ALPHA * lambda * slope {
            return LineSearchOutcome::Accepted {
                x: trial,
                fvec: fvec.expect("finite merit implies a residual"),
                lambda,
                slope,
                step_norm: lambda * norm2(&dir),
            };
        }
        if lambda < min_lambda {
            return LineSearchOutcome::Failed;
        }
        let next = if !fplus.is_finite() {
            0.1 * lambda
        } else {
            match (kind, prev) {
                (Global::Gline, _) => 0.5 * lambda,
                (Global::Cline, Some((lp, fp))) => cubic(fc, slope, lambda, fplus, lp, fp),
                _ => quadratic(fc, slope, lambda, fplus),
            }
        };
        prev = Some((lambda, fplus));
        lambda = if next.is_finite() {
            next.clamp(0.1 * lambda, 0.5 * lambda)
        } else {
            0.5 * lambda
        };
    }
}

/// Minimizer of the quadratic through `f(0)`, `f'(0)` and `f(lambda)`.
fn quadratic(fc: f64, slope: f64, lambda: f64, fplus: f64) -> f64 {
    -slope * lambda * lambda / (2.0 * (fplus - fc - lambda * slope))
}

/// Minimizer of the cubic through `f(0)`, `f'(0)` and the last two trials.
fn cubic(fc: f64, slope: f64, lambda: f64, fplus: f64, lp: f64, fp: f64) -> f64 {
    let r1 = fplus - fc - lambda * slope;
    let r2 = fp - fc - lp * slope;
    let denom = lambda - lp;
    let a = (r1 / (lambda * lambda) - r2 / (lp * lp)) / denom;
    let b = (-lp * r1 / (lambda * lambda) + lambda * r2 / (lp * lp)) / denom;
    if a == 0.0 {
        return -slope / (2.0 * b);
    }
    let disc = b * b - 3.0 * a * slope;
    if disc < 0.0 {
        return 0.5 * lambda;
    }
    // Two algebraically equal forms; pick the one without cancellation.
    if b <= 0.0 {
        (-b + disc.sqrt()) / (3.0 * a)
    } else {
        -slope / (b + disc.sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_exact_on_parabola() {
        // phi(l) = (l - 0.3)^2: phi(0) = 0.09, phi'(0) = -0.6, phi(1) = 0.49.
        let l = quadratic(0.09, -0.6, 1.0, 0.49);
        assert!((l - 0.3).abs() < 1e-14);
    }

    #[test]
    fn cubic_exact_on_cubic() {
        // phi(l) = l^3 - l: minimizer 1/sqrt(3).
        let phi = |l: f64| l * l * l - l;
        let l = cubic(0.0, -1.0, 1.0, phi(1.0), 2.0, phi(2.0));
        assert!((l - 1.0 / 3f64.sqrt()).abs() < 1e-14, "{l}");
    }

    #[test]
    fn armijo_holds_for_every_kind() {
        // r(x) = x^2 - 1 from x = 3, searched along an overlong Newton direction.
        let eval = |x: &[f64]| Some(vec![x[0] * x[0] - 1.0]);
        let x = [3.0];
        let fc = half_ss(&[8.0]);
        // Newton direction: J = 6, r = 8.
        let dir = [-8.0 / 6.0 * 10.0];
        let slope = 6.0 * 8.0 * dir[0];
        for kind in [Global::Cline, Global::Qline, Global::Gline] {
            match line_search(kind, &x, fc, &dir, slope, 1e-8, eval) {
                LineSearchOutcome::Accepted { fvec, lambda, .. } => {
                    assert!(half_ss(&fvec) <= fc + ALPHA * lambda * slope);
                    assert!(lambda < 1.0);
                }
                LineSearchOutcome::Failed => panic!("{kind} failed"),
            }
        }
    }

    #[test]
    fn ascent_direction_fails() {
        let eval = |x: &[f64]| Some(vec![x[0]]);
        let out = line_search(Global::Qline, &[1.0], 0.5, &[1.0], 1.0, 1e-8, eval);
        assert!(matches!(out, LineSearchOutcome::Failed));
    }
}
