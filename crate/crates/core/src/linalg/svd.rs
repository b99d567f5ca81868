use super::{dot, Matrix};

const OFF_DIAGONAL_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 80;

/// Thin singular value decomposition `A = U diag(s) V^T` with `s` sorted in
/// descending order. `U` is `m x k`, `V` is `n x k`, `k = min(m, n)`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub s: Vec<f64>,
    pub v: Matrix,
}

impl Svd {
    /// One-sided (Hestenes) Jacobi iteration. Column pairs are rotated until
    /// every pair is orthogonal to within `1e-12` relative.
    pub fn compute(a: &Matrix) -> Self {
        if a.rows() < a.cols() {
            let t = Self::compute(&a.transpose());
            return Self {
                u: t.v,
                s: t.s,
                v: t.u,
            };
        }
        let m = a.rows();
        let n = a.cols();
        let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
        let mut vcols: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                e
            })
            .collect();
        orthogonalize(&mut cols, Some(&mut vcols));

        let mut order: Vec<(f64, usize)> = cols
            .iter()
            .enumerate()
            .map(|(j, c)| (dot(c, c).sqrt(), j))
            .collect();
        order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

        let mut u = Matrix::zeros(m, n);
        let mut v = Matrix::zeros(n, n);
        let mut s = Vec::with_capacity(n);
        for (k, &(sigma, j)) in order.iter().enumerate() {
            s.push(sigma);
            if sigma > 0.0 {
                let scaled: Vec<f64> = cols[j].iter().map(|x| x / sigma).collect();
                u.set_column(k, &scaled);
            }
            v.set_column(k, &vcols[j]);
        }
        Self { u, s, v }
    }
}

/// Rotates column pairs until all are mutually orthogonal; applies the same
/// rotations to `vcols` when given.
fn orthogonalize(cols: &mut [Vec<f64>], mut vcols: Option<&mut Vec<Vec<f64>>>) {
    let n = cols.len();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        let mut norms: Vec<f64> = cols.iter().map(|c| dot(c, c)).collect();
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = norms[p];
                let beta = norms[q];
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= OFF_DIAGONAL_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(cols, p, q, c, s);
                if let Some(v) = vcols.as_deref_mut() {
                    rotate(v, p, q, c, s);
                }
                norms[p] = alpha - t * gamma;
                norms[q] = beta + t * gamma;
            }
        }
        if !rotated {
            break;
        }
    }
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    let cp = &mut left[p];
    let cq = &mut right[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = *x;
        let xq = *y;
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// Singular values of `a`, descending, length `min(m, n)`.
pub fn singular_values(a: &Matrix) -> Vec<f64> {
    let a = if a.rows() < a.cols() {
        a.transpose()
    } else {
        a.clone()
    };
    let mut cols: Vec<Vec<f64>> = (0..a.cols()).map(|j| a.column(j)).collect();
    orthogonalize(&mut cols, None);
    let mut s: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Minimum-norm least-squares solution of `A x ~ b`, discarding singular
/// values below `rel_tol * s_max`.
pub fn lstsq_truncated(a: &Matrix, b: &[f64], rel_tol: f64) -> Vec<f64> {
    let svd = Svd::compute(a);
    let cutoff = svd.s.first().copied().unwrap_or(0.0) * rel_tol;
    let mut x = vec![0.0; a.cols()];
    for (k, &sigma) in svd.s.iter().enumerate() {
        if sigma <= cutoff || sigma == 0.0 {
            continue;
        }
        let coef = (0..a.rows()).map(|i| svd.u[(i, k)] * b[i]).sum::<f64>() / sigma;
        for (j, xj) in x.iter_mut().enumerate() {
            *xj += coef * svd.v[(j, k)];
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_values() {
        let s = singular_values(&Matrix::from_diag(&[1.0, 3.0]));
        assert_eq!(s, vec![3.0, 1.0]);
    }

    #[test]
    fn zero_matrix() {
        assert_eq!(singular_values(&Matrix::zeros(3, 2)), vec![0.0, 0.0]);
    }

    #[test]
    fn wide_matrix_reconstructs() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.5]]).unwrap();
        let svd = Svd::compute(&a);
        assert_eq!(svd.s.len(), 2);
        for i in 0..2 {
            for j in 0..3 {
                let r: f64 = (0..2).map(|k| svd.u[(i, k)] * svd.s[k] * svd.v[(j, k)]).sum();
                assert!((r - a[(i, j)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lstsq_overdetermined_line_fit() {
        // y = 1 + 2t sampled exactly.
        let a = Matrix::from_rows(&[
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![1.0, 2.0],
            vec![1.0, 3.0],
        ])
        .unwrap();
        let x = lstsq_truncated(&a, &[1.0, 3.0, 5.0, 7.0], 1e-12);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn lstsq_rank_deficient_gives_minimum_norm() {
        let a = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let x = lstsq_truncated(&a, &[2.0, 2.0], 1e-12);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }
}
