use crate::error::{check_len, Error, Result};

/// Two equations with a root at `(1, 1)` and a non-root local minimum of the
/// sum of squares near `(1.485, 0)`.
pub fn simple2_residual(x: &[f64]) -> Result<Vec<f64>> {
    check_len("simple2 parameters", 2, x.len())?;
    Ok(vec![
        x[0] * x[0] + x[1] * x[1] - 2.0,
        (x[0] - 1.0).exp() + x[1] * x[1] * x[1] - 2.0,
    ])
}

fn min_size(context: &'static str, n: usize) -> Result<()> {
    if n < 3 {
        Err(Error::Dimension {
            context,
            expected: 3,
            got: n,
        })
    } else {
        Ok(())
    }
}

/// Banded trigonometric-exponential system; `ones(n)` is a root.
pub fn trigexp_residual(x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    min_size("trigexp parameters (minimum 3)", n)?;
    let mut r = vec![0.0; n];
    r[0] = 3.0 * x[0] * x[0] + 2.0 * x[1] - 5.0 + (x[0] - x[1]).sin() * (x[0] + x[1]).sin();
    for i in 1..n - 1 {
        r[i] = -x[i - 1] * (x[i - 1] - x[i]).exp()
            + x[i] * (4.0 + 3.0 * x[i] * x[i])
            + 2.0 * x[i + 1]
            + (x[i] - x[i + 1]).sin() * (x[i] + x[i + 1]).sin()
            - 8.0;
    }
    r[n - 1] = -x[n - 2] * (x[n - 2] - x[n - 1]).exp() + 4.0 * x[n - 1] - 3.0;
    Ok(r)
}

/// Tridiagonal Abbott-Brent system with boundary value 20 in the last
/// equation.
pub fn brent_residual(x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    min_size("brent parameters (minimum 3)", n)?;
    let mut r = vec![0.0; n];
    r[0] = 3.0 * x[0] * (x[1] - 2.0 * x[0]) + x[1] * x[1] / 4.0;
    for i in 1..n - 1 {
        let gap = x[i + 1] - x[i - 1];
        r[i] = 3.0 * x[i] * (x[i + 1] - 2.0 * x[i] + x[i - 1]) + gap * gap / 4.0;
    }
    let gap = 20.0 - x[n - 2];
    r[n - 1] = 3.0 * x[n - 1] * (20.0 - 2.0 * x[n - 1] + x[n - 2]) + gap * gap / 4.0;
    Ok(r)
}
