//! The Dennis-Gay-Vu nonlinear equations test problem.
//!
//! Eight unknowns `a, b, c, d, t, u, v, w` and eight right-hand sides
//! `sigma_x, sigma_y, sigma_a .. sigma_f`. The first two equations are linear,
//! which lets `b` and `d` be eliminated to give a six-unknown reduced form.

use serde::Serialize;

use crate::error::{check_len, Error, Result};

pub const PROBLEM_IDS: [&str; 5] = ["791129", "791226", "0121a", "0121b", "0121c"];

pub const SIGMA_NAMES: [&str; 8] = [
    "sigmax", "sigmay", "sigmaa", "sigmab", "sigmac", "sigmad", "sigmae", "sigmaf",
];

/// Positions kept by the full-to-reduced parameter map.
const REDUCED_INDICES: [usize; 6] = [0, 2, 4, 5, 6, 7];

/// Data set for one problem id.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DgvData {
    pub pid: String,
    pub sigma: [f64; 8],
    /// Starting point: 8 entries, or 6 when `reduced`.
    pub x0: Vec<f64>,
    /// Published solution of the full problem.
    pub xstar: [f64; 8],
    pub reduced: bool,
}

/// Looks up the data for `pid`.
pub fn dgv_prep(pid: &str, reduced: bool) -> Result<DgvData> {
    let (sigma, x0, xstar): ([f64; 8], [f64; 8], [f64; 8]) = match pid {
        "791129" => (
            [0.485, -0.0019, -0.0581, 0.015, 0.105, 0.0406, 0.167, -0.399],
            [0.299, 0.186, -0.0273, 0.0254, -0.474, 0.474, -0.0892, 0.0892],
            [
                -6.321349025e-3,
                4.913213490e-1,
                -1.998156408e-3,
                9.815640840e-5,
                1.226569755e-1,
                -1.003153205e-1,
                -4.023517593,
                -2.071785527e-2,
            ],
        ),
        "791226" => (
            [-0.69, -0.044, -1.57, -1.31, -2.65, 2.0, -12.6, 9.48],
            [-0.3, -0.39, 0.3, -0.344, -1.2, 2.69, 1.59, -1.5],
            [
                -3.116266056e-1,
                -3.783733944e-1,
                3.282442301e-1,
                -3.722442301e-1,
                -1.282227094,
                2.494300312,
                1.554865879,
                -1.384637843,
            ],
        ),
        "0121a" => (
            [-0.816, -0.017, -1.826, -0.754, -4.839, -3.259, -14.023, 15.467],
            [-0.41, -0.775, 0.03, -0.047, -2.565, 2.565, -0.754, 0.754],
            [
                3.099869097e-3,
                -8.190998691e-1,
                -2.239405352e-4,
                -1.677605946e-2,
                2.681514498,
                2.250215931,
                -2.024170463e+1,
                7.970982952e-1,
            ],
        ),
        "0121b" => (
            [-0.809, -0.021, -2.04, -0.614, -6.903, -2.934, -26.328, 18.639],
            [-0.056, -0.753, 0.026, -0.047, -2.991, 2.991, -0.568, 0.568],
            [
                9.034542990e-3,
                -8.180345430e-1,
                -4.450738446e-4,
                -2.055492616e-2,
                2.773429036,
                2.529477259,
                -1.480097186e+1,
                5.220468844e-1,
            ],
        ),
        "0121c" => (
            [-0.807, -0.021, -2.379, -0.364, -10.541, -1.961, -51.551, 21.053],
            [-0.074, -0.733, 0.013, -0.034, -3.632, 3.632, -0.289, 0.289],
            [
                5.140417418e-2,
                -8.584041742e-1,
                1.047333626e-3,
                -2.204733363e-2,
                2.861205288,
                2.949155438,
                -8.304243489,
                -1.454992413e-1,
            ],
        ),
        other => return Err(Error::UnknownProblemId(other.to_string())),
    };
    let x0 = if reduced {
        dgv_reduce(&x0)?
    } else {
        x0.to_vec()
    };
    Ok(DgvData {
        pid: pid.to_string(),
        sigma,
        x0,
        xstar,
        reduced,
    })
}

/// Residuals of the full eight-equation problem.
pub fn dgv_full_residual(x: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    check_len("DGV full parameters", 8, x.len())?;
    check_len("DGV right-hand side", 8, rhs.len())?;
    let (a, b, c, d) = (x[0], x[1], x[2], x[3]);
    let (t, u, v, w) = (x[4], x[5], x[6], x[7]);
    Ok(dgv_core(a, b, c, d, t, u, v, w, rhs, true))
}

/// Residuals of the reduced six-equation problem, with `b = sigma_x - a` and
/// `d = sigma_y - c` substituted.
pub fn dgv_reduced_residual(x: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    check_len("DGV reduced parameters", 6, x.len())?;
    check_len("DGV right-hand side", 8, rhs.len())?;
    let a = x[0];
    let c = x[1];
    let b = rhs[0] - a;
    let d = rhs[1] - c;
    Ok(dgv_core(a, b, c, d, x[2], x[3], x[4], x[5], rhs, false))
}

#[allow(clippy::too_many_arguments)]
fn dgv_core(
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    t: f64,
    u: f64,
    v: f64,
    w: f64,
    rhs: &[f64],
    with_linear: bool,
) -> Vec<f64> {
    let [sx, sy, sa, sb, sc, sd, se, sf] = [
        rhs[0], rhs[1], rhs[2], rhs[3], rhs[4], rhs[5], rhs[6], rhs[7],
    ];
    let t2mv2 = t * t - v * v;
    let u2mw2 = u * u - w * w;
    let t2m3v2 = t * t - 3.0 * v * v;
    let v2m3t2 = v * v - 3.0 * t * t;
    let u2m3w2 = u * u - 3.0 * w * w;
    let w2m3u2 = w * w - 3.0 * u * u;
    let ctv = c * t * v;
    let duw = d * u * w;
    let atv = a * t * v;
    let buw = b * u * w;
    let at = a * t;
    let bu = b * u;
    let cv = c * v;
    let dw = d * w;
    let ct = c * t;
    let av = a * v;
    let du = d * u;
    let bw = b * w;

    let mut out = Vec::with_capacity(8);
    if with_linear {
        out.push(a + b - sx);
        out.push(c + d - sy);
    }
    out.push(at + bu - cv - dw - sa);
    out.push(av + bw + ct + du - sb);
    out.push(a * t2mv2 - 2.0 * ctv + b * u2mw2 - 2.0 * duw - sc);
    out.push(c * t2mv2 + 2.0 * atv + d * u2mw2 + 2.0 * buw - sd);
    out.push(at * t2m3v2 + cv * v2m3t2 + bu * u2m3w2 + dw * w2m3u2 - se);
    out.push(ct * t2m3v2 - av * v2m3t2 + du * u2m3w2 - bw * w2m3u2 - sf);
    out
}

/// Full to reduced parameters: keeps `a, c, t, u, v, w`.
pub fn dgv_reduce(x_full: &[f64]) -> Result<Vec<f64>> {
    check_len("DGV reduce input", 8, x_full.len())?;
    Ok(REDUCED_INDICES.iter().map(|&i| x_full[i]).collect())
}

/// Reduced to full parameters, restoring `b` and `d` from the linear
/// equations.
pub fn dgv_unreduce(x_red: &[f64], sigma: &[f64]) -> Result<Vec<f64>> {
    check_len("DGV unreduce input", 6, x_red.len())?;
    check_len("DGV right-hand side", 8, sigma.len())?;
    Ok(vec![
        x_red[0],
        sigma[0] - x_red[0],
        x_red[1],
        sigma[1] - x_red[1],
        x_red[2],
        x_red[3],
        x_red[4],
        x_red[5],
    ])
}
