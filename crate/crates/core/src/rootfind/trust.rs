use super::{half_ss, newton_step, Global};
use crate::linalg::{dot, norm2, solve_linear, Matrix};

const ALPHA: f64 = 1e-4;

pub(super) struct TrustStep {
    pub s: Vec<f64>,
    /// Model change `0.5 ||r + J s||^2 - 0.5 ||r||^2`.
    pub predicted: f64,
    pub newton: bool,
}

pub(super) struct TrustRegion {
    radius: f64,
    max_radius: f64,
    /// Hook shift carried between iterations.
    mu: f64,
}

/// Steepest-descent minimizer of the linear model, unconstrained.
fn cauchy_step(jac: &Matrix, g: &[f64]) -> Vec<f64> {
    let jg = jac.matvec(g);
    let gg = dot(g, g);
    let jgjg = dot(&jg, &jg);
    if jgjg == 0.0 {
        return vec![0.0; g.len()];
    }
    let alpha = gg / jgjg;
    g.iter().map(|v| -alpha * v).collect()
}

fn initial_radius(jac: &Matrix, fvec: &[f64]) -> f64 {
    let g = jac.tr_matvec(fvec);
    let len = norm2(&cauchy_step(jac, &g));
    if len > 0.0 && len.is_finite() {
        len.clamp(1e-3, 1e3)
    } else {
        1.0
    }
}

fn scaled(v: &[f64], c: f64) -> Vec<f64> {
    v.iter().map(|x| c * x).collect()
}

/// Point `a + t (b - a)` with norm `radius`, where `||a|| <= radius < ||b||`.
fn boundary_point(a: &[f64], b: &[f64], radius: f64) -> Vec<f64> {
    let d: Vec<f64> = b.iter().zip(a).map(|(p, q)| p - q).collect();
    let dd = dot(&d, &d);
    let ad = dot(a, &d);
    let aa = dot(a, a);
    let c = aa - radius * radius;
    let disc = (ad * ad - dd * c).max(0.0);
    let t = if ad <= 0.0 {
        (-ad + disc.sqrt()) / dd
    } else {
        -c / (ad + disc.sqrt())
    };
    a.iter().zip(&d).map(|(p, q)| p + t * q).collect()
}

fn steepest_to_boundary(g: &[f64], radius: f64) -> Vec<f64> {
    scaled(g, -radius / norm2(g))
}

impl TrustRegion {
    pub fn new(jac: &Matrix, fvec: &[f64], x0: &[f64]) -> Self {
        Self {
            radius: initial_radius(jac, fvec),
            max_radius: 1e3 * norm2(x0).max(1.0),
            mu: 0.0,
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Restores a usable radius after the Jacobian was recomputed.
    pub fn clamp_below(&mut self, floor: f64) {
        if self.radius < floor {
            self.radius = floor.max(1e-3).min(self.max_radius);
        }
        self.mu = 0.0;
    }

    pub fn step(&mut self, global: Global, jac: &Matrix, fvec: &[f64]) -> TrustStep {
        let g = jac.tr_matvec(fvec);
        let newton = newton_step(jac, fvec).ok().filter(|s| s.iter().all(|v| v.is_finite()));
        let s = match global {
            Global::Pwldog => self.dogleg(jac, &g, newton.as_deref(), false),
            Global::Dbldog => self.dogleg(jac, &g, newton.as_deref(), true),
            Global::Hook => self.hook(jac, &g, newton.as_deref()),
            _ => unreachable!("not a trust-region strategy"),
        };
        let model: Vec<f64> = jac.matvec(&s).iter().zip(fvec).map(|(a, b)| a + b).collect();
        TrustStep {
            predicted: half_ss(&model) - half_ss(fvec),
            newton: newton.as_deref() == Some(&s[..]),
            s,
        }
    }

    fn dogleg(&self, jac: &Matrix, g: &[f64], newton: Option<&[f64]>, double: bool) -> Vec<f64> {
        let radius = self.radius;
        if norm2(g) == 0.0 {
            return newton.map_or_else(|| vec![0.0; g.len()], <[f64]>::to_vec);
        }
        if let Some(sn) = newton {
            if norm2(sn) <= radius {
                return sn.to_vec();
            }
        }
        let sc = cauchy_step(jac, g);
        let sc_len = norm2(&sc);
        if sc_len >= radius || sc_len == 0.0 {
            return steepest_to_boundary(g, radius);
        }
        let Some(sn) = newton else {
            return sc;
        };
        let target = if double {
            // Relaxed Newton point eta * sN, with 0.2 + 0.8 gamma <= eta <= 1.
            let gsn = -dot(g, sn);
            let gg = dot(g, g);
            let jg = jac.matvec(g);
            let gamma = if gsn > 0.0 {
                (gg * gg / (dot(&jg, &jg) * gsn)).min(1.0)
            } else {
                1.0
            };
            let eta = 0.2 + 0.8 * gamma;
            let sn_len = norm2(sn);
            if eta * sn_len <= radius {
                return scaled(sn, radius / sn_len);
            }
            scaled(sn, eta)
        } else {
            sn.to_vec()
        };
        boundary_point(&sc, &target, radius)
    }

    /// Shifted step `-(J^T J + mu I)^{-1} g` with `mu` chosen so that the step
    /// length is close to the trust radius.
    fn hook(&mut self, jac: &Matrix, g: &[f64], newton: Option<&[f64]>) -> Vec<f64> {
        let radius = self.radius;
        if let Some(sn) = newton {
            if norm2(sn) <= radius {
                self.mu = 0.0;
                return sn.to_vec();
            }
        }
        let gnorm = norm2(g);
        if gnorm == 0.0 {
            return vec![0.0; g.len()];
        }
        let h = jac.gram();
        let n = g.len();
        let shifted = |mu: f64| -> Option<(Vec<f64>, f64, f64)> {
            let mut a = h.clone();
            for i in 0..n {
                a[(i, i)] += mu;
            }
            let s = solve_linear(&a, &scaled(g, -1.0)).ok()?;
            let w = solve_linear(&a, &s).ok()?;
            let len = norm2(&s);
            let dphi = -dot(&s, &w) / len;
            Some((s, len, dphi))
        };

        let mut low = 0.0;
        if newton.is_some() {
            if let Some((_, len, dphi)) = shifted(0.0) {
                low = -(len - radius) / dphi;
            }
        }
        let mut up = gnorm / radius;
        let mut mu = self.mu;
        let mut best = steepest_to_boundary(g, radius);
        for _ in 0..60 {
            if !(mu > low && mu < up) {
                mu = (low * up).sqrt().max(1e-3 * up);
            }
            let Some((s, len, dphi)) = shifted(mu) else {
                low = mu;
                mu = 0.0;
                continue;
            };
            let phi = len - radius;
            if len <= radius {
                best = s.clone();
            }
            if (0.95 * radius..=radius).contains(&len) {
                self.mu = mu;
                return s;
            }
            if phi < 0.0 {
                up = mu;
            } else {
                low = low.max(mu - phi / dphi);
            }
            mu -= (len / radius) * (phi / dphi);
            if up - low <= 1e-14 * up {
                break;
            }
        }
        self.mu = mu.max(0.0);
        let len = norm2(&best);
        if len > radius {
            scaled(&best, radius / len)
        } else {
            best
        }
    }

    /// Accepts or rejects a trial step and updates the radius.
    ///
    /// `prev` is the merit at a point already accepted in this iteration
    /// before the radius was doubled to try a longer step.
    pub fn assess(&mut self, trial: &Trial, prev: Option<f64>, may_expand: bool) -> Verdict {
        let Trial {
            fc,
            fnew,
            slope,
            predicted,
            step_norm,
            newton,
        } = *trial;
        let sufficient = fnew.is_finite() && fnew < fc && fnew <= fc + ALPHA * slope;
        if let Some(fprev) = prev {
            if !sufficient || fnew >= fprev {
                self.radius *= 0.5;
                return Verdict::Revert;
            }
        }
        if !fnew.is_finite() {
            self.radius = 0.1 * step_norm.min(self.radius);
            return Verdict::Reject;
        }
        let change = fnew - fc;
        if !sufficient {
            let denom = 2.0 * (change - slope);
            let t = if slope < 0.0 && denom > 0.0 {
                -slope * step_norm / denom
            } else {
                0.5 * step_norm
            };
            self.radius = t.clamp(0.1 * step_norm, 0.5 * step_norm);
            return Verdict::Reject;
        }
        let good_model = (predicted - change).abs() <= 0.1 * change.abs() || change <= slope;
        if may_expand && good_model && !newton && self.radius <= 0.99 * self.max_radius {
            self.radius = (2.0 * self.radius).min(self.max_radius);
            return Verdict::Expand;
        }
        if change >= 0.1 * predicted {
            self.radius *= 0.5;
        } else if change <= 0.75 * predicted {
            self.radius = (2.0 * self.radius).min(self.max_radius);
        }
        Verdict::Accept
    }
}

#[derive(Debug, Clone, Copy)]
pub(super) struct Trial {
    pub fc: f64,
    pub fnew: f64,
    /// `g^T s`
    pub slope: f64,
    pub predicted: f64,
    pub step_norm: f64,
    /// Whether the full Newton step was taken.
    pub newton: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum Verdict {
    Accept,
    Reject,
    /// Accept tentatively and retry with a doubled radius.
    Expand,
    /// The longer step was worse; fall back to the tentative point.
    Revert,
}
