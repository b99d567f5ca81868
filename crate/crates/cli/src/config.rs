//! Maps command-line flags onto solver options.

use std::collections::BTreeSet;

use nleq_core::diff::{FdScheme, JacobianScheme};
use nleq_core::harness::parse_vector;
use nleq_core::minimize::default_gradient_scheme;
use nleq_core::{
    Global, LsqOptions, Method, MinMethod, MinimizeOptions, Problem, RootOptions, SolverSpec,
    SpectralOptions,
};

use crate::args::Tuning;

pub const SOLVERS: [&str; 7] = ["root", "dfsane", "dfsane-acc", "lm", "vm", "cg", "neldermead"];

/// A usage error: printed with exit status 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

pub type UResult<T> = std::result::Result<T, Usage>;

/// Flags that were given, and which of them some solver consumed.
pub struct Flags<'a> {
    tuning: &'a Tuning,
    used: BTreeSet<&'static str>,
}

impl<'a> Flags<'a> {
    pub fn new(tuning: &'a Tuning) -> Self {
        Self { tuning, used: BTreeSet::new() }
    }

    fn given(&self) -> Vec<&'static str> {
        let t = self.tuning;
        let mut out = Vec::new();
        let mut push = |set: bool, name| {
            if set {
                out.push(name)
            }
        };
        push(t.jac.is_some(), "--jac");
        push(t.maxiter.is_some(), "--maxiter");
        push(t.ftol.is_some(), "--ftol");
        push(t.tol.is_some(), "--tol");
        push(t.memory.is_some(), "--M");
        push(t.history.is_some(), "--history");
        push(t.parscale.is_some(), "--parscale");
        push(t.rscale.is_some(), "--rscale");
        out
    }

    /// Fails on the first given flag that no solver consumed.
    pub fn finish(&self, what: &str) -> UResult<()> {
        match self.given().into_iter().find(|f| !self.used.contains(f)) {
            Some(flag) => Err(Usage(format!("{flag} does not apply to {what}"))),
            None => Ok(()),
        }
    }

    pub fn root(&mut self, mut opts: RootOptions) -> RootOptions {
        let t = self.tuning;
        if let Some(s) = t.jac {
            opts.jacobian = JacobianScheme::new(s);
            self.used.insert("--jac");
        }
        if let Some(v) = t.maxiter {
            opts.max_iter = v;
            self.used.insert("--maxiter");
        }
        if let Some(v) = t.ftol {
            opts.ftol = v;
            self.used.insert("--ftol");
        }
        if let Some(v) = t.tol {
            opts.xtol = v;
            self.used.insert("--tol");
        }
        opts
    }

    pub fn spectral(&mut self, accelerated: bool) -> SpectralOptions {
        let t = self.tuning;
        let mut opts = SpectralOptions {
            acceleration: accelerated,
            ..SpectralOptions::default()
        };
        if let Some(v) = t.maxiter {
            opts.max_iter = v;
            self.used.insert("--maxiter");
        }
        if let Some(v) = t.tol {
            opts.tol = v;
            self.used.insert("--tol");
        }
        if let Some(v) = t.memory {
            opts.memory = v;
            self.used.insert("--M");
        }
        if accelerated {
            if let Some(v) = t.history {
                opts.history = v;
                self.used.insert("--history");
            }
        }
        opts
    }

    pub fn lsq(&mut self) -> LsqOptions {
        let t = self.tuning;
        let mut opts = LsqOptions::default();
        if let Some(s) = t.jac {
            opts.jacobian = JacobianScheme::new(s);
            self.used.insert("--jac");
        }
        if let Some(v) = t.maxiter {
            opts.max_jac = v;
            self.used.insert("--maxiter");
        }
        if let Some(v) = t.tol {
            opts.tol = v;
            self.used.insert("--tol");
        }
        opts
    }

    pub fn minimize(&mut self, method: MinMethod) -> UResult<(MinimizeOptions, Option<Vec<f64>>)> {
        let t = self.tuning;
        let mut opts = MinimizeOptions::new(method);
        if let Some(s) = t.jac {
            // Gradient-free Nelder-Mead has no use for a difference scheme.
            if method != MinMethod::NelderMead {
                opts.gradient = match s {
                    FdScheme::Central => default_gradient_scheme(),
                    other => JacobianScheme::new(other),
                };
                self.used.insert("--jac");
            }
        }
        if let Some(v) = t.maxiter {
            opts.max_iter = v;
            self.used.insert("--maxiter");
        }
        if let Some(v) = t.tol {
            match method {
                MinMethod::NelderMead => opts.simplex_tol = v,
                _ => opts.gtol = Some(v),
            }
            self.used.insert("--tol");
        }
        if let Some(s) = &t.parscale {
            opts.parscale = Some(parse_vector(s)?);
            self.used.insert("--parscale");
        }
        let rscale = match &t.rscale {
            Some(s) => {
                self.used.insert("--rscale");
                Some(parse_vector(s)?)
            }
            None => None,
        };
        Ok((opts, rscale))
    }
}

/// Builds the solver list for `solve` and `compare`. Root solvers expand
/// over `methods` x `globals`; either list may be empty for the defaults.
pub fn build_solvers(
    names: &[String],
    methods: &[Method],
    globals: &[Global],
    flags: &mut Flags,
) -> UResult<Vec<SolverSpec>> {
    let mut out = Vec::new();
    let mut rooted = false;
    for name in names {
        match name.as_str() {
            "root" => {
                rooted = true;
                let base = RootOptions::default();
                let ms = if methods.is_empty() { vec![base.method] } else { methods.to_vec() };
                let gs = if globals.is_empty() { vec![base.global] } else { globals.to_vec() };
                for &m in &ms {
                    for &g in &gs {
                        out.push(SolverSpec::root(flags.root(RootOptions::new(m, g))));
                    }
                }
            }
            "dfsane" => out.push(SolverSpec::spectral(flags.spectral(false))),
            "dfsane-acc" => out.push(SolverSpec::spectral(flags.spectral(true))),
            "lm" => out.push(SolverSpec::lsq(flags.lsq())),
            other => {
                let method: MinMethod = other.parse().map_err(|_| {
                    Usage(format!(
                        "unknown solver `{other}` (expected one of {})",
                        SOLVERS.join(", ")
                    ))
                })?;
                let (opts, rscale) = flags.minimize(method)?;
                out.push(SolverSpec::minimizer(opts, rscale));
            }
        }
    }
    if !rooted && !methods.is_empty() {
        return Err(Usage("--method only applies to the root solver".into()));
    }
    if !rooted && !globals.is_empty() {
        return Err(Usage("--global only applies to the root solver".into()));
    }
    Ok(out)
}

/// Rejects scale vectors whose length does not fit a problem.
pub fn check_scales(tuning: &Tuning, problem: &Problem) -> UResult<()> {
    for (flag, spec, n) in [
        ("--parscale", &tuning.parscale, problem.n_params()),
        ("--rscale", &tuning.rscale, problem.n_residuals()),
    ] {
        if let Some(s) = spec {
            let v = parse_vector(s)?;
            if v.len() != n {
                return Err(Usage(format!(
                    "{flag} has {} entries but {} needs {n}",
                    v.len(),
                    problem.name()
                )));
            }
        }
    }
    Ok(())
}
