use clap::{Args, Parser, Subcommand};
use nleq_core::diff::FdScheme;
use nleq_core::harness::OutputFormat;
use nleq_core::rootfind::{Global, Method};

#[derive(Debug, Parser)]
#[command(name = "nleq", version, about = "Solve and benchmark systems of nonlinear equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List registered problems and their named starts.
    List {
        #[arg(long, default_value = "table")]
        format: OutputFormat,
    },
    /// Run one solver from one start.
    Solve(SolveArgs),
    /// Run every method x global pair of the Newton/Broyden solver.
    Grid(GridArgs),
    /// Try method x global pairs in order until one converges.
    Cascade(CascadeArgs),
    /// Compare solvers over problems and starts, with optional timing.
    Compare(CompareArgs),
}

/// Options shared by every solver family; each applies only to the
/// families that have the matching field.
#[derive(Debug, Args, Default, Clone)]
pub struct Tuning {
    /// Difference scheme for Jacobians and gradients.
    #[arg(long)]
    pub jac: Option<FdScheme>,
    /// Iteration budget (Jacobian budget for lm).
    #[arg(long)]
    pub maxiter: Option<usize>,
    /// Residual tolerance (root).
    #[arg(long)]
    pub ftol: Option<f64>,
    /// Step tolerance (root), residual tolerance (dfsane), relative decrease
    /// (lm) or gradient tolerance (vm, cg; simplex size for neldermead).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Nonmonotone memory (dfsane).
    #[arg(long = "M")]
    pub memory: Option<usize>,
    /// Extrapolation history (dfsane-acc).
    #[arg(long)]
    pub history: Option<usize>,
    /// Comma-separated positive parameter scales (minimizers).
    #[arg(long, allow_hyphen_values = true)]
    pub parscale: Option<String>,
    /// Comma-separated residual multipliers (minimizers).
    #[arg(long, allow_hyphen_values = true)]
    pub rscale: Option<String>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub problem: String,
    /// Start name or comma-separated vector; defaults to the first start.
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<String>,
    /// root, dfsane, dfsane-acc, lm, vm, cg or neldermead.
    #[arg(long, default_value = "root")]
    pub solver: String,
    #[arg(long)]
    pub method: Option<Method>,
    #[arg(long)]
    pub global: Option<Global>,
    #[command(flatten)]
    pub tuning: Tuning,
    #[arg(long, default_value = "table")]
    pub format: OutputFormat,
    /// Timing repetitions (0 = no timing block).
    #[arg(long, default_value_t = 0)]
    pub reps: usize,
    /// Exit with status 1 when the solver does not converge.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub problem: String,
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<String>,
    /// Comma-separated methods (default: newton,broyden).
    #[arg(long, value_delimiter = ',')]
    pub method: Vec<Method>,
    /// Comma-separated globals (default: all seven).
    #[arg(long, value_delimiter = ',')]
    pub global: Vec<Global>,
    #[command(flatten)]
    pub tuning: Tuning,
    #[arg(long, default_value = "table")]
    pub format: OutputFormat,
    /// Run the cells on parallel threads.
    #[arg(long)]
    pub parallel: bool,
    /// Exit with status 1 unless every cell converges.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct CascadeArgs {
    #[arg(long)]
    pub problem: String,
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<String>,
    /// Comma-separated methods in trial order (default: newton,broyden).
    #[arg(long, value_delimiter = ',')]
    pub method: Vec<Method>,
    /// Comma-separated globals in trial order
    /// (default: qline,cline,gline,pwldog,dbldog,hook,none).
    #[arg(long, value_delimiter = ',')]
    pub global: Vec<Global>,
    #[command(flatten)]
    pub tuning: Tuning,
    #[arg(long, default_value = "table")]
    pub format: OutputFormat,
    /// Exit with status 1 when no pair converges.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Problems (repeat the flag or separate with commas).
    #[arg(long, value_delimiter = ',', required = true)]
    pub problem: Vec<String>,
    /// Starts (repeat the flag; inline vectors use commas). Default: all
    /// named starts of each problem.
    #[arg(long, allow_hyphen_values = true)]
    pub start: Vec<String>,
    /// Comma-separated solvers (default: root,dfsane,lm,vm).
    #[arg(long, value_delimiter = ',')]
    pub solver: Vec<String>,
    /// Methods for root solvers (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub method: Vec<Method>,
    /// Globals for root solvers (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub global: Vec<Global>,
    #[command(flatten)]
    pub tuning: Tuning,
    #[arg(long, default_value = "table")]
    pub format: OutputFormat,
    #[arg(long, default_value_t = 0)]
    pub reps: usize,
    /// Exit with status 1 unless every row converges.
    #[arg(long)]
    pub strict: bool,
}
