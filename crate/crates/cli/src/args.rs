use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Radial sign-changing solutions of weighted p-Laplace equations by shooting.
///
/// Exit codes: 0 success, 1 solver or input failure, 2 a hypothesis or
/// certificate failed, 3 no k-node solution found, 64 usage error.
#[derive(Debug, Parser)]
#[command(name = "nodalshoot", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Problem JSON file, or `builtin:<name>` for a library problem.
    #[arg(long, global = true)]
    pub config: Option<String>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Accepted for scripting symmetry; nothing in the tool is random.
    #[arg(long, global = true)]
    pub seedless: bool,
    /// Relative step tolerance, overriding the config.
    #[arg(long, global = true)]
    pub tol_rel: Option<f64>,
    /// Absolute step tolerance, overriding the config.
    #[arg(long, global = true)]
    pub tol_abs: Option<f64>,
    /// Integration end radius, overriding the config.
    #[arg(long, global = true)]
    pub r_max: Option<f64>,
    /// Run even when a hypothesis check fails.
    #[arg(long, global = true)]
    pub force: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one trajectory from `v(0) = λ`.
    Solve {
        /// Shooting amplitude; defaults to the library amplitude for `builtin:` configs.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
    },
    /// Find the amplitude of the solution with exactly `k` nodes.
    Shoot {
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
    },
    /// Classify a geometric range of amplitudes.
    Sweep {
        #[arg(long, default_value_t = 1.0)]
        lambda_min: f64,
        #[arg(long, default_value_t = 100.0)]
        lambda_max: f64,
        #[arg(long, default_value_t = 25)]
        count: usize,
    },
    /// Report every structural hypothesis on the problem.
    Check,
    /// Tabulate the single weight obtained from a two-weight problem.
    Reduce {
        /// Number of rows of the table.
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// Run certificates on a computed or stored trajectory.
    Diag(DiagArgs),
}

#[derive(Debug, Args)]
pub struct DiagArgs {
    #[arg(long, allow_hyphen_values = true, conflicts_with = "traj")]
    pub lambda: Option<f64>,
    /// Trajectory CSV written by `solve` or `shoot`.
    #[arg(long)]
    pub traj: Option<PathBuf>,
    /// Event sidecar of `--traj`; defaults to `events.json` next to it.
    #[arg(long, requires = "traj")]
    pub events: Option<PathBuf>,
    /// Rotation certificate on the band `[c1/2, c1]`; repeatable.
    #[arg(long = "rotation", value_name = "C1")]
    pub rotation: Vec<f64>,
    /// Dissipation identity residual.
    #[arg(long)]
    pub dissipation: bool,
    /// Residual of the `h = q^{p'}` identity.
    #[arg(long)]
    pub h_identity: bool,
    /// `R(λ)` table at the level `sqrt(F(λ))`.
    #[arg(long)]
    pub layer_probe: bool,
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000,10000")]
    pub lambdas: Vec<f64>,
    /// Multiplier of the dissipation identity; defaults to `μ*`.
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long, default_value_t = 1e-5)]
    pub residual_tol: f64,
}

impl DiagArgs {
    pub fn any_selected(&self) -> bool {
        !self.rotation.is_empty() || self.dissipation || self.h_identity || self.layer_probe
    }
}
