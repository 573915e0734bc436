//! `dfpp`: experiment runner for directed first-passage percolation.
//!
//! Every verb writes a CSV table and a JSON report (into `--out` when given)
//! and prints one of them on stdout according to `--format`.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::CliError;

#[derive(Debug, Parser)]
#[command(name = "dfpp", version, about = "Directed first-passage percolation experiments")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Edge-time law as a JSON literal or a path to a JSON file,
    /// e.g. '{"bernoulli01": {"p0": 0.8}}'.
    #[arg(long, global = true)]
    dist: Option<String>,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true)]
    replicates: Option<usize>,
    /// Worker threads; 0 uses every available core. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Directory for result files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Verb {
    /// Time constant along each direction over a radius schedule.
    EstimateMu(commands::MuArgs),
    /// Lower-tail frequency of T / r.
    Tail(commands::TailArgs),
    /// Moments of T inside the cone.
    Moments(commands::MomentArgs),
    /// Survival function of the zero-threshold passage time.
    SigmaTail(commands::SigmaArgs),
    /// Phase, cone and time constant for Bernoulli 0/1 weights over a p grid.
    PhaseDiagram(commands::PhaseArgs),
    /// Edge speed and cone angles of oriented percolation.
    Cone(commands::ConeArgs),
    /// Threshold estimate from the drift of the right edge.
    PcEstimate(commands::PcArgs),
    /// Right-edge traces r_1..r_n.
    RightEdge(commands::RightEdgeArgs),
    /// Cluster-size survival function of oriented percolation.
    ClusterTail(commands::ClusterArgs),
    /// Boundary radius of the shape C_t along each direction.
    Shape(commands::ShapeArgs),
    /// Directed growth model occupancy.
    Growth(commands::GrowthArgs),
    /// Run a verification suite, or compare two result files.
    Verify(commands::VerifyArgs),
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let c = &cli.common;
    match &cli.verb {
        Verb::EstimateMu(a) => commands::estimate_mu(c, a),
        Verb::Tail(a) => commands::tail(c, a),
        Verb::Moments(a) => commands::moments(c, a),
        Verb::SigmaTail(a) => commands::sigma_tail(c, a),
        Verb::PhaseDiagram(a) => commands::phase_diagram(c, a),
        Verb::Cone(a) => commands::cone(c, a),
        Verb::PcEstimate(a) => commands::pc_estimate(c, a),
        Verb::RightEdge(a) => commands::right_edge(c, a),
        Verb::ClusterTail(a) => commands::cluster_tail(c, a),
        Verb::Shape(a) => commands::shape(c, a),
        Verb::Growth(a) => commands::growth(c, a),
        Verb::Verify(a) => commands::verify(c, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.common.workers).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run(cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
