mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "ciequil", version, about = "Conditional-independence equilibria of normal-form games")]
pub struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Dimension, degree and emptiness of the CI varieties for a generic game.
    Invariants(InvariantsArgs),
    /// Polynomial system in clique parameters for a game and graph.
    Equations(EquationsArgs),
    /// Check a profile for dependency, CI and Nash equilibrium.
    Verify(VerifyArgs),
    /// Find CI equilibria: exact two-stage solver or multi-start Newton.
    Solve(SolveArgs),
    /// Dimension, degree and decomposition of a graphical model.
    Model(ModelArgs),
    /// List the built-in games and their equilibrium families.
    Fixtures,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Rational,
    Double,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExportArg {
    Plain,
    M2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VerdictArg {
    Dependency,
    Ci,
    Nash,
}

#[derive(Args, Debug)]
pub struct InvariantsArgs {
    /// Strategy counts, e.g. 4,2,2.
    #[arg(long)]
    pub format: String,
    /// Graph: `edges:2-3,1-2`, `complete`, `empty`, or a JSON file.
    #[arg(long, default_value = "empty")]
    pub graph: String,
}

/// A game from a JSON file or a built-in fixture.
#[derive(Args, Debug)]
pub struct GameSource {
    #[arg(long, conflicts_with = "fixture")]
    pub game: Option<PathBuf>,
    #[arg(long)]
    pub fixture: Option<String>,
}

#[derive(Args, Debug)]
pub struct EquationsArgs {
    #[command(flatten)]
    pub source: GameSource,
    #[arg(long)]
    pub graph: String,
    #[arg(long, value_enum, default_value = "plain")]
    pub export: ExportArg,
    /// Write the export to a file instead of standard output.
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub source: GameSource,
    /// Defaults to the family's graph when `--family` is given.
    #[arg(long)]
    pub graph: Option<String>,
    #[arg(long, conflicts_with = "family")]
    pub profile: Option<PathBuf>,
    /// Fixture family label, e.g. G1.
    #[arg(long, requires = "fixture")]
    pub family: Option<String>,
    /// Comma-separated family parameters, e.g. 1/5.
    #[arg(long, requires = "family", allow_hyphen_values = true)]
    pub param: Option<String>,
    #[arg(long, env = "CIEQ_TOL", default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "rational")]
    pub backend: BackendArg,
    /// Verdict that decides the exit code.
    #[arg(long, value_enum, default_value = "ci")]
    pub require: VerdictArg,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: GameSource,
    /// Defaults to the fixture's one-edge graph.
    #[arg(long)]
    pub graph: Option<String>,
    #[arg(long, value_enum, default_value = "rational")]
    pub backend: BackendArg,
    /// Force the Newton sampler even when the two-stage solver applies.
    #[arg(long)]
    pub newton: bool,
    #[arg(long, default_value_t = 64)]
    pub starts: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    #[arg(long, env = "CIEQ_TOL", default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct ModelArgs {
    #[arg(long)]
    pub graph: String,
    #[arg(long)]
    pub format: String,
    #[arg(long)]
    pub degree: bool,
    #[arg(long)]
    pub dim: bool,
    #[arg(long)]
    pub decompose: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(outcome) => outcome.into(),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
