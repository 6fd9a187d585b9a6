use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "sympd", version, about = "Quasi-morphism invariants of area-preserving disk maps")]
pub struct Cli {
    /// Worker threads for the parallel parts (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluates one invariant on one flow.
    Invariant(InvariantArgs),
    /// Braid utilities.
    Braid {
        #[command(subcommand)]
        command: BraidCommand,
    },
    /// Reproducible experiment tables.
    Experiment {
        #[command(subcommand)]
        command: ExperimentCommand,
    },
    /// Runs the closed-form checks.
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InvariantName {
    Ruelle,
    Rot,
    Calabi,
    Gg,
}

impl InvariantName {
    pub fn key(self) -> &'static str {
        match self {
            InvariantName::Ruelle => "ruelle",
            InvariantName::Rot => "rot",
            InvariantName::Calabi => "calabi",
            InvariantName::Gg => "gg",
        }
    }
}

/// Options shared by everything that evaluates a functional.
#[derive(Debug, Clone, Args)]
pub struct FunctionalArgs {
    /// Braid quasi-morphism for gg: writhe, linking:i:j or signature.
    #[arg(long)]
    pub qm: Option<String>,
    /// Strand count for gg.
    #[arg(long)]
    pub n: Option<usize>,
    /// Monte Carlo samples for gg.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, env = "SYMPD_SEED")]
    pub seed: Option<u64>,
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InvariantArgs {
    /// Invariant to evaluate; overrides `invariant` from the config.
    pub invariant: Option<InvariantName>,
    /// Flow in the text form, e.g. `rigid:1.0` or `twist:amp=0.3,support=0.8`.
    #[arg(long)]
    pub flow: Option<String>,
    /// Homogenization power (a power of two; 1 gives the raw value).
    #[arg(long)]
    pub kmax: Option<u32>,
    #[command(flatten)]
    pub functional: FunctionalArgs,
}

#[derive(Debug, Subcommand)]
pub enum BraidCommand {
    /// Braid traced by a configuration along a flow.
    Extract {
        #[arg(long)]
        flow: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Configuration as `x,y;x,y;…`; defaults to points evenly spaced
        /// on the horizontal diameter.
        #[arg(long)]
        points: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCommand {
    /// Largest additivity defect over seeded flow pairs.
    Defect {
        #[arg(long, value_enum, default_value = "ruelle")]
        invariant: InvariantName,
        /// twist-rotation, boundary-rotating or compact.
        #[arg(long, default_value = "twist-rotation")]
        family: String,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        #[command(flatten)]
        functional: FunctionalArgs,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Deck value, extended value and lift-independence residuals.
    Extension {
        #[arg(long, value_enum, default_value = "ruelle")]
        invariant: InvariantName,
        /// A boundary-preserving lift.
        #[arg(long)]
        flow: String,
        #[arg(long, default_value_t = 2)]
        kmax: u32,
        /// Largest deck shift checked.
        #[arg(long, default_value_t = 3)]
        deck: i32,
        #[command(flatten)]
        functional: FunctionalArgs,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Ratio of the homogenized writhe average to the Calabi invariant.
    CalabiRatio {
        /// Compactly supported flows; repeat the flag for several.
        #[arg(long)]
        flow: Vec<String>,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 16)]
        kmax: u32,
        #[arg(long, env = "SYMPD_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// `φ(α^k)/k` for k = 1, 2, 4, …, kmax.
    Homogeneity {
        #[arg(long, value_enum, default_value = "ruelle")]
        invariant: InvariantName,
        #[arg(long)]
        flow: String,
        #[arg(long, default_value_t = 8)]
        kmax: u32,
        #[command(flatten)]
        functional: FunctionalArgs,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}
