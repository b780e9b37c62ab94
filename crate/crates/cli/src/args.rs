use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "thermogeom",
    version,
    about = "Thermodynamic metrics, degeneracy loci and curvature scans"
)]
pub struct Cli {
    /// Flat `key = value` configuration file. Flags override its entries.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Single-component gases: ideal, van der Waals, Berthelot.
    Gas(GasArgs),
    /// Closed-system chemical reactions.
    Reaction(ReactionArgs),
    /// Open multicomponent solutions.
    Solution(SolutionArgs),
    /// Run every acceptance check and report PASS/FAIL.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GasAction {
    Metric,
    Curvature,
    Spinodal,
    Critical,
    PtBoundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReactionAction {
    WCurve,
    CriticalExtent,
    GibbsScan,
    Metric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolutionAction {
    Metric,
    Decompose,
}

#[derive(Debug, Args)]
pub struct GasArgs {
    #[arg(value_enum)]
    pub action: GasAction,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Args)]
pub struct ReactionArgs {
    #[arg(value_enum)]
    pub action: ReactionAction,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Args)]
pub struct SolutionArgs {
    #[arg(value_enum)]
    pub action: SolutionAction,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub opts: Options,
}

/// Every setting that may also appear in a configuration file. Values stay
/// textual here and are parsed once flags and file are merged.
#[derive(Debug, Default, Clone, Args)]
pub struct Options {
    /// Gas model: ideal, vdw or berthelot.
    #[arg(long)]
    pub model: Option<String>,
    /// Attraction constant.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Excluded volume.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// Gas constant used by the gas models.
    #[arg(long = "R", allow_hyphen_values = true)]
    pub r: Option<String>,
    /// Heat capacity at constant volume.
    #[arg(long, allow_hyphen_values = true)]
    pub cv: Option<String>,
    /// Temperature.
    #[arg(long = "T", allow_hyphen_values = true)]
    pub t: Option<String>,
    /// Pressure.
    #[arg(long = "p", allow_hyphen_values = true)]
    pub p: Option<String>,
    /// Reduced temperature for `gas pt-boundary`.
    #[arg(long)]
    pub tr: Option<String>,
    /// Finite-difference base step; selects the finite-difference curvature pipeline.
    #[arg(long)]
    pub step: Option<String>,
    /// Built-in reaction: synthesis, dissociation, displacement or a-to-b.
    #[arg(long)]
    pub builtin: Option<String>,
    /// Stoichiometric coefficients, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<String>,
    /// Initial moles, comma separated.
    #[arg(long)]
    pub n0: Option<String>,
    /// Species labels, comma separated.
    #[arg(long)]
    pub species: Option<String>,
    /// Standard chemical potentials per species, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<String>,
    /// Regular-solution interaction energy for `reaction gibbs-scan`.
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<String>,
    /// Mole numbers of a solution, comma separated.
    #[arg(long)]
    pub moles: Option<String>,
    /// Number of species when solution moles are drawn at random.
    #[arg(long)]
    pub components: Option<String>,
    /// Margules interaction constant of a binary solution.
    #[arg(long, allow_hyphen_values = true)]
    pub margules: Option<String>,
    /// Scan range `lo:hi`.
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
    /// Number of scan samples.
    #[arg(long)]
    pub samples: Option<String>,
    /// Seed for randomly drawn states.
    #[arg(long)]
    pub seed: Option<String>,
    /// Output path (CSV, or the JSON report for `verify`).
    #[arg(long)]
    pub out: Option<String>,
    /// Restrict `verify` to one section (gas, metric, reaction, solution) or criterion numbers.
    #[arg(long)]
    pub only: Option<String>,
    /// Print the `verify` report as JSON on stdout.
    #[arg(long)]
    pub json: bool,
}

impl Options {
    /// `(key, value)` pairs for every flag that was given.
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        let all: [(&'static str, &Option<String>); 23] = [
            ("model", &self.model),
            ("a", &self.a),
            ("b", &self.b),
            ("R", &self.r),
            ("cv", &self.cv),
            ("T", &self.t),
            ("p", &self.p),
            ("tr", &self.tr),
            ("step", &self.step),
            ("builtin", &self.builtin),
            ("nu", &self.nu),
            ("n0", &self.n0),
            ("species", &self.species),
            ("mu", &self.mu),
            ("omega", &self.omega),
            ("moles", &self.moles),
            ("components", &self.components),
            ("margules", &self.margules),
            ("range", &self.range),
            ("samples", &self.samples),
            ("seed", &self.seed),
            ("out", &self.out),
            ("only", &self.only),
        ];
        let mut out: Vec<(&'static str, String)> = all
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k, v.clone())))
            .collect();
        if self.json {
            out.push(("json", "true".into()));
        }
        out
    }
}

impl Command {
    pub fn options(&self) -> &Options {
        match self {
            Command::Gas(a) => &a.opts,
            Command::Reaction(a) => &a.opts,
            Command::Solution(a) => &a.opts,
            Command::Verify(a) => &a.opts,
        }
    }
}
