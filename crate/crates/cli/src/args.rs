use std::path::PathBuf;

use advbound::bounds::{Method, Tolerances};
use advbound::report::Format;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "advbound", version, about = "Quantum adversary lower bounds on finite oracle problems")]
pub struct Cli {
    /// RNG seed for decompositions (decimal or 0x-prefixed hex).
    #[arg(long, global = true, env = "ADVBOUND_SEED", value_parser = parse_seed)]
    pub seed: Option<u64>,

    /// Worker threads for per-input parallel work.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Log progress to standard error.
    #[arg(long, short, global = true)]
    pub verbose: bool,

    #[command(flatten)]
    pub tol: TolArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct TolArgs {
    /// Margin on eigenvalue thresholds when splitting good and bad subspaces.
    #[arg(long, global = true, default_value_t = Tolerances::default().threshold)]
    pub threshold_tol: f64,
    /// Slack for `Γ|δ⟩ = |δ⟩`, `‖Γ̃‖ ≤ 1` and `Γ ⪰ I`.
    #[arg(long, global = true, default_value_t = Tolerances::default().validity)]
    pub validity_tol: f64,
    /// Slack for the zero condition.
    #[arg(long, global = true, default_value_t = Tolerances::default().zero_condition)]
    pub zero_tol: f64,
    /// Slack for `η ≤ 1 − ε`.
    #[arg(long, global = true, default_value_t = Tolerances::default().hypothesis)]
    pub hypothesis_tol: f64,
}

impl TolArgs {
    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            threshold: self.threshold_tol,
            validity: self.validity_tol,
            zero_condition: self.zero_tol,
            hypothesis: self.hypothesis_tol,
        }
    }
}

pub fn parse_seed(s: &str) -> Result<u64, String> {
    let t = s.trim();
    let r = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    r.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate one bound on one problem.
    Bound(BoundArgs),
    /// Reproduce a worked example end to end.
    #[command(subcommand)]
    CaseStudy(CaseStudy),
    /// Dump the isotypic decomposition of a group action.
    Decompose(DecomposeArgs),
    /// Simulate a query circuit and check the per-query inequalities.
    Simulate(SimulateArgs),
    /// Check the finite ingredients of the strong direct product theorem.
    Sdpt(SdptArgs),
    /// Run the invariant suites.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProblemName {
    Search,
    IndexErasure,
}

#[derive(Args, Debug, Clone)]
pub struct ProblemArgs {
    /// Built-in problem.
    #[arg(long, value_enum, required_unless_present = "problem_file")]
    pub problem: Option<ProblemName>,
    /// Problem JSON file.
    #[arg(long, conflicts_with = "problem")]
    pub problem_file: Option<PathBuf>,
    /// Input alphabet size (`n` for Search, `N` for Index Erasure).
    #[arg(long, short = 'n', visible_alias = "N")]
    pub n: Option<usize>,
    /// Output alphabet size `M` for Index Erasure.
    #[arg(long, short = 'm', visible_alias = "M")]
    pub m: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
    /// Write the report here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Additive,
    Hybrid,
    Multiplicative,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Additive => Method::Additive,
            MethodArg::Hybrid => Method::Hybrid,
            MethodArg::Multiplicative => Method::Multiplicative,
        }
    }
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    /// `λ̃` for the hybrid method or `λ` for the multiplicative method.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Weight `γ` of the built-in multiplicative adversaries.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Adversary JSON file (`{"kind": ..., "matrix": [[...]]}`).
    #[arg(long)]
    pub adversary_file: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Subcommand, Debug)]
pub enum CaseStudy {
    /// The three methods on Search against their closed forms.
    Search(SearchStudyArgs),
    /// Census, adversary, Δ-blocks and hybrid bound for Index Erasure.
    IndexErasure(IndexErasureStudyArgs),
}

#[derive(Args, Debug)]
pub struct SearchStudyArgs {
    #[arg(long, short = 'n', default_value_t = 16)]
    pub n: usize,
    /// Comma-separated ε values; defaults to 11 points on [0, 1 − 1/n − 0.01].
    #[arg(long, value_delimiter = ',')]
    pub epsilons: Option<Vec<f64>>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct IndexErasureStudyArgs {
    #[arg(long = "N", visible_alias = "n")]
    pub n: usize,
    #[arg(long = "M", visible_alias = "m")]
    pub m: usize,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// `λ̃` of the hybrid method.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub lambda: f64,
    /// Skip the Δ-block verification.
    #[arg(long)]
    pub no_blocks: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GroupName {
    Search,
    IndexErasure,
    Trivial,
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Built-in group; defaults to the problem's symmetric group.
    #[arg(long, value_enum)]
    pub group: Option<GroupName>,
    /// Group JSON file with 1-based `pi_generators` / `tau_generators`.
    #[arg(long, conflicts_with = "group")]
    pub group_file: Option<PathBuf>,
    /// Also split under the stabilizer of this input letter (1-based).
    #[arg(long)]
    pub restrict_x: Option<usize>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Circuit JSON file.
    #[arg(long, conflicts_with = "grover")]
    pub circuit: Option<PathBuf>,
    /// Grover iterations on Search.
    #[arg(long)]
    pub grover: Option<usize>,
    /// Check against `Γ(γ) = I + γ(I − Γ̃)` instead of the additive matrix.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// `λ̃` for the hybrid final-value claim.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SdptArgs {
    /// Search size.
    #[arg(long, short = 'n', default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 2.0)]
    pub gamma: f64,
    #[arg(long, short = 'k', value_delimiter = ',', default_values_t = vec![2, 3])]
    pub k: Vec<usize>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}
