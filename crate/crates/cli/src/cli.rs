use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "erank",
    version,
    about = "Existential formulas over the language of rings: quantifier-count bounds, characteristic-p collapse, finite-field semantics"
)]
pub struct Cli {
    /// Output format (each command has its own default).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct FormulaInput {
    /// Formula text.
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    pub formula: Option<String>,
    /// File holding the formula.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Accept `<` atoms.
    #[arg(long)]
    pub order: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a formula and describe it.
    Parse(FormulaInput),
    /// Print a formula in canonical text.
    Fmt(FmtArgs),
    /// Run a pass pipeline and report rank upper bounds.
    Rank(RankArgs),
    /// Run a pass pipeline and print the resulting formula.
    Transform(RankArgs),
    /// Emit the one-quantifier formula for n-tuples of p^k-th powers.
    PiCollapse(PiCollapseArgs),
    /// Check the collapse formula semantically over F_p(t).
    CollapseCheck(CollapseCheckArgs),
    /// Evaluate a formula in a profile.
    Eval(EvalArgs),
    /// Compare two formulas over a battery of finite fields.
    Equiv(EquivArgs),
    /// Formulas as projections of varieties.
    #[command(subcommand)]
    Geom(GeomCommand),
    /// Pairing functions.
    #[command(subcommand)]
    Pair(PairCommand),
}

#[derive(Args, Debug)]
pub struct FmtArgs {
    #[command(flatten)]
    pub input: FormulaInput,
    /// Flatten quantifier blocks and rename binders to y1, y2, ..
    #[arg(long)]
    pub canonical: bool,
}

#[derive(Args, Debug)]
pub struct RankArgs {
    #[command(flatten)]
    pub input: FormulaInput,
    /// Q, RCF, F<q>, F<q>t or Char<p>.
    #[arg(long)]
    pub profile: String,
    /// Comma separated passes: order_elim, prenex, merge, pp, single_eq.
    #[arg(long, default_value = "prenex,pp")]
    pub pipeline: String,
    /// One-quantifier formula defining the tuples of squares, used by order_elim.
    #[arg(long, requires = "square_vars")]
    pub square_tuple: Option<String>,
    /// Free variables of --square-tuple, in tuple order.
    #[arg(long, value_delimiter = ',')]
    pub square_vars: Vec<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Ufd,
    General,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Standard,
    /// f without its linear term; the collapse formula is then unsound.
    WithoutLinearTerm,
}

#[derive(Args, Debug, Clone)]
pub struct CollapseArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    #[arg(long, value_enum, default_value = "ufd")]
    pub mode: ModeArg,
    /// Exponent of g = X^r + 1 in general mode.
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long, value_enum, default_value = "standard")]
    pub variant: VariantArg,
}

#[derive(Args, Debug)]
pub struct PiCollapseArgs {
    #[command(flatten)]
    pub collapse: CollapseArgs,
    /// Comma separated elements of F_p(t); synthesizes a witness.
    #[arg(long)]
    pub witness: Option<String>,
}

#[derive(Args, Debug)]
pub struct CollapseCheckArgs {
    #[command(flatten)]
    pub collapse: CollapseArgs,
    /// Degree bound on numerators and denominators.
    #[arg(long, default_value_t = 3)]
    pub bound: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[command(flatten)]
    pub input: FormulaInput,
    #[arg(long)]
    pub profile: String,
    /// Print the definable set (finite fields; the default without --assign).
    #[arg(long)]
    pub table: bool,
    /// Values of the free variables, e.g. `x=1,y=[a+1]`.
    #[arg(long)]
    pub assign: Option<String>,
    /// Variables of the table, in order; may add unconstrained ones.
    #[arg(long, value_delimiter = ',')]
    pub vars: Vec<String>,
    /// Degree bound for function-field profiles.
    #[arg(long, default_value_t = 1)]
    pub bound: usize,
}

#[derive(Args, Debug)]
pub struct EquivArgs {
    #[arg(long)]
    pub f1: String,
    #[arg(long)]
    pub f2: String,
    /// `default` or a comma separated list of field sizes.
    #[arg(long, default_value = "default")]
    pub battery: String,
}

#[derive(Args, Debug, Clone)]
pub struct SystemInput {
    /// JSON system file.
    #[arg(
        long,
        conflicts_with = "system_json",
        required_unless_present = "system_json"
    )]
    pub system: Option<PathBuf>,
    /// JSON system given inline.
    #[arg(long)]
    pub system_json: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum GeomCommand {
    /// Positive-primitive formula to system.
    ToSystem {
        #[command(flatten)]
        input: FormulaInput,
        /// Convert to positive-primitive form first.
        #[arg(long)]
        pp: bool,
    },
    /// System to positive-primitive formula.
    FromSystem {
        #[command(flatten)]
        system: SystemInput,
    },
    /// Image of the rational points over a finite field.
    Image {
        #[command(flatten)]
        system: SystemInput,
        #[arg(long)]
        profile: String,
    },
    /// Points of the fibre over a point, over F_{q^k} for k = 1..=max-k.
    Fibre {
        #[command(flatten)]
        system: SystemInput,
        #[arg(long)]
        profile: String,
        /// Comma separated coordinates.
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 1)]
        max_k: u32,
    },
    /// Heuristic fibre dimension from point counts.
    FibreDim {
        #[command(flatten)]
        system: SystemInput,
        #[arg(long)]
        profile: String,
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 4)]
        max_k: u32,
    },
}

#[derive(Subcommand, Debug)]
pub enum PairCommand {
    /// Encode a tuple by left-folding the pairing.
    Encode {
        /// `N` (Cantor pairing) or F<q>t (x^p + t*y^p).
        #[arg(long)]
        profile: String,
        #[arg(required = true)]
        values: Vec<String>,
    },
    /// Decode a code of an n-tuple.
    Decode {
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        value: String,
    },
}
