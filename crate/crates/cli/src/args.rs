//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

#[derive(Parser, Debug)]
#[command(name = "sphere-approx", version, about = "Rational approximation on the circle and the 2-sphere")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Largest working precision in bits for certified comparisons.
    #[arg(long, global = true, default_value_t = 4096, value_parser = clap::value_parser!(u32).range(8..))]
    pub precision: u32,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Decimal places in approximate columns.
    #[arg(long, global = true, default_value_t = 12)]
    pub digits: usize,
    /// How to read real-valued arguments.
    #[arg(long, global = true, value_enum, default_value_t = RealFormatArg::Auto)]
    pub real_format: RealFormatArg,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RealFormatArg {
    /// `sqrt` means surd, a `.` means decimal, otherwise a fraction.
    Auto,
    Rational,
    Decimal,
    Surd,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Stereographic parametrization.
    #[command(subcommand)]
    Param(ParamCmd),
    /// Continued fractions.
    #[command(subcommand)]
    Cf(CfCmd),
    /// Approximation on the circle.
    #[command(subcommand)]
    Circle(CircleCmd),
    /// Lattice search for (q, A, b1, b2).
    Search(SearchArgs),
    /// Approximation on the 2-sphere.
    #[command(subcommand)]
    Sphere(SphereCmd),
    /// All rational points with Q <= Q_max.
    Enumerate(EnumerateArgs),
    /// Randomized and exhaustive invariant checks.
    Verify(VerifyArgs),
}

#[derive(Subcommand, Debug)]
pub enum ParamCmd {
    /// Parameter (b, q) to the point A/Q.
    Forward {
        /// Sphere dimension.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        n: u8,
        /// Numerators b_j, comma separated or repeated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        b: Vec<BigInt>,
        #[arg(long)]
        q: BigInt,
    },
    /// Point A/Q to its parameter.
    Inverse {
        /// Coordinates A_1, ..., A_{n+1}, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        coords: Vec<BigInt>,
        /// Denominator Q.
        #[arg(long = "Q")]
        denom: BigInt,
    },
}

/// One real number, given in one of several syntaxes.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct RealInput {
    /// Value read per --real-format.
    #[arg(long, allow_hyphen_values = true)]
    pub value: Option<String>,
    /// Fraction such as -3/7.
    #[arg(long, allow_hyphen_values = true)]
    pub rational: Option<String>,
    /// Decimal, taken as the interval of one unit in its last digit.
    #[arg(long, allow_hyphen_values = true)]
    pub decimal: Option<String>,
    /// Surd such as (17+1*sqrt(2))/41.
    #[arg(long, allow_hyphen_values = true)]
    pub surd: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum CfCmd {
    /// Partial quotients.
    Expand {
        #[command(flatten)]
        x: RealInput,
        /// Terms to certify when the expansion is neither finite nor periodic.
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
    /// Convergents p/q up to index `upto`.
    Convergents {
        #[command(flatten)]
        x: RealInput,
        #[arg(long, default_value_t = 10)]
        upto: usize,
    },
    /// Whether a fraction is a convergent, a mediant or neither.
    Classify {
        #[command(flatten)]
        x: RealInput,
        /// Fraction b/q.
        #[arg(long, allow_hyphen_values = true)]
        frac: String,
    },
}

/// A target on the circle: a parameter or explicit coordinates.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct CircleTarget {
    /// Parameter; the target is its stereographic image.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    /// Coordinates alpha1,alpha2 on the circle.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha: Option<Vec<String>>,
}

#[derive(Subcommand, Debug)]
pub enum CircleCmd {
    /// Points with Q*dist < (1+eps)/sqrt2, in increasing Q.
    Approx {
        #[command(flatten)]
        target: CircleTarget,
        #[arg(long, default_value = "1/10")]
        eps: String,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Candidates examined before giving up.
        #[arg(long, default_value_t = 4096)]
        max_candidates: usize,
    },
    /// Exhaustive minimum of Q*dist for the image of (17+sqrt2)/41.
    Sharpness {
        #[arg(long, default_value_t = 1000)]
        q_min: u64,
        #[arg(long, default_value_t = 20000)]
        q_max: u64,
    },
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub beta1: String,
    #[arg(long, allow_hyphen_values = true)]
    pub beta2: String,
    /// Bound T for a single search.
    #[arg(long = "T", conflicts_with_all = ["gamma", "count"])]
    pub t: Option<u64>,
    /// Stream solutions with Delta < gamma^2.
    #[arg(long)]
    pub gamma: Option<String>,
    #[arg(long, requires = "gamma")]
    pub count: Option<usize>,
}

/// A target on the 2-sphere: a parameter pair or explicit coordinates.
#[derive(Args, Debug, Clone)]
pub struct SphereTarget {
    #[arg(long, allow_hyphen_values = true, requires = "beta2", conflicts_with = "alpha")]
    pub beta1: Option<String>,
    #[arg(long, allow_hyphen_values = true, requires = "beta1")]
    pub beta2: Option<String>,
    /// Coordinates alpha1,alpha2,alpha3 on the sphere.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required_unless_present = "beta1")]
    pub alpha: Option<Vec<String>>,
}

#[derive(Subcommand, Debug)]
pub enum SphereCmd {
    /// One point with Q <= T near the target.
    Dirichlet {
        #[command(flatten)]
        target: SphereTarget,
        #[arg(long = "T")]
        t: u64,
    },
    /// Points with Q*dist < 2sqrt(3/pi) + eps.
    Stream {
        #[command(flatten)]
        target: SphereTarget,
        #[arg(long, default_value = "1/10")]
        eps: String,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub n: u8,
    #[arg(long = "Q-max")]
    pub q_max: u64,
    /// Cache directory for point sets.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Random cases per sampled suite.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}
