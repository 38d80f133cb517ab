use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use harmonic_core::inequalities::SearchWindow;
use harmonic_core::rational::{parse_rational, Rational};
use harmonic_core::Error;

/// Rationals are given as "num/den", integers or finite decimals.
fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "harm", about = "Exact growth functions and three-circles verdicts for harmonic functions on Z^d")]
pub struct Cli {
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Starting precision of enclosures, in bits.
    #[arg(long, global = true, default_value_t = 64)]
    pub precision: u32,
    /// Precision cap; verdicts still open here are undecided.
    #[arg(long, global = true, default_value_t = 256)]
    pub max_precision: u32,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact Q_u(0..=N) with its difference triangle.
    Growth(GrowthArgs),
    #[command(subcommand)]
    /// Three-circles verdicts.
    Check(CheckCommand),
    #[command(subcommand)]
    /// Counterexample search.
    Search(SearchCommand),
    #[command(subcommand)]
    /// Evidence scans for S_k.
    Conjecture(ConjectureCommand),
    /// Random harmonic polynomial and its lattice counterpart.
    RandomHarmonic(RandomArgs),
    /// Simulated estimate of Q_u(n).
    MonteCarlo(MonteCarloArgs),
    #[command(subcommand)]
    /// Degree bounds and vanishing.
    Liouville(LiouvilleCommand),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

// Where the growth values come from; a value starting with '{' is inline JSON,
// anything else a path.
#[derive(Args, Debug, Clone)]
pub struct Input {
    /// Lattice function JSON.
    #[arg(long)]
    pub function: Option<String>,
    /// Polynomial JSON, evaluated on the ball that the check needs.
    #[arg(long)]
    pub poly: Option<String>,
    /// Growth report JSON as written by `harm growth`.
    #[arg(long)]
    pub report: Option<String>,
    /// Points missing from --function are zero.
    #[arg(long)]
    pub sparse: bool,
}

#[derive(Args, Debug)]
pub struct GrowthArgs {
    #[command(flatten)]
    pub input: Input,
    /// Largest n; defaults to the radius of --function.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Also compute a_k = Δ^k(u²)(0) directly and check it against the differences.
    #[arg(long)]
    pub newton: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Difference columns in CSV output.
    #[arg(long, default_value_t = 3)]
    pub diffs: usize,
}

#[derive(Subcommand, Debug)]
pub enum CheckCommand {
    /// Q(2n) <= √(e^{n^{-2ε}} Q(n)Q(4n)) + 2^{-n^{0.5-ε}} Q(4n).
    ThreeCircles(ThreeCirclesArgs),
    /// Ratios 1 : P : P², with error term.
    GeneralP(GeneralPArgs),
    /// Q(2n) <= √(e^{n^{-2ε}} Q(n)Q(4n)) for polynomials once n^{1-2ε} > M².
    NoError(NoErrorArgs),
    #[command(name = "ratio-125")]
    /// Ratios 1 : 2 : 4(1+δ).
    Ratio125(Ratio125Args),
    /// Ratios 1 : P : pP with exponent α.
    Aspect(AspectArgs),
    /// Q(2n) <= C √(Q(n)Q(4n)) + 2^{-n^{0.5+ε}} Q(4n); no theorem behind it.
    SharpError(SharpErrorArgs),
    /// Continuous-time three circles, no error term.
    Continuous(ContinuousArgs),
    /// The binomial inequalities behind the error terms.
    Binomial(BinomialArgs),
    /// Nonnegativity of every forward difference of Q_u.
    Monotonicity(MonotonicityArgs),
}

#[derive(Args, Debug)]
pub struct ThreeCirclesArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long)]
    pub n: u64,
    #[arg(long, value_parser = rational)]
    pub eps: Rational,
    /// Evaluate outside the theorem's hypotheses.
    #[arg(long)]
    pub explore: bool,
}

#[derive(Args, Debug)]
pub struct GeneralPArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long)]
    pub n: u64,
    #[arg(long = "P", value_parser = rational)]
    pub p: Rational,
    #[arg(long, value_parser = rational)]
    pub eps: Rational,
    #[arg(long)]
    pub explore: bool,
}

#[derive(Args, Debug)]
pub struct NoErrorArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long)]
    pub n: u64,
    #[arg(long, value_parser = rational)]
    pub eps: Rational,
    /// Degree bound M; defaults to the degree of --poly.
    #[arg(long)]
    pub degree: Option<u64>,
    #[arg(long)]
    pub explore: bool,
}

#[derive(Args, Debug)]
pub struct Ratio125Args {
    #[command(flatten)]
    pub input: Input,
    #[arg(long)]
    pub n: u64,
    #[arg(long, value_parser = rational)]
    pub delta: Rational,
    #[arg(long)]
    pub explore: bool,
}

#[derive(Args, Debug)]
pub struct AspectArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long)]
    pub n: u64,
    #[arg(long, value_parser = rational)]
    pub p: Rational,
    #[arg(long = "P", value_parser = rational)]
    pub big_p: Rational,
    #[arg(long, value_parser = rational)]
    pub eps: Rational,
    #[arg(long, value_parser = rational)]
    pub alpha: Option<Rational>,
    /// α = ln p / (ln p + ln P).
    #[arg(long)]
    pub derive_alpha: bool,
    #[arg(long)]
    pub explore: bool,
}

#[derive(Args, Debug)]
pub struct SharpErrorArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long)]
    pub n: u64,
    #[arg(long = "C", value_parser = rational)]
    pub c: Rational,
    #[arg(long, value_parser = rational)]
    pub eps: Rational,
}

#[derive(Args, Debug)]
pub struct ContinuousArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, value_parser = rational)]
    pub t: Rational,
    /// Ball radius for extracting a_k; defaults to the degree.
    #[arg(long)]
    pub radius: Option<usize>,
}

#[derive(Args, Debug)]
pub struct BinomialArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub k: u64,
    #[arg(long = "P", value_parser = rational)]
    pub p: Rational,
    #[arg(long, value_parser = rational)]
    pub eps: Rational,
    /// Exit status from the max form instead of the sum form.
    #[arg(long)]
    pub max_form: bool,
}

#[derive(Args, Debug)]
pub struct MonotonicityArgs {
    #[command(flatten)]
    pub input: Input,
}

#[derive(Subcommand, Debug)]
pub enum SearchCommand {
    /// Certified violations of the sharp error term by binom(n, k).
    Counterexample(CounterexampleArgs),
}

#[derive(Args, Debug)]
pub struct CounterexampleArgs {
    #[arg(long = "C", value_parser = rational)]
    pub c: Rational,
    #[arg(long, value_parser = rational)]
    pub eps: Rational,
    #[arg(long, default_value_t = 2)]
    pub k_min: u64,
    #[arg(long)]
    pub k_max: u64,
    /// Only n > n0 are tried.
    #[arg(long, default_value_t = 0)]
    pub n0: u64,
    /// `near` or `near:R` (around k²/ln k), or `range:A:B`.
    #[arg(long, default_value = "near")]
    pub window: WindowSpec,
}

#[derive(Clone, Debug)]
pub struct WindowSpec(String);

impl std::str::FromStr for WindowSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let spec = WindowSpec(s.to_string());
        spec.parse().map_err(|e| e.to_string())?;
        Ok(spec)
    }
}

impl WindowSpec {
    pub fn parse(&self) -> Result<SearchWindow, Error> {
        let bad = || Error::InvalidParameter(format!("window '{}': expected near, near:R or range:A:B", self.0));
        let num = |s: &str| s.parse::<u64>().map_err(|_| bad());
        let parts: Vec<&str> = self.0.split(':').collect();
        match parts.as_slice() {
            ["near"] => Ok(SearchWindow::default()),
            ["near", r] => Ok(SearchWindow::Near { radius: num(r)? }),
            ["range", a, b] => Ok(SearchWindow::Range { from: num(a)?, to: num(b)? }),
            _ => Err(bad()),
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum ConjectureCommand {
    /// Sharp-error scan for S_k on Z^2.
    Scan(ScanArgs),
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long = "C", value_parser = rational)]
    pub c: Rational,
    #[arg(long, value_parser = rational)]
    pub eps: Rational,
    /// First n (inclusive); defaults to the window around k²/ln k.
    #[arg(long)]
    pub n_from: Option<u64>,
    /// Last n (inclusive).
    #[arg(long)]
    pub n_to: Option<u64>,
    /// Also write the rows as CSV here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct RandomArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub degree: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct MonteCarloArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum LiouvilleCommand {
    /// deg(u) + 1 from vanishing iterated differences.
    DegreeBound(PolyArgs),
    /// Confirms u ≡ 0 when u vanishes on B_M.
    Vanishing(VanishingArgs),
}

#[derive(Args, Debug)]
pub struct PolyArgs {
    #[command(flatten)]
    pub input: Input,
}

#[derive(Args, Debug)]
pub struct VanishingArgs {
    #[command(flatten)]
    pub input: Input,
    /// Ball radius M (defaults to the degree).
    #[arg(long)]
    pub m: Option<usize>,
}
