use crate::config;
use crate::error::CliError;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::HashMap;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, Parser)]
#[command(name = "mellin", version, about = "Mellin-transform option pricer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Price a single option.
    Price(CommonArgs),
    /// Sensitivities of a put as JSON.
    Greeks(CommonArgs),
    /// Full FFT price surface as CSV or JSON.
    Surface(CommonArgs),
    /// Critical price curve of an American put as CSV.
    Boundary(CommonArgs),
    /// Reproduce the American call benchmark table.
    Table1(Table1Args),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Fft,
    Dw,
    Trapezoid,
    Binomial,
    Bs,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Style {
    EuroPut,
    EuroCall,
    AmerPut,
    AmerCall,
    /// Early-exercise premium of the put.
    Premium,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Weights {
    Flat,
    Simpson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TimeRuleArg {
    Trapezoid,
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlignmentArg {
    Aligned,
    StepAhead,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DeltaFormArg {
    Unsquared,
    HalfVariance,
    Squared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DividendFactorArg {
    Growing,
    Decaying,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MultiplierArg {
    Kernel,
    Alternate,
}

/// Numerical settings shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct NumericArgs {
    /// FFT points per dimension N.
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Time steps M of the premium integral.
    #[arg(long)]
    pub grid_m: Option<usize>,
    /// Strip abscissa a.
    #[arg(long)]
    pub strip_a: Option<f64>,
    /// Series terms for the dw method.
    #[arg(long)]
    pub dw_terms: Option<usize>,
    /// Series log-price half-range L.
    #[arg(long)]
    pub dw_l: Option<f64>,
    /// Binomial time steps.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Lattice weights.
    #[arg(long, value_enum)]
    pub weights: Option<Weights>,
    #[arg(long, value_enum)]
    pub time_rule: Option<TimeRuleArg>,
    #[arg(long, value_enum)]
    pub alignment: Option<AlignmentArg>,
    #[arg(long, value_enum)]
    pub delta_form: Option<DeltaFormArg>,
    #[arg(long, value_enum)]
    pub dividend_factor: Option<DividendFactorArg>,
    /// Flat `key = value` file; keys are flag names, flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    #[arg(long, value_enum)]
    pub style: Option<Style>,
    /// Spot price; repeat or comma-separate for baskets.
    #[arg(long, value_delimiter = ',')]
    pub spot: Vec<f64>,
    #[arg(long)]
    pub strike: Option<f64>,
    #[arg(long)]
    pub rate: Option<f64>,
    /// Dividend yield; repeat or comma-separate for baskets.
    #[arg(long, value_delimiter = ',')]
    pub div: Vec<f64>,
    /// Volatility; repeat or comma-separate for baskets.
    #[arg(long, value_delimiter = ',')]
    pub vol: Vec<f64>,
    /// Row-major correlation matrix as a comma list.
    #[arg(long)]
    pub corr: Option<String>,
    /// Time to expiry in years.
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Monte Carlo paths.
    #[arg(long)]
    pub paths: Option<usize>,
    /// Monte Carlo seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Greek multiplier convention.
    #[arg(long, value_enum)]
    pub multipliers: Option<MultiplierArg>,
    #[command(flatten)]
    pub numeric: NumericArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Table1Args {
    /// Comma list of groupings (1-3) to run.
    #[arg(long, value_delimiter = ',')]
    pub groupings: Vec<usize>,
    #[command(flatten)]
    pub numeric: NumericArgs,
}

fn scalar<T: FromStr>(cfg: &HashMap<String, String>, key: &str) -> Result<Option<T>, CliError> {
    cfg.get(key)
        .map(|v| v.parse::<T>().map_err(|_| CliError::Validation(format!("config key `{key}`: cannot parse `{v}`"))))
        .transpose()
}

fn list<T: FromStr>(cfg: &HashMap<String, String>, key: &str) -> Result<Vec<T>, CliError> {
    match cfg.get(key) {
        None => Ok(Vec::new()),
        Some(v) => v
            .split(',')
            .map(|p| p.trim().parse::<T>().map_err(|_| CliError::Validation(format!("config key `{key}`: cannot parse `{p}`"))))
            .collect(),
    }
}

fn choice<T: ValueEnum>(cfg: &HashMap<String, String>, key: &str) -> Result<Option<T>, CliError> {
    cfg.get(key)
        .map(|v| T::from_str(v, true).map_err(|_| CliError::Validation(format!("config key `{key}`: invalid value `{v}`"))))
        .transpose()
}

macro_rules! fill {
    ($slot:expr, $cfg:expr, $key:literal, $f:ident) => {
        if $slot.is_none() {
            $slot = $f(&$cfg, $key)?;
        }
    };
}

fn read_config(path: &Option<PathBuf>) -> Result<HashMap<String, String>, CliError> {
    match path {
        None => Ok(HashMap::new()),
        Some(p) => config::load(p).map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => CliError::Validation(e.to_string()),
            _ => CliError::Io(format!("cannot read config {}: {e}", p.display())),
        }),
    }
}

impl NumericArgs {
    fn merge(&mut self, cfg: &HashMap<String, String>) -> Result<(), CliError> {
        fill!(self.grid_n, cfg, "grid-n", scalar);
        fill!(self.grid_m, cfg, "grid-m", scalar);
        fill!(self.strip_a, cfg, "strip-a", scalar);
        fill!(self.dw_terms, cfg, "dw-terms", scalar);
        fill!(self.dw_l, cfg, "dw-l", scalar);
        fill!(self.steps, cfg, "steps", scalar);
        fill!(self.weights, cfg, "weights", choice);
        fill!(self.time_rule, cfg, "time-rule", choice);
        fill!(self.alignment, cfg, "alignment", choice);
        fill!(self.delta_form, cfg, "delta-form", choice);
        fill!(self.dividend_factor, cfg, "dividend-factor", choice);
        if self.out.is_none() {
            self.out = cfg.get("out").map(PathBuf::from);
        }
        Ok(())
    }
}

impl CommonArgs {
    /// Fill unset options from the config file named by `--config`.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        let cfg = read_config(&self.numeric.config)?;
        fill!(self.method, cfg, "method", choice);
        fill!(self.style, cfg, "style", choice);
        fill!(self.strike, cfg, "strike", scalar);
        fill!(self.rate, cfg, "rate", scalar);
        fill!(self.tau, cfg, "tau", scalar);
        fill!(self.format, cfg, "format", choice);
        fill!(self.paths, cfg, "paths", scalar);
        fill!(self.seed, cfg, "seed", scalar);
        fill!(self.multipliers, cfg, "multipliers", choice);
        if self.corr.is_none() {
            self.corr = cfg.get("corr").cloned();
        }
        if self.spot.is_empty() {
            self.spot = list(&cfg, "spot")?;
        }
        if self.div.is_empty() {
            self.div = list(&cfg, "div")?;
        }
        if self.vol.is_empty() {
            self.vol = list(&cfg, "vol")?;
        }
        self.numeric.merge(&cfg)?;
        Ok(self)
    }
}

impl Table1Args {
    pub fn resolve(mut self) -> Result<Self, CliError> {
        let cfg = read_config(&self.numeric.config)?;
        if self.groupings.is_empty() {
            self.groupings = list(&cfg, "groupings")?;
        }
        self.numeric.merge(&cfg)?;
        Ok(self)
    }
}

/// Required option or a validation error naming its flag.
pub fn required<T: Copy>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Validation(format!("missing required option --{flag}")))
}
