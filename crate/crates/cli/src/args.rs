use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nearres::{BandwidthSpec, Sign};
use serde::{Serialize, Serializer};

#[derive(Parser, Debug)]
#[command(name = "nearres", version, about = "Near-resonance experiments on the anisotropic torus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Near-resonant triad counts against C|n|.
    Triads(TriadsArgs),
    /// Explicit lower-bound constructions.
    CountLower(CountLowerArgs),
    /// Monte-Carlo sublevel volumes against the theorem bound.
    Volume(VolumeArgs),
    /// Residuals of the elliptic-integral identities on random angles.
    EllipticCheck(EllipticArgs),
    /// Lattice-point inequality on random ellipse families.
    JordanCheck(JordanArgs),
    /// Integrates the full or near-resonant system.
    Simulate(SimulateArgs),
    /// Distance between the full and near-resonant solutions across Ω.
    ErrorScan(ErrorScanArgs),
    /// Integer points against area plus boundary on horizontal slices.
    PlanarCheck(PlanarArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Triads(_) => "triads",
            Command::CountLower(_) => "count-lower",
            Command::Volume(_) => "volume",
            Command::EllipticCheck(_) => "elliptic-check",
            Command::JordanCheck(_) => "jordan-check",
            Command::Simulate(_) => "simulate",
            Command::ErrorScan(_) => "error-scan",
            Command::PlanarCheck(_) => "planar-check",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Triads(a) => &a.common,
            Command::CountLower(a) => &a.common,
            Command::Volume(a) => &a.common,
            Command::EllipticCheck(a) => &a.common,
            Command::JordanCheck(a) => &a.common,
            Command::Simulate(a) => &a.common,
            Command::ErrorScan(a) => &a.common,
            Command::PlanarCheck(a) => &a.common,
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Command::Triads(_) | Command::CountLower(_) => None,
            Command::Volume(a) => Some(a.seed),
            Command::EllipticCheck(a) => Some(a.seed),
            Command::JordanCheck(a) => Some(a.seed),
            Command::Simulate(a) => Some(a.seed),
            Command::ErrorScan(a) => Some(a.seed),
            Command::PlanarCheck(a) => Some(a.seed),
        }
    }
}

/// Integer counts written in decimal or scientific notation (`1e7`).
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if x >= 0.0 && x.fract() == 0.0 && x <= 9_007_199_254_740_992.0 {
        Ok(x as u64)
    } else {
        Err(format!("`{s}` is not a nonnegative integer"))
    }
}

/// An integer vector written `a,b,c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triple(pub [i64; 3]);

impl FromStr for Triple {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("expected three comma-separated integers, got `{s}`"));
        }
        let mut v = [0i64; 3];
        for (slot, p) in v.iter_mut().zip(&parts) {
            *slot = p.parse().map_err(|_| format!("`{p}` is not an integer"))?;
        }
        Ok(Triple(v))
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.0[0], self.0[1], self.0[2])
    }
}

impl Serialize for Triple {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct Common {
    /// Aspect ratio L1 as a decimal string.
    #[arg(long, default_value = "1")]
    pub l1: String,
    /// Aspect ratio L2 as a decimal string.
    #[arg(long, default_value = "1")]
    pub l2: String,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub threads: Option<usize>,
    /// JSON file whose keys mirror the flags; flags win on conflict.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// CSV destination (default: stdout). The manifest goes next to it.
    #[arg(long, alias = "csv")]
    pub out: Option<PathBuf>,
    /// Manifest destination (default: `<out>.manifest.json`, or stderr).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Theorem,
    Constant,
    Zero,
    AllPass,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct Bandwidth {
    /// Bandwidth rule.
    #[arg(long, value_enum, default_value = "theorem")]
    pub mode: Mode,
    /// Constant of the theorem rule.
    #[arg(long, default_value_t = 1.0)]
    pub c_hat: f64,
    /// Bandwidth of the constant rule.
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    /// Upper cap on the theorem bandwidth.
    #[arg(long, default_value_t = nearres::resonance::DEFAULT_CAP)]
    pub cap: f64,
}

impl Bandwidth {
    pub fn spec(&self) -> BandwidthSpec {
        let mut s = match self.mode {
            Mode::Theorem => BandwidthSpec::theorem(self.c_hat),
            Mode::Constant => BandwidthSpec::constant(self.delta),
            Mode::Zero => BandwidthSpec::zero(),
            Mode::AllPass => BandwidthSpec::all_pass(),
        };
        s.cap = self.cap;
        s
    }
}

#[derive(Args, Debug, Serialize)]
#[command(allow_negative_numbers = true)]
#[serde(rename_all = "kebab-case")]
pub struct TriadsArgs {
    /// Wavevector `n1,n2,n3`; repeat for several rows.
    #[arg(long, required = true, allow_hyphen_values = true)]
    pub n: Vec<Triple>,
    #[command(flatten)]
    #[serde(flatten)]
    pub bandwidth: Bandwidth,
    /// Fixed constant C (default: fitted on the first row).
    #[arg(long)]
    pub c_bound: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    SlowFast,
    FastFast,
}

#[derive(Args, Debug, Serialize)]
#[command(allow_negative_numbers = true)]
#[serde(rename_all = "kebab-case")]
pub struct CountLowerArgs {
    #[arg(long, value_enum, default_value = "slow-fast")]
    pub variant: Variant,
    /// Smallest N (default: 4 for slow-fast, 8 for fast-fast).
    #[arg(long)]
    pub n_min: Option<i64>,
    #[arg(long, default_value_t = 64)]
    pub n_max: i64,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum SignArg {
    Plus,
    Minus,
    All,
}

impl SignArg {
    pub fn signs(self) -> Vec<Sign> {
        match self {
            SignArg::Plus => vec![Sign::Plus],
            SignArg::Minus => vec![Sign::Minus],
            SignArg::All => vec![Sign::Plus, Sign::Minus],
        }
    }
}

#[derive(Args, Debug, Serialize)]
#[command(allow_negative_numbers = true)]
#[serde(rename_all = "kebab-case")]
pub struct VolumeArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub n: Triple,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    #[arg(long, value_enum, default_value = "all")]
    pub sigma1: SignArg,
    #[arg(long, value_enum, default_value = "all")]
    pub sigma2: SignArg,
    #[arg(long, default_value = "1000000", value_parser = parse_count)]
    pub samples: u64,
    #[arg(long, default_value = "3", value_parser = parse_count)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
#[command(allow_negative_numbers = true)]
#[serde(rename_all = "kebab-case")]
pub struct EllipticArgs {
    #[arg(long, default_value = "1000", value_parser = parse_count)]
    pub trials: u64,
    #[arg(long, default_value = "1", value_parser = parse_count)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
#[command(allow_negative_numbers = true)]
#[serde(rename_all = "kebab-case")]
pub struct JordanArgs {
    #[arg(long, default_value = "1000", value_parser = parse_count)]
    pub trials: u64,
    /// How many of the trials (the last ones) use tiny curves on lattice points.
    #[arg(long, default_value = "50", value_parser = parse_count)]
    pub adversarial: u64,
    #[arg(long, default_value = "5", value_parser = parse_count)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemArg {
    Nr,
    Full,
}

#[derive(Args, Debug, Serialize)]
#[command(allow_negative_numbers = true)]
#[serde(rename_all = "kebab-case")]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "nr")]
    pub system: SystemArg,
    #[arg(long, default_value_t = 6.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 100.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 0.01)]
    pub mu: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    #[arg(long, default_value = "7", value_parser = parse_count)]
    pub seed: u64,
    /// Sobolev exponent of the random initial datum.
    #[arg(long, default_value_t = 1.0)]
    pub data_s: f64,
    /// Initial `‖U0‖²`.
    #[arg(long, default_value_t = 1.0)]
    pub energy: f64,
    /// Extra Sobolev exponents recorded as `hs_sq[s]` columns.
    #[arg(long, value_delimiter = ',')]
    pub hs: Vec<f64>,
    /// Record every this many steps.
    #[arg(long, default_value = "1", value_parser = parse_count)]
    pub stride: u64,
    /// Drop the nonlinear term.
    #[arg(long)]
    pub linear: bool,
    /// Write the final field as text.
    #[arg(long)]
    pub snapshot: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub bandwidth: Bandwidth,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
#[command(allow_negative_numbers = true)]
#[serde(rename_all = "kebab-case")]
pub struct ErrorScanArgs {
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
    pub omegas: Vec<f64>,
    #[arg(long, default_value_t = 6.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 0.01)]
    pub mu: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 0.5)]
    pub t_end: f64,
    /// Sobolev exponent of the error norm.
    #[arg(long, default_value_t = 0.0)]
    pub s_prime: f64,
    #[arg(long, default_value_t = 4.0)]
    pub data_s: f64,
    #[arg(long, default_value_t = 1.0)]
    pub energy: f64,
    /// Upper bound on Ω·dt.
    #[arg(long, default_value_t = 0.05)]
    pub max_phase_step: f64,
    #[arg(long, default_value = "7", value_parser = parse_count)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub bandwidth: Bandwidth,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
#[command(allow_negative_numbers = true)]
#[serde(rename_all = "kebab-case")]
pub struct PlanarArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub n: Triple,
    #[arg(long, value_enum, default_value = "plus")]
    pub sigma1: SignArg,
    #[arg(long, value_enum, default_value = "plus")]
    pub sigma2: SignArg,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    /// Slice heights.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub k3: Vec<f64>,
    #[arg(long, default_value = "200000", value_parser = parse_count)]
    pub samples: u64,
    #[arg(long, default_value = "11", value_parser = parse_count)]
    pub seed: u64,
    /// Fixed constant (default: fitted on the slices).
    #[arg(long)]
    pub c: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}
