use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Hermite expansions, the harmonic-oscillator Schrödinger group and the
/// numerical checks built on them.
#[derive(Parser, Debug)]
#[command(name = "hermite", version)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand. Numeric ones can also come from the
/// `--config` file; the command line wins.
#[derive(Args, Debug, Default, Clone)]
pub struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Spatial dimension.
    #[arg(long = "d", global = true)]
    pub d: Option<usize>,
    /// Truncation degree K.
    #[arg(long, global = true)]
    pub cutoff: Option<usize>,
    /// Spatial exponent (`inf` allowed).
    #[arg(long, global = true, value_parser = parse_real)]
    pub p: Option<f64>,
    /// Time exponent.
    #[arg(long, global = true, value_parser = parse_real)]
    pub q: Option<f64>,
    /// Regularity index.
    #[arg(long, global = true, value_parser = parse_real, allow_hyphen_values = true)]
    pub s: Option<f64>,
    /// Time, e.g. `0.3`, `pi/4`, `3pi/8`.
    #[arg(long, global = true, value_parser = parse_real, allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// Grid points per dimension.
    #[arg(long, global = true)]
    pub grid_n: Option<usize>,
    /// Multiplier on the default box half-width.
    #[arg(long, global = true, value_parser = parse_real)]
    pub box_scale: Option<f64>,
    /// Box half-width L, overriding the default sizing.
    #[arg(long, global = true, value_parser = parse_real)]
    pub half_width: Option<f64>,
    /// Number of time samples on (−π, π).
    #[arg(long, global = true)]
    pub time_points: Option<usize>,
    /// Seed for every random draw.
    /// Seed for every random draw.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Ensemble size for randomized checks.
    #[arg(long, global = true)]
    pub ensemble: Option<usize>,
    /// Trials per Wainger probe.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Exit with status 2 when a measured quantity misses its reference.
    #[arg(long, global = true)]
    pub check: bool,
    /// Only log warnings and errors.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate h_k(x) or Φ_μ(x).
    Eval(EvalArgs),
    /// Sample a field on its grid, read samples back into coefficients, or draw a random field.
    Transform(TransformArgs),
    /// Spectral projection P_k of a field.
    Project(ProjectArgs),
    /// Apply e^{itH} to a field.
    Evolve(EvolveArgs),
    /// L^p, mixed, Triebel–Lizorkin or Hermite–Sobolev norm of a field.
    Norm(NormArgs),
    /// Exponents κ_p and κ_{p,q}.
    Kappa,
    /// Fit the growth exponent of ‖h_k‖_p (d = 1).
    FitKappa(RangeArgs),
    /// Strichartz ratio of a field or a random band-limited field.
    Strichartz(InputArgs),
    /// Growth exponent of the Strichartz ratio on f = P_k g.
    Sharpness(SharpnessArgs),
    /// Compare Mehler's closed form with its truncated series.
    MehlerCheck(MehlerArgs),
    /// Run the check suite.
    Verify(VerifyArgs),
    /// Log-log SVG plot of a `k,value` CSV with a fitted line.
    Plot(PlotArgs),
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Degree of h_k; all degrees up to k are reported.
    #[arg(long, conflicts_with = "mu")]
    pub k: Option<usize>,
    #[arg(long, requires = "k", value_parser = parse_real, allow_hyphen_values = true)]
    pub x: Option<f64>,
    /// Multi-index, comma separated.
    #[arg(long, requires = "point")]
    pub mu: Option<String>,
    /// Point in ℝ^d, comma separated.
    #[arg(long, requires = "mu", allow_hyphen_values = true)]
    pub point: Option<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Synthesize,
    Analyze,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    /// Field JSON (synthesize) or samples CSV (analyze).
    #[arg(long, required_unless_present = "random")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "synthesize")]
    pub direction: Direction,
    /// Emit a unit-norm random field with `--cutoff`, `--d` and `--seed`.
    #[arg(long, conflicts_with = "input")]
    pub random: bool,
}

#[derive(Args, Debug)]
pub struct ProjectArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Shell to project onto.
    #[arg(long)]
    pub k: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Eigen,
    Kernel,
}

#[derive(Args, Debug)]
pub struct EvolveArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "eigen")]
    pub method: Method,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    Lp,
    Mixed,
    Triebel,
    Sobolev,
}

#[derive(Args, Debug)]
pub struct NormArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// `triebel` uses `--s` as the weight exponent r.
    #[arg(long, value_enum, default_value = "sobolev")]
    pub kind: NormKind,
}

#[derive(Args, Debug)]
pub struct RangeArgs {
    /// Inclusive range `kmin:kmax`, sampled at powers of two times {1, 1.5}.
    #[arg(long, default_value = "64:1024", value_parser = parse_range)]
    pub k: (u64, u64),
    /// Allowed |slope − κ| under `--check`.
    #[arg(long, default_value_t = 0.03)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct InputArgs {
    /// Field JSON; a random band-limited field is drawn when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SharpnessArgs {
    #[arg(long, default_value = "64:512", value_parser = parse_range)]
    pub k: (u64, u64),
    #[arg(long, default_value_t = 0.03)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct MehlerArgs {
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    /// Highest shell kept in the series.
    #[arg(long, default_value_t = 60)]
    pub terms: usize,
    #[arg(long, default_value_t = 0.5)]
    pub omega_max: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Run only these checks (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
}

#[derive(Args, Debug)]
pub struct PlotArgs {
    #[arg(long)]
    pub input: PathBuf,
}

/// Real number, `inf`, or a multiple of π such as `pi/4`, `-3pi/8`, `2*pi`.
pub fn parse_real(text: &str) -> Result<f64, String> {
    let t = text.trim().to_ascii_lowercase();
    match t.as_str() {
        "inf" | "infinity" | "+inf" => return Ok(f64::INFINITY),
        "-inf" | "-infinity" => return Ok(f64::NEG_INFINITY),
        _ => {}
    }
    if let Some(pos) = t.find("pi") {
        let head = t[..pos].trim_end_matches('*');
        let coef = match head {
            "" | "+" => 1.0,
            "-" => -1.0,
            h => h.parse::<f64>().map_err(|_| format!("cannot parse '{text}'"))?,
        };
        let tail = &t[pos + 2..];
        let den = match tail.strip_prefix('/') {
            Some(d) => d.parse::<f64>().map_err(|_| format!("cannot parse '{text}'"))?,
            None if tail.is_empty() => 1.0,
            None => return Err(format!("cannot parse '{text}'")),
        };
        return Ok(coef * std::f64::consts::PI / den);
    }
    let v = t.parse::<f64>().map_err(|_| format!("cannot parse '{text}' as a number"))?;
    if v.is_nan() {
        return Err("NaN is not allowed".into());
    }
    Ok(v)
}

/// `kmin:kmax` with 1 ≤ kmin ≤ kmax.
pub fn parse_range(text: &str) -> Result<(u64, u64), String> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| format!("expected kmin:kmax, got '{text}'"))?;
    let lo: u64 = a.trim().parse().map_err(|_| format!("bad range start '{a}'"))?;
    let hi: u64 = b.trim().parse().map_err(|_| format!("bad range end '{b}'"))?;
    if lo == 0 || lo > hi {
        return Err(format!("range {text} must satisfy 1 <= kmin <= kmax"));
    }
    Ok((lo, hi))
}

/// Comma-separated list, e.g. `1,0,2`.
pub fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, String> {
    text.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| format!("malformed {what} '{text}'")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn reals() {
        assert_eq!(parse_real("0.25").unwrap(), 0.25);
        assert_eq!(parse_real("inf").unwrap(), f64::INFINITY);
        assert_eq!(parse_real("pi/4").unwrap(), PI / 4.0);
        assert_eq!(parse_real("3pi/8").unwrap(), 3.0 * PI / 8.0);
        assert_eq!(parse_real("-pi").unwrap(), -PI);
        assert_eq!(parse_real("2*pi").unwrap(), 2.0 * PI);
        assert!(parse_real("pie").is_err());
        assert!(parse_real("nan").is_err());
    }

    #[test]
    fn ranges_and_lists() {
        assert_eq!(parse_range("64:1024").unwrap(), (64, 1024));
        assert!(parse_range("10:5").is_err());
        assert!(parse_range("0:5").is_err());
        assert_eq!(parse_list::<u32>("1, 0,2", "mu").unwrap(), vec![1, 0, 2]);
        assert!(parse_list::<u32>("1,a", "mu").is_err());
    }
}
