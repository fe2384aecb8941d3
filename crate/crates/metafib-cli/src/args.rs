//! Argument definitions and the scaled-number parsers.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use metafib::eval::ElementWidth;

#[derive(Parser)]
#[command(
    name = "metafib",
    version,
    about = "Laboratory for nested recurrences: evaluation, mortality, statistics, plots"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Run a rule and write its terms as CSV.
    Eval(EvalArgs),
    /// Measure the mortality length L(k) of H_k over a k range.
    Sweep(SweepArgs),
    /// Generation statistics of the deviation S(n) = H(n) - n/2.
    Stats(StatsArgs),
    /// Render term or deviation scatterplots as SVG.
    Plot(PlotArgs),
}

/// Term-store width. 32-bit cells halve memory and suffice for every
/// sequence studied here; overflow is detected, not wrapped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WidthArg {
    #[value(name = "32")]
    W32,
    #[value(name = "64")]
    W64,
}

impl From<WidthArg> for ElementWidth {
    fn from(w: WidthArg) -> ElementWidth {
        match w {
            WidthArg::W32 => ElementWidth::W32,
            WidthArg::W64 => ElementWidth::W64,
        }
    }
}

#[derive(Args)]
pub struct EvalArgs {
    /// Built-in family, e.g. q, hk:3, conway:1, qdl:4,2, aij:1,2, vc.
    #[arg(
        long,
        required_unless_present = "rule_file",
        conflicts_with = "rule_file"
    )]
    pub preset: Option<String>,
    /// File containing one rule in the recurrence grammar.
    #[arg(long)]
    pub rule_file: Option<PathBuf>,
    /// Stop after this many terms (suffixes k/M/G, Ki/Mi/Gi).
    #[arg(long, value_parser = parse_scaled, default_value = "2147483647")]
    pub cap: u64,
    /// Memory budget for the term store, in bytes.
    #[arg(long, value_parser = parse_scaled, default_value = "12Gi")]
    pub budget: u64,
    /// Term store width in bits.
    #[arg(long, value_enum, default_value = "32")]
    pub width: WidthArg,
    /// Output CSV path (header n,value).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct SweepArgs {
    /// Inclusive k range as first:last (e.g. 3:32), or a single k.
    #[arg(long, value_parser = parse_k_range)]
    pub k: (u64, u64),
    /// Per-run term cap.
    #[arg(long, value_parser = parse_scaled, default_value = "10M")]
    pub cap: u64,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Memory budget per run, in bytes.
    #[arg(long, value_parser = parse_scaled, default_value = "256Mi")]
    pub budget: u64,
    /// Term store width in bits.
    #[arg(long, value_enum, default_value = "32")]
    pub width: WidthArg,
    /// Record 0 instead of wall-clock milliseconds, for byte-reproducible
    /// output.
    #[arg(long)]
    pub no_timing: bool,
    /// Output CSV path (header k,L,status,max_term,wall_ms).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct StatsArgs {
    /// Built-in family to evaluate (needs --cap).
    #[arg(long, required_unless_present = "input", conflicts_with = "input")]
    pub preset: Option<String>,
    /// Read terms from an eval CSV instead of evaluating.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Term cap when evaluating a preset.
    #[arg(long, value_parser = parse_scaled)]
    pub cap: Option<u64>,
    /// Memory budget when evaluating a preset, in bytes.
    #[arg(long, value_parser = parse_scaled, default_value = "12Gi")]
    pub budget: u64,
    /// Term store width in bits when evaluating a preset.
    #[arg(long, value_enum, default_value = "32")]
    pub width: WidthArg,
    /// First generation boundary for the doubling scheme.
    #[arg(long, value_parser = parse_scaled, default_value = "1k")]
    pub n0: u64,
    /// Last index to include (defaults to every available term).
    #[arg(long, value_parser = parse_scaled)]
    pub nmax: Option<u64>,
    /// Explicit generation boundaries, comma-separated (replaces the
    /// doubling scheme).
    #[arg(long, value_delimiter = ',', value_parser = parse_scaled, conflicts_with_all = ["n0", "nmax"])]
    pub boundaries: Option<Vec<u64>>,
    /// Optional stats CSV path (header t,n_lo,n_hi,count,mean,stddev,alpha).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// What a preset series plots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PointSource {
    /// The terms (n, H(n)).
    Terms,
    /// The deviations (n, H(n) - n/2).
    Deviations,
}

#[derive(Args)]
pub struct PlotArgs {
    /// Input CSVs (terms or deviations); one series per file.
    #[arg(long = "in")]
    pub inputs: Vec<PathBuf>,
    /// Built-in family to evaluate into an extra series.
    #[arg(long)]
    pub preset: Option<String>,
    /// What the preset series plots.
    #[arg(long, value_enum, default_value = "terms")]
    pub points: PointSource,
    /// Term cap when evaluating a preset (defaults to --nmax).
    #[arg(long, value_parser = parse_scaled)]
    pub cap: Option<u64>,
    /// Memory budget when evaluating a preset, in bytes.
    #[arg(long, value_parser = parse_scaled, default_value = "12Gi")]
    pub budget: u64,
    /// First index to include.
    #[arg(long, value_parser = parse_scaled, default_value = "1")]
    pub nmin: u64,
    /// Last index to include.
    #[arg(long, value_parser = parse_scaled)]
    pub nmax: Option<u64>,
    /// Keep every stride-th point (default: size each series to at most
    /// 100000 points).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub stride: Option<u64>,
    /// Fixed x range as lo:hi (default: data bounding box).
    #[arg(long, value_parser = parse_f64_range)]
    pub xrange: Option<(f64, f64)>,
    /// Fixed y range as lo:hi.
    #[arg(long, value_parser = parse_f64_range)]
    pub yrange: Option<(f64, f64)>,
    /// Canvas width in pixels.
    #[arg(long, default_value_t = 960)]
    pub width: u32,
    /// Canvas height in pixels.
    #[arg(long, default_value_t = 600)]
    pub height: u32,
    /// Point radius in pixels.
    #[arg(long, default_value_t = 1.5)]
    pub point_size: f64,
    /// Output SVG path.
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses an integer with an optional scale suffix: k/M/G are powers of
/// ten, Ki/Mi/Gi powers of two. Budgets are bytes, caps are term counts.
pub fn parse_scaled(s: &str) -> Result<u64, String> {
    let (digits, factor) = if let Some(d) = s.strip_suffix("Ki") {
        (d, 1u64 << 10)
    } else if let Some(d) = s.strip_suffix("Mi") {
        (d, 1 << 20)
    } else if let Some(d) = s.strip_suffix("Gi") {
        (d, 1 << 30)
    } else if let Some(d) = s.strip_suffix('k') {
        (d, 1_000)
    } else if let Some(d) = s.strip_suffix('M') {
        (d, 1_000_000)
    } else if let Some(d) = s.strip_suffix('G') {
        (d, 1_000_000_000)
    } else {
        (s, 1)
    };
    let value: u64 = digits.parse().map_err(|_| {
        format!("expected an integer with optional k/M/G or Ki/Mi/Gi suffix, got {s:?}")
    })?;
    value
        .checked_mul(factor)
        .ok_or_else(|| format!("{s:?} does not fit in 64 bits"))
}

fn parse_k_range(s: &str) -> Result<(u64, u64), String> {
    let (first, last) = match s.split_once(':') {
        Some((a, b)) => (parse_scaled(a)?, parse_scaled(b)?),
        None => {
            let k = parse_scaled(s)?;
            (k, k)
        }
    };
    if first > last {
        return Err(format!("empty range {first}:{last}"));
    }
    Ok((first, last))
}

fn parse_f64_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let parse = |p: &str| {
        p.parse::<f64>()
            .map_err(|_| format!("bad number {p:?} in range {s:?}"))
    };
    let (lo, hi) = (parse(a)?, parse(b)?);
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(format!("range {s:?} is not an increasing finite pair"));
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_suffixes() {
        assert_eq!(parse_scaled("42"), Ok(42));
        assert_eq!(parse_scaled("1k"), Ok(1_000));
        assert_eq!(parse_scaled("10M"), Ok(10_000_000));
        assert_eq!(parse_scaled("2G"), Ok(2_000_000_000));
        assert_eq!(parse_scaled("1Ki"), Ok(1024));
        assert_eq!(parse_scaled("8Mi"), Ok(8 << 20));
        assert_eq!(parse_scaled("12Gi"), Ok(12 << 30));
        assert!(parse_scaled("1KB").is_err());
        assert!(parse_scaled("k").is_err());
        assert!(parse_scaled("-3").is_err());
        assert!(parse_scaled("99999999999G").is_err());
    }

    #[test]
    fn k_ranges() {
        assert_eq!(parse_k_range("3:32"), Ok((3, 32)));
        assert_eq!(parse_k_range("114"), Ok((114, 114)));
        assert!(parse_k_range("9:3").is_err());
        assert!(parse_k_range("3:x").is_err());
    }

    #[test]
    fn f64_ranges() {
        assert_eq!(parse_f64_range("0:10"), Ok((0.0, 10.0)));
        assert_eq!(parse_f64_range("-0.5:0.5"), Ok((-0.5, 0.5)));
        assert!(parse_f64_range("5:5").is_err());
        assert!(parse_f64_range("10").is_err());
    }

    #[test]
    fn cli_shape_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
