use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use iospectra::NormKind;

#[derive(Parser, Debug)]
#[command(
    name = "iospectra",
    version,
    about = "Input-output pseudospectra and transient bounds"
)]
pub struct Cli {
    /// `example1`, `example2`, or a system file (`N P Q` header, then A, B, C row-major).
    #[arg(long, global = true, default_value = "example1")]
    pub system: String,

    /// Induced norm: `1`, `2` or `inf`.
    #[arg(long, global = true, default_value = "2", value_parser = parse_norm)]
    pub norm: NormKind,

    /// `impulse`, `init` (B = I) or `structured:<file>`.
    #[arg(long, global = true, default_value = "impulse")]
    pub scenario: String,

    /// Output directory, created when missing.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    #[command(flatten)]
    Analysis(Analysis),
    /// Build a vehicle platoon and run an analysis on it.
    Platoon(PlatoonArgs),
}

#[derive(Subcommand, Debug, Clone)]
pub enum Analysis {
    /// Resolvent-norm grid as CSV.
    Grid(GridArgs),
    /// Grid, level curves and SVG plot.
    Curves(CurvesArgs),
    /// Frequency response `omega,amplitude`.
    Bode(BodeArgs),
    /// Lower and upper transient bounds.
    Bounds(BoundsArgs),
    /// Sampled transient response `t,value`.
    Oracle(OracleArgs),
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    /// `re0,re1,im0,im1`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_window)]
    pub window: Option<Window>,
    /// `NxM` real by imaginary samples.
    #[arg(long, value_parser = parse_res)]
    pub res: Option<(usize, usize)>,
}

#[derive(Args, Debug, Clone)]
pub struct CurvesArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Comma-separated levels.
    #[arg(long, value_delimiter = ',', value_parser = parse_level)]
    pub eps: Option<Vec<f64>>,
}

#[derive(Args, Debug, Clone)]
pub struct BodeArgs {
    /// `lo,hi,count`: log-spaced, or linear when `lo` is 0.
    #[arg(long, value_parser = parse_omega)]
    pub omega: Option<OmegaGrid>,
}

#[derive(Args, Debug, Clone)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Level ladder for the contour bound.
    #[arg(long, value_delimiter = ',', value_parser = parse_level)]
    pub eps: Option<Vec<f64>>,
    /// Contour from the circle `re,im,radius` instead of level curves.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_circle)]
    pub circle: Option<(f64, f64, f64)>,
    /// Use the convex hull of the level curves.
    #[arg(long)]
    pub hull: bool,
    /// Semicircle radius factor, a number > 1 or `opt`.
    #[arg(long, default_value = "opt", value_parser = parse_a)]
    pub a: AArg,
    /// Quadrature tolerance, absolute and relative.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct OracleArgs {
    /// Final time; defaults to 50 time constants of the slowest pole.
    #[arg(long)]
    pub horizon: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryArg {
    Directed,
    Bidirectional,
}

#[derive(Args, Debug)]
pub struct PlatoonArgs {
    #[arg(long, value_enum)]
    pub symmetry: SymmetryArg,
    /// Number of vehicles.
    #[arg(long)]
    pub n: usize,
    /// Absolute velocity damping.
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    #[command(subcommand)]
    pub analysis: Analysis,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AArg {
    Optimize,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaGrid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl OmegaGrid {
    pub fn points(&self) -> Vec<f64> {
        let last = (self.count - 1).max(1) as f64;
        (0..self.count)
            .map(|k| {
                let u = k as f64 / last;
                if self.lo == 0.0 {
                    self.hi * u
                } else {
                    self.lo * (self.hi / self.lo).powf(u)
                }
            })
            .collect()
    }
}

fn parse_norm(s: &str) -> Result<NormKind, String> {
    s.parse().map_err(|e: iospectra::Error| e.to_string())
}

fn parse_numbers(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            let v: f64 = t.trim().parse().map_err(|_| format!("`{t}` is not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("`{t}` is not finite"))
            }
        })
        .collect()
}

fn parse_level(s: &str) -> Result<f64, String> {
    match parse_numbers(s)?[..] {
        [v] if v > 0.0 => Ok(v),
        _ => Err(format!("`{s}` is not a positive level")),
    }
}

fn parse_window(s: &str) -> Result<Window, String> {
    match parse_numbers(s)?[..] {
        [a, b, c, d] if a < b && c < d => Ok(Window { re: (a, b), im: (c, d) }),
        _ => Err("expected re0,re1,im0,im1 with re0 < re1 and im0 < im1".into()),
    }
}

fn parse_res(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or("expected NxM")?;
    let n: usize = a.parse().map_err(|_| format!("`{a}` is not a count"))?;
    let m: usize = b.parse().map_err(|_| format!("`{b}` is not a count"))?;
    if n < 2 || m < 2 {
        return Err("resolution must be at least 2x2".into());
    }
    Ok((n, m))
}

fn parse_circle(s: &str) -> Result<(f64, f64, f64), String> {
    match parse_numbers(s)?[..] {
        [re, im, r] if r > 0.0 => Ok((re, im, r)),
        _ => Err("expected re,im,radius with a positive radius".into()),
    }
}

fn parse_omega(s: &str) -> Result<OmegaGrid, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let [lo, hi, count] = parts[..] else {
        return Err("expected lo,hi,count".into());
    };
    let lo: f64 = lo.trim().parse().map_err(|_| format!("`{lo}` is not a number"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("`{hi}` is not a number"))?;
    let count: usize = count.trim().parse().map_err(|_| format!("`{count}` is not a count"))?;
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) || count == 0 {
        return Err("expected 0 <= lo < hi and a positive count".into());
    }
    Ok(OmegaGrid { lo, hi, count })
}

fn parse_a(s: &str) -> Result<AArg, String> {
    if s == "opt" {
        return Ok(AArg::Optimize);
    }
    let a: f64 = s.parse().map_err(|_| format!("`{s}` is neither a number nor `opt`"))?;
    if a > 1.0 && a.is_finite() {
        Ok(AArg::Fixed(a))
    } else {
        Err(format!("a must exceed 1, got {a}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_grids() {
        let g = parse_omega("1e-12,4,5").unwrap().points();
        assert_eq!(g.len(), 5);
        assert!((g[0] - 1e-12).abs() < 1e-24 && (g[4] - 4.0).abs() < 1e-12);
        assert_eq!(parse_omega("0,2,3").unwrap().points(), vec![0.0, 1.0, 2.0]);
        assert!(parse_omega("2,1,3").is_err());
    }

    #[test]
    fn knobs() {
        assert_eq!(parse_res("40x30"), Ok((40, 30)));
        assert!(parse_res("1x30").is_err());
        assert_eq!(parse_a("opt"), Ok(AArg::Optimize));
        assert_eq!(parse_a("3"), Ok(AArg::Fixed(3.0)));
        assert!(parse_a("1").is_err());
        assert!(parse_window("0,1,1,0").is_err());
        assert_eq!(parse_level("0.25"), Ok(0.25));
        assert!(parse_level("-1").is_err());
    }
}
