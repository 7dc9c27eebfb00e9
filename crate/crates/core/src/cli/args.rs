//! Command-line and config-file parameters.
//!
//! Every field is optional so a JSON config can supply values that flags
//! then override. `resolve` fills remaining defaults, and the fully resolved
//! set is what gets embedded in output records.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{parameter, Result};
use crate::montecarlo::{DistributionSpec, ATOMS_SAMPLABLE_K_MAX};

pub const DEFAULT_SEED: u64 = 1;

/// Parse a seed given in decimal or `0x`-prefixed hexadecimal.
pub fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

/// Parse a count, accepting scientific forms such as `1e6`.
pub fn parse_count(s: &str) -> std::result::Result<u64, String> {
    let s = s.trim();
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().map_err(|_| format!("invalid count {s:?}"))?;
    if f >= 0.0 && f.fract() == 0.0 && f < 1.8e19 {
        Ok(f as u64)
    } else {
        Err(format!("count must be a non-negative integer, got {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "chung", version, about = "Small-ball probabilities, weighted LIL series and random-walk experiments")]
pub struct Cli {
    /// JSON config file (a run config or a previously emitted JSON record).
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<std::path::PathBuf>,
    /// Worker threads; defaults to $CHUNG_THREADS, then the core count.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// RNG seed, decimal or 0x-hex.
    #[arg(long, global = true, value_parser = parse_seed)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Brownian small-ball probability P(sup|W| ≤ x).
    Smallball(SmallballArgs),
    /// Limit constants of the weighted series.
    Constants(ConstantsArgs),
    /// Kernel series by direct summation or closed-form integral.
    Series(SeriesArgs),
    /// Monte Carlo small-deviation probability.
    Mc(McArgs),
    /// Rate regression over a grid of walk lengths.
    Sweep(SweepArgs),
    /// Truncation diagnostics B_n and Δ_n.
    Truncate(TruncateArgs),
    /// Integral-test verdicts for a boundary function ψ.
    IntegralTest(IntegralTestArgs),
    /// Tail second-moment profile log log t · E X² I{|X| ≥ t}.
    Condition(ConditionArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Smallball(_) => "smallball",
            Command::Constants(_) => "constants",
            Command::Series(_) => "series",
            Command::Mc(_) => "mc",
            Command::Sweep(_) => "sweep",
            Command::Truncate(_) => "truncate",
            Command::IntegralTest(_) => "integral-test",
            Command::Condition(_) => "condition",
        }
    }

    /// Overlay `flags` on `self`; both must be the same subcommand.
    pub fn overlay(&mut self, flags: &Command) -> Result<()> {
        macro_rules! take {
            ($dst:expr, $src:expr; $($f:ident),*) => {{
                $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )*
            }};
        }
        match (self, flags) {
            (Command::Smallball(d), Command::Smallball(s)) => take!(d, s; x, tol),
            (Command::Constants(d), Command::Constants(s)) => take!(d, s; theorem, a, b, tau),
            (Command::Series(d), Command::Series(s)) => take!(d, s; a, b, eps, nmax, mode, tau),
            (Command::Mc(d), Command::Mc(s)) => {
                d.dist.overlay(&s.dist);
                take!(d, s; n, eps, tau, reps)
            }
            (Command::Sweep(d), Command::Sweep(s)) => {
                d.dist.overlay(&s.dist);
                take!(d, s; eps, ngrid, reps)
            }
            (Command::Truncate(d), Command::Truncate(s)) => {
                d.dist.overlay(&s.dist);
                take!(d, s; n, p, reps)
            }
            (Command::IntegralTest(d), Command::IntegralTest(s)) => take!(d, s; family, c, points, a, b, nmax),
            (Command::Condition(d), Command::Condition(s)) => {
                d.dist.overlay(&s.dist);
                take!(d, s; tgrid, kgrid)
            }
            (d, s) => {
                return Err(parameter(format!(
                    "config file holds a `{}` run but the command line asks for `{}`",
                    d.name(),
                    s.name()
                )))
            }
        }
        Ok(())
    }

    /// Fill defaults and check that required values are present.
    pub fn resolve(&mut self) -> Result<()> {
        match self {
            Command::Smallball(a) => {
                require(&a.x, "x")?;
                a.tol.get_or_insert(1e-12);
            }
            Command::Constants(a) => {
                a.theorem.get_or_insert(1);
                a.a.get_or_insert(0.0);
                a.b.get_or_insert(0.0);
                a.tau.get_or_insert(0.0);
            }
            Command::Series(a) => {
                require(&a.eps, "eps")?;
                a.a.get_or_insert(0.0);
                a.b.get_or_insert(0.0);
                a.nmax.get_or_insert(10_000_000);
                a.mode.get_or_insert(SeriesMode::Integral);
                a.tau.get_or_insert(0.0);
            }
            Command::Mc(a) => {
                require(&a.n, "n")?;
                require(&a.eps, "eps")?;
                a.dist.resolve(ATOMS_SAMPLABLE_K_MAX);
                a.tau.get_or_insert(0.0);
                a.reps.get_or_insert(10_000);
            }
            Command::Sweep(a) => {
                require(&a.eps, "eps")?;
                require(&a.ngrid, "ngrid")?;
                a.dist.resolve(ATOMS_SAMPLABLE_K_MAX);
                a.reps.get_or_insert(10_000);
            }
            Command::Truncate(a) => {
                require(&a.n, "n")?;
                a.dist.resolve(ATOMS_SAMPLABLE_K_MAX);
                a.p.get_or_insert(0.25);
                a.reps.get_or_insert(100);
            }
            Command::IntegralTest(a) => {
                let family = *a.family.get_or_insert(PsiFamily::CLoglog);
                match family {
                    PsiFamily::CLoglog => require(&a.c, "c")?,
                    PsiFamily::Tabulated => require(&a.points, "points")?,
                }
                a.a.get_or_insert(0.0);
                a.b.get_or_insert(0.0);
                a.nmax.get_or_insert(10_000_000);
            }
            Command::Condition(a) => {
                a.dist.resolve(30);
                if a.tgrid.is_none() && a.kgrid.is_none() {
                    return Err(parameter("condition needs --tgrid or --kgrid"));
                }
            }
        }
        Ok(())
    }
}

fn require<T>(v: &Option<T>, name: &str) -> Result<()> {
    match v {
        Some(_) => Ok(()),
        None => Err(parameter(format!("missing required value --{name}"))),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct SmallballArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct ConstantsArgs {
    /// 1: critical-ε constant, 2: large-ε constant.
    #[arg(long)]
    pub theorem: Option<u8>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesMode {
    Direct,
    Integral,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct SeriesArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<f64>,
    #[arg(long, value_parser = parse_count)]
    pub nmax: Option<u64>,
    #[arg(long, value_enum)]
    pub mode: Option<SeriesMode>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistName {
    Rademacher,
    Normal,
    Uniform,
    Twopoint,
    Atoms,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct DistArgs {
    #[arg(long, value_enum)]
    pub dist: Option<DistName>,
    /// Half-width of the uniform law.
    #[arg(long)]
    pub width: Option<f64>,
    /// Large value of the two-point law.
    #[arg(long, allow_hyphen_values = true)]
    pub value: Option<f64>,
    /// Probability of the large value; defaults to unit variance.
    #[arg(long)]
    pub prob: Option<f64>,
    /// Mass constant of the atom law.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub kmax: Option<u32>,
}

impl DistArgs {
    fn overlay(&mut self, s: &DistArgs) {
        macro_rules! take {
            ($($f:ident),*) => {{ $( if s.$f.is_some() { self.$f = s.$f; } )* }};
        }
        take!(dist, width, value, prob, c, kmax);
    }

    /// Fill in only the parameters relevant to the chosen law.
    fn resolve(&mut self, default_kmax: u32) {
        match *self.dist.get_or_insert(DistName::Rademacher) {
            DistName::Rademacher | DistName::Normal => {}
            DistName::Uniform => {
                self.width.get_or_insert(3f64.sqrt());
            }
            DistName::Twopoint => {
                let v = *self.value.get_or_insert(10.0);
                self.prob.get_or_insert(1.0 / (1.0 + v * v));
            }
            DistName::Atoms => {
                self.c.get_or_insert(1.0);
                self.kmax.get_or_insert(default_kmax);
            }
        }
    }

    /// The law described by resolved arguments.
    pub fn spec(&self) -> DistributionSpec {
        match self.dist.unwrap_or(DistName::Rademacher) {
            DistName::Rademacher => DistributionSpec::Rademacher,
            DistName::Normal => DistributionSpec::StdNormal,
            DistName::Uniform => DistributionSpec::CenteredUniform {
                half_width: self.width.unwrap_or(3f64.sqrt()),
            },
            DistName::Twopoint => {
                let value = self.value.unwrap_or(10.0);
                DistributionSpec::TwoPoint {
                    value,
                    prob: self.prob.unwrap_or(1.0 / (1.0 + value * value)),
                }
            }
            DistName::Atoms => DistributionSpec::AtomsDoublyExp {
                c: self.c.unwrap_or(1.0),
                k_max: self.kmax.unwrap_or(ATOMS_SAMPLABLE_K_MAX),
            },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct McArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub dist: DistArgs,
    #[arg(long, value_parser = parse_count)]
    pub n: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
    #[arg(long, value_parser = parse_count)]
    pub reps: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub dist: DistArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<f64>,
    /// Comma-separated walk lengths, e.g. 1e3,1e4,1e5,1e6.
    #[arg(long, value_delimiter = ',', value_parser = parse_count)]
    pub ngrid: Option<Vec<u64>>,
    #[arg(long, value_parser = parse_count)]
    pub reps: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct TruncateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub dist: DistArgs,
    #[arg(long, value_parser = parse_count)]
    pub n: Option<u64>,
    /// Truncation exponent in (0, 1/2).
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
    #[arg(long, value_parser = parse_count)]
    pub reps: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsiFamily {
    /// ψ(n) = c / √(log log n).
    CLoglog,
    /// Step function through --points.
    Tabulated,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct IntegralTestArgs {
    #[arg(long, value_enum)]
    pub family: Option<PsiFamily>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Tabulated ψ as `n:value` pairs, e.g. 1:2.0,100:1.5.
    #[arg(long)]
    pub points: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, value_parser = parse_count)]
    pub nmax: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct ConditionArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub dist: DistArgs,
    /// Comma-separated levels t.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub tgrid: Option<Vec<f64>>,
    /// Atom indices k (levels t = exp(e^k)), as `lo..hi` or a comma list.
    #[arg(long)]
    pub kgrid: Option<String>,
}

/// Expand `5..30` (inclusive) or `5,10,20`.
pub fn parse_kgrid(s: &str) -> Result<Vec<u32>> {
    let bad = |e: &dyn std::fmt::Display| parameter(format!("invalid k grid {s:?}: {e}"));
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: u32 = lo.trim().parse().map_err(|e| bad(&e))?;
        let hi: u32 = hi.trim().trim_start_matches('=').parse().map_err(|e| bad(&e))?;
        if lo == 0 || lo > hi {
            return Err(bad(&"need 1 ≤ lo ≤ hi"));
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',')
        .map(|p| match p.trim().parse::<u32>() {
            Ok(0) => Err(bad(&"k must be at least 1")),
            Ok(k) => Ok(k),
            Err(e) => Err(bad(&e)),
        })
        .collect()
}

/// Parse `n:value` pairs for a tabulated ψ.
pub fn parse_points(s: &str) -> Result<Vec<(u64, f64)>> {
    s.split(',')
        .map(|p| {
            let (n, v) = p
                .split_once(':')
                .ok_or_else(|| parameter(format!("point {p:?} is not of the form n:value")))?;
            let n = parse_count(n).map_err(parameter)?;
            let v: f64 = v.trim().parse().map_err(|e| parameter(format!("point {p:?}: {e}")))?;
            Ok((n, v))
        })
        .collect()
}

/// Resolved run description embedded in every JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}
