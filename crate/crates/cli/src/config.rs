//! Command-line surface and the validated run configuration.

use crate::CliError;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use supnorm::hyperbolic::{parse_complex, UpperHalfPoint};
use supnorm::Complex64;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "SUPNORM_OUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "supnorm", version, about = "Sup-norm bounds for modular and Jacobi cusp forms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Tolerance for tails, quadrature and invariance checks.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Truncation order of q-expansions.
    #[arg(long, global = true, default_value_t = 40)]
    pub trunc: i64,
    /// Search grid: `n_xi,n_eta` or `n_xi,n_eta,n_x,n_y`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub grid: Vec<usize>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Output file; defaults to `$SUPNORM_OUT_DIR/<command>.<ext>`, else stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for randomized sample points.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 lets the pool decide.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Reduce a point into the fundamental domain.
    Reduce {
        #[arg(long)]
        tau: String,
    },
    /// Pointwise norms of the theta functions of index m.
    ThetaNorm {
        #[arg(long, default_value_t = 1)]
        index: u32,
        #[arg(long)]
        tau: String,
        #[arg(long, default_value = "0")]
        z: String,
    },
    /// Bergman kernel on the diagonal from its series, with the one-dimensional oracle when available.
    BergmanDiag {
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        tau: String,
    },
    /// Sup of the squared norm of the normalized generator of a one-dimensional cusp space.
    Supnorm {
        #[arg(long)]
        weight: u32,
    },
    /// Sup of the squared norm of a normalized Jacobi cusp form.
    JacobiSupnorm {
        /// Coefficient file; defaults to the weight-10 index-1 form.
        #[arg(long)]
        coeffs: Option<PathBuf>,
    },
    /// One report row per (bound, weight).
    BoundsTable {
        #[arg(long, value_delimiter = ',', default_value = "12,16,18,20,22,26")]
        weights: Vec<u32>,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "prop3")]
        reports: Vec<ReportKind>,
    },
    /// Measured sups against bounds across weights and indices.
    Scaling {
        #[arg(long, value_delimiter = ',', default_value = "12,16,18,20,22,26")]
        weights: Vec<u32>,
        /// Extra Jacobi coefficient files for the index sweep.
        #[arg(long, value_delimiter = ',')]
        coeffs: Vec<PathBuf>,
    },
    /// Run the property suite and report every check.
    Verify,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Reduce { .. } => "reduce",
            Command::ThetaNorm { .. } => "theta-norm",
            Command::BergmanDiag { .. } => "bergman-diag",
            Command::Supnorm { .. } => "supnorm",
            Command::JacobiSupnorm { .. } => "jacobi-supnorm",
            Command::BoundsTable { .. } => "bounds-table",
            Command::Scaling { .. } => "scaling",
            Command::Verify => "verify",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportKind {
    Prop3,
    Thm4,
    Cor5,
    Thm6,
}

/// A checked configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub tol: f64,
    pub trunc: i64,
    pub grid: Option<[usize; 2]>,
    pub jacobi_grid: Option<[usize; 4]>,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
    pub seed: u64,
    pub threads: usize,
}

pub fn parse_tau(s: &str) -> Result<UpperHalfPoint, CliError> {
    s.parse::<UpperHalfPoint>()
        .map_err(|e| CliError::Config(format!("--tau {s:?}: {e}; use the form re+imi with im > 0, e.g. 0.5+1.2i")))
}

pub fn parse_z(s: &str) -> Result<Complex64, CliError> {
    parse_complex(s).map_err(|e| CliError::Config(format!("--z {s:?}: {e}; use the form re+imi")))
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let c = cli.common;
        if !(c.tol > 0.0 && c.tol.is_finite()) {
            return Err(CliError::Config(format!("--tol must be positive, got {}", c.tol)));
        }
        if c.trunc < 8 {
            return Err(CliError::Config(format!("--trunc must be at least 8, got {}", c.trunc)));
        }
        if c.grid.iter().any(|&n| n < 4) {
            return Err(CliError::Config(format!("every --grid dimension must be at least 4, got {:?}", c.grid)));
        }
        let (grid, jacobi_grid) = match c.grid.as_slice() {
            [] => (None, None),
            &[a, b] => (Some([a, b]), None),
            &[a, b, x, y] => (Some([a, b]), Some([a, b, x, y])),
            g => return Err(CliError::Config(format!("--grid takes 2 or 4 values, got {}", g.len()))),
        };
        match &cli.command {
            Command::Reduce { tau } | Command::BergmanDiag { tau, .. } => {
                parse_tau(tau)?;
            }
            Command::ThetaNorm { index, tau, z } => {
                if *index < 1 {
                    return Err(CliError::Config("--index must be at least 1".into()));
                }
                parse_tau(tau)?;
                parse_z(z)?;
            }
            Command::BoundsTable { weights, .. } | Command::Scaling { weights, .. } if weights.is_empty() => {
                return Err(CliError::Config("--weights must list at least one weight".into()));
            }
            _ => {}
        }
        Ok(Self {
            command: cli.command,
            tol: c.tol,
            trunc: c.trunc,
            grid,
            jacobi_grid,
            output_format: c.format,
            output_path: c.output,
            seed: c.seed,
            threads: c.threads,
        })
    }

    /// Where output goes: the explicit path, the default directory, or stdout (`None`).
    pub fn destination(&self) -> Option<PathBuf> {
        if let Some(p) = &self.output_path {
            return Some(p.clone());
        }
        std::env::var_os(OUT_DIR_ENV)
            .map(|d| PathBuf::from(d).join(format!("{}.{}", self.command.name(), self.output_format.extension())))
    }

    pub fn digest(&self) -> String {
        format!("tol={:e};trunc={};seed={}", self.tol, self.trunc, self.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    fn cfg(args: &[&str]) -> Result<RunConfig, CliError> {
        RunConfig::from_cli(Cli::try_parse_from(std::iter::once("supnorm").chain(args.iter().copied())).unwrap())
    }

    #[test]
    fn defaults() {
        let c = cfg(&["reduce", "--tau", "0.3+0.2i"]).unwrap();
        assert_eq!((c.tol, c.trunc, c.seed), (1e-8, 40, 0));
        assert_eq!(c.output_format, OutputFormat::Csv);
        assert_eq!(c.digest(), "tol=1e-8;trunc=40;seed=0");
    }

    #[test]
    fn grid_arity() {
        let c = cfg(&["verify", "--grid", "8,9"]).unwrap();
        assert_eq!((c.grid, c.jacobi_grid), (Some([8, 9]), None));
        let c = cfg(&["verify", "--grid", "8,9,6,5"]).unwrap();
        assert_eq!(c.jacobi_grid, Some([8, 9, 6, 5]));
        assert!(cfg(&["verify", "--grid", "8,9,6"]).is_err());
        assert!(cfg(&["verify", "--grid", "3,9"]).is_err());
    }

    #[test]
    fn rejects_bad_values() {
        for args in [
            &["verify", "--tol", "0"][..],
            &["verify", "--tol=-1e-8"],
            &["verify", "--trunc", "4"],
            &["reduce", "--tau", "0.5-1i"],
            &["bergman-diag", "--weight", "12", "--tau", "nonsense"],
            &["theta-norm", "--index", "0", "--tau", "i"],
            &["theta-norm", "--tau", "i", "--z", "1+"],
        ] {
            let e = cfg(args).unwrap_err();
            assert_eq!(e.exit_code(), 2, "{args:?}");
        }
    }

    #[test]
    fn explicit_output_path_wins() {
        let c = cfg(&["supnorm", "--weight", "12", "--output", "x/y.csv"]).unwrap();
        assert_eq!(c.destination(), Some(PathBuf::from("x/y.csv")));
    }

    #[test]
    fn extension_follows_format() {
        assert_eq!(OutputFormat::Csv.extension(), "csv");
        assert_eq!(OutputFormat::Json.extension(), "json");
    }
}
