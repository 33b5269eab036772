use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "bpre",
    version,
    about = "Upper large deviations of branching processes in random environment"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate Λ, χ and ψ on a θ-grid and summarize γ, θ*, θ†.
    Analyze(RateArgs),
    /// Estimate P(Z_n ≥ e^{θn}) (or survival without θ) exactly, naively and by tilting.
    Simulate(SimArgs),
    /// Run the oracle/estimator cross-checks and rate-function properties.
    Verify(VerifyArgs),
    /// Optimal strategy and predicted path profile at one θ.
    Path(PathArgs),
    /// Transition points and regimes.
    Phase(PhaseArgs),
    /// Render SVG plots from analyze/path CSV output.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Environment model file (TOML).
    #[arg(long)]
    pub model: PathBuf,
    /// Tail exponent; defaults to the one declared in the model.
    #[arg(long)]
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ThetaArgs {
    #[arg(long, conflicts_with = "theta_grid")]
    pub theta: Option<f64>,
    /// Grid `A:B:STEP`.
    #[arg(long, value_name = "A:B:STEP")]
    pub theta_grid: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    #[arg(long, default_value_t = 100_000)]
    pub replicates: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = bpre_core::simulate::DEFAULT_CAP)]
    pub cap: u64,
    /// Worker threads (0 = all cores, 1 = sequential). Never changes results.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Clone, Args)]
pub struct RateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub theta: ThetaArgs,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SimArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub theta: ThetaArgs,
    #[arg(long, conflicts_with = "n_list")]
    pub n: Option<usize>,
    /// Comma-separated generation counts.
    #[arg(long, value_name = "N1,N2,...")]
    pub n_list: Option<String>,
    #[command(flatten)]
    pub mc: McArgs,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Extra model to include next to the bundled test environments.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Generations for the exact-oracle checks.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[command(flatten)]
    pub mc: McArgs,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct PathArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub theta: f64,
    #[arg(long, default_value_t = 101)]
    pub resolution: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct PhaseArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    /// Directory holding analyze.csv and/or path.csv; defaults to --out.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

/// Parses `A:B:STEP` into `A, A+STEP, ..., ≤ B`.
pub fn parse_theta_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, step] = parts.as_slice() else {
        return Err(CliError::validation(format!(
            "theta grid '{spec}' must be A:B:STEP"
        )));
    };
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| CliError::validation(format!("bad number '{s}' in theta grid")))
    };
    let (a, b, step) = (num(a)?, num(b)?, num(step)?);
    if !(step > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(CliError::validation(
            "theta grid needs finite bounds and STEP > 0",
        ));
    }
    if a < 0.0 {
        return Err(CliError::validation(
            "theta grid must start at a nonnegative value",
        ));
    }
    if a > b {
        return Err(CliError::validation("empty theta grid"));
    }
    let count = ((b - a) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(CliError::validation("theta grid has more than 1e6 points"));
    }
    Ok((0..count).map(|i| a + step * i as f64).collect())
}

pub fn thetas(args: &ThetaArgs) -> Result<Option<Vec<f64>>, CliError> {
    match (&args.theta, &args.theta_grid) {
        (Some(t), _) => {
            if !(*t >= 0.0 && t.is_finite()) {
                return Err(CliError::validation(format!("theta {t} must be >= 0")));
            }
            Ok(Some(vec![*t]))
        }
        (None, Some(g)) => parse_theta_grid(g).map(Some),
        (None, None) => Ok(None),
    }
}

pub fn parse_n_list(n: Option<usize>, list: Option<&str>) -> Result<Vec<usize>, CliError> {
    let ns = match (n, list) {
        (Some(n), _) => vec![n],
        (None, Some(l)) => l
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| CliError::validation(format!("bad generation count '{s}'")))
            })
            .collect::<Result<_, _>>()?,
        (None, None) => return Err(CliError::validation("need --n or --n-list")),
    };
    if ns.is_empty() || ns.contains(&0) {
        return Err(CliError::validation("generation counts must be >= 1"));
    }
    Ok(ns)
}
