use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use ypq_core::chart::{validate_params, ChartPoint, YpqParams};
use ypq_core::integrability::PhaseState;

#[derive(Debug, Parser)]
#[command(name = "ypq", version, about = "Residual checks and geodesic invariants for Y(p,q) metrics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the residual checks and print a JSON report.
    Verify(Common),
    /// Integrate one geodesic and print a CSV drift table.
    Geodesic(Common),
    /// Functional-independence ranks of the first integrals, as JSON.
    Rank(Common),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long, default_value_t = 0.5)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Sample points (verify) or phase states (rank).
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    /// Base tolerance; individual checks scale it.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long = "t-end", default_value_t = 100.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub rtol: f64,
    /// Relative distance from the chart boundary excluded from sampling.
    #[arg(long, default_value_t = ypq_core::chart::DEFAULT_MARGIN)]
    pub margin: f64,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated check names or name prefixes (verify only).
    #[arg(long, value_delimiter = ',')]
    pub checks: Option<Vec<String>>,
    /// Initial phase state `θ,φ,y,β,ψ′,p_θ,p_φ,p_y,p_β,p_ψ′` (geodesic, rank).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub state: Option<Vec<f64>>,
    /// Include wall-clock time in the report. Off by default so that
    /// reports are reproducible byte for byte.
    #[arg(long)]
    pub timing: bool,
}

/// Validated run settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: YpqParams,
    pub seed: u64,
    pub points: usize,
    pub tol: f64,
    pub t_end: f64,
    pub rtol: f64,
    pub margin: f64,
    pub out: Option<PathBuf>,
    pub checks: Option<Vec<String>>,
    pub state: Option<PhaseState>,
    pub timing: bool,
}

/// The part of the configuration echoed in every report.
#[derive(Debug, Clone, Serialize)]
pub struct ParamsEcho {
    pub a: f64,
    pub c: f64,
    pub seed: u64,
    pub points: usize,
    pub tol: f64,
    pub margin: f64,
}

impl RunConfig {
    pub fn from_args(args: Common) -> Result<Self, String> {
        let params = validate_params(args.a, args.c).map_err(|e| e.to_string())?;
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(format!("--{name} must be positive, got {v}"))
            }
        };
        positive("tol", args.tol)?;
        positive("rtol", args.rtol)?;
        if !(args.t_end >= 0.0 && args.t_end.is_finite()) {
            return Err(format!("--t-end must be non-negative, got {}", args.t_end));
        }
        if !(args.margin > 0.0 && args.margin < 0.5) {
            return Err(format!("--margin must lie in (0, 0.5), got {}", args.margin));
        }
        if args.points == 0 {
            return Err("--points must be at least 1".into());
        }
        let state = match args.state {
            None => None,
            Some(v) if v.len() == 10 && v.iter().all(|x| x.is_finite()) => {
                let momenta = [v[5], v[6], v[7], v[8], v[9]];
                Some(PhaseState::new(ChartPoint::from_slice(&v[..5]), momenta))
            }
            Some(v) => return Err(format!("--state needs 10 finite numbers, got {}", v.len())),
        };
        Ok(Self {
            params,
            seed: args.seed,
            points: args.points,
            tol: args.tol,
            t_end: args.t_end,
            rtol: args.rtol,
            margin: args.margin,
            out: args.out,
            checks: args.checks,
            state,
            timing: args.timing,
        })
    }

    pub fn echo(&self) -> ParamsEcho {
        ParamsEcho {
            a: self.params.a,
            c: self.params.c,
            seed: self.seed,
            points: self.points,
            tol: self.tol,
            margin: self.margin,
        }
    }

    pub fn sink(&self) -> io::Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(File::create(path)?),
            None => Box::new(io::stdout().lock()),
        })
    }
}
