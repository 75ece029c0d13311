//! The `geodesic` drift table.

use std::io::Write;

use ypq_core::integrability::{drift_series, integrate_geodesic, IntegratorConfig, InvariantSystem, PhaseState};
use ypq_core::geometry::MetricProvider;

use crate::config::RunConfig;

/// Result of one geodesic run: the CSV has been written; `passed` is true
/// when the run reached `t_end` and every drift stays below the tolerance.
#[derive(Debug, Clone)]
pub struct GeodesicOutcome {
    pub passed: bool,
    pub rows: usize,
    pub exit_time: Option<f64>,
    pub max_drift: f64,
}

pub enum GeodesicError {
    /// Bad initial state or configuration.
    Config(String),
    /// Integration failed after a valid start.
    Runtime(String),
}

fn initial_state(cfg: &RunConfig, system: &InvariantSystem) -> Result<PhaseState, GeodesicError> {
    match cfg.state {
        Some(s) => {
            system.flow.domain.check(&s.point).map_err(|e| GeodesicError::Config(e.to_string()))?;
            Ok(s)
        }
        None => system
            .sample_states(cfg.seed, 1)
            .map(|v| v[0])
            .map_err(|e| GeodesicError::Config(e.to_string())),
    }
}

/// Writes `t, H, P_phi, P_beta, P_psi, J2, K_...` relative drifts, one row
/// per accepted step, and a trailing `domain_exit,<time>` row when the
/// trajectory left the sampling region.
pub fn run_geodesic(cfg: &RunConfig, out: &mut dyn Write) -> Result<GeodesicOutcome, GeodesicError> {
    let mut provider = MetricProvider::ypq(cfg.params).map_err(|e| GeodesicError::Config(e.to_string()))?;
    provider.domain = provider.domain.with_margin(cfg.margin);
    let system = InvariantSystem::new(provider).map_err(|e| GeodesicError::Config(e.to_string()))?;
    let state = initial_state(cfg, &system)?;
    let icfg = IntegratorConfig::default().with_rtol(cfg.rtol).with_margin(cfg.margin);
    let traj = integrate_geodesic(&system.flow, &state, cfg.t_end, &icfg).map_err(|e| match e {
        ypq_core::Error::BadInitialState(_) | ypq_core::Error::PointOutOfDomain(_) => GeodesicError::Config(e.to_string()),
        other => GeodesicError::Runtime(other.to_string()),
    })?;
    let series = drift_series(&system, &traj).map_err(|e| GeodesicError::Runtime(e.to_string()))?;

    let io = |e: csv::Error| GeodesicError::Config(format!("writing output: {e}"));
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend(system.labels());
    w.write_record(&header).map_err(io)?;
    let mut max_drift: f64 = 0.0;
    for (t, row) in &series {
        let mut rec = vec![t.to_string()];
        for v in row {
            max_drift = max_drift.max(*v);
            rec.push(v.to_string());
        }
        w.write_record(&rec).map_err(io)?;
    }
    let exit_time = traj.exit.map(|e| e.time);
    if let Some(t) = exit_time {
        w.write_record(["domain_exit".to_string(), t.to_string()]).map_err(io)?;
    }
    w.flush().map_err(|e| GeodesicError::Config(format!("writing output: {e}")))?;
    Ok(GeodesicOutcome { passed: max_drift < cfg.tol && exit_time.is_none(), rows: series.len(), exit_time, max_drift })
}
