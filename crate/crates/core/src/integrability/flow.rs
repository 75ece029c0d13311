//! Hamilton's equations for geodesics and adaptive Dormand-Prince
//! integrators with a domain-exit event.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::metric::{MetricJet, MetricProvider};
use crate::integrability::tableau::{A5, A8, B8, BHH8, E5, ER8};
use crate::integrability::{require_finite, InvariantSystem, PhaseState};

/// `ẋ = g⁻¹p`, `ṗ_k = −½ p·(∂ₖg⁻¹)·p`.
pub fn geodesic_rhs(provider: &MetricProvider, state: &PhaseState) -> Result<[f64; 10]> {
    rhs(provider, &state.as_array())
}

fn rhs(provider: &MetricProvider, z: &[f64; 10]) -> Result<[f64; 10]> {
    let jet = MetricJet::<f64>::new(provider, &z[..5], 1)?;
    let p = &z[5..];
    let mut out = [0.0; 10];
    for i in 0..5 {
        out[i] = (0..5).map(|j| jet.ginv[(i, j)] * p[j]).sum();
    }
    for k in 0..5 {
        let d = jet.dginv(k);
        let mut v = 0.0;
        for i in 0..5 {
            for j in 0..5 {
                v += d[(i, j)] * p[i] * p[j];
            }
        }
        out[5 + k] = -0.5 * v;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Method {
    /// Dormand-Prince 5(4)
    Dopri5,
    /// Dormand-Prince 8(5,3)
    #[default]
    Dop853,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntegratorConfig {
    pub method: Method,
    pub rtol: f64,
    pub atol: f64,
    pub h0: f64,
    /// Relative margin to the chart boundary that triggers a domain exit.
    pub margin: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { method: Method::default(), rtol: 1e-10, atol: 1e-12, h0: 1e-3, margin: crate::chart::DEFAULT_MARGIN, max_steps: 2_000_000 }
    }
}

impl IntegratorConfig {
    pub fn with_rtol(mut self, rtol: f64) -> Self {
        self.rtol = rtol;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }
}

/// The trajectory came within the margin of the chart boundary at `time`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DomainExit {
    pub time: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhaseState>,
    pub exit: Option<DomainExit>,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn last(&self) -> &PhaseState {
        self.states.last().expect("trajectory always holds the initial state")
    }
}

fn inside(provider: &MetricProvider, margin: f64, z: &[f64; 10]) -> bool {
    let pt = crate::chart::ChartPoint::from_slice(&z[..5]);
    provider.domain.with_margin(margin).contains(&pt)
}

/// Integrates from `t = 0` to `t_end`, recording every accepted step.
/// Leaving the margin region ends the run with a [`DomainExit`].
pub fn integrate_geodesic(
    provider: &MetricProvider,
    state0: &PhaseState,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    require_finite(state0)?;
    provider.check_point(&state0.point.as_array())?;
    if !(t_end >= 0.0) {
        return Err(Error::BadInitialState(format!("t_end must be non-negative, got {t_end}")));
    }
    let mut traj = Trajectory { times: vec![0.0], states: vec![*state0], exit: None, rejected_steps: 0 };
    if !inside(provider, cfg.margin, &state0.as_array()) {
        traj.exit = Some(DomainExit { time: 0.0 });
        return Ok(traj);
    }
    let mut t = 0.0;
    let mut y = state0.as_array();
    let mut h = cfg.h0.min(t_end);
    let mut k0 = rhs(provider, &y)?;
    let order = match cfg.method {
        Method::Dopri5 => 5.0,
        Method::Dop853 => 8.0,
    };
    let mut steps = 0;
    while t < t_end {
        if steps >= cfg.max_steps {
            return Err(Error::StepFailure(t));
        }
        steps += 1;
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let step = match cfg.method {
            Method::Dopri5 => step5(provider, &y, &k0, h, cfg),
            Method::Dop853 => step8(provider, &y, &k0, h, cfg),
        };
        match step {
            Some((ynew, knew, err)) if err <= 1.0 => {
                t = if last { t_end } else { t + h };
                y = ynew;
                k0 = knew;
                traj.times.push(t);
                traj.states.push(PhaseState::from_array(&y));
                if !inside(provider, cfg.margin, &y) {
                    traj.exit = Some(DomainExit { time: t });
                    return Ok(traj);
                }
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-1.0 / order)).clamp(0.2, 5.0) };
                h *= fac;
            }
            Some((_, _, err)) => {
                traj.rejected_steps += 1;
                h *= (0.9 * err.powf(-1.0 / order)).clamp(0.1, 1.0);
            }
            None => {
                // a stage left the chart: shrink and retry
                traj.rejected_steps += 1;
                h *= 0.25;
            }
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepFailure(t));
        }
    }
    Ok(traj)
}

fn scale(y: &[f64; 10], ynew: &[f64; 10], i: usize, cfg: &IntegratorConfig) -> f64 {
    cfg.atol + cfg.rtol * y[i].abs().max(ynew[i].abs())
}

fn stage<const S: usize>(y: &[f64; 10], k: &[[f64; 10]; S], row: &[f64], h: f64) -> [f64; 10] {
    let mut ys = *y;
    for (j, a) in row.iter().enumerate() {
        if *a != 0.0 {
            for i in 0..10 {
                ys[i] += h * a * k[j][i];
            }
        }
    }
    ys
}

/// One step: new state, derivative there, scaled error norm. `None` if a
/// stage is outside the chart.
type Step = Option<([f64; 10], [f64; 10], f64)>;

fn step5(provider: &MetricProvider, y: &[f64; 10], k0: &[f64; 10], h: f64, cfg: &IntegratorConfig) -> Step {
    let mut k = [[0.0; 10]; 7];
    k[0] = *k0;
    let mut ynew = *y;
    for s in 1..7 {
        let ys = stage(y, &k, &A5[s][..s], h);
        k[s] = rhs(provider, &ys).ok()?;
        ynew = ys;
    }
    let mut acc = 0.0;
    for i in 0..10 {
        let e: f64 = (0..7).map(|s| E5[s] * k[s][i]).sum::<f64>() * h;
        acc += (e / scale(y, &ynew, i, cfg)).powi(2);
    }
    Some((ynew, k[6], (acc / 10.0).sqrt()))
}

fn step8(provider: &MetricProvider, y: &[f64; 10], k0: &[f64; 10], h: f64, cfg: &IntegratorConfig) -> Step {
    let mut k = [[0.0; 10]; 12];
    k[0] = *k0;
    for s in 1..12 {
        let ys = stage(y, &k, &A8[s][..s], h);
        k[s] = rhs(provider, &ys).ok()?;
    }
    let mut ynew = *y;
    let mut incr = [0.0; 10];
    for i in 0..10 {
        incr[i] = (0..12).map(|s| B8[s] * k[s][i]).sum();
        ynew[i] += h * incr[i];
    }
    let (mut err5, mut err3) = (0.0, 0.0);
    for i in 0..10 {
        let sk = scale(y, &ynew, i, cfg);
        let e3 = incr[i] - BHH8[0] * k[0][i] - BHH8[1] * k[8][i] - BHH8[2] * k[11][i];
        let e5: f64 = (0..12).map(|s| ER8[s] * k[s][i]).sum();
        err3 += (e3 / sk).powi(2);
        err5 += (e5 / sk).powi(2);
    }
    let deno = err5 + 0.01 * err3;
    let err = if deno > 0.0 { h.abs() * err5 / (10.0 * deno).sqrt() } else { 0.0 };
    let knew = rhs(provider, &ynew).ok()?;
    Some((ynew, knew, err))
}

/// Max over samples of `|Q(t) − Q(0)| / max(1, |Q(0)|)` for every invariant.
pub fn drift_report(system: &InvariantSystem, traj: &Trajectory) -> Result<Vec<(String, f64)>> {
    let rows = drift_series(system, traj)?;
    let labels = system.labels();
    let mut worst = vec![0.0f64; labels.len()];
    for (_, row) in &rows {
        for (w, v) in worst.iter_mut().zip(row) {
            *w = w.max(*v);
        }
    }
    Ok(labels.into_iter().zip(worst).collect())
}

/// Relative drift of every invariant at every recorded time.
pub fn drift_series(system: &InvariantSystem, traj: &Trajectory) -> Result<Vec<(f64, Vec<f64>)>> {
    let q0: Vec<f64> = system.conserved_set(&traj.states[0])?.entries().into_iter().map(|e| e.1).collect();
    traj.times
        .iter()
        .zip(&traj.states)
        .map(|(&t, s)| {
            let q = system.conserved_set(s)?.entries();
            Ok((t, q.iter().zip(&q0).map(|((_, v), v0)| (v - v0).abs() / v0.abs().max(1.0)).collect()))
        })
        .collect()
}
