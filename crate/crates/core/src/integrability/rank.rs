//! Functional independence of first integrals from the rank of their
//! phase-space Jacobian.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrability::{InvariantSystem, PhaseState};

/// Singular values below this fraction of the largest count as zero.
pub const RANK_CUTOFF: f64 = 1e-8;

/// Momenta smaller than this are treated as zero when checking genericity.
pub const MOMENTUM_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankReport {
    pub rank: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
}

fn numerical_rank(sv: &[f64], cutoff: f64) -> usize {
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > cutoff * top).count()
}

/// Rank of the Jacobian `∂(Q₁..Q_m)/∂(x, p)` for the invariants named in
/// `subset` (labels from [`InvariantSystem::labels`], repeats allowed).
///
/// Fails with `DegenerateState` if a momentum component vanishes or if the
/// rank changes when the cutoff is raised tenfold.
pub fn independence_rank(system: &InvariantSystem, state: &PhaseState, subset: &[&str]) -> Result<RankReport> {
    if let Some(i) = state.momenta.iter().position(|p| p.abs() < MOMENTUM_FLOOR) {
        return Err(Error::DegenerateState(format!("momentum component {i} vanishes")));
    }
    let grads = system.gradients(state)?;
    let rows: Vec<&[f64; 10]> = subset
        .iter()
        .map(|name| {
            grads
                .iter()
                .find(|g| g.label == *name)
                .map(|g| &g.gradient)
                .ok_or_else(|| Error::UnknownInvariant(name.to_string()))
        })
        .collect::<Result<_>>()?;
    let jac = DMatrix::from_fn(rows.len(), 10, |i, j| rows[i][j]);
    let mut sv: Vec<f64> = jac.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let rank = numerical_rank(&sv, RANK_CUTOFF);
    let coarse = numerical_rank(&sv, 10.0 * RANK_CUTOFF);
    if rank != coarse {
        return Err(Error::DegenerateState(format!("rank {rank} at cutoff {RANK_CUTOFF:e} but {coarse} at ten times it")));
    }
    Ok(RankReport { rank, singular_values: sv })
}
