//! The `rank` summary: functional independence of the first integrals.

use std::collections::BTreeMap;

use serde::Serialize;

use ypq_core::geometry::MetricProvider;
use ypq_core::integrability::{independence_rank, InvariantSystem, PhaseState, RankReport, CLASSICAL};
use ypq_core::par::{self, Execution};

use crate::config::{ParamsEcho, RunConfig};

#[derive(Debug, Clone, Serialize)]
pub struct SubsetRank {
    pub rank: Option<usize>,
    /// Descending; empty when the state is degenerate.
    pub singular_values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SubsetRank {
    fn from(r: ypq_core::Result<RankReport>) -> Self {
        match r {
            Ok(r) => Self { rank: Some(r.rank), singular_values: r.singular_values, error: None },
            Err(e) => Self { rank: None, singular_values: Vec::new(), error: Some(e.to_string()) },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StateRank {
    pub index: usize,
    pub state: [f64; 10],
    pub classical: SubsetRank,
    pub full: SubsetRank,
}

/// Whether adding one quadratic invariant to the classical set raises the
/// modal rank.
#[derive(Debug, Clone, Serialize)]
pub struct QuadraticContribution {
    pub label: String,
    pub modal_rank_with_classical: Option<usize>,
    pub adds_rank: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RankSummary {
    pub params: ParamsEcho,
    pub classical_labels: Vec<String>,
    pub full_labels: Vec<String>,
    pub classical_modal_rank: Option<usize>,
    pub full_modal_rank: Option<usize>,
    /// Classical rank is 5 at every non-degenerate state.
    pub classical_rank_is_five: bool,
    /// Full modal rank exceeds the classical one.
    pub superintegrable: bool,
    pub degenerate_states: Vec<usize>,
    pub quadratic_contributions: Vec<QuadraticContribution>,
    pub states: Vec<StateRank>,
    pub passed: bool,
}

/// Most frequent rank, ties to the lower value; `None` if no state has one.
fn modal(ranks: impl Iterator<Item = Option<usize>>) -> Option<usize> {
    let mut counts = BTreeMap::new();
    for r in ranks.flatten() {
        *counts.entry(r).or_insert(0usize) += 1;
    }
    counts.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))).map(|(r, _)| *r)
}

pub fn run_rank(cfg: &RunConfig, exec: Execution) -> Result<RankSummary, String> {
    let mut provider = MetricProvider::ypq(cfg.params).map_err(|e| e.to_string())?;
    provider.domain = provider.domain.with_margin(cfg.margin);
    let system = InvariantSystem::new(provider).map_err(|e| e.to_string())?;
    let states: Vec<PhaseState> = match cfg.state {
        Some(s) => {
            system.flow.domain.check(&s.point).map_err(|e| e.to_string())?;
            vec![s]
        }
        None => system.sample_states(cfg.seed, cfg.points).map_err(|e| e.to_string())?,
    };
    let full_labels = system.labels();
    let full: Vec<&str> = full_labels.iter().map(|s| s.as_str()).collect();
    let quadratics: Vec<&str> = full.iter().copied().filter(|l| !CLASSICAL.contains(l)).collect();

    let indexed: Vec<(usize, PhaseState)> = states.into_iter().enumerate().collect();
    let per_state = par::map(exec, &indexed, |(i, s)| {
        let row = StateRank {
            index: *i,
            state: s.as_array(),
            classical: SubsetRank::from(independence_rank(&system, s, &CLASSICAL)),
            full: SubsetRank::from(independence_rank(&system, s, &full)),
        };
        let extra: Vec<Option<usize>> = quadratics
            .iter()
            .map(|q| {
                let mut subset = CLASSICAL.to_vec();
                subset.push(q);
                independence_rank(&system, s, &subset).ok().map(|r| r.rank)
            })
            .collect();
        (row, extra)
    });

    let degenerate_states: Vec<usize> = per_state
        .iter()
        .filter(|(r, _)| r.classical.rank.is_none() || r.full.rank.is_none())
        .map(|(r, _)| r.index)
        .collect();
    let usable = || per_state.iter().filter(|(r, _)| !degenerate_states.contains(&r.index));
    let classical_modal_rank = modal(usable().map(|(r, _)| r.classical.rank));
    let full_modal_rank = modal(usable().map(|(r, _)| r.full.rank));
    let classical_rank_is_five = usable().count() > 0 && usable().all(|(r, _)| r.classical.rank == Some(5));
    let superintegrable = matches!((classical_modal_rank, full_modal_rank), (Some(c), Some(f)) if f > c);
    let quadratic_contributions = quadratics
        .iter()
        .enumerate()
        .map(|(k, q)| {
            let with = modal(usable().map(|(_, extra)| extra[k]));
            QuadraticContribution {
                label: q.to_string(),
                modal_rank_with_classical: with,
                adds_rank: matches!((with, classical_modal_rank), (Some(w), Some(c)) if w > c),
            }
        })
        .collect();
    let passed = classical_rank_is_five && full_modal_rank.is_some_and(|r| r >= 6);
    Ok(RankSummary {
        params: cfg.echo(),
        classical_labels: CLASSICAL.iter().map(|s| s.to_string()).collect(),
        full_labels,
        classical_modal_rank,
        full_modal_rank,
        classical_rank_is_five,
        superintegrable,
        degenerate_states,
        quadratic_contributions,
        states: per_state.into_iter().map(|(r, _)| r).collect(),
        passed,
    })
}
