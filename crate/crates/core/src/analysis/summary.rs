use std::collections::BTreeMap;

use serde::Serialize;

use super::classify::{classify_state, distance_to_uniform, symmetry_defect, StateLabel};
use super::stats::{beta_marginal_test, mean, pearson_correlation};
use crate::engine::TrajectoryRecord;
use crate::error::{Error, Result};
use crate::state::AgentType;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryThresholds {
    pub graph_eps: f64,
    pub fixation_tol: f64,
}

/// How many replicas ended with every agent hunting stag, every agent
/// hunting rabbit, or a mix. Replicas of the uniform games count in none.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Absorption {
    pub all_stag: usize,
    pub all_rabbit: usize,
    pub mixed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub replicas: usize,
    pub class_counts: BTreeMap<StateLabel, usize>,
    pub absorption: Absorption,
    pub statistics: BTreeMap<String, f64>,
}

impl EnsembleSummary {
    pub fn count(&self, label: StateLabel) -> usize {
        self.class_counts.get(&label).copied().unwrap_or(0)
    }

    pub fn fraction(&self, label: StateLabel) -> f64 {
        self.count(label) as f64 / self.replicas as f64
    }

    pub fn all_stag_fraction(&self) -> f64 {
        self.absorption.all_stag as f64 / self.replicas as f64
    }
}

/// Classifies each replica's final state and aggregates statistics.
pub fn summarize_ensemble(
    records: &[TrajectoryRecord],
    thresholds: SummaryThresholds,
) -> Result<EnsembleSummary> {
    let first = records.first().ok_or(Error::EmptySample)?;
    let n = first.final_probabilities.n();

    let mut class_counts: BTreeMap<StateLabel, usize> =
        StateLabel::ALL.iter().map(|&l| (l, 0)).collect();
    let mut absorption = Absorption::default();
    let mut distances = Vec::with_capacity(records.len());
    let mut defects = Vec::with_capacity(records.len());
    let mut p01 = Vec::with_capacity(records.len());
    let mut p10 = Vec::with_capacity(records.len());

    for r in records {
        let p = &r.final_probabilities;
        if p.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.n(),
            });
        }
        let class = classify_state(p, thresholds.graph_eps, thresholds.fixation_tol)?;
        *class_counts.entry(class.label()).or_default() += 1;
        match r.final_profile.coordinated() {
            Some(AgentType::Stag) => absorption.all_stag += 1,
            Some(AgentType::Rabbit) => absorption.all_rabbit += 1,
            Some(AgentType::Trivial) => {}
            None => absorption.mixed += 1,
        }
        distances.push(distance_to_uniform(p));
        defects.push(symmetry_defect(p));
        p01.push(p.get(0, 1));
        p10.push(p.get(1, 0));
    }

    let mut statistics = BTreeMap::new();
    statistics.insert("mean_distance_to_uniform".into(), mean(&distances));
    statistics.insert("mean_symmetry_defect".into(), mean(&defects));
    statistics.insert("mean_p01".into(), mean(&p01));
    if n >= 3 {
        // Dirichlet(1, ..., 1) marginal of a row with n - 1 free entries
        let ks = beta_marginal_test(&p01, 1.0, (n - 2) as f64)?;
        statistics.insert("ks_p01_dirichlet_marginal_d".into(), ks.statistic);
        statistics.insert("ks_p01_dirichlet_marginal_pvalue".into(), ks.p_value);
    }
    if records.len() >= 2 {
        let r = pearson_correlation(&p01, &p10)?;
        if r.is_finite() {
            statistics.insert("corr_p01_p10".into(), r);
        }
    }

    Ok(EnsembleSummary {
        replicas: records.len(),
        class_counts,
        absorption,
        statistics,
    })
}
