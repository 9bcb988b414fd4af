//! Turning trajectories into verdicts: interaction graphs, limit-state
//! classification, distances, goodness-of-fit tests, covariance ranks and
//! ensemble summaries.

pub mod classify;
pub mod graph;
pub mod markov;
pub mod stats;
pub mod summary;

pub use classify::{
    classify_state, distance_to_uniform, friends2_traps, max_entry_distance, symmetry_defect,
    trap_proximity, Star, StateClass, StateLabel, DEFAULT_FIXATION_TOL,
};
pub use graph::{extract_graph, InteractionGraph};
pub use stats::{
    beta_marginal_test, covariance_eigenvalues, covariance_rank, ks_test, ks_uniformity_test,
    median, pearson_correlation, scaled_deviation, KsResult,
};
pub use summary::{summarize_ensemble, Absorption, EnsembleSummary, SummaryThresholds};

/// Default relative eigenvalue cutoff for [`covariance_rank`].
pub const DEFAULT_RANK_TOL: f64 = 0.05;
