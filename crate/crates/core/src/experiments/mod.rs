//! Synthetic benchmark: planted tuples, noise, invariant error metrics and a
//! seeded trial runner.

pub mod generator;
pub mod metrics;
pub mod runner;

pub use generator::{add_noise, make_ground_truth, planted_singular_values, GroundTruth};
pub use metrics::{match_and_score, matching_cost, min_cost_assignment, s_error, Scores};
pub use runner::{
    run_trial, run_trials, summarize, sweep, trial_rng, write_csv, Algorithm, BatchSummary,
    ExperimentRecord, Reach, ThresholdSummary, TrialBatch, TrialConfig, DEFAULT_THRESHOLDS,
};
