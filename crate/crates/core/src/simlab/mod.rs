//! Seeded Monte Carlo experiments: scenario generation, per-step error
//! decomposition, bound coverage, the greedy versus exhaustive comparison
//! and the post-selection F pivot.

mod config;
mod experiment;
mod generate;
mod persist;
mod pivot;

pub use config::{Algorithm, BetaPattern, DesignKind, PenaltyRule, ScenarioConfig};
pub use experiment::{
    run_experiment, run_experiment_with, BoundEntry, BoundsReport, CoverageCheck, EventFrequencies,
    ExhaustiveComparison, Experiment, ExperimentSummary, Frequency, RunInfo, RunOptions,
    TrialCategory, TrialRecord, LEDGER_MAX_P,
};
pub use generate::{generate_trial, Trial};
pub use persist::{persist, read_summary, read_trials, BOUNDS_FILE, SUMMARY_FILE, TRIALS_FILE};
pub use pivot::{dkw_epsilon, f_statistic, ks_distance_f, pivot_df, PivotSummary};

/// The splitmix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `splitmix64(master ⊕ splitmix64(index))`.
pub fn replicate_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

/// Seed of the stream that draws a fixed design.
pub fn design_seed(master: u64) -> u64 {
    replicate_seed(master, u64::MAX)
}
