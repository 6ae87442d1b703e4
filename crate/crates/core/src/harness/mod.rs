//! Scenario configuration, Monte-Carlo runner, figure presets, oracle
//! validation and CSV/gnuplot output.

pub mod output;
pub mod presets;
pub mod runner;
pub mod scenario;
pub mod validate;

pub use output::{emit_outputs, Table, GIT_REVISION};
pub use presets::{figure, run_table, FIGURES};
pub use runner::{
    monte_carlo, pair_setups, run_point, run_trial, solve_pair, Execution, PairOutcome, PairSetup, SweepPoint, TrialMetrics,
    WORKERS_ENV,
};
pub use scenario::Scenario;
