//! Job-shop scheduling with probabilistic durations.
//!
//! Solutions are ranked by their α-makespan: the smallest `D` such that the
//! probability of the schedule taking longer than `D` is at most `α`.
//! Makespan probabilities are estimated by Monte Carlo and compared through
//! K-implausibility tests.

pub mod analytics;
pub mod error;
pub mod evaluator;
pub mod fixtures;
pub mod generate;
pub mod model;
pub mod qbounds;
pub mod run;
pub mod search;
pub mod stochastic;
pub mod tabu;

pub use analytics::ResultRow;
pub use error::{Error, Result};
pub use evaluator::{ConfidenceParams, SimReport, Simulator};
pub use generate::{GenSpec, Generated};
pub use model::{
    makespan, sched, sol_of, Activity, DetInstance, PartialSolution, PrecedenceGraph, ProbInstance, Schedule, Shop,
    Solution, ValueMode,
};
pub use qbounds::{associated_det, q_table, QChoice, QLevel, QTable};
pub use run::{Algorithm, Budget, RunConfig, RunRecord, TabuParams, TracePoint};
pub use stochastic::{DurationDist, TrialSeed};

/// Runs the algorithm named in `cfg`.
pub fn solve(inst: &ProbInstance, cfg: &RunConfig) -> Result<RunRecord> {
    match cfg.algorithm {
        Algorithm::BnbN => search::bnb_n(inst, cfg),
        Algorithm::BnbDqL => search::bnb_dq_l(inst, cfg),
        Algorithm::BnbTbs => search::bnb_tbs(inst, cfg),
        Algorithm::BnbIBs => search::bnb_i_bs(inst, cfg),
        Algorithm::TabuTbs => tabu::tabu_tbs(inst, cfg),
        Algorithm::TabuIBs => tabu::tabu_i_bs(inst, cfg),
    }
}
