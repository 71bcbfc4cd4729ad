//! Run configuration, budgets and run records shared by all algorithms.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::ConfidenceParams;
use crate::model::{PrecedenceGraph, Shop, Solution};

/// Search budget: a wall-clock deadline and an optional limit on work units.
///
/// A work unit is one node expansion, one simulation or one tabu move. Runs
/// limited by work only are reproducible regardless of machine speed.
#[derive(Debug, Clone)]
pub struct Budget {
    start: Instant,
    deadline: Option<Instant>,
    work_limit: Option<u64>,
    work: u64,
}

impl Budget {
    pub fn new(time_limit: Option<Duration>, work_limit: Option<u64>) -> Self {
        let start = Instant::now();
        Budget {
            start,
            deadline: time_limit.map(|t| start + t),
            work_limit,
            work: 0,
        }
    }

    pub fn unlimited() -> Self {
        Budget::new(None, None)
    }

    pub fn from_config(cfg: &RunConfig) -> Self {
        Budget::new(cfg.time_limit.map(Duration::from_secs_f64), cfg.work_limit)
    }

    pub fn charge(&mut self, units: u64) {
        self.work += units;
    }

    pub fn exhausted(&self) -> bool {
        if let Some(limit) = self.work_limit {
            if self.work >= limit {
                return true;
            }
        }
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    pub fn work(&self) -> u64 {
        self.work
    }

    pub fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }

    pub fn remaining_time(&self) -> Option<Duration> {
        self.deadline.map(|d| d.saturating_duration_since(Instant::now()))
    }

    pub fn remaining_work(&self) -> Option<u64> {
        self.work_limit.map(|l| l.saturating_sub(self.work))
    }

    /// A child budget clipped to what remains of this one.
    pub fn sub(&self, time: Option<Duration>, work: Option<u64>) -> Budget {
        let now = Instant::now();
        let own = time.map(|t| now + t);
        let deadline = match (self.deadline, own) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let work_limit = match (self.remaining_work(), work) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Budget {
            start: now,
            deadline,
            work_limit,
            work: 0,
        }
    }

    /// A child budget holding `fraction` of the remaining time and work.
    pub fn fraction(&self, fraction: f64) -> Budget {
        let time = self.remaining_time().map(|t| t.mul_f64(fraction));
        let work = self.remaining_work().map(|w| (w as f64 * fraction).floor() as u64);
        self.sub(time, work)
    }

    /// Adds the work spent in a child budget.
    pub fn absorb(&mut self, child: &Budget) {
        self.work += child.work;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    BnbN,
    BnbDqL,
    BnbTbs,
    BnbIBs,
    TabuTbs,
    TabuIBs,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::BnbN,
        Algorithm::BnbDqL,
        Algorithm::BnbTbs,
        Algorithm::BnbIBs,
        Algorithm::TabuTbs,
        Algorithm::TabuIBs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::BnbN => "bnb-n",
            Algorithm::BnbDqL => "bnb-dq-l",
            Algorithm::BnbTbs => "bnb-tbs",
            Algorithm::BnbIBs => "bnb-i-bs",
            Algorithm::TabuTbs => "tabu-tbs",
            Algorithm::TabuIBs => "tabu-i-bs",
        }
    }

    /// Whether the algorithm filters by a fixed deterministic q.
    pub fn uses_q(self) -> bool {
        !matches!(self, Algorithm::BnbN | Algorithm::BnbDqL)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == key)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TabuParams {
    /// Tabu list length.
    pub tenure: usize,
    /// Elite pool capacity.
    pub elite: usize,
    /// Non-improving moves before a restart; `None` means `20 · |A|`.
    pub stagnation: Option<usize>,
}

impl Default for TabuParams {
    fn default() -> Self {
        TabuParams {
            tenure: 10,
            elite: 8,
            stagnation: None,
        }
    }
}

impl TabuParams {
    pub fn stagnation_limit(&self, n_activities: usize) -> usize {
        self.stagnation.unwrap_or(20 * n_activities).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub params: ConfidenceParams,
    /// Seconds; `None` runs until the search completes.
    pub time_limit: Option<f64>,
    pub work_limit: Option<u64>,
    pub seed: u64,
    /// Deterministic q for the filtering algorithms; also the q at which the
    /// recorded deterministic makespan is measured.
    pub q: f64,
    pub q_init: f64,
    pub q_dec: f64,
    /// Seconds of phase 1 in the timed better-solution variants; `None`
    /// means a tenth of the budget.
    pub t_initial: Option<f64>,
    pub dedupe_sims: bool,
    pub tabu: TabuParams,
}

impl RunConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        RunConfig {
            algorithm,
            params: ConfidenceParams::default(),
            time_limit: None,
            work_limit: None,
            seed: 0,
            q: 0.0,
            q_init: 1.25,
            q_dec: 0.05,
            t_initial: None,
            dedupe_sims: false,
            tabu: TabuParams::default(),
        }
    }

    pub fn with_params(mut self, params: ConfidenceParams) -> Self {
        self.params = params;
        self
    }

    pub fn with_time_limit(mut self, seconds: f64) -> Self {
        self.time_limit = Some(seconds);
        self
    }

    pub fn with_work_limit(mut self, units: u64) -> Self {
        self.work_limit = Some(units);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = q;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if let Some(t) = self.time_limit {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("time limit must be positive, got {t}"));
            }
        }
        if self.work_limit == Some(0) {
            return bad("work limit must be positive".into());
        }
        if !(self.q >= 0.0 && self.q.is_finite()) {
            return bad(format!("q must be >= 0, got {}", self.q));
        }
        if self.algorithm == Algorithm::BnbDqL {
            if !(self.q_dec > 0.0 && self.q_dec.is_finite()) {
                return bad(format!("q_dec must be > 0, got {}", self.q_dec));
            }
            if !(self.q_init >= 0.0 && self.q_init.is_finite()) {
                return bad(format!("q_init must be >= 0, got {}", self.q_init));
            }
        }
        if let Some(t) = self.t_initial {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("t_initial must be positive, got {t}"));
            }
        }
        if self.tabu.tenure == 0 || self.tabu.elite == 0 {
            return bad("tabu tenure and elite size must be positive".into());
        }
        Ok(())
    }

    /// Share of the budget given to phase 1 of the timed better-solution variants.
    pub(crate) fn initial_fraction(&self) -> f64 {
        match (self.t_initial, self.time_limit) {
            (Some(t), Some(limit)) => (t / limit).clamp(0.0, 1.0),
            _ => 0.1,
        }
    }

    /// Share of the budget for phase 1 of the iterated variants: all but one
    /// second, or half the budget when it is two seconds or less.
    pub(crate) fn optimize_fraction(&self) -> f64 {
        match self.time_limit {
            Some(limit) if limit > 2.0 => (limit - 1.0) / limit,
            _ => 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub seconds: f64,
    pub work: u64,
    pub det_makespan: f64,
    pub d_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: Algorithm,
    pub best: Option<Solution>,
    /// `D*`, the best upper estimate found (the last one in the trace).
    pub d_best: f64,
    /// Upper estimate of the first simulated solution.
    pub d_first: f64,
    /// Lowest deterministic makespan, at the configured q, among solutions
    /// the run produced.
    pub det_makespan: f64,
    pub trace: Vec<TracePoint>,
    pub nodes: u64,
    pub simulations: u64,
    pub moves: u64,
    /// Lowest q whose tree search was started (descending-q search only).
    pub lowest_q: Option<f64>,
    /// Completed filtering iterations, or completed q levels.
    pub iterations: u64,
    /// The search space was exhausted before the budget ran out.
    pub completed: bool,
    pub wall_seconds: f64,
    pub work: u64,
}

impl RunRecord {
    pub fn found(&self) -> bool {
        self.best.is_some()
    }
}

/// Bookkeeping of the incumbent and the improvement trace.
pub(crate) struct Tracker<'a> {
    shop: &'a Shop,
    report_durations: Vec<f64>,
    record: RunRecord,
    scratch: Vec<f64>,
}

impl<'a> Tracker<'a> {
    pub fn new(algorithm: Algorithm, shop: &'a Shop, report_durations: Vec<f64>) -> Self {
        Tracker {
            shop,
            report_durations,
            record: RunRecord {
                algorithm,
                best: None,
                d_best: f64::INFINITY,
                d_first: f64::INFINITY,
                det_makespan: f64::INFINITY,
                trace: Vec::new(),
                nodes: 0,
                simulations: 0,
                moves: 0,
                lowest_q: None,
                iterations: 0,
                completed: false,
                wall_seconds: 0.0,
                work: 0,
            },
            scratch: Vec::new(),
        }
    }

    pub fn d_best(&self) -> f64 {
        self.record.d_best
    }

    pub fn record_mut(&mut self) -> &mut RunRecord {
        &mut self.record
    }

    /// Deterministic makespan at the report q; lowers the recorded minimum.
    pub fn note_solution(&mut self, sol: &Solution) -> Result<f64> {
        let graph = PrecedenceGraph::from_solution(self.shop, sol)?;
        let make = graph.makespan_with(&self.report_durations, &mut self.scratch);
        if make < self.record.det_makespan {
            self.record.det_makespan = make;
        }
        Ok(make)
    }

    /// Registers a simulated solution; returns whether it became the incumbent.
    pub fn offer(&mut self, sol: &Solution, d: f64, budget: &Budget) -> Result<bool> {
        let make = self.note_solution(sol)?;
        if self.record.d_first.is_infinite() && self.record.trace.is_empty() {
            self.record.d_first = d;
        }
        let improved = d < self.record.d_best || self.record.best.is_none();
        if improved {
            self.record.best = Some(sol.clone());
            self.record.d_best = d;
            self.record.trace.push(TracePoint {
                seconds: budget.elapsed().as_secs_f64(),
                work: budget.work(),
                det_makespan: make,
                d_upper: d,
            });
        }
        Ok(improved)
    }

    pub fn finish(mut self, budget: &Budget, simulations: u64) -> RunRecord {
        self.record.wall_seconds = budget.elapsed().as_secs_f64();
        self.record.work = budget.work();
        self.record.simulations = simulations;
        self.record
    }
}
