//! Monte Carlo evaluation of solutions and partial solutions.
//!
//! A simulation draws `N` duration vectors and records the longest-path
//! length of each. From the sorted sample we read the success fraction
//! `T(D)` (share of trials whose makespan exceeds `D`) for any threshold, the
//! K-implausibility tests on `T`, and the upper estimate `D(s)` of the
//! α-makespan: the smallest sampled makespan whose `T` passes the
//! "`p >= α` is K-implausible" test.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{PrecedenceGraph, ProbInstance, Solution};
use crate::stochastic::{derive_seed, sample_into, TrialSeed};

/// Slack on `T` comparisons so that exact count ratios are not lost to rounding.
const T_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceParams {
    alpha: f64,
    k: f64,
    n: usize,
}

impl ConfidenceParams {
    pub fn new(alpha: f64, k: f64, n: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 0.5) {
            return Err(Error::InvalidParameter(format!("alpha {alpha} outside (0, 0.5]")));
        }
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::InvalidParameter(format!("K {k} must be >= 0")));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("N must be >= 1".into()));
        }
        Ok(ConfidenceParams { alpha, k, n })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `(K / √N) · √(α(1 − α))`.
    pub fn margin(&self) -> f64 {
        self.k / (self.n as f64).sqrt() * (self.alpha * (1.0 - self.alpha)).sqrt()
    }

    /// Largest `T` for which `p >= α` is K-implausible.
    pub fn geq_threshold(&self) -> f64 {
        self.alpha - self.margin()
    }

    /// Smallest `T` for which `p <= α` is K-implausible.
    pub fn leq_threshold(&self) -> f64 {
        self.alpha + self.margin()
    }
}

impl Default for ConfidenceParams {
    fn default() -> Self {
        ConfidenceParams {
            alpha: 0.05,
            k: 2.0,
            n: 1000,
        }
    }
}

/// Whether "`p >= α`" is K-implausible given `T`.
pub fn k_implausible_geq(t: f64, params: &ConfidenceParams) -> bool {
    t <= params.geq_threshold() + T_EPS
}

/// Whether "`p <= α`" is K-implausible given `T`.
pub fn k_implausible_leq(t: f64, params: &ConfidenceParams) -> bool {
    t >= params.leq_threshold() - T_EPS
}

/// Sorted sample of simulated makespans.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    sorted: Vec<f64>,
    params: ConfidenceParams,
    d_upper: f64,
}

impl SimReport {
    pub fn from_samples(mut samples: Vec<f64>, params: ConfidenceParams) -> Self {
        samples.sort_by(f64::total_cmp);
        let d_upper = upper_from_sorted(&samples, &params);
        SimReport {
            sorted: samples,
            params,
            d_upper,
        }
    }

    pub fn n(&self) -> usize {
        self.sorted.len()
    }

    pub fn sampled_makespans(&self) -> &[f64] {
        &self.sorted
    }

    pub fn params(&self) -> &ConfidenceParams {
        &self.params
    }

    /// Share of trials whose makespan is greater than `d`.
    pub fn t_at(&self, d: f64) -> f64 {
        if self.sorted.is_empty() {
            return 0.0;
        }
        let at_most = self.sorted.partition_point(|&m| m <= d);
        (self.sorted.len() - at_most) as f64 / self.sorted.len() as f64
    }

    /// Upper estimate `D(s)`; infinite when no sampled threshold passes.
    pub fn d_upper(&self) -> f64 {
        self.d_upper
    }

    /// Upper estimate recomputed for other confidence settings on the same sample.
    pub fn d_upper_with(&self, params: &ConfidenceParams) -> f64 {
        upper_from_sorted(&self.sorted, params)
    }
}

fn upper_from_sorted(sorted: &[f64], params: &ConfidenceParams) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return f64::INFINITY;
    }
    // Largest admissible count of trials above the threshold.
    let allowed = (params.geq_threshold() * n as f64 + T_EPS * n as f64).floor();
    if allowed < 0.0 {
        return f64::INFINITY;
    }
    let allowed = (allowed as usize).min(n - 1);
    sorted[n - 1 - allowed]
}

/// Simulated longest-path lengths of `graph` over `n` trials.
pub fn simulate_makespans(graph: &PrecedenceGraph, inst: &ProbInstance, n: usize, base_seed: u64) -> Vec<f64> {
    let mut durations = Vec::with_capacity(inst.dists.len());
    let mut scratch = Vec::with_capacity(graph.len());
    (0..n as u64)
        .map(|trial| {
            sample_into(inst, TrialSeed::new(base_seed, trial), &mut durations);
            graph.makespan_with(&durations, &mut scratch)
        })
        .collect()
}

pub fn simulate(graph: &PrecedenceGraph, inst: &ProbInstance, params: &ConfidenceParams, base_seed: u64) -> SimReport {
    SimReport::from_samples(simulate_makespans(graph, inst, params.n(), base_seed), *params)
}

/// Monte Carlo estimate of `Pr(make > d)` for a (partial) solution's graph.
pub fn estimate_t(
    graph: &PrecedenceGraph,
    inst: &ProbInstance,
    d: f64,
    params: &ConfidenceParams,
    base_seed: u64,
) -> f64 {
    let mut durations = Vec::with_capacity(inst.dists.len());
    let mut scratch = Vec::with_capacity(graph.len());
    let successes = (0..params.n() as u64)
        .filter(|&trial| {
            sample_into(inst, TrialSeed::new(base_seed, trial), &mut durations);
            graph.makespan_with(&durations, &mut scratch) > d
        })
        .count();
    successes as f64 / params.n() as f64
}

/// Upper estimate `D(s)` of the α-makespan of a full solution.
pub fn upper_estimate_d(
    sol: &Solution,
    inst: &ProbInstance,
    params: &ConfidenceParams,
    base_seed: u64,
) -> Result<(f64, SimReport)> {
    let graph = sol.graph(&inst.shop)?;
    let report = simulate(&graph, inst, params, base_seed);
    Ok((report.d_upper(), report))
}

/// Simulation service for one search run: hands out a fresh seed per
/// simulation and counts them.
///
/// With `dedupe` on, the first upper estimate of each distinct solution is
/// memoized and returned for every later request.
#[derive(Debug, Clone)]
pub struct Simulator<'a> {
    inst: &'a ProbInstance,
    params: ConfidenceParams,
    base_seed: u64,
    simulations: u64,
    memo: Option<HashMap<Solution, f64>>,
    common: bool,
}

impl<'a> Simulator<'a> {
    pub fn new(inst: &'a ProbInstance, params: ConfidenceParams, base_seed: u64, dedupe: bool) -> Self {
        Simulator {
            inst,
            params,
            base_seed,
            simulations: 0,
            memo: dedupe.then(HashMap::new),
            common: false,
        }
    }

    /// Every simulation reuses the same trial streams.
    pub fn with_common_random_numbers(mut self) -> Self {
        self.common = true;
        self
    }

    pub fn params(&self) -> &ConfidenceParams {
        &self.params
    }

    pub fn instance(&self) -> &'a ProbInstance {
        self.inst
    }

    /// Simulations actually run (memo hits excluded).
    pub fn simulations(&self) -> u64 {
        self.simulations
    }

    fn next_seed(&mut self) -> u64 {
        let seed = if self.common {
            self.base_seed
        } else {
            derive_seed(self.base_seed, self.simulations)
        };
        self.simulations += 1;
        seed
    }

    pub fn upper_estimate(&mut self, sol: &Solution) -> Result<f64> {
        if let Some(&d) = self.memo.as_ref().and_then(|m| m.get(sol)) {
            return Ok(d);
        }
        let seed = self.next_seed();
        let (d, _) = upper_estimate_d(sol, self.inst, &self.params, seed)?;
        if let Some(memo) = self.memo.as_mut() {
            memo.insert(sol.clone(), d);
        }
        Ok(d)
    }

    pub fn estimate_t(&mut self, graph: &PrecedenceGraph, d: f64) -> f64 {
        let seed = self.next_seed();
        estimate_t(graph, self.inst, d, &self.params, seed)
    }
}
