//! Instances, solutions and schedules, and makespan evaluation by longest path.
//!
//! A [`Shop`] holds the structure shared by deterministic and probabilistic
//! instances: activities partitioned into jobs (each a total order) and into
//! resource sets. A [`Solution`] fixes one total order per resource set; its
//! makespan is the length of the longest path through the precedence DAG
//! formed by job edges plus resource-adjacent edges.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stochastic::DurationDist;

/// Absolute slack used when comparing time points computed in floating point.
pub const TIME_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Activity {
    pub id: usize,
    pub job: usize,
    pub pos_in_job: usize,
    pub machine: usize,
}

/// Whether every duration of an instance is a positive integer or a positive real.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ValueMode {
    #[default]
    Integer,
    Real,
}

impl ValueMode {
    /// Largest makespan still strictly below `x`.
    pub fn strictly_below(self, x: f64) -> f64 {
        if x.is_infinite() {
            return x;
        }
        match self {
            ValueMode::Integer => x - 0.5,
            ValueMode::Real => x - TIME_EPS * x.abs().max(1.0),
        }
    }

    /// Cap admitting every makespan `<= x` despite rounding noise.
    pub fn at_most(self, x: f64) -> f64 {
        if x.is_infinite() {
            return x;
        }
        x + TIME_EPS * x.abs().max(1.0)
    }

    /// Cap for the filtering searches, which simulate solutions whose
    /// deterministic makespan is below `base + 1`. In real mode the unit slack
    /// has no meaning and the cap admits makespans `<= base`.
    pub fn filter_cap(self, base: f64) -> f64 {
        match self {
            ValueMode::Integer => self.strictly_below(base + 1.0),
            ValueMode::Real => self.at_most(base),
        }
    }
}

/// Job and resource structure of an instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shop {
    activities: Vec<Activity>,
    jobs: Vec<Vec<usize>>,
    resources: Vec<Vec<usize>>,
}

impl Shop {
    /// Builds a shop from per-job machine routings. Activity ids are assigned
    /// job by job, in job order.
    pub fn from_routings(routings: &[Vec<usize>], n_machines: usize) -> Result<Self> {
        let mut activities = Vec::new();
        let mut jobs = Vec::with_capacity(routings.len());
        let mut resources = vec![Vec::new(); n_machines];
        for (job, route) in routings.iter().enumerate() {
            let mut ids = Vec::with_capacity(route.len());
            for (pos_in_job, &machine) in route.iter().enumerate() {
                if machine >= n_machines {
                    return Err(Error::InvalidInstance(format!(
                        "job {job} uses machine {machine} but only {n_machines} machines exist"
                    )));
                }
                let id = activities.len();
                activities.push(Activity {
                    id,
                    job,
                    pos_in_job,
                    machine,
                });
                resources[machine].push(id);
                ids.push(id);
            }
            jobs.push(ids);
        }
        Ok(Shop {
            activities,
            jobs,
            resources,
        })
    }

    pub fn len(&self) -> usize {
        self.activities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.activities.is_empty()
    }

    pub fn activities(&self) -> &[Activity] {
        &self.activities
    }

    pub fn activity(&self, id: usize) -> &Activity {
        &self.activities[id]
    }

    pub fn jobs(&self) -> &[Vec<usize>] {
        &self.jobs
    }

    pub fn resources(&self) -> &[Vec<usize>] {
        &self.resources
    }

    pub fn n_jobs(&self) -> usize {
        self.jobs.len()
    }

    pub fn n_machines(&self) -> usize {
        self.resources.len()
    }

    pub fn job_pred(&self, id: usize) -> Option<usize> {
        let a = &self.activities[id];
        (a.pos_in_job > 0).then(|| self.jobs[a.job][a.pos_in_job - 1])
    }

    pub fn job_succ(&self, id: usize) -> Option<usize> {
        let a = &self.activities[id];
        self.jobs[a.job].get(a.pos_in_job + 1).copied()
    }

    /// Job-order edges between consecutive activities.
    pub fn job_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.jobs.iter().flat_map(|job| job.windows(2).map(|w| (w[0], w[1])))
    }

    /// Machine routing of each job, the inverse of [`Shop::from_routings`].
    pub fn routings(&self) -> Vec<Vec<usize>> {
        self.jobs
            .iter()
            .map(|job| job.iter().map(|&id| self.activities[id].machine).collect())
            .collect()
    }

    /// Largest number of activities in any job.
    pub fn max_job_len(&self) -> usize {
        self.jobs.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Deterministic instance: structure plus one positive duration per activity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetInstance {
    pub shop: Shop,
    pub durations: Vec<f64>,
    pub mode: ValueMode,
}

impl DetInstance {
    pub fn new(shop: Shop, durations: Vec<f64>, mode: ValueMode) -> Result<Self> {
        if durations.len() != shop.len() {
            return Err(Error::InvalidInstance(format!(
                "{} durations for {} activities",
                durations.len(),
                shop.len()
            )));
        }
        for (i, &d) in durations.iter().enumerate() {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::InvalidInstance(format!(
                    "activity {i} has non-positive duration {d}"
                )));
            }
            if mode == ValueMode::Integer && d.fract() != 0.0 {
                return Err(Error::InvalidInstance(format!(
                    "activity {i} has non-integral duration {d} in integer mode"
                )));
            }
        }
        Ok(DetInstance { shop, durations, mode })
    }

    pub fn total_duration(&self) -> f64 {
        self.durations.iter().sum()
    }
}

/// Probabilistic instance with independent per-activity duration distributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbInstance {
    pub shop: Shop,
    pub dists: Vec<DurationDist>,
    pub mode: ValueMode,
}

impl ProbInstance {
    pub fn new(shop: Shop, dists: Vec<DurationDist>, mode: ValueMode) -> Result<Self> {
        if dists.len() != shop.len() {
            return Err(Error::InvalidInstance(format!(
                "{} distributions for {} activities",
                dists.len(),
                shop.len()
            )));
        }
        for (i, dist) in dists.iter().enumerate() {
            if !(dist.mu > 0.0 && dist.mu.is_finite()) {
                return Err(Error::InvalidInstance(format!(
                    "activity {i} has non-positive mean {}",
                    dist.mu
                )));
            }
            if !(dist.sigma >= 0.0 && dist.sigma.is_finite()) {
                return Err(Error::InvalidInstance(format!(
                    "activity {i} has invalid standard deviation {}",
                    dist.sigma
                )));
            }
        }
        Ok(ProbInstance { shop, dists, mode })
    }

    pub fn means(&self) -> Vec<f64> {
        self.dists.iter().map(|d| d.mu).collect()
    }

    pub fn sigmas(&self) -> Vec<f64> {
        self.dists.iter().map(|d| d.sigma).collect()
    }

    pub fn is_deterministic(&self) -> bool {
        self.dists.iter().all(|d| d.sigma == 0.0)
    }
}

/// One total order per resource set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Solution {
    sequences: Vec<Vec<usize>>,
}

impl Solution {
    /// Checks that each sequence permutes its resource set and that the
    /// resulting precedence relation is acyclic.
    pub fn new(shop: &Shop, sequences: Vec<Vec<usize>>) -> Result<Self> {
        let sol = Solution { sequences };
        sol.check_permutations(shop)?;
        PrecedenceGraph::from_solution(shop, &sol)?;
        Ok(sol)
    }

    /// Wraps sequences already known to form a valid solution.
    pub(crate) fn from_sequences_unchecked(sequences: Vec<Vec<usize>>) -> Self {
        Solution { sequences }
    }

    fn check_permutations(&self, shop: &Shop) -> Result<()> {
        if self.sequences.len() != shop.n_machines() {
            return Err(Error::InvalidSolution(format!(
                "{} sequences for {} resources",
                self.sequences.len(),
                shop.n_machines()
            )));
        }
        for (m, (seq, set)) in self.sequences.iter().zip(shop.resources()).enumerate() {
            let mut sorted = seq.clone();
            sorted.sort_unstable();
            if &sorted != set {
                return Err(Error::InvalidSolution(format!(
                    "sequence on resource {m} is not a permutation of its resource set"
                )));
            }
        }
        Ok(())
    }

    pub fn sequences(&self) -> &[Vec<usize>] {
        &self.sequences
    }

    pub fn sequence(&self, machine: usize) -> &[usize] {
        &self.sequences[machine]
    }

    /// Adjacent-pair resource edges.
    pub fn machine_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.sequences
            .iter()
            .flat_map(|seq| seq.windows(2).map(|w| (w[0], w[1])))
    }

    /// Swaps the activities at positions `pos` and `pos + 1` on `machine`.
    pub fn swapped(&self, machine: usize, pos: usize) -> Solution {
        let mut next = self.clone();
        next.sequences[machine].swap(pos, pos + 1);
        next
    }

    /// Precedence graph of this solution; fails if the relation is cyclic.
    pub fn graph(&self, shop: &Shop) -> Result<PrecedenceGraph> {
        PrecedenceGraph::from_solution(shop, self)
    }
}

/// A set of committed within-resource precedences `(before, after)`.
///
/// The relation it denotes is the transitive closure of these pairs together
/// with the job orders.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartialSolution {
    pairs: Vec<(usize, usize)>,
}

impl PartialSolution {
    pub fn new(shop: &Shop, pairs: Vec<(usize, usize)>) -> Result<Self> {
        for &(a, b) in &pairs {
            if a >= shop.len() || b >= shop.len() || a == b {
                return Err(Error::InvalidSolution(format!("bad pair ({a}, {b})")));
            }
            if shop.activity(a).machine != shop.activity(b).machine {
                return Err(Error::InvalidSolution(format!("pair ({a}, {b}) spans two resources")));
            }
        }
        let partial = PartialSolution { pairs };
        partial.graph(shop)?;
        Ok(partial)
    }

    pub fn empty() -> Self {
        PartialSolution::default()
    }

    pub fn from_solution(sol: &Solution) -> Self {
        PartialSolution {
            pairs: sol.machine_edges().collect(),
        }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn graph(&self, shop: &Shop) -> Result<PrecedenceGraph> {
        PrecedenceGraph::from_edges(shop, self.pairs.iter().copied())
    }

    /// True when every committed pair is implied by `sol`.
    pub fn is_extended_by(&self, shop: &Shop, sol: &Solution) -> bool {
        let Ok(graph) = sol.graph(shop) else {
            return false;
        };
        let reach = graph.reachability();
        self.pairs.iter().all(|&(a, b)| reach.contains(a, b))
    }
}

/// Precedence DAG over activities with a cached topological order.
#[derive(Debug, Clone)]
pub struct PrecedenceGraph {
    pred_start: Vec<usize>,
    preds: Vec<usize>,
    succ_start: Vec<usize>,
    succs: Vec<usize>,
    topo: Vec<usize>,
}

impl PrecedenceGraph {
    /// Job edges plus the given extra edges.
    pub fn from_edges(shop: &Shop, extra: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let edges: Vec<(usize, usize)> = shop.job_edges().chain(extra).collect();
        Self::build(shop.len(), &edges)
    }

    pub fn from_solution(shop: &Shop, sol: &Solution) -> Result<Self> {
        Self::from_edges(shop, sol.machine_edges())
    }

    /// Builds from an explicit edge list over `n` nodes.
    pub fn build(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut indeg = vec![0usize; n];
        let mut outdeg = vec![0usize; n];
        for &(a, b) in edges {
            outdeg[a] += 1;
            indeg[b] += 1;
        }
        let csr_starts = |deg: &[usize]| {
            let mut start = Vec::with_capacity(n + 1);
            start.push(0);
            for &d in deg {
                start.push(start.last().unwrap() + d);
            }
            start
        };
        let pred_start = csr_starts(&indeg);
        let succ_start = csr_starts(&outdeg);
        let mut preds = vec![0; edges.len()];
        let mut succs = vec![0; edges.len()];
        let mut pfill = pred_start.clone();
        let mut sfill = succ_start.clone();
        for &(a, b) in edges {
            preds[pfill[b]] = a;
            pfill[b] += 1;
            succs[sfill[a]] = b;
            sfill[a] += 1;
        }

        let mut topo = Vec::with_capacity(n);
        let mut remaining = indeg;
        let mut stack: Vec<usize> = (0..n).rev().filter(|&i| remaining[i] == 0).collect();
        while let Some(v) = stack.pop() {
            topo.push(v);
            for &s in &succs[succ_start[v]..succ_start[v + 1]] {
                remaining[s] -= 1;
                if remaining[s] == 0 {
                    stack.push(s);
                }
            }
        }
        if topo.len() != n {
            return Err(Error::Cyclic);
        }
        Ok(PrecedenceGraph {
            pred_start,
            preds,
            succ_start,
            succs,
            topo,
        })
    }

    pub fn len(&self) -> usize {
        self.topo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.topo.is_empty()
    }

    pub fn topo_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn preds(&self, v: usize) -> &[usize] {
        &self.preds[self.pred_start[v]..self.pred_start[v + 1]]
    }

    pub fn succs(&self, v: usize) -> &[usize] {
        &self.succs[self.succ_start[v]..self.succ_start[v + 1]]
    }

    /// Earliest start of every activity (written to `heads`); returns the makespan.
    pub fn heads_into(&self, durations: &[f64], heads: &mut [f64]) -> f64 {
        let mut makespan = 0.0f64;
        for &v in &self.topo {
            let start = self
                .preds(v)
                .iter()
                .map(|&p| heads[p] + durations[p])
                .fold(0.0, f64::max);
            heads[v] = start;
            makespan = makespan.max(start + durations[v]);
        }
        makespan
    }

    pub fn heads(&self, durations: &[f64]) -> (Vec<f64>, f64) {
        let mut heads = vec![0.0; self.len()];
        let make = self.heads_into(durations, &mut heads);
        (heads, make)
    }

    /// Longest path from the completion of each activity to the end (its own
    /// duration excluded).
    pub fn tails_into(&self, durations: &[f64], tails: &mut [f64]) {
        for &v in self.topo.iter().rev() {
            tails[v] = self
                .succs(v)
                .iter()
                .map(|&s| tails[s] + durations[s])
                .fold(0.0, f64::max);
        }
    }

    pub fn tails(&self, durations: &[f64]) -> Vec<f64> {
        let mut tails = vec![0.0; self.len()];
        self.tails_into(durations, &mut tails);
        tails
    }

    /// Length of the longest path; `scratch` is resized as needed.
    pub fn makespan_with(&self, durations: &[f64], scratch: &mut Vec<f64>) -> f64 {
        scratch.resize(self.len(), 0.0);
        self.heads_into(durations, scratch)
    }

    pub fn makespan(&self, durations: &[f64]) -> f64 {
        let mut scratch = Vec::new();
        self.makespan_with(durations, &mut scratch)
    }

    /// Transitive closure as one bitset per activity.
    pub fn reachability(&self) -> Reachability {
        let n = self.len();
        let words = n.div_ceil(64).max(1);
        let mut bits = vec![0u64; n * words];
        for &v in self.topo.iter().rev() {
            for &s in self.succs(v) {
                bits[v * words + s / 64] |= 1 << (s % 64);
                for w in 0..words {
                    let sw = bits[s * words + w];
                    bits[v * words + w] |= sw;
                }
            }
        }
        Reachability { words, bits }
    }
}

/// Transitive closure of a precedence graph.
#[derive(Debug, Clone)]
pub struct Reachability {
    words: usize,
    bits: Vec<u64>,
}

impl Reachability {
    /// Whether a directed path leads from `from` to `to`.
    pub fn contains(&self, from: usize, to: usize) -> bool {
        self.bits[from * self.words + to / 64] & (1 << (to % 64)) != 0
    }

    pub fn ordered(&self, a: usize, b: usize) -> bool {
        self.contains(a, b) || self.contains(b, a)
    }
}

/// Makespan of a solution: the length of its longest path.
pub fn makespan(shop: &Shop, sol: &Solution, durations: &[f64]) -> Result<f64> {
    Ok(sol.graph(shop)?.makespan(durations))
}

/// Start time of every activity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub starts: Vec<f64>,
}

impl Schedule {
    pub fn makespan(&self, durations: &[f64]) -> f64 {
        self.starts
            .iter()
            .zip(durations)
            .map(|(s, d)| s + d)
            .fold(0.0, f64::max)
    }

    /// Job precedences hold and no two activities on a resource overlap.
    pub fn check_valid(&self, shop: &Shop, durations: &[f64]) -> Result<()> {
        if self.starts.len() != shop.len() {
            return Err(Error::InvalidSchedule(format!(
                "{} start times for {} activities",
                self.starts.len(),
                shop.len()
            )));
        }
        let end = |i: usize| self.starts[i] + durations[i];
        if let Some(i) = self.starts.iter().position(|&s| s.is_nan() || s < -TIME_EPS) {
            return Err(Error::InvalidSchedule(format!("activity {i} starts before time zero")));
        }
        for (a, b) in shop.job_edges() {
            if end(a) > self.starts[b] + TIME_EPS {
                return Err(Error::InvalidSchedule(format!(
                    "job order violated: {a} ends after {b} starts"
                )));
            }
        }
        for set in shop.resources() {
            for (k, &a) in set.iter().enumerate() {
                for &b in &set[k + 1..] {
                    let a_first = end(a) <= self.starts[b] + TIME_EPS;
                    let b_first = end(b) <= self.starts[a] + TIME_EPS;
                    if !a_first && !b_first {
                        return Err(Error::InvalidSchedule(format!(
                            "activities {a} and {b} overlap on machine {}",
                            shop.activity(a).machine
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Non-delay schedule of a solution: every activity starts as soon as its
/// immediate predecessors have finished.
pub fn sched(shop: &Shop, sol: &Solution, durations: &[f64]) -> Result<Schedule> {
    let (starts, _) = sol.graph(shop)?.heads(durations);
    Ok(Schedule { starts })
}

/// Orders each resource set by start time.
pub fn sol_of(shop: &Shop, schedule: &Schedule, durations: &[f64]) -> Result<Solution> {
    schedule.check_valid(shop, durations)?;
    let sequences = shop
        .resources()
        .iter()
        .map(|set| {
            let mut seq = set.clone();
            seq.sort_by(|&a, &b| {
                schedule.starts[a]
                    .total_cmp(&schedule.starts[b])
                    .then_with(|| a.cmp(&b))
            });
            seq
        })
        .collect();
    Solution::new(shop, sequences)
}

/// Default refusal threshold for [`enumerate_solutions`].
pub const DEFAULT_ENUMERATION_CAP: f64 = 1e6;

/// Product of per-resource factorials: the number of candidate orderings.
pub fn ordering_count(shop: &Shop) -> f64 {
    shop.resources()
        .iter()
        .map(|set| (1..=set.len()).map(|k| k as f64).product::<f64>())
        .product()
}

/// Every solution of a small instance, each exactly once.
pub fn enumerate_solutions(shop: &Shop, cap: f64) -> Result<SolutionEnumerator<'_>> {
    let count = ordering_count(shop);
    if count > cap {
        return Err(Error::TooLarge { count, cap });
    }
    use itertools::Itertools;
    let perms: Vec<Vec<Vec<usize>>> = shop
        .resources()
        .iter()
        .map(|set| set.iter().copied().permutations(set.len()).collect())
        .collect();
    Ok(SolutionEnumerator {
        shop,
        digits: vec![0; perms.len()],
        perms,
        done: false,
    })
}

/// Iterator over the acyclic combinations of resource orders, in
/// mixed-radix order of per-resource permutations.
pub struct SolutionEnumerator<'a> {
    shop: &'a Shop,
    perms: Vec<Vec<Vec<usize>>>,
    digits: Vec<usize>,
    done: bool,
}

impl SolutionEnumerator<'_> {
    fn advance(&mut self) {
        for (digit, options) in self.digits.iter_mut().zip(&self.perms).rev() {
            *digit += 1;
            if *digit < options.len() {
                return;
            }
            *digit = 0;
        }
        self.done = true;
    }
}

impl Iterator for SolutionEnumerator<'_> {
    type Item = Solution;

    fn next(&mut self) -> Option<Solution> {
        while !self.done {
            let sequences: Vec<Vec<usize>> = self
                .digits
                .iter()
                .zip(&self.perms)
                .map(|(&d, options)| options[d].clone())
                .collect();
            self.advance();
            let sol = Solution::from_sequences_unchecked(sequences);
            if PrecedenceGraph::from_solution(self.shop, &sol).is_ok() {
                return Some(sol);
            }
        }
        None
    }
}
