//! Tabu search with the N5 neighbourhood and an elite pool for restarts, and
//! the two filtering algorithms built on it (Tabu-TBS, Tabu-I-BS).

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::evaluator::Simulator;
use crate::model::{PrecedenceGraph, ProbInstance, Shop, Solution, TIME_EPS};
use crate::qbounds::q_durations;
use crate::run::{Algorithm, Budget, RunConfig, RunRecord, TabuParams, Tracker};
use crate::stochastic::derive_seed;

/// Swap of the adjacent activities at `pos` and `pos + 1` of a machine sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub machine: usize,
    pub pos: usize,
    /// Activity at `pos` before the swap.
    pub first: usize,
    /// Activity at `pos + 1` before the swap.
    pub second: usize,
}

fn graph_makespan(shop: &Shop, sol: &Solution, durations: &[f64]) -> Option<(PrecedenceGraph, f64)> {
    let graph = PrecedenceGraph::from_solution(shop, sol).ok()?;
    let make = graph.makespan(durations);
    Some((graph, make))
}

/// A critical path in activity order.
///
/// Traced backwards from the lowest-id activity finishing at the makespan,
/// always stepping to the lowest-id tight predecessor.
pub fn critical_path(shop: &Shop, sol: &Solution, durations: &[f64]) -> Result<Vec<usize>> {
    let graph = PrecedenceGraph::from_solution(shop, sol)?;
    let (heads, make) = graph.heads(durations);
    let tol = |x: f64| TIME_EPS * x.abs().max(1.0);
    let Some(mut v) = (0..shop.len()).find(|&v| (heads[v] + durations[v] - make).abs() <= tol(make)) else {
        return Ok(Vec::new());
    };
    let mut path = vec![v];
    loop {
        let next = graph
            .preds(v)
            .iter()
            .copied()
            .filter(|&p| (heads[p] + durations[p] - heads[v]).abs() <= tol(heads[v]))
            .min();
        match next {
            Some(p) => {
                path.push(p);
                v = p;
            }
            None => break,
        }
    }
    path.reverse();
    Ok(path)
}

/// N5 moves on the chosen critical path.
///
/// A block is a maximal run of path activities that are adjacent on one
/// machine. Every block but the first contributes its first pair, every block
/// but the last its last pair; a path that is one block has no moves.
pub fn n5_neighborhood(shop: &Shop, sol: &Solution, durations: &[f64]) -> Result<Vec<Move>> {
    let path = critical_path(shop, sol, durations)?;
    let mut pos = vec![0usize; shop.len()];
    for seq in sol.sequences() {
        for (i, &a) in seq.iter().enumerate() {
            pos[a] = i;
        }
    }
    let adjacent = |a: usize, b: usize| {
        let (ma, mb) = (shop.activity(a).machine, shop.activity(b).machine);
        ma == mb && pos[b] == pos[a] + 1
    };
    // Single-activity blocks count when deciding which block is first or last.
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=path.len() {
        if i == path.len() || !adjacent(path[i - 1], path[i]) {
            blocks.push((start, i - 1));
            start = i;
        }
    }
    let mut moves = Vec::new();
    let pair_move = |i: usize| {
        let (a, b) = (path[i], path[i + 1]);
        Move {
            machine: shop.activity(a).machine,
            pos: pos[a],
            first: a,
            second: b,
        }
    };
    let last = blocks.len().saturating_sub(1);
    for (k, &(s, e)) in blocks.iter().enumerate() {
        if e == s {
            continue;
        }
        if k > 0 {
            moves.push(pair_move(s));
        }
        if k < last && !(k > 0 && e == s + 1) {
            moves.push(pair_move(e - 1));
        }
    }
    Ok(moves)
}

/// Randomized dispatch: repeatedly schedule the ready activity with the
/// smallest jittered earliest start (jitter uniform in `[0, mean duration)`),
/// ties to the longer activity, then the lower id.
pub fn initial_solution(shop: &Shop, durations: &[f64], rng: &mut impl Rng) -> Solution {
    let n = shop.len();
    let mean = if n == 0 {
        0.0
    } else {
        durations.iter().sum::<f64>() / n as f64
    };
    let mut next_in_job = vec![0usize; shop.n_jobs()];
    let mut job_ready = vec![0.0f64; shop.n_jobs()];
    let mut machine_ready = vec![0.0f64; shop.n_machines()];
    let mut sequences = vec![Vec::new(); shop.n_machines()];
    for _ in 0..n {
        let mut best: Option<(f64, usize)> = None;
        for (j, job) in shop.jobs().iter().enumerate() {
            let Some(&a) = job.get(next_in_job[j]) else { continue };
            let m = shop.activity(a).machine;
            let key = job_ready[j].max(machine_ready[m]) + rng.random::<f64>() * mean;
            let better = match best {
                None => true,
                Some((k, b)) => {
                    key < k || (key == k && (durations[a] > durations[b] || (durations[a] == durations[b] && a < b)))
                }
            };
            if better {
                best = Some((key, a));
            }
        }
        let (_, a) = best.expect("an activity is ready while some remain");
        let act = shop.activity(a);
        let start = job_ready[act.job].max(machine_ready[act.machine]);
        job_ready[act.job] = start + durations[a];
        machine_ready[act.machine] = start + durations[a];
        next_in_job[act.job] += 1;
        sequences[act.machine].push(a);
    }
    Solution::from_sequences_unchecked(sequences)
}

#[derive(Debug, Clone)]
struct Elite {
    solution: Solution,
    makespan: f64,
    tabu: VecDeque<(usize, usize)>,
    /// First move taken from this state, excluded after a restart.
    taken: Option<(usize, usize)>,
}

/// One tabu search trajectory.
pub struct TabuSearch<'a> {
    shop: &'a Shop,
    durations: Vec<f64>,
    params: TabuParams,
    stagnation_limit: usize,
    current: Solution,
    current_make: f64,
    tabu: VecDeque<(usize, usize)>,
    elite: Vec<Elite>,
    /// The current state is the newest elite entry and has not moved yet.
    at_elite: bool,
    excluded: Option<(usize, usize)>,
    best: Solution,
    best_make: f64,
    stagnant: usize,
    restarts: usize,
    moves: u64,
    terminated: bool,
}

impl<'a> TabuSearch<'a> {
    pub fn new(shop: &'a Shop, durations: Vec<f64>, params: TabuParams, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let current = initial_solution(shop, &durations, &mut rng);
        let (_, make) = graph_makespan(shop, &current, &durations)
            .ok_or_else(|| Error::Internal("dispatch produced a cyclic solution".into()))?;
        let elite = vec![Elite {
            solution: current.clone(),
            makespan: make,
            tabu: VecDeque::new(),
            taken: None,
        }];
        Ok(TabuSearch {
            shop,
            stagnation_limit: params.stagnation_limit(shop.len()),
            durations,
            params,
            best: current.clone(),
            best_make: make,
            current,
            current_make: make,
            tabu: VecDeque::new(),
            elite,
            at_elite: true,
            excluded: None,
            stagnant: 0,
            restarts: 0,
            moves: 0,
            terminated: false,
        })
    }

    pub fn current(&self) -> (&Solution, f64) {
        (&self.current, self.current_make)
    }

    pub fn best(&self) -> (&Solution, f64) {
        (&self.best, self.best_make)
    }

    pub fn moves(&self) -> u64 {
        self.moves
    }

    pub fn restarts(&self) -> usize {
        self.restarts
    }

    pub fn elite_len(&self) -> usize {
        self.elite.len()
    }

    pub fn tabu_len(&self) -> usize {
        self.tabu.len()
    }

    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    fn is_tabu(&self, mv: &Move) -> bool {
        // Swapping creates the arc second -> first.
        self.tabu.contains(&(mv.second, mv.first))
    }

    /// Best admissible neighbour: non-tabu moves, or tabu moves that beat the
    /// global best. When every move is tabu, the one forbidden longest ago.
    fn select(&self) -> Result<Option<(Move, Solution, f64)>> {
        let moves = n5_neighborhood(self.shop, &self.current, &self.durations)?;
        let mut chosen: Option<(Move, Solution, f64)> = None;
        let mut oldest: Option<(usize, Move, Solution, f64)> = None;
        for mv in moves {
            if self.excluded == Some((mv.first, mv.second)) {
                continue;
            }
            let cand = self.current.swapped(mv.machine, mv.pos);
            let Some((_, make)) = graph_makespan(self.shop, &cand, &self.durations) else {
                continue;
            };
            if self.is_tabu(&mv) && make >= self.best_make {
                let age = self
                    .tabu
                    .iter()
                    .position(|&arc| arc == (mv.second, mv.first))
                    .unwrap_or(0);
                if oldest.as_ref().is_none_or(|o| age < o.0) {
                    oldest = Some((age, mv, cand, make));
                }
                continue;
            }
            if chosen.as_ref().is_none_or(|c| make < c.2) {
                chosen = Some((mv, cand, make));
            }
        }
        Ok(chosen.or(oldest.map(|(_, mv, cand, make)| (mv, cand, make))))
    }

    fn restart(&mut self) -> bool {
        if self.restarts >= self.params.elite {
            return false;
        }
        let Some(entry) = self.elite.pop() else {
            return false;
        };
        self.restarts += 1;
        self.current = entry.solution;
        self.current_make = entry.makespan;
        self.tabu = entry.tabu;
        self.excluded = entry.taken;
        self.at_elite = false;
        self.stagnant = 0;
        true
    }

    /// Performs one move, or a restart from the elite pool after stagnation.
    /// Returns `false` once the search has terminated.
    pub fn step(&mut self) -> Result<bool> {
        if self.terminated {
            return Ok(false);
        }
        let chosen = if self.stagnant >= self.stagnation_limit {
            None
        } else {
            self.select()?
        };
        let Some((mv, next, make)) = chosen else {
            if !self.restart() {
                self.terminated = true;
                return Ok(false);
            }
            return Ok(true);
        };
        if self.at_elite {
            if let Some(top) = self.elite.last_mut() {
                top.taken.get_or_insert((mv.first, mv.second));
            }
            self.at_elite = false;
        }
        self.excluded = None;
        self.tabu.push_back((mv.first, mv.second));
        while self.tabu.len() > self.params.tenure {
            self.tabu.pop_front();
        }
        self.current = next;
        self.current_make = make;
        self.moves += 1;
        if make < self.best_make {
            self.best = self.current.clone();
            self.best_make = make;
            self.stagnant = 0;
            if self.elite.len() >= self.params.elite {
                self.elite.remove(0);
            }
            self.elite.push(Elite {
                solution: self.current.clone(),
                makespan: make,
                tabu: self.tabu.clone(),
                taken: None,
            });
            self.at_elite = true;
        } else {
            self.stagnant += 1;
        }
        Ok(true)
    }
}

/// Best solution with makespan below `c` found by one tabu search within the
/// budget, or `None`.
pub fn find_best_tabu(
    shop: &Shop,
    durations: &[f64],
    c: f64,
    budget: &mut Budget,
    params: TabuParams,
    seed: u64,
) -> Result<(Option<(Solution, f64)>, u64)> {
    let mut search = TabuSearch::new(shop, durations.to_vec(), params, seed)?;
    while !budget.exhausted() {
        budget.charge(1);
        if !search.step()? {
            break;
        }
    }
    let (best, make) = search.best();
    let found = (make < c).then(|| (best.clone(), make));
    Ok((found, search.moves()))
}

/// Tabu search as a stream of visited solutions with makespan `<= cap`.
///
/// Yields the initial solution and every later current solution that
/// passes the cap, skipping immediate repeats.
pub struct FindNextTabu<'a> {
    search: TabuSearch<'a>,
    cap: f64,
    started: bool,
    last: Option<Solution>,
}

impl<'a> FindNextTabu<'a> {
    pub fn new(shop: &'a Shop, durations: Vec<f64>, cap: f64, params: TabuParams, seed: u64) -> Result<Self> {
        Ok(FindNextTabu {
            search: TabuSearch::new(shop, durations, params, seed)?,
            cap,
            started: false,
            last: None,
        })
    }

    pub fn next(&mut self, budget: &mut Budget) -> Result<Option<(Solution, f64)>> {
        if !self.started {
            self.started = true;
            let (sol, make) = self.search.current();
            if make <= self.cap {
                self.last = Some(sol.clone());
                return Ok(Some((sol.clone(), make)));
            }
        }
        loop {
            if budget.exhausted() {
                return Ok(None);
            }
            budget.charge(1);
            if !self.search.step()? {
                return Ok(None);
            }
            let (sol, make) = self.search.current();
            if make <= self.cap && self.last.as_ref() != Some(sol) {
                self.last = Some(sol.clone());
                return Ok(Some((sol.clone(), make)));
            }
        }
    }

    pub fn is_terminated(&self) -> bool {
        self.search.is_terminated()
    }

    pub fn moves(&self) -> u64 {
        self.search.moves()
    }
}

const TABU_STREAM: u64 = 0x7ab0_5eed;

fn tabu_seed(seed: u64, index: u64) -> u64 {
    derive_seed(derive_seed(seed, TABU_STREAM), index)
}

fn check(inst: &ProbInstance, cfg: &RunConfig, expected: Algorithm) -> Result<()> {
    cfg.validate()?;
    if cfg.algorithm != expected {
        return Err(Error::InvalidParameter(format!(
            "configuration is for {}, not {}",
            cfg.algorithm, expected
        )));
    }
    if inst.shop.is_empty() {
        return Err(Error::InvalidInstance("instance has no activities".into()));
    }
    Ok(())
}

/// Tabu timed better-solution search: tabu search for `t_initial`, then a
/// fresh tabu search whose visited solutions below `D_initial + 1` are simulated.
pub fn tabu_tbs(inst: &ProbInstance, cfg: &RunConfig) -> Result<RunRecord> {
    check(inst, cfg, Algorithm::TabuTbs)?;
    let shop = &inst.shop;
    let durations = q_durations(inst, cfg.q);
    let mut budget = Budget::from_config(cfg);
    let mut sim = Simulator::new(inst, cfg.params, cfg.seed, cfg.dedupe_sims);
    let mut tracker = Tracker::new(cfg.algorithm, shop, durations.clone());

    let mut phase = budget.fraction(cfg.initial_fraction());
    let (found, mut moves) = find_best_tabu(
        shop,
        &durations,
        f64::INFINITY,
        &mut phase,
        cfg.tabu,
        tabu_seed(cfg.seed, 0),
    )?;
    budget.absorb(&phase);
    let (s0, d_initial) = found.ok_or_else(|| Error::Internal("tabu search returned no solution".into()))?;
    tracker.note_solution(&s0)?;

    let mut stream = FindNextTabu::new(
        shop,
        durations,
        inst.mode.filter_cap(d_initial),
        cfg.tabu,
        tabu_seed(cfg.seed, 1),
    )?;
    while let Some((sol, _)) = stream.next(&mut budget)? {
        if budget.exhausted() && tracker.d_best().is_finite() {
            break;
        }
        budget.charge(1);
        let d = sim.upper_estimate(&sol)?;
        tracker.offer(&sol, d, &budget)?;
    }
    moves += stream.moves();
    let completed = stream.is_terminated();
    if !tracker.d_best().is_finite() {
        // the fresh search never came under the cap; s0 always does
        budget.charge(1);
        let d = sim.upper_estimate(&s0)?;
        tracker.offer(&s0, d, &budget)?;
    }
    let rec = tracker.record_mut();
    rec.moves = moves;
    rec.completed = completed;
    rec.iterations = completed as u64;
    Ok(tracker.finish(&budget, sim.simulations()))
}

/// Tabu iterated better-solution search: tabu search for all but the last
/// second, then fresh tabu searches admitting `D_initial · (1 + i/100) + 1`.
pub fn tabu_i_bs(inst: &ProbInstance, cfg: &RunConfig) -> Result<RunRecord> {
    check(inst, cfg, Algorithm::TabuIBs)?;
    let shop = &inst.shop;
    let durations = q_durations(inst, cfg.q);
    let total: f64 = durations.iter().sum();
    let mut budget = Budget::from_config(cfg);
    let mut sim = Simulator::new(inst, cfg.params, cfg.seed, cfg.dedupe_sims);
    let mut tracker = Tracker::new(cfg.algorithm, shop, durations.clone());

    let mut phase = budget.fraction(cfg.optimize_fraction());
    let (found, mut moves) = find_best_tabu(
        shop,
        &durations,
        f64::INFINITY,
        &mut phase,
        cfg.tabu,
        tabu_seed(cfg.seed, 0),
    )?;
    budget.absorb(&phase);
    let (s0, d_initial) = found.ok_or_else(|| Error::Internal("tabu search returned no solution".into()))?;
    budget.charge(1);
    let d0 = sim.upper_estimate(&s0)?;
    tracker.offer(&s0, d0, &budget)?;

    let mut completed = false;
    let mut i = 0u64;
    'outer: while !budget.exhausted() {
        let cap = inst.mode.filter_cap(d_initial * (1.0 + i as f64 / 100.0));
        let mut stream = FindNextTabu::new(shop, durations.clone(), cap, cfg.tabu, tabu_seed(cfg.seed, i + 1))?;
        while let Some((sol, _)) = stream.next(&mut budget)? {
            if budget.exhausted() {
                moves += stream.moves();
                break 'outer;
            }
            budget.charge(1);
            let d = sim.upper_estimate(&sol)?;
            tracker.offer(&sol, d, &budget)?;
        }
        moves += stream.moves();
        if !stream.is_terminated() {
            break;
        }
        tracker.record_mut().iterations += 1;
        if cap >= total {
            completed = true;
            break;
        }
        i += 1;
    }
    let rec = tracker.record_mut();
    rec.moves = moves;
    rec.completed = completed;
    Ok(tracker.finish(&budget, sim.simulations()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::ConfidenceParams;
    use crate::fixtures;
    use crate::model::{enumerate_solutions, makespan, ValueMode, DEFAULT_ENUMERATION_CAP};
    use crate::stochastic::DurationDist;

    fn random_shop(n: usize, rng: &mut ChaCha8Rng) -> (Shop, Vec<f64>) {
        let routes: Vec<Vec<usize>> = (0..n)
            .map(|_| {
                let mut r: Vec<usize> = (0..n).collect();
                rand::seq::SliceRandom::shuffle(r.as_mut_slice(), rng);
                r
            })
            .collect();
        let shop = Shop::from_routings(&routes, n).unwrap();
        let d = (0..n * n).map(|_| rng.random_range(1..50) as f64).collect();
        (shop, d)
    }

    /// Longest path by explicit path enumeration on a small DAG.
    fn oracle_critical_length(shop: &Shop, sol: &Solution, d: &[f64], path: &[usize]) -> bool {
        let edges: Vec<(usize, usize)> = shop.job_edges().chain(sol.machine_edges()).collect();
        let consecutive_ok = path.windows(2).all(|w| edges.contains(&(w[0], w[1])));
        let len: f64 = path.iter().map(|&v| d[v]).sum();
        consecutive_ok && len == makespan(shop, sol, d).unwrap()
    }

    #[test]
    fn s_c_neighbourhood_reaches_s_a_and_s_d() {
        let det = fixtures::two_job_det();
        let [s_a, _, s_c, s_d] = fixtures::two_job_solutions();
        let path = critical_path(&det.shop, &s_c, &det.durations).unwrap();
        assert_eq!(path, vec![3, 0, 1, 2, 4]);
        assert!(oracle_critical_length(&det.shop, &s_c, &det.durations, &path));
        let moves = n5_neighborhood(&det.shop, &s_c, &det.durations).unwrap();
        let results: Vec<Solution> = moves.iter().map(|m| s_c.swapped(m.machine, m.pos)).collect();
        assert!(results.contains(&s_a));
        assert!(results.contains(&s_d));
        assert!(moves.iter().any(|m| (m.first, m.second) == (3, 0)));
    }

    #[test]
    fn single_block_or_no_adjacency_gives_empty_neighbourhood() {
        // One machine: the critical path is a single block.
        let shop = Shop::from_routings(&[vec![0], vec![0], vec![0]], 1).unwrap();
        let sol = Solution::new(&shop, vec![vec![0, 1, 2]]).unwrap();
        assert!(n5_neighborhood(&shop, &sol, &[1.0, 1.0, 1.0]).unwrap().is_empty());
        // Critical path is one job, no same-machine adjacency.
        let shop = Shop::from_routings(&[vec![0, 1], vec![1, 0]], 2).unwrap();
        let sol = Solution::new(&shop, vec![vec![0, 3], vec![2, 1]]).unwrap();
        let d = [10.0, 10.0, 1.0, 1.0];
        assert_eq!(makespan(&shop, &sol, &d).unwrap(), 20.0);
        let path = critical_path(&shop, &sol, &d).unwrap();
        assert_eq!(path, vec![0, 1]);
        assert!(oracle_critical_length(&shop, &sol, &d, &path));
        assert!(n5_neighborhood(&shop, &sol, &d).unwrap().is_empty());
    }

    #[test]
    fn every_n5_move_keeps_solutions_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..5 {
            let (shop, d) = random_shop(4, &mut rng);
            let mut checked = 0;
            for sol in enumerate_solutions(&shop, DEFAULT_ENUMERATION_CAP).unwrap().step_by(97) {
                let path = critical_path(&shop, &sol, &d).unwrap();
                assert!(oracle_critical_length(&shop, &sol, &d, &path));
                for mv in n5_neighborhood(&shop, &sol, &d).unwrap() {
                    let next = sol.swapped(mv.machine, mv.pos);
                    assert!(Solution::new(&shop, next.sequences().to_vec()).is_ok());
                    checked += 1;
                }
            }
            assert!(checked > 0);
        }
    }

    #[test]
    fn dispatch_gives_valid_solutions() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let (shop, d) = random_shop(5, &mut rng);
            let sol = initial_solution(&shop, &d, &mut rng);
            assert!(Solution::new(&shop, sol.sequences().to_vec()).is_ok());
        }
    }

    #[test]
    fn running_example_reaches_optimum() {
        let det = fixtures::two_job_det();
        for seed in 0..10 {
            let (best, _) = find_best_tabu(
                &det.shop,
                &det.durations,
                f64::INFINITY,
                &mut Budget::unlimited(),
                TabuParams::default(),
                seed,
            )
            .unwrap();
            assert_eq!(best.unwrap().1, 11.0);
        }
        let (none, _) = find_best_tabu(
            &det.shop,
            &det.durations,
            1.0,
            &mut Budget::unlimited(),
            TabuParams::default(),
            0,
        )
        .unwrap();
        assert!(none.is_none());
    }

    #[test]
    fn state_bounds_and_monotone_best() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (shop, d) = random_shop(5, &mut rng);
        let params = TabuParams {
            stagnation: Some(30),
            ..TabuParams::default()
        };
        let mut search = TabuSearch::new(&shop, d.clone(), params, 1).unwrap();
        let mut last_best = search.best().1;
        while search.step().unwrap() {
            assert!(search.tabu_len() <= 10);
            assert!(search.elite_len() <= 8);
            let (sol, make) = search.current();
            assert_eq!(makespan(&shop, sol, &d).unwrap(), make);
            assert!(search.best().1 <= last_best);
            last_best = search.best().1;
        }
        assert!(search.restarts() <= 8);
    }

    #[test]
    fn small_instances_reach_optimum_usually() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut hits = 0;
        let runs = 40;
        for run in 0..runs {
            let (shop, d) = random_shop(3, &mut rng);
            let opt = enumerate_solutions(&shop, DEFAULT_ENUMERATION_CAP)
                .unwrap()
                .map(|s| makespan(&shop, &s, &d).unwrap())
                .fold(f64::INFINITY, f64::min);
            let (best, _) = find_best_tabu(
                &shop,
                &d,
                f64::INFINITY,
                &mut Budget::unlimited(),
                TabuParams::default(),
                run,
            )
            .unwrap();
            if best.unwrap().1 == opt {
                hits += 1;
            }
        }
        assert!(hits as f64 >= 0.9 * runs as f64, "{hits}/{runs}");
    }

    #[test]
    fn find_next_yields_only_below_cap_and_is_reproducible() {
        let det = fixtures::two_job_det();
        let collect = |seed| {
            let mut stream =
                FindNextTabu::new(&det.shop, det.durations.clone(), 11.5, TabuParams::default(), seed).unwrap();
            let mut out = Vec::new();
            while let Some((s, m)) = stream.next(&mut Budget::unlimited()).unwrap() {
                assert!(m <= 11.5);
                out.push(s);
            }
            out
        };
        let a = collect(3);
        assert!(a.iter().all(|s| *s == fixtures::two_job_solutions()[0]));
        assert!(a.windows(2).all(|w| w[0] != w[1]));
        assert_eq!(a, collect(3));
    }

    fn cfg(alg: Algorithm, n: usize) -> RunConfig {
        RunConfig::new(alg)
            .with_params(ConfidenceParams::new(0.05, 2.0, n).unwrap())
            .with_seed(5)
    }

    #[test]
    fn tabu_algorithms_on_running_example() {
        let inst = fixtures::two_job_prob();
        let s_a = fixtures::two_job_solutions()[0].clone();
        for (alg, run) in [
            (Algorithm::TabuTbs, tabu_tbs as fn(&_, &_) -> _),
            (Algorithm::TabuIBs, tabu_i_bs),
        ] {
            let rec = run(&inst, &cfg(alg, 10_000).with_q(0.95).with_work_limit(20_000)).unwrap();
            assert_eq!(rec.best.as_ref(), Some(&s_a), "{alg}");
            assert!((rec.d_best - 12.16).abs() <= 0.15, "{alg}: {}", rec.d_best);
            assert!(rec.simulations >= 1);
        }
    }

    #[test]
    fn tabu_algorithms_without_uncertainty() {
        let det = fixtures::two_job_det();
        let inst = ProbInstance::new(
            det.shop.clone(),
            det.durations.iter().map(|&d| DurationDist::fixed(d)).collect(),
            ValueMode::Real,
        )
        .unwrap();
        let a = tabu_tbs(&inst, &cfg(Algorithm::TabuTbs, 1000)).unwrap();
        assert_eq!(a.d_best, 11.0);
        let b = tabu_i_bs(&inst, &cfg(Algorithm::TabuIBs, 1000)).unwrap();
        assert_eq!(b.d_best, 11.0);
        assert!(b.completed);
    }

    #[test]
    fn work_limited_tabu_runs_repeat() {
        let inst = fixtures::two_job_prob();
        let c = cfg(Algorithm::TabuIBs, 500).with_q(0.3).with_work_limit(300);
        let a = tabu_i_bs(&inst, &c).unwrap();
        let b = tabu_i_bs(&inst, &c).unwrap();
        assert_eq!((a.d_best, a.moves, a.simulations), (b.d_best, b.moves, b.simulations));
    }
}
