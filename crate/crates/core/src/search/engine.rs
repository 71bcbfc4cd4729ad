//! Resumable depth-first branch and bound over pairwise sequencing decisions.
//!
//! A node fixes the order of some same-machine activity pairs. Propagation
//! computes heads and tails on the committed precedence graph, bounds the
//! makespan from below, and forces pair orders whose alternative cannot fit
//! under the current cap. Branching picks the pair with the largest
//! duration-weighted window overlap; the order with more slack is explored
//! first.

use crate::model::{PrecedenceGraph, Shop, Solution, TIME_EPS};
use crate::run::Budget;

const UNSET: u8 = 0;
const FORWARD: u8 = 1;
const BACKWARD: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pair {
    machine: usize,
    a: usize,
    b: usize,
}

#[derive(Debug, Clone)]
struct Pending {
    states: Vec<u8>,
    lb: f64,
}

/// A fully sequenced node.
#[derive(Debug, Clone, PartialEq)]
pub struct Leaf {
    pub solution: Solution,
    pub makespan: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Leaf(Leaf),
    /// No open nodes remain.
    Exhausted,
    OutOfBudget,
}

/// What an inspection hook sees of an internal node after propagation.
pub struct NodeView<'n> {
    pub graph: &'n PrecedenceGraph,
    pub lower_bound: f64,
    pub decided: usize,
    pub pairs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Expand,
    Prune,
}

struct Propagated {
    graph: PrecedenceGraph,
    heads: Vec<f64>,
    tails: Vec<f64>,
    lb: f64,
}

/// Branching decision at a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchChoice {
    pub machine: usize,
    /// Activity sequenced first in the preferred child.
    pub first: usize,
    pub second: usize,
    pub preferred_lb: f64,
    pub other_lb: f64,
}

pub struct TreeSearch<'a> {
    shop: &'a Shop,
    durations: Vec<f64>,
    total: f64,
    pairs: Vec<Pair>,
    stack: Vec<Pending>,
    nodes: u64,
}

impl<'a> TreeSearch<'a> {
    pub fn new(shop: &'a Shop, durations: Vec<f64>) -> Self {
        assert_eq!(durations.len(), shop.len(), "one duration per activity");
        let mut pairs = Vec::new();
        for (machine, acts) in shop.resources().iter().enumerate() {
            let mut acts = acts.clone();
            acts.sort_unstable();
            for (x, &a) in acts.iter().enumerate() {
                for &b in &acts[x + 1..] {
                    pairs.push(Pair { machine, a, b });
                }
            }
        }
        let total = durations.iter().sum();
        let mut search = TreeSearch {
            shop,
            durations,
            total,
            pairs,
            stack: Vec::new(),
            nodes: 0,
        };
        let mut states = vec![UNSET; search.pairs.len()];
        if let Some(p) = search.propagate(&mut states, f64::INFINITY) {
            search.stack.push(Pending { states, lb: p.lb });
        }
        search
    }

    pub fn durations(&self) -> &[f64] {
        &self.durations
    }

    pub fn total_duration(&self) -> f64 {
        self.total
    }

    /// Nodes expanded so far.
    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    pub fn is_exhausted(&self) -> bool {
        self.stack.is_empty()
    }

    /// Smallest lower bound among open nodes (infinite once exhausted).
    pub fn open_lower_bound(&self) -> f64 {
        self.stack.iter().map(|p| p.lb).fold(f64::INFINITY, f64::min)
    }

    /// Continues the traversal until the next leaf with makespan `<= cap`.
    pub fn next_leaf(&mut self, cap: f64, budget: &mut Budget) -> Step {
        self.next_leaf_inspect(cap, budget, &mut |_, _| Verdict::Expand)
    }

    /// As [`next_leaf`](Self::next_leaf), calling `inspect` on each internal
    /// node that survives propagation; it may prune the subtree.
    pub fn next_leaf_inspect(
        &mut self,
        cap: f64,
        budget: &mut Budget,
        inspect: &mut dyn FnMut(&NodeView<'_>, &mut Budget) -> Verdict,
    ) -> Step {
        loop {
            if budget.exhausted() {
                return Step::OutOfBudget;
            }
            let Some(node) = self.stack.pop() else {
                return Step::Exhausted;
            };
            if node.lb > cap {
                continue;
            }
            self.nodes += 1;
            budget.charge(1);
            let mut states = node.states;
            let Some(p) = self.propagate(&mut states, cap) else {
                continue;
            };
            let decided = states.iter().filter(|&&s| s != UNSET).count();
            if decided == states.len() {
                let solution = self.solution_of(&states);
                let makespan = p.graph.makespan(&self.durations);
                return Step::Leaf(Leaf { solution, makespan });
            }
            let view = NodeView {
                graph: &p.graph,
                lower_bound: p.lb,
                decided,
                pairs: states.len(),
            };
            if inspect(&view, budget) == Verdict::Prune {
                continue;
            }
            let Some((k, first_dir, lbs)) = self.choose(&states, &p, cap) else {
                continue;
            };
            let second_dir = if first_dir == FORWARD { BACKWARD } else { FORWARD };
            let mut second = states.clone();
            second[k] = second_dir;
            if lbs.1 <= cap {
                self.stack.push(Pending {
                    states: second,
                    lb: lbs.1.max(node.lb),
                });
            }
            let mut first = states;
            first[k] = first_dir;
            if lbs.0 <= cap {
                self.stack.push(Pending {
                    states: first,
                    lb: lbs.0.max(node.lb),
                });
            }
        }
    }

    /// Branching decision the engine would take at the root.
    pub fn root_choice(&self) -> Option<BranchChoice> {
        let mut states = self.stack.last()?.states.clone();
        let p = self.propagate(&mut states, f64::INFINITY)?;
        let (k, dir, (pref, other)) = self.choose(&states, &p, f64::INFINITY)?;
        let pair = self.pairs[k];
        let (first, second) = if dir == FORWARD {
            (pair.a, pair.b)
        } else {
            (pair.b, pair.a)
        };
        Some(BranchChoice {
            machine: pair.machine,
            first,
            second,
            preferred_lb: pref,
            other_lb: other,
        })
    }

    /// Propagated lower bounds at the root of `a` before `b` and of `b` before `a`.
    pub fn root_order_bounds(&self, a: usize, b: usize) -> Option<(f64, f64)> {
        let (lo, hi) = (a.min(b), a.max(b));
        let k = self.pairs.iter().position(|p| (p.a, p.b) == (lo, hi))?;
        let mut states = self.stack.last()?.states.clone();
        let lb = |states: &mut Vec<u8>, dir| {
            states[k] = dir;
            self.evaluate(states).map_or(f64::INFINITY, |p| p.lb)
        };
        let fwd = lb(&mut states, FORWARD);
        let bwd = lb(&mut states, BACKWARD);
        Some(if a < b { (fwd, bwd) } else { (bwd, fwd) })
    }

    fn edges(&self, states: &[u8]) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = self.shop.job_edges().collect();
        for (pair, &s) in self.pairs.iter().zip(states) {
            match s {
                FORWARD => edges.push((pair.a, pair.b)),
                BACKWARD => edges.push((pair.b, pair.a)),
                _ => {}
            }
        }
        edges
    }

    fn horizon(&self, cap: f64) -> f64 {
        let h = cap.min(self.total);
        h + TIME_EPS * h.abs().max(1.0)
    }

    /// Longest path through any activity, or through a whole machine.
    fn bound(&self, graph: &PrecedenceGraph, heads: &[f64], tails: &[f64]) -> f64 {
        let d = &self.durations;
        let mut lb = (0..graph.len()).map(|v| heads[v] + d[v] + tails[v]).fold(0.0, f64::max);
        for acts in self.shop.resources() {
            if acts.is_empty() {
                continue;
            }
            let head = acts.iter().map(|&v| heads[v]).fold(f64::INFINITY, f64::min);
            let tail = acts.iter().map(|&v| tails[v]).fold(f64::INFINITY, f64::min);
            let work: f64 = acts.iter().map(|&v| d[v]).sum();
            lb = lb.max(head + work + tail);
        }
        lb
    }

    fn evaluate(&self, states: &[u8]) -> Option<Propagated> {
        let graph = PrecedenceGraph::build(self.shop.len(), &self.edges(states)).ok()?;
        let (heads, _) = graph.heads(&self.durations);
        let tails = graph.tails(&self.durations);
        let lb = self.bound(&graph, &heads, &tails);
        Some(Propagated {
            graph,
            heads,
            tails,
            lb,
        })
    }

    /// Propagates to a fixpoint; `None` if the node cannot reach a solution
    /// with makespan `<= cap`.
    fn propagate(&self, states: &mut [u8], cap: f64) -> Option<Propagated> {
        let horizon = self.horizon(cap);
        let d = &self.durations;
        loop {
            let p = self.evaluate(states)?;
            if p.lb > cap {
                return None;
            }
            let reach = p.graph.reachability();
            let mut forced = false;
            for (k, pair) in self.pairs.iter().enumerate() {
                if states[k] != UNSET {
                    continue;
                }
                let (a, b) = (pair.a, pair.b);
                if reach.contains(a, b) {
                    states[k] = FORWARD;
                    continue;
                }
                if reach.contains(b, a) {
                    states[k] = BACKWARD;
                    continue;
                }
                let ab = p.heads[a] + d[a] + d[b] + p.tails[b] <= horizon;
                let ba = p.heads[b] + d[b] + d[a] + p.tails[a] <= horizon;
                match (ab, ba) {
                    (false, false) => return None,
                    (true, false) => {
                        states[k] = FORWARD;
                        forced = true;
                    }
                    (false, true) => {
                        states[k] = BACKWARD;
                        forced = true;
                    }
                    (true, true) => {}
                }
            }
            if !forced {
                return Some(p);
            }
        }
    }

    /// Picks the pair to branch on and the order to try first, with the
    /// propagated lower bounds of (preferred, other) child.
    fn choose(&self, states: &[u8], p: &Propagated, cap: f64) -> Option<(usize, u8, (f64, f64))> {
        let horizon = cap.min(self.total).max(p.lb);
        let d = &self.durations;
        let window = |v: usize| (p.heads[v], horizon - p.tails[v]);
        let density = |v: usize, lo: f64, hi: f64| {
            let span = hi - lo;
            if span > TIME_EPS {
                d[v] / span
            } else {
                f64::MAX / 4.0
            }
        };
        let mut best: Option<(usize, f64)> = None;
        for (k, pair) in self.pairs.iter().enumerate() {
            if states[k] != UNSET {
                continue;
            }
            let (ea, la) = window(pair.a);
            let (eb, lb) = window(pair.b);
            let overlap = (la.min(lb) - ea.max(eb)).max(0.0);
            let score = overlap * (density(pair.a, ea, la) + density(pair.b, eb, lb));
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((k, score));
            }
        }
        let (k, _) = best?;
        let mut trial = states.to_vec();
        trial[k] = FORWARD;
        let fwd = self.evaluate(&trial).map_or(f64::INFINITY, |q| q.lb);
        trial[k] = BACKWARD;
        let bwd = self.evaluate(&trial).map_or(f64::INFINITY, |q| q.lb);
        // Equal slack keeps the lower id first.
        if bwd < fwd {
            Some((k, BACKWARD, (bwd, fwd)))
        } else {
            Some((k, FORWARD, (fwd, bwd)))
        }
    }

    fn solution_of(&self, states: &[u8]) -> Solution {
        let mut before = vec![0usize; self.shop.len()];
        for (pair, &s) in self.pairs.iter().zip(states) {
            match s {
                FORWARD => before[pair.a] += 1,
                _ => before[pair.b] += 1,
            }
        }
        let sequences = self
            .shop
            .resources()
            .iter()
            .map(|acts| {
                let mut seq = acts.clone();
                seq.sort_by_key(|&v| std::cmp::Reverse(before[v]));
                seq
            })
            .collect();
        Solution::from_sequences_unchecked(sequences)
    }
}
