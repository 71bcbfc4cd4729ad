//! Experiment metrics: normalized makespans, the deterministic versus
//! probabilistic correlation study, and randomized paired-t comparisons.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::{upper_estimate_d, ConfidenceParams};
use crate::generate::{generate, GenSpec};
use crate::model::{makespan, Shop, Solution};
use crate::qbounds::{q_durations, q_table, QLevel};
use crate::stochastic::derive_seed;

/// One run of one algorithm on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub instance: String,
    pub algorithm: String,
    pub seed: u64,
    pub alpha: f64,
    pub k: f64,
    pub trials: usize,
    pub q_mode: String,
    pub q: f64,
    pub time_limit: Option<f64>,
    pub time_scale: f64,
    pub work_limit: Option<u64>,
    pub d_first: f64,
    pub d_last: f64,
    pub det_makespan: f64,
    pub nodes: u64,
    pub simulations: u64,
    pub moves: u64,
    pub completed: bool,
    pub n_jobs: usize,
    pub n_machines: usize,
    pub uncertainty: Option<f64>,
    pub wall_seconds: f64,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Values of `field` per (algorithm, instance).
fn by_algorithm_instance(
    rows: &[ResultRow],
    field: impl Fn(&ResultRow) -> f64,
) -> BTreeMap<String, BTreeMap<String, Vec<f64>>> {
    let mut out: BTreeMap<String, BTreeMap<String, Vec<f64>>> = BTreeMap::new();
    for row in rows {
        out.entry(row.algorithm.clone())
            .or_default()
            .entry(row.instance.clone())
            .or_default()
            .push(field(row));
    }
    out
}

/// Mean normalized probabilistic makespan per algorithm: the mean over
/// instances of (mean over runs of `D`) / bound.
pub fn mnpm(rows: &[ResultRow], bounds: &BTreeMap<String, f64>) -> Result<BTreeMap<String, f64>> {
    let missing: BTreeSet<&str> = rows
        .iter()
        .filter(|r| !bounds.contains_key(&r.instance))
        .map(|r| r.instance.as_str())
        .collect();
    if !missing.is_empty() {
        return Err(Error::Missing(format!(
            "no bound for instance(s): {}",
            missing.into_iter().collect::<Vec<_>>().join(", ")
        )));
    }
    Ok(by_algorithm_instance(rows, |r| r.d_last)
        .into_iter()
        .map(|(alg, per)| {
            let ratios: Vec<f64> = per.iter().map(|(inst, ds)| mean(ds) / bounds[inst]).collect();
            (alg, mean(&ratios))
        })
        .collect())
}

/// Mean normalized deterministic makespan per algorithm, relative to the
/// lowest deterministic makespan of `reference` on each instance.
pub fn mndm(rows: &[ResultRow], reference: &str) -> Result<BTreeMap<String, f64>> {
    let grouped = by_algorithm_instance(rows, |r| r.det_makespan);
    let Some(reference_rows) = grouped.get(reference) else {
        return Err(Error::Missing(format!("no rows for reference algorithm {reference}")));
    };
    let minima: BTreeMap<&String, f64> = reference_rows
        .iter()
        .map(|(inst, ms)| (inst, ms.iter().copied().fold(f64::INFINITY, f64::min)))
        .collect();
    let mut out = BTreeMap::new();
    for (alg, per) in &grouped {
        let mut ratios = Vec::new();
        for (inst, ms) in per {
            let Some(&min) = minima.get(inst) else {
                return Err(Error::Missing(format!("reference {reference} has no run on {inst}")));
            };
            ratios.push(mean(ms) / min);
        }
        out.insert(alg.clone(), mean(&ratios));
    }
    Ok(out)
}

/// Smallest `D` over all runs of `algorithm` per instance, for use as an
/// alternative normalization in [`mnpm`].
pub fn bounds_from_algorithm(rows: &[ResultRow], algorithm: &str) -> BTreeMap<String, f64> {
    let mut out: BTreeMap<String, f64> = BTreeMap::new();
    for row in rows.iter().filter(|r| r.algorithm == algorithm) {
        let e = out.entry(row.instance.clone()).or_insert(f64::INFINITY);
        *e = e.min(row.d_last);
    }
    out
}

/// Jobs and uncertainty level of a table row.
pub type GroupKey = (usize, Option<f64>);

/// One cell of a size × uncertainty × algorithm grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub n_jobs: usize,
    pub uncertainty: Option<f64>,
    pub algorithm: String,
    pub value: f64,
    pub instances: usize,
}

/// Applies `metric` to every (size, uncertainty) group of rows.
pub fn grid(
    rows: &[ResultRow],
    metric: impl Fn(&[ResultRow]) -> Result<BTreeMap<String, f64>>,
) -> Result<Vec<GridCell>> {
    let mut groups: Vec<(GroupKey, Vec<ResultRow>)> = Vec::new();
    for row in rows {
        let key = (row.n_jobs, row.uncertainty);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, g)) => g.push(row.clone()),
            None => groups.push((key, vec![row.clone()])),
        }
    }
    groups.sort_by(|a, b| {
        a.0 .0
            .cmp(&b.0 .0)
            .then(a.0 .1.unwrap_or(-1.0).total_cmp(&b.0 .1.unwrap_or(-1.0)))
    });
    let mut cells = Vec::new();
    for ((n_jobs, uncertainty), group) in groups {
        for (algorithm, value) in metric(&group)? {
            let instances = group
                .iter()
                .filter(|r| r.algorithm == algorithm)
                .map(|r| r.instance.as_str())
                .collect::<BTreeSet<_>>()
                .len();
            cells.push(GridCell {
                n_jobs,
                uncertainty,
                algorithm,
                value,
                instances,
            });
        }
    }
    Ok(cells)
}

/// Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidParameter(format!(
            "{} x values but {} y values",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::Degenerate("need at least two pairs".into()));
    }
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::Degenerate("zero variance, correlation undefined".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// A random solution by topological completion: repeatedly append a random
/// job-ready activity to its machine order.
pub fn random_solution(shop: &Shop, rng: &mut impl Rng) -> Solution {
    let mut next_in_job = vec![0usize; shop.n_jobs()];
    let mut ready: Vec<usize> = (0..shop.n_jobs()).filter(|&j| !shop.jobs()[j].is_empty()).collect();
    let mut sequences = vec![Vec::new(); shop.n_machines()];
    while !ready.is_empty() {
        let k = rng.random_range(0..ready.len());
        let j = ready[k];
        let a = shop.jobs()[j][next_in_job[j]];
        sequences[shop.activity(a).machine].push(a);
        next_in_job[j] += 1;
        if next_in_job[j] == shop.jobs()[j].len() {
            ready.swap_remove(k);
        }
    }
    Solution::from_sequences_unchecked(sequences)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSpec {
    pub n: usize,
    pub u: f64,
    pub instances: usize,
    pub sols_per_instance: usize,
    pub params: ConfidenceParams,
    pub seed: u64,
    /// Random paths for the `q3` estimate.
    pub q3_paths: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationOutcome {
    /// `(level, q values per instance, r)`.
    pub levels: Vec<(QLevel, Vec<f64>, f64)>,
    pub pairs: usize,
}

impl CorrelationOutcome {
    pub fn r(&self, level: QLevel) -> Option<f64> {
        self.levels.iter().find(|l| l.0 == level).map(|l| l.2)
    }
}

/// Correlation between `make_q(s)` and `D(s)` over random solutions of
/// generated instances, for several q levels at once. Each solution is
/// simulated once and compared against every level's deterministic makespan.
pub fn correlation_levels(spec: &CorrelationSpec, levels: &[QLevel]) -> Result<CorrelationOutcome> {
    let generated = generate(&GenSpec {
        n: spec.n,
        u_levels: vec![spec.u],
        seed: spec.seed,
        count: spec.instances,
    })?;
    let mut det: Vec<Vec<f64>> = vec![Vec::new(); levels.len()];
    let mut prob = Vec::new();
    let mut qs: Vec<Vec<f64>> = vec![Vec::new(); levels.len()];
    for (i, g) in generated.iter().enumerate() {
        let inst = &g.instance;
        let table = q_table(
            inst,
            spec.params.alpha(),
            spec.n,
            spec.q3_paths,
            derive_seed(spec.seed, 1_000_000 + i as u64),
        )?;
        let durations: Vec<Vec<f64>> = levels.iter().map(|&l| q_durations(inst, table.get(l))).collect();
        for (k, &l) in levels.iter().enumerate() {
            qs[k].push(table.get(l));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, 2_000_000 + i as u64));
        for s in 0..spec.sols_per_instance {
            let sol = random_solution(&inst.shop, &mut rng);
            let sim_seed = derive_seed(derive_seed(spec.seed, 3_000_000 + i as u64), s as u64);
            let (d, _) = upper_estimate_d(&sol, inst, &spec.params, sim_seed)?;
            prob.push(d);
            for (k, d_q) in durations.iter().enumerate() {
                det[k].push(makespan(&inst.shop, &sol, d_q)?);
            }
        }
    }
    let mut out = Vec::new();
    for (k, &level) in levels.iter().enumerate() {
        out.push((level, qs[k].clone(), pearson(&det[k], &prob)?));
    }
    Ok(CorrelationOutcome {
        levels: out,
        pairs: prob.len(),
    })
}

/// Pearson r between `make_q` and `D` for one q level.
pub fn correlation_study(spec: &CorrelationSpec, level: QLevel) -> Result<f64> {
    Ok(correlation_levels(spec, &[level])?.levels[0].2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairedTest {
    /// Mean of `a - b`.
    pub mean_diff: f64,
    pub p: f64,
    pub significant: bool,
    pub permutations: usize,
}

/// Randomized paired-t test: the observed `|mean(a - b)|` against random
/// sign flips of the paired differences; `p = (1 + #{≥ observed}) / (1 + permutations)`.
pub fn randomized_paired_t(
    a: &[f64],
    b: &[f64],
    permutations: usize,
    p_threshold: f64,
    seed: u64,
) -> Result<PairedTest> {
    if a.len() != b.len() {
        return Err(Error::InvalidParameter(format!(
            "paired samples of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::InvalidParameter("empty samples".into()));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = diffs.len() as f64;
    let observed = diffs.iter().sum::<f64>() / n;
    let tol = 1e-12 * diffs.iter().map(|d| d.abs()).sum::<f64>().max(1e-300);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut at_least = 0usize;
    for _ in 0..permutations {
        let s: f64 = diffs.iter().map(|&d| if rng.random::<bool>() { d } else { -d }).sum();
        if (s / n).abs() >= observed.abs() - tol {
            at_least += 1;
        }
    }
    let p = (1 + at_least) as f64 / (1 + permutations) as f64;
    Ok(PairedTest {
        mean_diff: observed,
        p,
        significant: p <= p_threshold,
        permutations,
    })
}
