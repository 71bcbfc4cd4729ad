use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use log::{info, warn};
use probjss::analytics::{grid, mndm, mnpm, pearson, randomized_paired_t, GridCell, GroupKey};
use probjss::generate::generate;
use probjss::qbounds::{lower_bound, Q3_PATHS};
use probjss::search::solve_det;
use probjss::{Algorithm, Budget, ConfidenceParams, GenSpec, ProbInstance, QChoice, ResultRow, RunConfig};

use crate::args::{BoundArgs, BudgetArgs, GenerateArgs, Metric, ReportArgs, SolveArgs};
use crate::error::{CliError, CliResult};
use crate::instance_file::{InstanceFile, EXTENSION};
use crate::results::{load_bounds, read_results, BoundRow, RowSink};

/// Writes the instance files and prints `name<TAB>path` per file.
pub fn generate_cmd(args: &GenerateArgs, out: &mut dyn Write) -> CliResult<()> {
    let spec = GenSpec {
        n: args.n,
        u_levels: args.u.clone(),
        seed: args.seed,
        count: args.count,
    };
    let instances = generate(&spec)?;
    fs::create_dir_all(&args.out).map_err(|e| CliError::Data(format!("{}: {e}", args.out.display())))?;
    for g in &instances {
        let file = InstanceFile::from_generated(g);
        let path = args.out.join(format!("{}.{EXTENSION}", file.name));
        file.write(&path)?;
        writeln!(out, "{}\t{}", file.name, path.display())?;
    }
    Ok(())
}

fn resolve_q(choice: QChoice, inst: &ProbInstance, alpha: f64, seed: u64) -> CliResult<f64> {
    if let QChoice::Fixed(q) = choice {
        if !(q >= 0.0 && q.is_finite()) {
            return Err(CliError::Usage(format!("q must be >= 0, got {q}")));
        }
        return Ok(q);
    }
    let shop = &inst.shop;
    let n = shop.max_job_len();
    if shop.n_jobs() != n || shop.n_machines() != n {
        warn!("instance is not square; table q values use n = {n}");
    }
    let table = probjss::q_table(inst, alpha, n, Q3_PATHS, seed)?;
    if table.degenerate {
        warn!("all standard deviations are zero; q3 falls back to q1");
    }
    Ok(choice.resolve(|| table))
}

fn check_budget(b: &BudgetArgs) -> CliResult<()> {
    if !(b.global_time_scale > 0.0 && b.global_time_scale.is_finite()) {
        return Err(CliError::Usage(format!(
            "global time scale must be positive, got {}",
            b.global_time_scale
        )));
    }
    Ok(())
}

pub fn solve_cmd(args: &SolveArgs) -> CliResult<()> {
    check_budget(&args.budget)?;
    let params = ConfidenceParams::new(args.alpha, args.k, args.trials)?;
    if args.k == 0.0 || args.trials == 1 {
        warn!(
            "K = {} and N = {}: estimates have very wide variance",
            args.k, args.trials
        );
    }
    let files = args
        .instances
        .iter()
        .map(|p| InstanceFile::read(p))
        .collect::<CliResult<Vec<_>>>()?;
    let mut sink = RowSink::open(args.out.as_deref())?;
    let choice = args.q.choice();
    let time_limit = args.budget.seconds();
    let mut empty = Vec::new();

    for file in &files {
        let inst = &file.instance;
        let q = resolve_q(choice, inst, args.alpha, args.seed)?;
        for r in 0..args.runs {
            let seed = args.seed.wrapping_add(r);
            let mut cfg = RunConfig::new(args.algorithm)
                .with_params(params)
                .with_seed(seed)
                .with_q(q);
            cfg.time_limit = time_limit;
            cfg.work_limit = args.budget.work_limit;
            cfg.t_initial = args.t_initial;
            cfg.dedupe_sims = args.dedupe_sims;
            let rec = probjss::solve(inst, &cfg)?;
            info!(
                "{} {} seed {seed}: D = {}, {} simulations",
                file.name, args.algorithm, rec.d_best, rec.simulations
            );
            if !rec.d_best.is_finite() {
                empty.push(format!("{} (seed {seed})", file.name));
            }
            sink.write(&ResultRow {
                instance: file.name.clone(),
                algorithm: args.algorithm.to_string(),
                seed,
                alpha: args.alpha,
                k: args.k,
                trials: args.trials,
                q_mode: choice.label(),
                q,
                time_limit,
                time_scale: args.budget.global_time_scale,
                work_limit: args.budget.work_limit,
                d_first: rec.d_first,
                d_last: rec.d_best,
                det_makespan: rec.det_makespan,
                nodes: rec.nodes,
                simulations: rec.simulations,
                moves: rec.moves,
                completed: rec.completed,
                n_jobs: inst.shop.n_jobs(),
                n_machines: inst.shop.n_machines(),
                uncertainty: file.uncertainty(),
                wall_seconds: rec.wall_seconds,
            })?;
        }
    }
    if empty.is_empty() {
        Ok(())
    } else {
        Err(CliError::NoResult(format!(
            "no solution evaluated within the budget: {}",
            empty.join(", ")
        )))
    }
}

pub fn bound_cmd(args: &BoundArgs) -> CliResult<()> {
    check_budget(&args.budget)?;
    let files = args
        .instances
        .iter()
        .map(|p| InstanceFile::read(p))
        .collect::<CliResult<Vec<_>>>()?;
    let mut sink = RowSink::open(args.out.as_deref())?;
    let choice = args.q.choice();
    let time_limit = args.budget.seconds();
    let mut missing = Vec::new();
    for file in &files {
        let q = resolve_q(choice, &file.instance, args.alpha, args.seed)?;
        let start = Instant::now();
        let outcome = lower_bound(&file.instance, q, |det| {
            let mut budget = Budget::new(time_limit.map(Duration::from_secs_f64), args.budget.work_limit);
            solve_det(det, &mut budget)
        });
        match outcome {
            Ok(lb) => sink.write(&BoundRow {
                instance: file.name.clone(),
                q_mode: choice.label(),
                q,
                bound: lb.value,
                proven: lb.proven,
                label: lb.label.to_string(),
                time_limit,
                wall_seconds: start.elapsed().as_secs_f64(),
            })?,
            Err(probjss::Error::Unavailable(_)) => missing.push(file.name.clone()),
            Err(e) => return Err(e.into()),
        }
    }
    if missing.is_empty() {
        Ok(())
    } else {
        Err(CliError::NoResult(format!(
            "no bound within the budget: {}",
            missing.join(", ")
        )))
    }
}

struct Table {
    headers: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn print(&self, out: &mut dyn Write) -> CliResult<()> {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.len()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let line = |cells: Vec<&str>| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        writeln!(out, "{}", line(self.headers.clone()))?;
        for row in &self.rows {
            writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
        }
        Ok(())
    }

    fn write_csv(&self, path: &Path) -> CliResult<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn fmt_u(u: Option<f64>) -> String {
    u.map_or_else(|| "-".to_string(), |u| u.to_string())
}

fn groups(rows: &[ResultRow]) -> Vec<(GroupKey, Vec<ResultRow>)> {
    let mut out: Vec<(GroupKey, Vec<ResultRow>)> = Vec::new();
    for row in rows {
        let key = (row.n_jobs, row.uncertainty);
        match out.iter_mut().find(|(k, _)| *k == key) {
            Some((_, g)) => g.push(row.clone()),
            None => out.push((key, vec![row.clone()])),
        }
    }
    out.sort_by(|a, b| {
        a.0 .0
            .cmp(&b.0 .0)
            .then(a.0 .1.unwrap_or(-1.0).total_cmp(&b.0 .1.unwrap_or(-1.0)))
    });
    out
}

/// Warns about algorithms that did not run on every instance of their group.
fn warn_coverage(rows: &[ResultRow]) {
    for ((n, u), group) in groups(rows) {
        let all: BTreeSet<&str> = group.iter().map(|r| r.instance.as_str()).collect();
        let mut per: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for r in &group {
            per.entry(r.algorithm.as_str()).or_default().insert(r.instance.as_str());
        }
        for (alg, seen) in per {
            if seen.len() < all.len() {
                warn!(
                    "n = {n}, u = {}: {alg} has results for {} of {} instances",
                    fmt_u(u),
                    seen.len(),
                    all.len()
                );
            }
        }
    }
}

fn cell_table(cells: Vec<GridCell>, metric: &'static str) -> Table {
    Table {
        headers: vec!["n", "u", "algorithm", metric, "instances"],
        rows: cells
            .into_iter()
            .map(|c| {
                vec![
                    c.n_jobs.to_string(),
                    fmt_u(c.uncertainty),
                    c.algorithm,
                    format!("{:.4}", c.value),
                    c.instances.to_string(),
                ]
            })
            .collect(),
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn report_mnpm(rows: &[ResultRow], bounds_path: Option<&Path>) -> CliResult<Table> {
    let bounds = match bounds_path {
        Some(p) => load_bounds(p)?,
        None => {
            let mut b: BTreeMap<String, f64> = BTreeMap::new();
            for r in rows {
                let e = b.entry(r.instance.clone()).or_insert(f64::INFINITY);
                *e = e.min(r.d_last);
            }
            b
        }
    };
    let unbounded: BTreeSet<&str> = rows
        .iter()
        .filter(|r| !bounds.get(&r.instance).is_some_and(|b| b.is_finite() && *b > 0.0))
        .map(|r| r.instance.as_str())
        .collect();
    if !unbounded.is_empty() {
        warn!(
            "skipping instances without a usable bound: {}",
            unbounded.iter().copied().collect::<Vec<_>>().join(", ")
        );
    }
    let kept: Vec<ResultRow> = rows
        .iter()
        .filter(|r| !unbounded.contains(r.instance.as_str()))
        .cloned()
        .collect();
    if kept.is_empty() {
        return Err(CliError::Data("no result rows with a bound".into()));
    }
    Ok(cell_table(grid(&kept, |g| mnpm(g, &bounds))?, "mnpm"))
}

fn report_mndm(rows: &[ResultRow], reference: Option<Algorithm>) -> CliResult<Table> {
    let reference = match reference {
        Some(a) => a.to_string(),
        None => Algorithm::ALL
            .iter()
            .map(|a| a.to_string())
            .find(|a| rows.iter().any(|r| &r.algorithm == a))
            .or_else(|| rows.first().map(|r| r.algorithm.clone()))
            .unwrap_or_default(),
    };
    let cells = grid(rows, |g| match mndm(g, &reference) {
        Ok(m) => Ok(m),
        Err(e) => {
            warn!("{e}");
            Ok(BTreeMap::new())
        }
    })?;
    Ok(cell_table(cells, "mndm"))
}

fn report_correlation(rows: &[ResultRow]) -> Table {
    let mut table = Table {
        headers: vec!["n", "u", "rows", "r"],
        rows: Vec::new(),
    };
    for ((n, u), group) in groups(rows) {
        let (xs, ys): (Vec<f64>, Vec<f64>) = group
            .iter()
            .filter(|r| r.d_last.is_finite() && r.det_makespan.is_finite())
            .map(|r| (r.det_makespan, r.d_last))
            .unzip();
        match pearson(&xs, &ys) {
            Ok(r) => table
                .rows
                .push(vec![n.to_string(), fmt_u(u), xs.len().to_string(), format!("{r:.4}")]),
            Err(e) => warn!("n = {n}, u = {}: {e}", fmt_u(u)),
        }
    }
    table
}

fn report_ttest(rows: &[ResultRow], args: &ReportArgs) -> CliResult<Table> {
    let mut table = Table {
        headers: vec!["n", "u", "a", "b", "instances", "mean_diff", "p", "result"],
        rows: Vec::new(),
    };
    for ((n, u), group) in groups(rows) {
        let mut per: BTreeMap<&str, BTreeMap<&str, Vec<f64>>> = BTreeMap::new();
        for r in &group {
            per.entry(&r.algorithm)
                .or_default()
                .entry(&r.instance)
                .or_default()
                .push(r.d_last);
        }
        let algs: Vec<&str> = per.keys().copied().collect();
        for (i, a) in algs.iter().enumerate() {
            for b in &algs[i + 1..] {
                let (xs, ys): (Vec<f64>, Vec<f64>) = per[a]
                    .iter()
                    .filter_map(|(inst, da)| per[b].get(inst).map(|db| (mean(da), mean(db))))
                    .filter(|(x, y)| x.is_finite() && y.is_finite())
                    .unzip();
                if xs.is_empty() {
                    warn!("n = {n}, u = {}: {a} and {b} share no finished instances", fmt_u(u));
                    continue;
                }
                let t = randomized_paired_t(&xs, &ys, args.permutations, args.p_threshold, args.seed)?;
                table.rows.push(vec![
                    n.to_string(),
                    fmt_u(u),
                    a.to_string(),
                    b.to_string(),
                    xs.len().to_string(),
                    format!("{:.4}", t.mean_diff),
                    format!("{:.4}", t.p),
                    if t.significant {
                        "significant"
                    } else {
                        "not significant"
                    }
                    .to_string(),
                ]);
            }
        }
    }
    Ok(table)
}

pub fn report_cmd(args: &ReportArgs, out: &mut dyn Write) -> CliResult<()> {
    let rows = read_results(&args.results)?;
    if rows.is_empty() {
        return Err(CliError::Data("no result rows".into()));
    }
    warn_coverage(&rows);
    let table = match args.metric {
        Metric::Mnpm => report_mnpm(&rows, args.bounds.as_deref())?,
        Metric::Mndm => report_mndm(&rows, args.reference)?,
        Metric::Correlation => report_correlation(&rows),
        Metric::Ttest => report_ttest(&rows, args)?,
    };
    table.print(out)?;
    if let Some(path) = &args.csv {
        table.write_csv(path)?;
    }
    Ok(())
}
