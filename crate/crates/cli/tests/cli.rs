use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Duration;

use probjss::qbounds::lower_bound;
use probjss::search::solve_det;
use probjss::{Budget, ResultRow};
use probjss_cli::results::{read_csv, BoundRow};
use probjss_cli::InstanceFile;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_probjss"));
    c.env_remove("PROBJSS_SEED");
    c
}

fn two_job() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/two-job.pjs")
}

fn run(c: &mut Command) -> Output {
    c.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn rows(text: &str) -> Vec<ResultRow> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .unwrap()
}

fn without_wall(mut rows: Vec<ResultRow>) -> Vec<ResultRow> {
    for r in &mut rows {
        r.wall_seconds = 0.0;
    }
    rows
}

#[test]
fn data_file_matches_fixture() {
    let file = InstanceFile::read(&two_job()).unwrap();
    assert_eq!(file.name, "two-job");
    assert_eq!(file.instance, probjss::fixtures::two_job_prob());
}

#[test]
fn generate_thirty_files_reproducibly() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = run(bin()
            .args([
                "generate",
                "--n",
                "4",
                "--u",
                "0.1,0.5,1",
                "--count",
                "10",
                "--seed",
                "7",
                "--out",
            ])
            .arg(dir.path()));
        assert!(o.status.success());
        assert_eq!(stdout(&o).lines().count(), 30);
    }
    let mut names: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 30);
    for name in names {
        let x = fs::read(a.path().join(&name)).unwrap();
        let y = fs::read(b.path().join(&name)).unwrap();
        assert_eq!(x, y, "{name:?}");
        let file = InstanceFile::read(&a.path().join(&name)).unwrap();
        assert_eq!(InstanceFile::parse(&file.to_text()).unwrap(), file);
        assert_eq!(file.instance.shop.len(), 16);
    }
}

#[test]
fn generate_zero_count_prints_empty_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(bin()
        .args(["generate", "--n", "4", "--count", "0", "--out"])
        .arg(dir.path()));
    assert!(o.status.success());
    assert!(stdout(&o).is_empty());
}

#[test]
fn generate_seed_from_environment() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run(bin()
        .env("PROBJSS_SEED", "5")
        .args(["generate", "--n", "3", "--count", "1", "--u", "1", "--out"])
        .arg(a.path()));
    run(bin()
        .args([
            "generate", "--n", "3", "--count", "1", "--u", "1", "--seed", "5", "--out",
        ])
        .arg(b.path()));
    let name = "n3-b000-u1.pjs";
    assert_eq!(
        fs::read(a.path().join(name)).unwrap(),
        fs::read(b.path().join(name)).unwrap()
    );
}

#[test]
fn generate_unwritable_path_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = run(bin()
        .args(["generate", "--n", "3", "--count", "1", "--out"])
        .arg(blocker.join("sub")));
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn solve_two_job_near_published_value() {
    let o = run(bin().arg("solve").arg(two_job()).args([
        "-a",
        "bnb-n",
        "--trials",
        "10000",
        "--runs",
        "3",
        "--time-limit",
        "30",
    ]));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = rows(&stdout(&o));
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert!((r.d_last - 12.16).abs() <= 0.15, "{}", r.d_last);
        assert_eq!(r.trials, 10_000);
    }
    assert_eq!(rows.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![0, 1, 2]);
}

#[test]
fn degenerate_confidence_runs_with_warning() {
    let o = run(bin().arg("solve").arg(two_job()).args([
        "-a",
        "bnb-n",
        "--trials",
        "1",
        "--K",
        "0",
        "--runs",
        "1",
        "--time-limit",
        "5",
    ]));
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("wide variance"));
    assert_eq!(rows(&stdout(&o)).len(), 1);
}

#[test]
fn same_seed_gives_identical_rows() {
    let dir = tempfile::tempdir().unwrap();
    run(bin()
        .args([
            "generate", "--n", "4", "--count", "1", "--u", "0.5", "--seed", "3", "--out",
        ])
        .arg(dir.path()));
    let inst = dir.path().join("n4-b000-u0.5.pjs");
    for alg in ["bnb-n", "bnb-tbs", "tabu-i-bs"] {
        let go = || {
            let o = run(bin().arg("solve").arg(&inst).args([
                "-a",
                alg,
                "--runs",
                "2",
                "--seed",
                "9",
                "--work-limit",
                "3000",
            ]));
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
            without_wall(rows(&stdout(&o)))
        };
        let a = go();
        assert_eq!(a.len(), 2);
        assert_eq!(a, go(), "{alg}");
    }
}

#[test]
fn results_append_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    for alg in ["bnb-n", "tabu-tbs"] {
        let o = run(bin()
            .arg("solve")
            .arg(two_job())
            .args(["-a", alg, "--runs", "2", "--time-limit", "5", "--out"])
            .arg(&out));
        assert!(o.status.success());
    }
    let back: Vec<ResultRow> = read_csv(&out).unwrap();
    assert_eq!(back.len(), 4);
    assert_eq!(back[3].algorithm, "tabu-tbs");
}

#[test]
fn usage_errors_exit_two() {
    let o = run(bin().arg("solve").arg(two_job()).args(["-a", "simulated-annealing"]));
    assert_eq!(o.status.code(), Some(2));
    let o = run(bin()
        .arg("solve")
        .arg(two_job())
        .args(["-a", "bnb-n", "--alpha", "0.7"]));
    assert_eq!(o.status.code(), Some(2));
    let o = run(bin()
        .arg("solve")
        .arg(two_job())
        .args(["-a", "bnb-n", "--q", "1", "--qmode", "q2"]));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_instance_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pjs");
    fs::write(&bad, "mode real\nmachines 1\njob 0 x 0\n").unwrap();
    let o = run(bin().arg("solve").arg(&bad).args(["-a", "bnb-n"]));
    assert_eq!(o.status.code(), Some(3));
    let o = run(bin()
        .arg("solve")
        .arg(dir.path().join("missing.pjs"))
        .args(["-a", "bnb-n"]));
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn no_result_within_budget_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    run(bin()
        .args(["generate", "--n", "6", "--count", "1", "--u", "1", "--out"])
        .arg(dir.path()));
    let inst = dir.path().join("n6-b000-u1.pjs");
    let o = run(bin()
        .arg("solve")
        .arg(&inst)
        .args(["-a", "bnb-dq-l", "--runs", "1", "--work-limit", "1"]));
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
    // the row is still written
    assert_eq!(rows(&stdout(&o)).len(), 1);
}

fn bound_rows(o: &Output) -> Vec<BoundRow> {
    csv::Reader::from_reader(o.stdout.as_slice())
        .deserialize()
        .collect::<Result<_, _>>()
        .unwrap()
}

#[test]
fn bound_two_job() {
    let q = 1.6448536269514722 / 3f64.sqrt();
    let o = run(bin().arg("bound").arg(two_job()).args(["--q", &q.to_string()]));
    assert!(o.status.success());
    let b = &bound_rows(&o)[0];
    assert!((b.bound - 11.95).abs() <= 0.01, "{}", b.bound);
    assert!(b.proven);
}

#[test]
fn bound_without_uncertainty_is_deterministic_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("det.pjs");
    let file = InstanceFile::new("det", probjss::fixtures::two_job_prob_with_sigma(0.0));
    file.write(&path).unwrap();
    for q in ["0", "0.7", "3"] {
        let o = run(bin().arg("bound").arg(&path).args(["--q", q]));
        let b = &bound_rows(&o)[0];
        assert_eq!(b.bound, 11.0);
        assert!(b.proven);
    }
}

#[test]
fn bound_matches_library_call() {
    let dir = tempfile::tempdir().unwrap();
    run(bin()
        .args([
            "generate", "--n", "6", "--count", "1", "--u", "0.5", "--seed", "4", "--out",
        ])
        .arg(dir.path()));
    let path = dir.path().join("n6-b000-u0.5.pjs");
    let o = run(bin()
        .arg("bound")
        .arg(&path)
        .args(["--qmode", "q1", "--work-limit", "20000", "--seed", "4"]));
    assert!(o.status.success());
    let b = &bound_rows(&o)[0];

    let file = InstanceFile::read(&path).unwrap();
    let table = probjss::q_table(&file.instance, 0.05, 6, probjss::qbounds::Q3_PATHS, 4).unwrap();
    assert_eq!(b.q, table.q1);
    let lb = lower_bound(&file.instance, table.q1, |det| {
        let mut budget = Budget::new(None::<Duration>, Some(20_000));
        solve_det(det, &mut budget)
    })
    .unwrap();
    assert_eq!(b.bound, lb.value);
    assert_eq!(b.proven, lb.proven);
}

fn write_rows(path: &Path, rows: &[ResultRow]) {
    let mut w = csv::Writer::from_path(path).unwrap();
    for r in rows {
        w.serialize(r).unwrap();
    }
    w.flush().unwrap();
}

fn sample_row(inst: &str, alg: &str, d: f64) -> ResultRow {
    ResultRow {
        instance: inst.into(),
        algorithm: alg.into(),
        seed: 0,
        alpha: 0.05,
        k: 2.0,
        trials: 1000,
        q_mode: "q1".into(),
        q: 0.3,
        time_limit: Some(1.0),
        time_scale: 1.0,
        work_limit: None,
        d_first: d + 5.0,
        d_last: d,
        det_makespan: d - 10.0,
        nodes: 1,
        simulations: 1,
        moves: 0,
        completed: false,
        n_jobs: 4,
        n_machines: 4,
        uncertainty: Some(1.0),
        wall_seconds: 1.0,
    }
}

#[test]
fn report_single_algorithm_against_itself() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    write_rows(
        &path,
        &[sample_row("a", "bnb-n", 100.0), sample_row("b", "bnb-n", 80.0)],
    );
    let csv_out = dir.path().join("t.csv");
    let o = run(bin()
        .arg("report")
        .arg(&path)
        .arg("--bounds")
        .arg(&path)
        .args(["--metric", "mnpm", "--csv"])
        .arg(&csv_out));
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().nth(1).unwrap().contains("1.0000"), "{text}");
    let table = fs::read_to_string(&csv_out).unwrap();
    assert!(table.starts_with("n,u,algorithm,mnpm,instances"));
}

#[test]
fn report_identical_algorithms_not_significant() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let mut rs = Vec::new();
    for (i, d) in [100.0, 90.0, 120.0, 95.0, 105.0].into_iter().enumerate() {
        rs.push(sample_row(&format!("i{i}"), "bnb-n", d));
        rs.push(sample_row(&format!("i{i}"), "tabu-i-bs", d));
    }
    write_rows(&path, &rs);
    let o = run(bin().arg("report").arg(&path).args(["--metric", "ttest"]));
    assert!(o.status.success());
    assert!(stdout(&o).contains("not significant"));
}

#[test]
fn report_partial_coverage_warns() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    write_rows(
        &path,
        &[
            sample_row("a", "bnb-n", 100.0),
            sample_row("b", "bnb-n", 80.0),
            sample_row("a", "bnb-tbs", 110.0),
        ],
    );
    for metric in ["mnpm", "mndm", "correlation"] {
        let o = run(bin().arg("report").arg(&path).args(["--metric", metric]));
        assert!(o.status.success(), "{metric}");
        assert!(
            String::from_utf8_lossy(&o.stderr).contains("1 of 2 instances"),
            "{metric}"
        );
    }
}
