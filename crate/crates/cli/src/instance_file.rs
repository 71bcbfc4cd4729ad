//! Plain-text instance files.
//!
//! ```text
//! # probjss instance
//! name two-job
//! mode real
//! jobs 2
//! machines 3
//! meta source hand-written
//! job 0 1 0 2 2 0.5 1 3 0.5
//! job 0 4 0.5 1 5 0
//! ```
//!
//! Each `job` line lists the job's activities in order as
//! `machine mu sigma` triples. Numbers are written in their shortest form
//! that parses back to the same `f64`, so files round-trip exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use probjss::generate::Generated;
use probjss::{DurationDist, ProbInstance, Shop, ValueMode};

use crate::error::{CliError, CliResult};

pub const EXTENSION: &str = "pjs";
const HEADER: &str = "# probjss instance";

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceFile {
    pub name: String,
    /// Free-form `key value` pairs; the generator records its parameters here.
    pub meta: BTreeMap<String, String>,
    pub instance: ProbInstance,
}

impl InstanceFile {
    pub fn new(name: impl Into<String>, instance: ProbInstance) -> Self {
        InstanceFile {
            name: name.into(),
            meta: BTreeMap::new(),
            instance,
        }
    }

    pub fn from_generated(g: &Generated) -> Self {
        let m = &g.meta;
        let meta = [
            ("n", m.n.to_string()),
            ("u", m.u.to_string()),
            ("seed", m.seed.to_string()),
            ("base", m.base_index.to_string()),
            ("routing", m.routing.clone()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        InstanceFile {
            name: m.name.clone(),
            meta,
            instance: g.instance.clone(),
        }
    }

    /// Uncertainty level recorded by the generator.
    pub fn uncertainty(&self) -> Option<f64> {
        self.meta.get("u")?.parse().ok()
    }

    pub fn to_text(&self) -> String {
        let inst = &self.instance;
        let mut out = String::new();
        let mode = match inst.mode {
            ValueMode::Integer => "integer",
            ValueMode::Real => "real",
        };
        let _ = writeln!(out, "{HEADER}");
        let _ = writeln!(out, "name {}", self.name);
        let _ = writeln!(out, "mode {mode}");
        let _ = writeln!(out, "jobs {}", inst.shop.n_jobs());
        let _ = writeln!(out, "machines {}", inst.shop.n_machines());
        for (k, v) in &self.meta {
            let _ = writeln!(out, "meta {k} {v}");
        }
        for job in inst.shop.jobs() {
            out.push_str("job");
            for &a in job {
                let d = &inst.dists[a];
                let _ = write!(out, " {} {} {}", inst.shop.activity(a).machine, d.mu, d.sigma);
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let bad = |line: usize, msg: &str| CliError::Data(format!("line {line}: {msg}"));
        let mut name = None;
        let mut mode = None;
        let mut n_jobs = None;
        let mut n_machines = None;
        let mut meta = BTreeMap::new();
        let mut routes: Vec<Vec<usize>> = Vec::new();
        let mut dists = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match key {
                "name" => name = Some(rest.to_string()),
                "mode" => {
                    mode = Some(match rest {
                        "integer" => ValueMode::Integer,
                        "real" => ValueMode::Real,
                        _ => return Err(bad(lineno, "mode must be integer or real")),
                    })
                }
                "jobs" => n_jobs = Some(rest.parse::<usize>().map_err(|_| bad(lineno, "bad job count"))?),
                "machines" => n_machines = Some(rest.parse::<usize>().map_err(|_| bad(lineno, "bad machine count"))?),
                "meta" => {
                    let (k, v) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                    if k.is_empty() {
                        return Err(bad(lineno, "meta line without key"));
                    }
                    meta.insert(k.to_string(), v.trim().to_string());
                }
                "job" => {
                    let fields: Vec<&str> = rest.split_whitespace().collect();
                    if fields.is_empty() || !fields.len().is_multiple_of(3) {
                        return Err(bad(lineno, "job line must hold machine mu sigma triples"));
                    }
                    let mut route = Vec::new();
                    for t in fields.chunks(3) {
                        let m = t[0].parse::<usize>().map_err(|_| bad(lineno, "bad machine index"))?;
                        let mu = t[1].parse::<f64>().map_err(|_| bad(lineno, "bad mean"))?;
                        let sigma = t[2].parse::<f64>().map_err(|_| bad(lineno, "bad standard deviation"))?;
                        route.push(m);
                        dists.push(DurationDist::normal(mu, sigma));
                    }
                    routes.push(route);
                }
                other => return Err(bad(lineno, &format!("unknown key {other:?}"))),
            }
        }

        let mode = mode.ok_or_else(|| CliError::Data("missing mode line".into()))?;
        let n_machines = n_machines.ok_or_else(|| CliError::Data("missing machines line".into()))?;
        if let Some(n) = n_jobs {
            if n != routes.len() {
                return Err(CliError::Data(format!("header says {n} jobs, found {}", routes.len())));
            }
        }
        let shop = Shop::from_routings(&routes, n_machines)?;
        let instance = ProbInstance::new(shop, dists, mode)?;
        Ok(InstanceFile {
            name: name.unwrap_or_default(),
            meta,
            instance,
        })
    }

    /// Reads a file; an unnamed instance takes the file stem as its name.
    pub fn read(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let mut file = Self::parse(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        if file.name.is_empty() {
            file.name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
        }
        Ok(file)
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        fs::write(path, self.to_text()).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use probjss::fixtures;
    use probjss::generate::{generate, GenSpec};

    #[test]
    fn two_job_round_trip() {
        let file = InstanceFile::new("two-job", fixtures::two_job_prob());
        let text = file.to_text();
        assert!(text.contains("job 0 1 0 2 2 0.5 1 3 0.5\n"), "{text}");
        assert_eq!(InstanceFile::parse(&text).unwrap(), file);
    }

    #[test]
    fn generated_round_trip() {
        let spec = GenSpec {
            n: 5,
            u_levels: vec![0.1, 0.5, 1.0],
            seed: 3,
            count: 4,
        };
        for g in generate(&spec).unwrap() {
            let file = InstanceFile::from_generated(&g);
            let back = InstanceFile::parse(&file.to_text()).unwrap();
            assert_eq!(back, file);
            assert_eq!(back.uncertainty(), Some(g.meta.u));
        }
    }

    #[test]
    fn awkward_reals_round_trip() {
        let shop = Shop::from_routings(&[vec![0, 1]], 2).unwrap();
        let dists = vec![
            DurationDist::normal(0.1 + 0.2, 1.0 / 3.0),
            DurationDist::normal(1e-7, 123456.789e10),
        ];
        let inst = ProbInstance::new(shop, dists, ValueMode::Real).unwrap();
        let file = InstanceFile::new("x", inst);
        assert_eq!(InstanceFile::parse(&file.to_text()).unwrap(), file);
    }

    #[test]
    fn rejects_malformed() {
        assert!(InstanceFile::parse("machines 2\njob 0 1 0\n").is_err());
        assert!(InstanceFile::parse("mode real\nmachines 2\njob 0 1\n").is_err());
        assert!(InstanceFile::parse("mode real\nmachines 2\njob 0 -1 0\n").is_err());
        assert!(InstanceFile::parse("mode real\nmachines 1\njob 3 1 0\n").is_err());
        assert!(InstanceFile::parse("mode real\njobs 2\nmachines 1\njob 0 1 0\n").is_err());
        assert!(InstanceFile::parse("mode real\nmachines 1\nwidth 3\n").is_err());
    }
}
