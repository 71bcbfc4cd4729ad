//! The associated deterministic instance for a q-value, the per-instance
//! q-value table, and lower-bound reporting.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::model::{DetInstance, ProbInstance, Solution, ValueMode};

/// Default number of random paths used to estimate `q3`.
pub const Q3_PATHS: usize = 100_000;

/// Inverse of the standard normal distribution function.
pub fn inverse_normal_cdf(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

pub fn normal_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}

/// Duration of one activity in the deterministic problem for `q`.
pub fn q_duration(mu: f64, sigma: f64, q: f64, mode: ValueMode) -> f64 {
    let d = mu + q * sigma;
    match mode {
        ValueMode::Real => d,
        // Guard against `x.999999` results of exact products.
        ValueMode::Integer => (d + 1e-9).floor().max(1.0),
    }
}

/// Deterministic durations `μ + qσ` (floored in integer mode).
pub fn q_durations(inst: &ProbInstance, q: f64) -> Vec<f64> {
    inst.dists
        .iter()
        .map(|d| q_duration(d.mu, d.sigma, q, inst.mode))
        .collect()
}

/// The deterministic instance associated with `inst` and `q`.
pub fn associated_det(inst: &ProbInstance, q: f64) -> Result<DetInstance> {
    if !(q >= 0.0 && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("q must be >= 0, got {q}")));
    }
    DetInstance::new(inst.shop.clone(), q_durations(inst, q), inst.mode)
}

/// The q scalar together with the durations it induces.
#[derive(Debug, Clone, PartialEq)]
pub struct QConfig {
    pub q: f64,
    pub durations: Vec<f64>,
}

impl QConfig {
    pub fn new(inst: &ProbInstance, q: f64) -> Result<Self> {
        let det = associated_det(inst, q)?;
        Ok(QConfig {
            q,
            durations: det.durations,
        })
    }
}

/// The four experiment q-values of an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTable {
    pub q0: f64,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    /// Adequacy multiplier `Φ⁻¹(1 − α)`.
    pub b: f64,
    /// Path length assumed for `q1` (`2n`).
    pub m_q1: usize,
    /// Path length used for `q3` (`n`).
    pub m_q3: usize,
    /// Random paths sampled for `q3`.
    pub paths: usize,
    /// Mean over sampled paths of `√mean(σ²) / mean(σ)`.
    pub mean_ratio: f64,
    /// Set when no activity is uncertain and `q3` fell back to `q1`.
    pub degenerate: bool,
}

impl QTable {
    pub fn get(&self, which: QLevel) -> f64 {
        match which {
            QLevel::Q0 => self.q0,
            QLevel::Q1 => self.q1,
            QLevel::Q2 => self.q2,
            QLevel::Q3 => self.q3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QLevel {
    Q0,
    Q1,
    Q2,
    Q3,
}

impl fmt::Display for QLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            QLevel::Q0 => "q0",
            QLevel::Q1 => "q1",
            QLevel::Q2 => "q2",
            QLevel::Q3 => "q3",
        };
        f.write_str(s)
    }
}

impl FromStr for QLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "q0" => Ok(QLevel::Q0),
            "q1" => Ok(QLevel::Q1),
            "q2" => Ok(QLevel::Q2),
            "q3" => Ok(QLevel::Q3),
            other => Err(Error::InvalidParameter(format!("unknown q level {other:?}"))),
        }
    }
}

/// How a run picks its q: a literal value or a table entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum QChoice {
    Fixed(f64),
    Level(QLevel),
}

impl QChoice {
    /// Resolves against a lazily built table.
    pub fn resolve(&self, table: impl FnOnce() -> QTable) -> f64 {
        match *self {
            QChoice::Fixed(q) => q,
            QChoice::Level(level) => table().get(level),
        }
    }

    pub fn label(&self) -> String {
        match self {
            QChoice::Fixed(q) => format!("fixed:{q}"),
            QChoice::Level(level) => level.to_string(),
        }
    }
}

/// Computes the q-value table.
///
/// `n` is the square-instance size (jobs = activities per job). `q3` averages
/// the ratio `√mean(σ²) / mean(σ)` over `paths` random paths, each made of
/// `n` distinct activities drawn uniformly; zero-σ activities are left out of
/// each path's means.
pub fn q_table(inst: &ProbInstance, alpha: f64, n: usize, paths: usize, seed: u64) -> Result<QTable> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(Error::InvalidParameter(format!("alpha {alpha} outside (0, 0.5]")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let b = inverse_normal_cdf(1.0 - alpha);
    let q1 = b / ((2 * n) as f64).sqrt();
    let sigmas = inst.sigmas();
    let path_len = n.min(sigmas.len());

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ratio_sum = 0.0;
    let mut counted = 0usize;
    if path_len > 0 && sigmas.iter().any(|&s| s > 0.0) {
        for _ in 0..paths {
            let (mut sum, mut sum_sq, mut m) = (0.0, 0.0, 0usize);
            for i in sample(&mut rng, sigmas.len(), path_len) {
                let s = sigmas[i];
                if s > 0.0 {
                    sum += s;
                    sum_sq += s * s;
                    m += 1;
                }
            }
            if m > 0 {
                let m = m as f64;
                ratio_sum += (sum_sq / m).sqrt() / (sum / m);
                counted += 1;
            }
        }
    }
    let (q3, mean_ratio, degenerate) = if counted == 0 {
        (q1, f64::NAN, true)
    } else {
        let ratio = ratio_sum / counted as f64;
        (b / (n as f64).sqrt() * ratio, ratio, false)
    };
    Ok(QTable {
        q0: 0.0,
        q1,
        q2: (q1 + q3) / 2.0,
        q3,
        b,
        m_q1: 2 * n,
        m_q3: n,
        paths,
        mean_ratio,
        degenerate,
    })
}

/// Outcome of a deterministic optimization used for bounding.
#[derive(Debug, Clone, PartialEq)]
pub struct DetSolve {
    pub best: Option<(Solution, f64)>,
    /// Search exhausted the tree, so `best` is optimal.
    pub proven_optimal: bool,
    /// The solver's own lower bound on the optimum.
    pub lower_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundLabel {
    /// The q-deterministic optimum; a strict lower bound on the α-minimum
    /// makespan if q is α-sufficient.
    ConditionalLowerBound,
    /// The search timed out; this is the solver's lower bound on the
    /// q-deterministic optimum, itself conditional on α-sufficiency.
    BoundOfBound,
}

impl fmt::Display for BoundLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundLabel::ConditionalLowerBound => "lower bound (conditional on alpha-sufficiency)",
            BoundLabel::BoundOfBound => "bound-of-bound (deterministic search timed out)",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBound {
    pub q: f64,
    pub value: f64,
    pub proven: bool,
    pub label: BoundLabel,
    pub best: Option<(Solution, f64)>,
}

/// Lower bound on the α-minimum makespan from the q-deterministic problem.
///
/// The caller asserts that `q` is α-sufficient; that cannot be checked here.
pub fn lower_bound(inst: &ProbInstance, q: f64, solver: impl FnOnce(&DetInstance) -> DetSolve) -> Result<LowerBound> {
    let det = associated_det(inst, q)?;
    let outcome = solver(&det);
    match outcome {
        DetSolve {
            best: Some((sol, make)),
            proven_optimal: true,
            ..
        } => Ok(LowerBound {
            q,
            value: make,
            proven: true,
            label: BoundLabel::ConditionalLowerBound,
            best: Some((sol, make)),
        }),
        DetSolve { best, lower_bound, .. } if lower_bound.is_finite() && lower_bound > 0.0 => Ok(LowerBound {
            q,
            value: lower_bound,
            proven: false,
            label: BoundLabel::BoundOfBound,
            best,
        }),
        _ => Err(Error::Unavailable("deterministic solve produced no bound".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{makespan, Shop};
    use crate::stochastic::DurationDist;

    #[test]
    fn inverse_normal_accuracy() {
        assert!((inverse_normal_cdf(0.95) - 1.6449).abs() < 1e-4);
        assert!((inverse_normal_cdf(0.5)).abs() < 1e-9);
        assert!((normal_cdf(inverse_normal_cdf(0.975)) - 0.975).abs() < 1e-9);
    }

    #[test]
    fn running_example_associated_instance() {
        let inst = fixtures::two_job_prob();
        let q = 1.645 / 3f64.sqrt();
        let det = associated_det(&inst, q).unwrap();
        let expect = [1.0, 2.0 + q / 2.0, 3.0 + q / 2.0, 4.0 + q / 2.0, 5.0];
        for (a, b) in det.durations.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        let s_a = &fixtures::two_job_solutions()[0];
        let m = makespan(&det.shop, s_a, &det.durations).unwrap();
        assert!((m - (11.0 + q)).abs() < 1e-12);
        assert!((m - 11.95).abs() < 0.01);
    }

    #[test]
    fn q_zero_gives_means_and_negative_q_is_rejected() {
        let inst = fixtures::two_job_prob();
        assert_eq!(associated_det(&inst, 0.0).unwrap().durations, inst.means());
        assert!(associated_det(&inst, -0.1).is_err());
    }

    #[test]
    fn integer_floor_rule() {
        assert_eq!(q_duration(10.0, 3.0, 0.5, ValueMode::Integer), 11.0);
        assert_eq!(q_duration(10.0, 3.0, 0.0, ValueMode::Integer), 10.0);
        assert_eq!(q_duration(1.0, 0.5, 0.0, ValueMode::Integer), 1.0);
        // 3 * 0.1 * 10 is 2.9999999999999996 in floating point.
        assert_eq!(q_duration(7.0, 3.0 * 0.1, 10.0, ValueMode::Integer), 10.0);
    }

    #[test]
    fn durations_grow_with_q() {
        let inst = fixtures::two_job_prob();
        let lo = q_durations(&inst, 0.3);
        let hi = q_durations(&inst, 0.9);
        assert!(lo.iter().zip(&hi).all(|(a, b)| a <= b));
    }

    fn square(n: usize, sigma: impl Fn(usize) -> f64) -> ProbInstance {
        let routes: Vec<Vec<usize>> = (0..n).map(|j| (0..n).map(|k| (j + k) % n).collect()).collect();
        let shop = Shop::from_routings(&routes, n).unwrap();
        let dists = (0..n * n).map(|i| DurationDist::normal(10.0, sigma(i))).collect();
        ProbInstance::new(shop, dists, ValueMode::Integer).unwrap()
    }

    #[test]
    fn q_table_values() {
        let inst = square(10, |_| 2.0);
        let t = q_table(&inst, 0.05, 10, 2000, 1).unwrap();
        assert_eq!(t.q0, 0.0);
        assert!((t.q1 - 1.6449 / 20f64.sqrt()).abs() < 1e-4);
        assert!((t.q1 - 0.3679).abs() < 1e-4);
        assert!((t.q3 - t.b / 10f64.sqrt()).abs() < 1e-12);
        assert!((t.q2 - (t.q1 + t.q3) / 2.0).abs() < 1e-15);
        assert!(!t.degenerate);
    }

    #[test]
    fn q3_reflects_sigma_spread() {
        let inst = square(6, |i| (i % 7) as f64);
        let t = q_table(&inst, 0.05, 6, 5000, 3).unwrap();
        assert!(t.mean_ratio > 1.0);
        assert!(t.q3 > t.b / 6f64.sqrt());
    }

    #[test]
    fn degenerate_table_without_uncertainty() {
        let inst = square(4, |_| 0.0);
        let t = q_table(&inst, 0.05, 4, 100, 1).unwrap();
        assert!(t.degenerate);
        assert_eq!(t.q3, t.q1);
    }

    #[test]
    fn equal_sigma_path_makes_q_length_equal_theta() {
        // With m uncertain activities of equal σ, q = B/√m makes
        // len_q(π) = μ_π + B·σ_π.
        let b = inverse_normal_cdf(0.95);
        for m in 1..12 {
            let sigma = 0.7;
            let q = b / (m as f64).sqrt();
            let len_q = m as f64 * (5.0 + q * sigma);
            let theta = m as f64 * 5.0 + b * (m as f64 * sigma * sigma).sqrt();
            assert!((len_q - theta).abs() < 1e-9);
        }
    }

    #[test]
    fn lower_bound_labels() {
        let inst = fixtures::two_job_prob();
        let s_a = fixtures::two_job_solutions()[0].clone();
        let proven = lower_bound(&inst, 0.95, |det| {
            let m = makespan(&det.shop, &s_a, &det.durations).unwrap();
            DetSolve {
                best: Some((s_a.clone(), m)),
                proven_optimal: true,
                lower_bound: m,
            }
        })
        .unwrap();
        assert!(proven.proven);
        assert!((proven.value - 11.95).abs() < 1e-9);

        let partial = lower_bound(&inst, 0.95, |_| DetSolve {
            best: None,
            proven_optimal: false,
            lower_bound: 9.0,
        })
        .unwrap();
        assert_eq!(partial.label, BoundLabel::BoundOfBound);
        assert_eq!(partial.value, 9.0);

        let none = lower_bound(&inst, 0.95, |_| DetSolve {
            best: None,
            proven_optimal: false,
            lower_bound: f64::NAN,
        });
        assert!(matches!(none, Err(Error::Unavailable(_))));
    }
}
