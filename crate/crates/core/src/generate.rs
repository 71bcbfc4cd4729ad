//! Random square benchmark instances with probabilistic durations.
//!
//! Each base instance draws a uniformly random machine permutation per job
//! and integer means in `1..=99`. Every uncertainty level `u` then reuses the
//! base and draws `σ_i ~ U[0, u·μ_i]`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ProbInstance, Shop, ValueMode};
use crate::stochastic::{derive_seed, DurationDist};

pub const MU_MIN: u32 = 1;
pub const MU_MAX: u32 = 99;

/// Routing rule recorded in instance metadata.
pub const ROUTING: &str = "uniform-permutation";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    /// Jobs, machines and activities per job.
    pub n: usize,
    pub u_levels: Vec<f64>,
    pub seed: u64,
    /// Number of base deterministic instances.
    pub count: usize,
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be >= 1".into()));
        }
        if let Some(u) = self.u_levels.iter().find(|u| !(**u >= 0.0 && u.is_finite())) {
            return Err(Error::InvalidParameter(format!("uncertainty level {u} must be >= 0")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenMeta {
    pub name: String,
    pub n: usize,
    pub u: f64,
    pub seed: u64,
    pub base_index: usize,
    pub routing: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub meta: GenMeta,
    pub instance: ProbInstance,
}

/// Instance name used for files and result rows.
pub fn instance_name(n: usize, base: usize, u: f64) -> String {
    format!("n{n}-b{base:03}-u{u}")
}

/// Routings and means of one base instance.
pub fn base_instance(n: usize, seed: u64, base: usize) -> (Vec<Vec<usize>>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, base as u64));
    let routes: Vec<Vec<usize>> = (0..n)
        .map(|_| {
            let mut r: Vec<usize> = (0..n).collect();
            r.shuffle(&mut rng);
            r
        })
        .collect();
    let mus = (0..n * n).map(|_| rng.random_range(MU_MIN..=MU_MAX) as f64).collect();
    (routes, mus)
}

/// Generates `count × |u_levels|` instances, base-major.
pub fn generate(spec: &GenSpec) -> Result<Vec<Generated>> {
    spec.validate()?;
    let mut out = Vec::with_capacity(spec.count * spec.u_levels.len());
    for base in 0..spec.count {
        let (routes, mus) = base_instance(spec.n, spec.seed, base);
        let shop = Shop::from_routings(&routes, spec.n)?;
        let base_seed = derive_seed(spec.seed, base as u64);
        for (level, &u) in spec.u_levels.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(base_seed, 1 + level as u64));
            let dists = mus
                .iter()
                .map(|&mu| {
                    let sigma = if u == 0.0 { 0.0 } else { rng.random_range(0.0..=u * mu) };
                    DurationDist::normal(mu, sigma)
                })
                .collect();
            let instance = ProbInstance::new(shop.clone(), dists, ValueMode::Integer)?;
            out.push(Generated {
                meta: GenMeta {
                    name: instance_name(spec.n, base, u),
                    n: spec.n,
                    u,
                    seed: spec.seed,
                    base_index: base,
                    routing: ROUTING.to_string(),
                },
                instance,
            });
        }
    }
    Ok(out)
}
