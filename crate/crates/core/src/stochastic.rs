//! Duration distributions and reproducible sampling of duration vectors.
//!
//! Each Monte Carlo trial owns a ChaCha stream derived from
//! `(base_seed, trial_index)`, so a trial's duration vector does not depend on
//! which other trials were drawn before it, or on which thread drew them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::model::{ProbInstance, ValueMode};

/// Smallest sampled duration in real mode.
pub const REAL_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DistKind {
    #[default]
    NormalTruncated,
    Deterministic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DurationDist {
    pub mu: f64,
    pub sigma: f64,
    pub kind: DistKind,
}

impl DurationDist {
    /// Approximately normal duration; `sigma == 0` gives a point mass.
    pub fn normal(mu: f64, sigma: f64) -> Self {
        let kind = if sigma == 0.0 {
            DistKind::Deterministic
        } else {
            DistKind::NormalTruncated
        };
        DurationDist { mu, sigma, kind }
    }

    pub fn fixed(mu: f64) -> Self {
        DurationDist {
            mu,
            sigma: 0.0,
            kind: DistKind::Deterministic,
        }
    }

    /// Maps a standard normal deviate to a positive duration.
    ///
    /// Integer mode rounds to the nearest integer and clamps to at least 1;
    /// real mode clamps to [`REAL_FLOOR`].
    pub fn realize(&self, z: f64, mode: ValueMode) -> f64 {
        let raw = match self.kind {
            DistKind::Deterministic => return self.mu,
            DistKind::NormalTruncated if self.sigma == 0.0 => return self.mu,
            DistKind::NormalTruncated => self.mu + self.sigma * z,
        };
        match mode {
            ValueMode::Integer => raw.round().max(1.0),
            ValueMode::Real => raw.max(REAL_FLOOR),
        }
    }
}

/// SplitMix64 finalizer.
pub fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Combines a seed with a stream index into an independent seed.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    mix64(seed ^ mix64(stream.wrapping_add(0x632b_e59b_d9b4_e019)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrialSeed {
    pub base_seed: u64,
    pub trial_index: u64,
}

impl TrialSeed {
    pub fn new(base_seed: u64, trial_index: u64) -> Self {
        TrialSeed { base_seed, trial_index }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(derive_seed(self.base_seed, self.trial_index))
    }
}

/// Writes one sampled duration per activity into `out`.
///
/// One standard normal deviate is consumed per activity in id order, also for
/// deterministic activities, so trials stay aligned across instances that
/// share a structure.
pub fn sample_into(inst: &ProbInstance, seed: TrialSeed, out: &mut Vec<f64>) {
    let mut rng = seed.rng();
    out.clear();
    out.extend(inst.dists.iter().map(|dist| {
        let z: f64 = rng.sample(StandardNormal);
        dist.realize(z, inst.mode)
    }));
}

pub fn sample_vector(inst: &ProbInstance, seed: TrialSeed) -> Vec<f64> {
    let mut out = Vec::with_capacity(inst.dists.len());
    sample_into(inst, seed, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::Shop;

    fn mean_sd(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, var.sqrt())
    }

    #[test]
    fn zero_sigma_returns_means() {
        let det = fixtures::two_job_det();
        let inst = ProbInstance::new(
            det.shop.clone(),
            det.durations.iter().map(|&d| DurationDist::normal(d, 0.0)).collect(),
            ValueMode::Real,
        )
        .unwrap();
        for t in 0..50 {
            assert_eq!(sample_vector(&inst, TrialSeed::new(3, t)), det.durations);
        }
    }

    #[test]
    fn running_example_moments() {
        let inst = fixtures::two_job_prob();
        let samples: Vec<f64> = (0..100_000)
            .map(|t| sample_vector(&inst, TrialSeed::new(11, t))[1])
            .collect();
        let (mean, sd) = mean_sd(&samples);
        assert!((mean - 2.0).abs() < 0.01, "mean {mean}");
        assert!((sd - 0.5).abs() < 0.02, "sd {sd}");
    }

    #[test]
    fn integer_mode_floor() {
        let shop = Shop::from_routings(&[vec![0]], 1).unwrap();
        let inst = ProbInstance::new(shop, vec![DurationDist::normal(1.0, 1.0)], ValueMode::Integer).unwrap();
        for t in 0..10_000 {
            let d = sample_vector(&inst, TrialSeed::new(5, t))[0];
            assert!(d >= 1.0 && d.fract() == 0.0);
        }
    }

    #[test]
    fn trials_are_order_independent() {
        let inst = fixtures::two_job_prob();
        let forward: Vec<Vec<f64>> = (0..20).map(|t| sample_vector(&inst, TrialSeed::new(9, t))).collect();
        for t in (0..20).rev() {
            assert_eq!(sample_vector(&inst, TrialSeed::new(9, t)), forward[t as usize]);
        }
        assert_ne!(forward[0], forward[1]);
    }

    #[test]
    fn activities_are_uncorrelated() {
        let inst = fixtures::two_job_prob();
        let n = 100_000;
        let draws: Vec<Vec<f64>> = (0..n).map(|t| sample_vector(&inst, TrialSeed::new(21, t))).collect();
        for (a, b) in [(1, 2), (1, 3), (2, 3)] {
            let xs: Vec<f64> = draws.iter().map(|v| v[a]).collect();
            let ys: Vec<f64> = draws.iter().map(|v| v[b]).collect();
            let (mx, sx) = mean_sd(&xs);
            let (my, sy) = mean_sd(&ys);
            let cov = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / (n as f64 - 1.0);
            let r = cov / (sx * sy);
            assert!(r.abs() < 0.02, "corr({a},{b}) = {r}");
        }
    }

    #[test]
    fn truncation_bias_is_small() {
        let shop = Shop::from_routings(&[vec![0]], 1).unwrap();
        for (mode, mu) in [(ValueMode::Real, 4.0), (ValueMode::Integer, 40.0)] {
            let inst = ProbInstance::new(shop.clone(), vec![DurationDist::normal(mu, 0.5 * mu)], mode).unwrap();
            let xs: Vec<f64> = (0..100_000)
                .map(|t| sample_vector(&inst, TrialSeed::new(2, t))[0])
                .collect();
            let (mean, _) = mean_sd(&xs);
            assert!((mean - mu).abs() / mu < 0.01, "{mode:?}: mean {mean}");
        }
    }
}
