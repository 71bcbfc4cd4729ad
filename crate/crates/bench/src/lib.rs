//! Shared inputs for the benchmarks.

use probjss::analytics::random_solution;
use probjss::generate::{generate, GenSpec};
use probjss::{ProbInstance, Solution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One generated `n × n` instance at uncertainty `u`.
pub fn instance(n: usize, u: f64) -> ProbInstance {
    let spec = GenSpec {
        n,
        u_levels: vec![u],
        seed: 2024,
        count: 1,
    };
    generate(&spec).expect("valid spec").remove(0).instance
}

pub fn random_solutions(inst: &ProbInstance, count: usize) -> Vec<Solution> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    (0..count).map(|_| random_solution(&inst.shop, &mut rng)).collect()
}
