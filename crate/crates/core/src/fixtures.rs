//! The two-job, five-activity example instance and its four solutions.
//!
//! Job 0 is `(A1, A2, A3)` and job 1 is `(A4, A5)`, i.e. activity ids 0..=4.
//! A1 and A4 share machine 0, A3 and A5 share machine 1, A2 runs alone on
//! machine 2.

use crate::model::{DetInstance, ProbInstance, Shop, Solution, ValueMode};
use crate::stochastic::DurationDist;

pub fn two_job_shop() -> Shop {
    Shop::from_routings(&[vec![0, 2, 1], vec![0, 1]], 3).expect("static instance")
}

/// Durations `(1, 2, 3, 4, 5)`.
pub fn two_job_det() -> DetInstance {
    DetInstance::new(two_job_shop(), vec![1.0, 2.0, 3.0, 4.0, 5.0], ValueMode::Real).expect("static instance")
}

/// Means `(1, 2, 3, 4, 5)` with standard deviation 0.5 on A2, A3 and A4.
pub fn two_job_prob() -> ProbInstance {
    two_job_prob_with_sigma(0.5)
}

pub fn two_job_prob_with_sigma(sigma: f64) -> ProbInstance {
    let dists = [(1.0, 0.0), (2.0, sigma), (3.0, sigma), (4.0, sigma), (5.0, 0.0)]
        .into_iter()
        .map(|(mu, s)| DurationDist::normal(mu, s))
        .collect();
    ProbInstance::new(two_job_shop(), dists, ValueMode::Real).expect("static instance")
}

/// `[s_a, s_b, s_c, s_d]`: A1/A4 order crossed with A3/A5 order.
pub fn two_job_solutions() -> [Solution; 4] {
    let shop = two_job_shop();
    let make = |m0: [usize; 2], m1: [usize; 2]| {
        Solution::new(&shop, vec![m0.to_vec(), m1.to_vec(), vec![1]]).expect("static solution")
    };
    [
        make([0, 3], [2, 4]),
        make([0, 3], [4, 2]),
        make([3, 0], [2, 4]),
        make([3, 0], [4, 2]),
    ]
}
