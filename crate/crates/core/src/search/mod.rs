//! Constructive tree search and the branch-and-bound algorithms built on it.

mod algorithms;
mod engine;

pub use algorithms::{
    bnb_dq_l, bnb_i_bs, bnb_n, bnb_n_with, bnb_tbs, find_first_sim_leaves, find_opt_bnb, find_opt_sim_leaves,
    solve_det, FindNextBnb, OptOutcome, SimLeavesOutcome,
};
pub use engine::{BranchChoice, Leaf, NodeView, Step, TreeSearch, Verdict};
