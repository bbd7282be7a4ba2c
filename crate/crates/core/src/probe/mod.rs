//! Procedures lifted out of the extremal arguments: peeling to a
//! minimum-neighbour-degree core, greedy neighbour walks, the randomized
//! chain process with its zones and exact point probabilities, and bound
//! evaluators.

pub mod bounds;
pub mod chain;
pub mod peel;
pub mod walk;

pub use bounds::{
    fr_bound, fr_brute, fr_factor, paper_bounds, thm3_vacuous_at, BoundSelector, BoundValue,
    FrBrute,
};
pub use chain::{
    alpha_ln, chain_point_probability, estimate_zone_prob, estimate_zone_prob_with, in_zone,
    random_set_with_counts, sample_chain, sample_chain_with, zone_of, ChainParams, ChainSample,
    ZoneEstimate, ZoneIndex,
};
pub use peel::{min_neighbor_degree, peel};
pub use walk::{neighbor_walk, WalkOutcome};
