//! Exact optimal quantization for piecewise-uniform distributions on the line.
//!
//! Everything that decides optimality runs in exact rational arithmetic
//! ([`Rational`]). Floating point appears only in the independent checks
//! ([`oracle::lloyd`]) and in the point-process statistics of [`stochastic`].
//!
//! The crate is `no_std` and needs only `alloc`. File formats, JSON/CSV output
//! and the command-line front end live in the companion `pwquant` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod allocation;
pub mod canonical;
pub mod distribution;
mod error;
pub mod oracle;
pub mod rational;
pub mod stochastic;

pub use allocation::{
    best_grouped_quantizer, optimal_allocations, piece_weights, quantizer_of_allocation, Allocation,
};
pub use canonical::{
    next_sequence, pair_split_optimum, quantizer_of_sequence, sequence_error, sequence_of_order,
    CanonicalChain, CanonicalSequence,
};
pub use distribution::{PiecewiseUniform, QuantizerSet, TailMoments, UniformPiece};
pub use error::Error;
pub use rational::Rational;

/// Exact `V_n` for any supported `(distribution, n)` pair.
///
/// `n = 1` is the variance. For the infinite family `n >= 2` goes through the
/// canonical-sequence induction; for finite lists `n >= pieces` goes through
/// the allocation rule. Anything else has no exact engine and returns `None`.
pub fn optimal_error(dist: &PiecewiseUniform, n: usize) -> Option<Rational> {
    match (dist, n) {
        (_, 0) => None,
        (_, 1) => Some(dist.variance()),
        (PiecewiseUniform::InfiniteGeometric, n) => {
            sequence_of_order(n).ok().map(|s| sequence_error(&s))
        }
        (PiecewiseUniform::Finite(_), n) => optimal_allocations(dist, n)
            .ok()
            .and_then(|a| a.into_iter().next())
            .map(|a| a.error),
    }
}
