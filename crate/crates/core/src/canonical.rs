//! Optimal quantizers for the infinite geometric family.
//!
//! An optimal `n`-point set puts `n_j >= 1` equally spaced points on each of
//! the first `k` pieces and one point at the conditional mean of everything
//! beyond piece `k`. The block counts `n_1, ..., n_k` (printed with a trailing
//! `1` for the tail point) form the canonical sequence of order
//! `n = 1 + Σ n_j`, and
//!
//! ```text
//! V_n = Σ_j 1 / (12 n_j^2 18^j) + (25/204) / 18^k.
//! ```
//!
//! The sequence of order `n + 1` is obtained from the one of order `n` by
//! either adding one point to a single block or opening a new block after the
//! last one, whichever lowers `V` the most. Everything is compared exactly.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_traits::Pow;

use crate::distribution::{geometric_piece, segment_points, tail_moments, QuantizerSet};
use crate::rational::Rational;
use crate::Error;

/// Per-piece point counts `n_1, ..., n_k`, stored without the tail's `1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalSequence {
    blocks: Vec<u32>,
}

impl CanonicalSequence {
    /// Accepts only the shape an optimal sequence can have:
    /// `n_1 > n_2 > ... > n_{k-1} >= n_k = 1` when `k >= 2`.
    pub fn new(blocks: Vec<u32>) -> Result<Self, Error> {
        if blocks.is_empty() {
            return Err(Error::InvalidSequence("no blocks".into()));
        }
        if blocks.contains(&0) {
            return Err(Error::InvalidSequence(format!(
                "{blocks:?} has an empty block"
            )));
        }
        if !has_canonical_shape(&blocks) {
            return Err(Error::InvalidSequence(format!(
                "{blocks:?} is not strictly decreasing down to a final 1"
            )));
        }
        Ok(CanonicalSequence { blocks })
    }

    /// Parses the printed form `{n_1, ..., n_k, 1}`.
    pub fn from_printed(seq: &[u32]) -> Result<Self, Error> {
        match seq.split_last() {
            Some((1, blocks)) => CanonicalSequence::new(blocks.to_vec()),
            _ => Err(Error::InvalidSequence(format!(
                "{seq:?} must end with the tail 1"
            ))),
        }
    }

    pub fn blocks(&self) -> &[u32] {
        &self.blocks
    }

    /// Number of pieces carrying points before the tail.
    pub fn depth(&self) -> usize {
        self.blocks.len()
    }

    pub fn order(&self) -> usize {
        1 + self.blocks.iter().map(|&b| b as usize).sum::<usize>()
    }

    /// The printed form, with the tail's `1` appended.
    pub fn printed(&self) -> Vec<u32> {
        let mut v = self.blocks.clone();
        v.push(1);
        v
    }

    /// The order-2 base case `{1, 1}`.
    pub fn base() -> Self {
        CanonicalSequence {
            blocks: alloc::vec![1],
        }
    }
}

impl fmt::Display for CanonicalSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for b in &self.blocks {
            write!(f, "{b}, ")?;
        }
        f.write_str("1}")
    }
}

pub(crate) fn has_canonical_shape(blocks: &[u32]) -> bool {
    match blocks {
        [] => false,
        [_] => true,
        [init @ .., last] => *last == 1 && init.windows(2).all(|w| w[0] > w[1]),
    }
}

fn pow18(j: usize) -> BigInt {
    BigInt::from(18u32).pow(j as u32)
}

/// `1 / (12 c^2 18^j)`: error of `c` equally spaced points on piece `j`.
fn block_term(j: usize, c: u32) -> Rational {
    let c = BigInt::from(c);
    Rational::from_bigints(BigInt::from(1), BigInt::from(12) * &c * &c * pow18(j)).unwrap()
}

/// `(25/204) / 18^k`: error of the single tail point beyond piece `k`.
fn tail_term(k: usize) -> Rational {
    Rational::from_bigints(BigInt::from(25), BigInt::from(204) * pow18(k)).unwrap()
}

/// `V` for arbitrary positive block counts, canonical shape or not.
pub fn composition_error(blocks: &[u32]) -> Rational {
    let body: Rational = blocks
        .iter()
        .enumerate()
        .map(|(i, &c)| block_term(i + 1, c))
        .sum();
    body + tail_term(blocks.len())
}

/// Exact `V_n` of the quantizer the sequence describes.
pub fn sequence_error(seq: &CanonicalSequence) -> Rational {
    composition_error(&seq.blocks)
}

/// One induction step together with the error it reaches.
fn step(seq: &CanonicalSequence, error: &Rational) -> Result<(CanonicalSequence, Rational), Error> {
    let k = seq.blocks.len();
    // Candidate i < k adds a point to block i; candidate k opens block k+1.
    let mut deltas: Vec<Rational> = seq
        .blocks
        .iter()
        .enumerate()
        .map(|(i, &c)| block_term(i + 1, c + 1) - block_term(i + 1, c))
        .collect();
    deltas.push(block_term(k + 1, 1) + tail_term(k + 1) - tail_term(k));

    let mut best = 0;
    let mut tied = false;
    for (i, d) in deltas.iter().enumerate().skip(1) {
        match d.cmp(&deltas[best]) {
            Ordering::Less => {
                best = i;
                tied = false;
            }
            Ordering::Equal => tied = true,
            Ordering::Greater => {}
        }
    }
    if tied {
        return Err(Error::Tie(format!("successor of {seq}")));
    }

    let mut blocks = seq.blocks.clone();
    if best == k {
        blocks.push(1);
    } else {
        blocks[best] += 1;
    }
    if !has_canonical_shape(&blocks) {
        return Err(Error::InvalidSequence(format!(
            "successor {blocks:?} of {seq} lost the canonical shape"
        )));
    }
    let next_error = error + &deltas[best];
    Ok((CanonicalSequence { blocks }, next_error))
}

/// The canonical sequence of order `n + 1` given the one of order `n`.
pub fn next_sequence(seq: &CanonicalSequence) -> Result<CanonicalSequence, Error> {
    step(seq, &sequence_error(seq)).map(|(s, _)| s)
}

/// Walks the induction from order 2 upward, carrying the exact error along so
/// each step only touches the terms that change.
#[derive(Debug, Clone)]
pub struct CanonicalChain {
    last: Option<(CanonicalSequence, Rational)>,
    done: bool,
}

impl CanonicalChain {
    pub fn new() -> Self {
        CanonicalChain {
            last: None,
            done: false,
        }
    }
}

impl Default for CanonicalChain {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for CanonicalChain {
    type Item = Result<(CanonicalSequence, Rational), Error>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let next = match &self.last {
            None => {
                let base = CanonicalSequence::base();
                let err = sequence_error(&base);
                Ok((base, err))
            }
            Some((seq, err)) => step(seq, err),
        };
        match next {
            Ok(item) => {
                self.last = Some(item.clone());
                Some(Ok(item))
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

pub fn sequence_of_order(n: usize) -> Result<CanonicalSequence, Error> {
    if n < 2 {
        return Err(Error::OrderTooSmall { n, min: 2 });
    }
    CanonicalChain::new()
        .nth(n - 2)
        .expect("chain is unbounded")
        .map(|(s, _)| s)
}

/// Error contributed by `n_i` points on piece `i` and `m - n_i` on piece
/// `i + 1`, written as `(18m^2 - 36 m n_i + 19 n_i^2) / (12 * 18^(i+1) n_i^2 (m - n_i)^2)`.
pub fn pair_split_error(m: u32, n_i: u32, i: u32) -> Result<Rational, Error> {
    if n_i == 0 || n_i >= m {
        return Err(Error::InvalidArgument(format!(
            "split {n_i} of {m} leaves an empty piece"
        )));
    }
    if i == 0 {
        return Err(Error::InvalidPieceIndex(0));
    }
    let (m, n, rest) = (BigInt::from(m), BigInt::from(n_i), BigInt::from(m - n_i));
    let numer =
        BigInt::from(18) * &m * &m - BigInt::from(36) * &m * &n + BigInt::from(19) * &n * &n;
    let denom = BigInt::from(12) * pow18(i as usize + 1) * &n * &n * &rest * &rest;
    Rational::from_bigints(numer, denom)
}

/// Best split `(n_i, n_{i+1})` of `m` points over two consecutive pieces,
/// found by comparing every integer split exactly. The answer does not
/// depend on `i`.
pub fn pair_split_optimum(m: u32, i: u32) -> Result<(u32, u32), Error> {
    if m < 2 {
        return Err(Error::OrderTooSmall {
            n: m as usize,
            min: 2,
        });
    }
    let mut best: Option<(u32, Rational)> = None;
    let mut tied = false;
    for n in 1..m {
        let e = pair_split_error(m, n, i)?;
        match &best {
            Some((_, b)) if e == *b => tied = true,
            Some((_, b)) if e > *b => {}
            _ => {
                best = Some((n, e));
                tied = false;
            }
        }
    }
    if tied {
        return Err(Error::Tie(format!("pair split of {m}")));
    }
    let (n, _) = best.expect("m >= 2 gives at least one split");
    Ok((n, m - n))
}

/// Real-valued stationary point of the pair-split objective,
/// `m (18 - 3 * 12^(1/3) + 18^(1/3)) / 19`.
///
/// Only a rough guide: rounding it is off by one for some `m` (for `m = 9`
/// it gives 6.514, i.e. 7, while the exact optimum is 6). Nothing on the
/// correctness path uses it.
pub fn pair_split_estimate(m: u32) -> f64 {
    let m = m as f64;
    (18.0 * m - 3.0 * libm::cbrt(12.0) * m + libm::cbrt(18.0) * m) / 19.0
}

/// The optimal point set a canonical sequence describes, with its exact error.
pub fn quantizer_of_sequence(seq: &CanonicalSequence) -> QuantizerSet {
    let k = seq.depth();
    let blocks = seq
        .blocks
        .iter()
        .enumerate()
        .map(|(i, &c)| segment_points(&geometric_piece(i as u32 + 1), c as usize));
    let tail = tail_moments(k as u32);
    let tail_point = QuantizerSet {
        points: alloc::vec![tail.mean],
        distortion: tail.central,
    };
    QuantizerSet::concat(blocks.chain(core::iter::once(tail_point)))
}
