//! Splitting `n` points across the pieces of a finite piecewise-uniform
//! distribution.
//!
//! With `c_j >= 1` equally spaced points on piece `j`, the error is the
//! separable sum `Σ w_j / c_j^2`, where `w_j = mass_j * length_j^2 / 12`.
//! Each term is convex and decreasing in `c_j`, so handing out points one at
//! a time to the piece with the largest marginal gain reaches the minimum.
//! The full set of minimizers is then read off from the marginal gains that
//! tie at the cut-off.
//!
//! The sum equals the true distortion whenever every Voronoi cell stays inside
//! its own piece, which is what gaps between pieces buy (as in
//! [`PiecewiseUniform::three_piece`]). [`quantizer_of_allocation`] reports the
//! distortion it actually measures.

use alloc::format;
use alloc::vec::Vec;

use crate::distribution::{segment_points, PiecewiseUniform, QuantizerSet};
use crate::rational::Rational;
use crate::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocation {
    pub counts: Vec<u32>,
    pub error: Rational,
}

impl Allocation {
    pub fn total(&self) -> usize {
        self.counts.iter().map(|&c| c as usize).sum()
    }
}

/// `w_j` such that `c` points on piece `j` contribute exactly `w_j / c^2`.
pub fn piece_weights(dist: &PiecewiseUniform) -> Result<Vec<Rational>, Error> {
    match dist {
        PiecewiseUniform::Finite(pieces) => Ok(pieces
            .iter()
            .map(|p| {
                let len = p.length();
                p.mass() * &len * &len * Rational::recip_of(12)
            })
            .collect()),
        PiecewiseUniform::InfiniteGeometric => Err(Error::NotFinite),
    }
}

pub fn allocation_error(weights: &[Rational], counts: &[u32]) -> Rational {
    weights
        .iter()
        .zip(counts)
        .map(|(w, &c)| {
            w.checked_div(&Rational::integer(c as i64 * c as i64))
                .unwrap()
        })
        .sum()
}

/// Decrease in `w / c^2` from giving a piece holding `c` points one more.
fn gain(w: &Rational, c: u32) -> Rational {
    let c = c as i64;
    let f = Rational::new(2 * c + 1, c * c * (c + 1) * (c + 1)).unwrap();
    w * &f
}

/// Every allocation of `n` points (at least one per piece) that minimizes
/// `Σ w_j / c_j^2`, in decreasing lexicographic order of counts.
pub fn optimal_allocations(dist: &PiecewiseUniform, n: usize) -> Result<Vec<Allocation>, Error> {
    let weights = piece_weights(dist)?;
    let m = weights.len();
    if n < m {
        return Err(Error::OrderTooSmall { n, min: m });
    }
    let mut counts = alloc::vec![1u32; m];
    let mut cutoff: Option<Rational> = None;
    for _ in 0..n - m {
        let mut best = 0;
        let mut best_gain = gain(&weights[0], counts[0]);
        for j in 1..m {
            let g = gain(&weights[j], counts[j]);
            if g > best_gain {
                best = j;
                best_gain = g;
            }
        }
        counts[best] += 1;
        cutoff = Some(best_gain);
    }

    let Some(cutoff) = cutoff else {
        let error = allocation_error(&weights, &counts);
        return Ok(alloc::vec![Allocation { counts, error }]);
    };

    // Gains above the cut-off must all be taken; of the gains equal to it
    // (at most one per piece, since gains fall strictly), any `free` will do.
    let mut base = Vec::with_capacity(m);
    let mut tied = Vec::new();
    for (j, (w, &c)) in weights.iter().zip(&counts).enumerate() {
        let above = (1..c).filter(|&k| gain(w, k) > cutoff).count() as u32;
        base.push(1 + above);
        let at_cutoff = (c.saturating_sub(1).max(1)..=c).any(|k| gain(w, k) == cutoff);
        if at_cutoff {
            tied.push(j);
        }
    }
    let taken: usize = base.iter().map(|&b| b as usize).sum();
    let free = n - taken;
    if free > tied.len() {
        return Err(Error::Tie(format!(
            "cannot place {free} points among {} tied pieces",
            tied.len()
        )));
    }

    let mut out = Vec::new();
    for_each_subset(tied.len(), free, &mut |chosen| {
        let mut c = base.clone();
        for &t in chosen {
            c[tied[t]] += 1;
        }
        let error = allocation_error(&weights, &c);
        out.push(Allocation { counts: c, error });
    });
    out.sort_by(|a, b| b.counts.cmp(&a.counts));
    debug_assert!(out.windows(2).all(|w| w[0].error == w[1].error));
    Ok(out)
}

/// Calls `f` with every `k`-subset of `0..n`, as increasing index lists.
fn for_each_subset(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    go(0, n, k, &mut Vec::with_capacity(k), f);
}

/// The point set an allocation describes: equally spaced midpoints on each
/// piece. The attached distortion is measured, not taken from `alloc.error`.
pub fn quantizer_of_allocation(
    dist: &PiecewiseUniform,
    alloc: &Allocation,
) -> Result<QuantizerSet, Error> {
    let PiecewiseUniform::Finite(pieces) = dist else {
        return Err(Error::NotFinite);
    };
    if alloc.counts.len() != pieces.len() {
        return Err(Error::InvalidArgument(format!(
            "{} counts for {} pieces",
            alloc.counts.len(),
            pieces.len()
        )));
    }
    if alloc.counts.contains(&0) {
        return Err(Error::InvalidArgument(
            "every piece needs at least one point".into(),
        ));
    }
    let mut set = QuantizerSet::concat(
        pieces
            .iter()
            .zip(&alloc.counts)
            .map(|(p, &c)| segment_points(p, c as usize)),
    );
    set.distortion = dist.distortion(&set.points)?;
    Ok(set)
}

/// Fewer points than pieces: the best quantizer among those that give each
/// point a run of whole pieces and are fixed points of the centroid map
/// (each point the conditional mean of its run, each midpoint inside the gap
/// between runs). Returns an error when no grouping is self-consistent.
///
/// This is an exact candidate, not a proof of optimality; Lloyd iteration in
/// [`crate::oracle`] is the cross-check.
pub fn best_grouped_quantizer(dist: &PiecewiseUniform, n: usize) -> Result<QuantizerSet, Error> {
    let PiecewiseUniform::Finite(pieces) = dist else {
        return Err(Error::NotFinite);
    };
    let m = pieces.len();
    if n == 0 || n > m {
        return Err(Error::InvalidArgument(format!("{n} points for {m} pieces")));
    }
    let mut best: Option<QuantizerSet> = None;
    let mut failure = None;
    for_each_subset(m - 1, n - 1, &mut |cuts| {
        if failure.is_some() {
            return;
        }
        // run i covers pieces starts[i] ..= ends[i]
        let starts: Vec<usize> = core::iter::once(0)
            .chain(cuts.iter().map(|&c| c + 1))
            .collect();
        let ends: Vec<usize> = cuts
            .iter()
            .copied()
            .chain(core::iter::once(m - 1))
            .collect();
        let points: Result<Vec<Rational>, Error> = starts
            .iter()
            .zip(&ends)
            .map(|(&a, &b)| dist.conditional_mean(pieces[a].left(), pieces[b].right()))
            .collect();
        let points = match points {
            Ok(p) => p,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        let half = Rational::recip_of(2);
        let consistent = points.windows(2).zip(&ends).all(|(w, &t)| {
            let mid = (&w[0] + &w[1]) * &half;
            pieces[t].right() <= &mid && &mid <= pieces[t + 1].left()
        });
        if !consistent {
            return;
        }
        match dist.distortion(&points) {
            Ok(d) => {
                if best.as_ref().is_none_or(|b| d < b.distortion) {
                    best = Some(QuantizerSet {
                        points,
                        distortion: d,
                    });
                }
            }
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    best.ok_or_else(|| {
        Error::InvalidArgument(format!(
            "no self-consistent grouping of {m} pieces into {n}"
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::r;
    use crate::UniformPiece;
    use alloc::vec;

    fn counts(v: &[Allocation]) -> Vec<Vec<u32>> {
        v.iter().map(|a| a.counts.clone()).collect()
    }

    #[test]
    fn weights() {
        assert_eq!(
            piece_weights(&PiecewiseUniform::three_piece()).unwrap(),
            vec![r(1, 216), r(1, 3888), r(1, 3888)]
        );
        assert_eq!(
            piece_weights(&PiecewiseUniform::uniform()).unwrap(),
            vec![r(1, 12)]
        );
        let halves = PiecewiseUniform::finite(vec![
            UniformPiece::new(r(0, 1), r(1, 2), r(1, 1)).unwrap(),
            UniformPiece::new(r(1, 2), r(1, 1), r(1, 1)).unwrap(),
        ])
        .unwrap();
        assert_eq!(piece_weights(&halves).unwrap(), vec![r(1, 96), r(1, 96)]);
        assert_eq!(
            piece_weights(&PiecewiseUniform::InfiniteGeometric),
            Err(Error::NotFinite)
        );
    }

    #[test]
    fn three_piece_allocations() {
        let d = PiecewiseUniform::three_piece();
        let a = optimal_allocations(&d, 7).unwrap();
        assert_eq!(counts(&a), vec![vec![4, 2, 1], vec![4, 1, 2]]);
        assert!(a.iter().all(|x| x.error == r(19, 31104)));

        let a = optimal_allocations(&d, 100).unwrap();
        assert_eq!(counts(&a), vec![vec![56, 22, 22]]);
        assert_eq!(a[0].error, r(1873, 737662464));

        let a = optimal_allocations(&d, 3).unwrap();
        assert_eq!(counts(&a), vec![vec![1, 1, 1]]);
        assert_eq!(a[0].error, r(5, 972));

        let a = optimal_allocations(&d, 4).unwrap();
        assert_eq!(counts(&a), vec![vec![2, 1, 1]]);
        assert_eq!(a[0].error, r(13, 7776));

        assert_eq!(
            optimal_allocations(&d, 2),
            Err(Error::OrderTooSmall { n: 2, min: 3 })
        );
    }

    #[test]
    fn three_piece_quantizers() {
        let d = PiecewiseUniform::three_piece();
        let q = quantizer_of_allocation(&d, &optimal_allocations(&d, 4).unwrap()[0]).unwrap();
        assert_eq!(q.points, vec![r(1, 12), r(1, 4), r(13, 18), r(17, 18)]);
        assert_eq!(q.distortion, r(13, 7776));
        let q = quantizer_of_allocation(&d, &optimal_allocations(&d, 3).unwrap()[0]).unwrap();
        assert_eq!(q.points, vec![r(1, 6), r(13, 18), r(17, 18)]);
    }

    #[test]
    fn one_point_per_piece_gives_midpoints() {
        let two = PiecewiseUniform::finite(vec![
            UniformPiece::new(r(0, 1), r(1, 3), r(3, 2)).unwrap(),
            UniformPiece::new(r(2, 3), r(1, 1), r(3, 2)).unwrap(),
        ])
        .unwrap();
        let a = Allocation {
            counts: vec![1, 1],
            error: Rational::zero(),
        };
        let q = quantizer_of_allocation(&two, &a).unwrap();
        assert_eq!(q.points, vec![r(1, 6), r(5, 6)]);
    }

    #[test]
    fn bad_allocations_are_rejected() {
        let d = PiecewiseUniform::three_piece();
        let a = Allocation {
            counts: vec![1, 1],
            error: Rational::zero(),
        };
        assert!(quantizer_of_allocation(&d, &a).is_err());
        let a = Allocation {
            counts: vec![1, 0, 1],
            error: Rational::zero(),
        };
        assert!(quantizer_of_allocation(&d, &a).is_err());
    }

    #[test]
    fn grouped_quantizers_for_few_points() {
        let d = PiecewiseUniform::three_piece();
        let q = best_grouped_quantizer(&d, 2).unwrap();
        assert_eq!(q.points, vec![r(1, 6), r(5, 6)]);
        assert_eq!(q.distortion, r(11, 972));
        let q = best_grouped_quantizer(&d, 1).unwrap();
        assert_eq!(q.distortion, r(119, 972));
        let q = best_grouped_quantizer(&d, 3).unwrap();
        assert_eq!(q.distortion, r(5, 972));
        assert!(best_grouped_quantizer(&d, 4).is_err());
        assert!(best_grouped_quantizer(&PiecewiseUniform::InfiniteGeometric, 2).is_err());
    }

    #[test]
    fn ties_across_unequal_weights_are_listed() {
        // unit gains are 3/4 at c = 1 and 5/36 at c = 2, so weights in the
        // ratio 5 : 27 make piece 1's first gain meet piece 2's second
        let pieces = vec![
            UniformPiece::new(r(0, 1), r(1, 1), r(5, 32)).unwrap(),
            UniformPiece::new(r(2, 1), r(3, 1), r(27, 32)).unwrap(),
        ];
        let d = PiecewiseUniform::finite(pieces).unwrap();
        let w = piece_weights(&d).unwrap();
        assert_eq!(
            &w[0] * &gain(&Rational::one(), 1),
            &w[1] * &gain(&Rational::one(), 2)
        );
        // n = 4: first extra point goes to piece 2 (gain 27*3/4 > 5*3/4),
        // the second is a tie between piece 1 (c=1) and piece 2 (c=2)
        let a = optimal_allocations(&d, 4).unwrap();
        assert_eq!(counts(&a), vec![vec![2, 2], vec![1, 3]]);
    }
}
