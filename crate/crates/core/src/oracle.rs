//! Independent checks for the exact engines.
//!
//! * [`brute_force_infinite`] and [`brute_force_finite`] enumerate every
//!   composition of the point budget and evaluate the error on an
//!   integer-scaled objective, so they share no arithmetic with the
//!   incremental rational code they check.
//! * [`lloyd`] is a plain floating-point Lloyd iteration (nearest-point
//!   partition, then move each point to its cell's conditional mean).

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::allocation::{piece_weights, Allocation};
use crate::canonical::CanonicalSequence;
use crate::distribution::PiecewiseUniform;
use crate::rational::Rational;
use crate::Error;

pub const DEFAULT_ENUMERATION_CAP: usize = 20;

fn lcm_upto(n: usize) -> BigInt {
    (1..=n.max(1)).fold(BigInt::one(), |acc, k| acc.lcm(&BigInt::from(k)))
}

/// Visits every composition of `total` into positive parts, with at most
/// `max_parts` parts (or exactly `exact_parts` when given).
fn for_each_composition(
    total: usize,
    max_parts: usize,
    exact_parts: Option<usize>,
    f: &mut impl FnMut(&[u32]),
) {
    fn go(
        left: usize,
        max_parts: usize,
        exact: Option<usize>,
        cur: &mut Vec<u32>,
        f: &mut impl FnMut(&[u32]),
    ) {
        if left == 0 {
            if exact.is_none_or(|e| e == cur.len()) {
                f(cur);
            }
            return;
        }
        if cur.len() == max_parts {
            return;
        }
        let slots_after = exact.map_or(0, |e| e.saturating_sub(cur.len() + 1));
        for c in 1..=left.saturating_sub(slots_after) {
            cur.push(c as u32);
            go(left - c, max_parts, exact, cur, f);
            cur.pop();
        }
    }
    go(total, max_parts, exact_parts, &mut Vec::new(), f);
}

/// The canonical sequence of order `n` by exhaustive search over every
/// composition of `n - 1` points into leading pieces, using the default cap.
pub fn brute_force_infinite(n: usize) -> Result<CanonicalSequence, Error> {
    brute_force_infinite_capped(n, DEFAULT_ENUMERATION_CAP)
}

pub fn brute_force_infinite_capped(n: usize, cap: usize) -> Result<CanonicalSequence, Error> {
    if n < 2 {
        return Err(Error::OrderTooSmall { n, min: 2 });
    }
    if n > cap {
        return Err(Error::InvalidArgument(format!(
            "order {n} exceeds enumeration cap {cap}"
        )));
    }
    let budget = n - 1;
    // Everything is multiplied by 12 * 204 * 18^budget * lcm(1..budget)^2,
    // which turns every term into an integer.
    let l = lcm_upto(budget);
    let l2 = &l * &l;
    let p18: Vec<BigInt> = (0..=budget)
        .map(|e| BigInt::from(18u32).pow(e as u32))
        .collect();
    let block = |j: usize, c: u32| -> BigInt {
        BigInt::from(204) * &p18[budget - j] * &l2 / BigInt::from(c as u64 * c as u64)
    };
    let tail = |k: usize| -> BigInt { BigInt::from(25 * 12) * &p18[budget - k] * &l2 };

    let mut best: Option<BigInt> = None;
    let mut winners: Vec<Vec<u32>> = Vec::new();
    for_each_composition(budget, budget, None, &mut |parts| {
        let mut v = tail(parts.len());
        for (i, &c) in parts.iter().enumerate() {
            v += block(i + 1, c);
        }
        match best.as_ref().map(|b| v.cmp(b)) {
            Some(Ordering::Greater) => {}
            Some(Ordering::Equal) => winners.push(parts.to_vec()),
            _ => {
                best = Some(v);
                winners.clear();
                winners.push(parts.to_vec());
            }
        }
    });
    if winners.len() != 1 {
        return Err(Error::Tie(format!(
            "{} minimizers at order {n}: {winners:?}",
            winners.len()
        )));
    }
    CanonicalSequence::new(winners.pop().unwrap())
}

/// Every allocation of `n` points (one or more per piece) minimizing the
/// separable error, by exhaustive search.
pub fn brute_force_finite(dist: &PiecewiseUniform, n: usize) -> Result<Vec<Allocation>, Error> {
    let weights = piece_weights(dist)?;
    let m = weights.len();
    if n < m {
        return Err(Error::OrderTooSmall { n, min: m });
    }
    let den = weights
        .iter()
        .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
    let l = lcm_upto(n);
    let l2 = &l * &l;
    let scale = &den * &l2;
    // table[j][c] = w_j * scale / c^2, an integer
    let table: Vec<Vec<BigInt>> = weights
        .iter()
        .map(|w| {
            let wj = w.numer() * (&den / w.denom());
            (0..=n)
                .map(|c| {
                    if c == 0 {
                        BigInt::zero()
                    } else {
                        &wj * &l2 / BigInt::from(c * c)
                    }
                })
                .collect()
        })
        .collect();

    let mut best: Option<BigInt> = None;
    let mut winners: Vec<Vec<u32>> = Vec::new();
    for_each_composition(n, m, Some(m), &mut |parts| {
        let v: BigInt = parts
            .iter()
            .enumerate()
            .map(|(j, &c)| &table[j][c as usize])
            .sum();
        match best.as_ref().map(|b| v.cmp(b)) {
            Some(Ordering::Greater) => {}
            Some(Ordering::Equal) => winners.push(parts.to_vec()),
            _ => {
                best = Some(v);
                winners.clear();
                winners.push(parts.to_vec());
            }
        }
    });
    let error = Rational::from_bigints(best.expect("n >= m has a composition"), scale)?;
    winners.sort_by(|a, b| b.cmp(a));
    Ok(winners
        .into_iter()
        .map(|counts| Allocation {
            counts,
            error: error.clone(),
        })
        .collect())
}

/// A floating-point view of a distribution, for [`lloyd`].
#[derive(Debug, Clone, PartialEq)]
pub enum FloatModel {
    /// `(left, right, density)` triples in increasing order.
    Pieces(Vec<(f64, f64, f64)>),
    /// The infinite geometric family, with the part beyond the last piece a
    /// cell touches summed in closed form.
    Geometric,
}

/// Pieces beyond this index are narrower than `f64` resolution near 1.
const GEOMETRIC_PIECE_LIMIT: i32 = 40;

#[derive(Debug, Clone, Copy, Default)]
struct CellMoments {
    mass: f64,
    first: f64,
    second: f64,
}

impl CellMoments {
    fn add_piece(&mut self, l: f64, h: f64, density: f64, about: f64) {
        if l >= h {
            return;
        }
        let (dl, dh) = (l - about, h - about);
        self.mass += density * (h - l);
        self.first += density * (dh * dh - dl * dl) / 2.0;
        self.second += density * (dh * dh * dh - dl * dl * dl) / 3.0;
    }
}

impl FloatModel {
    pub fn from_distribution(dist: &PiecewiseUniform) -> Self {
        match dist {
            PiecewiseUniform::Finite(p) => FloatModel::Pieces(
                p.iter()
                    .map(|p| (p.left().to_f64(), p.right().to_f64(), p.density().to_f64()))
                    .collect(),
            ),
            PiecewiseUniform::InfiniteGeometric => FloatModel::Geometric,
        }
    }

    fn geometric_piece(j: i32) -> (f64, f64, f64) {
        let third = libm::pow(3.0, -(j as f64));
        (
            1.0 - 3.0 * third,
            1.0 - 2.0 * third,
            libm::pow(1.5, j as f64),
        )
    }

    /// Moments of the part of the model in `[lo, hi]` about `about`.
    fn cell(&self, lo: f64, hi: f64, about: f64) -> CellMoments {
        let mut acc = CellMoments::default();
        match self {
            FloatModel::Pieces(pieces) => {
                for &(l, r, d) in pieces {
                    acc.add_piece(l.max(lo), r.min(hi), d, about);
                }
            }
            FloatModel::Geometric => {
                if lo >= 1.0 {
                    return acc;
                }
                let open_top = hi >= 1.0;
                for j in 1..=GEOMETRIC_PIECE_LIMIT {
                    let (l, r, d) = Self::geometric_piece(j);
                    if l >= hi {
                        break;
                    }
                    if r <= lo {
                        continue;
                    }
                    if open_top && l >= lo {
                        let k = (j - 1) as f64;
                        let mass = libm::pow(0.5, k);
                        let shift = 1.0 - 0.5 * libm::pow(3.0, -k) - about;
                        let central = 25.0 / 204.0 * libm::pow(18.0, -k);
                        acc.mass += mass;
                        acc.first += mass * shift;
                        acc.second += central + mass * shift * shift;
                        break;
                    }
                    acc.add_piece(l.max(lo), r.min(hi), d, about);
                }
            }
        }
        acc
    }

    /// Inverse CDF.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match self {
            FloatModel::Pieces(pieces) => {
                let mut acc = 0.0;
                for &(l, r, d) in pieces {
                    let mass = d * (r - l);
                    if u <= acc + mass {
                        return l + (u - acc) / d;
                    }
                    acc += mass;
                }
                pieces.last().map_or(0.0, |p| p.1)
            }
            FloatModel::Geometric => {
                let mut before = 0.0;
                for j in 1..=GEOMETRIC_PIECE_LIMIT {
                    let (l, r, d) = Self::geometric_piece(j);
                    let mass = d * (r - l);
                    if u <= before + mass {
                        return l + (u - before) / d;
                    }
                    before += mass;
                }
                1.0
            }
        }
    }

    /// Error of a strictly increasing point set.
    pub fn distortion(&self, points: &[f64]) -> f64 {
        self.cells(points).iter().map(|c| c.second).sum()
    }

    fn cells(&self, points: &[f64]) -> Vec<CellMoments> {
        let n = points.len();
        (0..n)
            .map(|i| {
                let lo = if i == 0 {
                    f64::NEG_INFINITY
                } else {
                    0.5 * (points[i - 1] + points[i])
                };
                let hi = if i + 1 == n {
                    f64::INFINITY
                } else {
                    0.5 * (points[i] + points[i + 1])
                };
                self.cell(lo, hi, points[i])
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LloydOptions {
    pub max_iter: usize,
    /// Stop once no point moves by this much or more.
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for LloydOptions {
    fn default() -> Self {
        LloydOptions {
            max_iter: 20_000,
            tol: 1e-14,
            restarts: 50,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LloydState {
    pub points: Vec<f64>,
    pub distortion: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Error of the point set entering each iteration.
    pub trace: Vec<f64>,
}

/// `n` independent draws from the model, sorted and nudged apart if any
/// coincide.
pub fn random_init(model: &FloatModel, n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..n)
        .map(|_| model.quantile(rng.random::<f64>()))
        .collect();
    pts.sort_by(f64::total_cmp);
    for i in 1..n {
        if pts[i] <= pts[i - 1] {
            pts[i] = pts[i - 1] + 1e-9;
        }
    }
    pts
}

/// Lloyd iteration from `initial`. A cell that loses all its mass restarts
/// the run from a fresh random draw (up to a fixed number of times).
pub fn lloyd(
    model: &FloatModel,
    initial: &[f64],
    opts: &LloydOptions,
) -> Result<LloydState, Error> {
    if initial.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if initial.windows(2).any(|w| w[0] >= w[1]) || initial.iter().any(|p| !p.is_finite()) {
        return Err(Error::PointsNotIncreasing);
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance {} must be positive",
            opts.tol
        )));
    }
    let n = initial.len();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut points = initial.to_vec();
    let mut trace = Vec::new();
    let mut reseeds = 0;
    for iter in 1..=opts.max_iter {
        let cells = model.cells(&points);
        if cells.iter().any(|c| c.mass <= 0.0) {
            reseeds += 1;
            if reseeds > 100 {
                break;
            }
            points = random_init(model, n, &mut rng);
            trace.clear();
            continue;
        }
        let d: f64 = cells.iter().map(|c| c.second).sum();
        trace.push(d);
        let mut moved: f64 = 0.0;
        for (p, c) in points.iter_mut().zip(&cells) {
            let step = c.first / c.mass;
            moved = moved.max(step.abs());
            *p += step;
        }
        debug_assert!(points.windows(2).all(|w| w[0] <= w[1]));
        if moved < opts.tol {
            let distortion = model.distortion(&points);
            return Ok(LloydState {
                points,
                distortion,
                iterations: iter,
                converged: true,
                trace,
            });
        }
    }
    let distortion = model.distortion(&points);
    Ok(LloydState {
        points,
        distortion,
        iterations: opts.max_iter,
        converged: false,
        trace,
    })
}

fn better(a: &LloydState, b: &LloydState) -> bool {
    match a.distortion.total_cmp(&b.distortion) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => {
            for (x, y) in a.points.iter().zip(&b.points) {
                match x.total_cmp(y) {
                    Ordering::Less => return true,
                    Ordering::Greater => return false,
                    Ordering::Equal => {}
                }
            }
            false
        }
    }
}

/// Best of `opts.restarts` Lloyd runs from random starts.
/// Deterministic for a given seed.
pub fn lloyd_multistart(
    dist: &PiecewiseUniform,
    n: usize,
    opts: &LloydOptions,
) -> Result<LloydState, Error> {
    if n == 0 {
        return Err(Error::EmptyPointSet);
    }
    let model = FloatModel::from_distribution(dist);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<LloydState> = None;
    for run in 0..opts.restarts.max(1) {
        let init = random_init(&model, n, &mut rng);
        let run_opts = LloydOptions {
            seed: opts.seed.wrapping_add(run as u64 + 1),
            ..*opts
        };
        let state = lloyd(&model, &init, &run_opts)?;
        if best.as_ref().is_none_or(|b| better(&state, b)) {
            best = Some(state);
        }
    }
    Ok(best.expect("at least one run"))
}

/// Relative gap `|a - b| / |b|` between a float and an exact value.
pub fn relative_error(approx: f64, exact: &Rational) -> f64 {
    let e = exact.to_f64();
    ((approx - e) / e).abs()
}

/// Exact error of float points, converted to rationals first.
pub fn exact_distortion_of(dist: &PiecewiseUniform, points: &[f64]) -> Result<Rational, Error> {
    let pts = points
        .iter()
        .map(|&p| Rational::from_f64(p))
        .collect::<Result<Vec<_>, _>>()?;
    dist.distortion(&pts)
}
