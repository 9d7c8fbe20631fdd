//! Piecewise-uniform measures on the line and exact squared-error integrals.
//!
//! Two shapes are supported. A finite list of disjoint uniform pieces, and the
//! infinite geometric family whose `j`-th piece (`j >= 1`) is
//! `[1 - 3^(1-j), 1 - 2*3^(-j)]` with density `(3/2)^j` and mass `2^(-j)`.
//! The infinite family is never materialized: anything that reaches past a
//! finite prefix of pieces goes through [`tail_moments`], which sums the
//! geometric series in closed form.
//!
//! All integrals are taken about an arbitrary origin `a` so that a Voronoi
//! cell's contribution `∫ (x - a)^2 dP` comes out directly, without
//! subtracting large raw moments.

use alloc::format;
use alloc::vec::Vec;
use core::ops::Deref;

use num_bigint::BigInt;
use num_traits::Pow;

use crate::rational::Rational;
use crate::Error;

/// A constant density on `[left, right]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniformPiece {
    left: Rational,
    right: Rational,
    density: Rational,
}

impl UniformPiece {
    pub fn new(left: Rational, right: Rational, density: Rational) -> Result<Self, Error> {
        if left >= right {
            return Err(Error::InvalidDistribution(format!(
                "piece [{left}, {right}] is empty"
            )));
        }
        if !density.is_positive() {
            return Err(Error::InvalidDistribution(format!(
                "density {density} is not positive"
            )));
        }
        let piece = UniformPiece {
            left,
            right,
            density,
        };
        let mass = piece.mass();
        if mass > Rational::one() {
            return Err(Error::InvalidDistribution(format!(
                "piece mass {mass} exceeds 1"
            )));
        }
        Ok(piece)
    }

    pub fn left(&self) -> &Rational {
        &self.left
    }

    pub fn right(&self) -> &Rational {
        &self.right
    }

    pub fn density(&self) -> &Rational {
        &self.density
    }

    pub fn length(&self) -> Rational {
        &self.right - &self.left
    }

    pub fn mass(&self) -> Rational {
        &self.density * &self.length()
    }

    pub fn midpoint(&self) -> Rational {
        (&self.left + &self.right) * Rational::recip_of(2)
    }

    /// Moments of the piece restricted to `[lo, hi]` (either side unbounded
    /// when `None`), taken about `about`.
    fn moments_on(
        &self,
        lo: Option<&Rational>,
        hi: Option<&Rational>,
        about: &Rational,
    ) -> Moments {
        let l = match lo {
            Some(lo) => lo.max(&self.left),
            None => &self.left,
        };
        let h = match hi {
            Some(hi) => hi.min(&self.right),
            None => &self.right,
        };
        if l >= h {
            return Moments::zero();
        }
        let dl = l - about;
        let dh = h - about;
        let d = &self.density;
        let sq_l = &dl * &dl;
        let sq_h = &dh * &dh;
        Moments {
            mass: d * &(h - l),
            first: d * &(&sq_h - &sq_l) * Rational::recip_of(2),
            second: d * &(&sq_h * &dh - &sq_l * &dl) * Rational::recip_of(3),
        }
    }
}

/// `∫ 1`, `∫ (x - a)` and `∫ (x - a)^2` over some set, for a fixed origin `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Moments {
    pub mass: Rational,
    pub first: Rational,
    pub second: Rational,
}

impl Moments {
    fn zero() -> Self {
        Moments {
            mass: Rational::zero(),
            first: Rational::zero(),
            second: Rational::zero(),
        }
    }

    fn add(&mut self, other: Moments) {
        self.mass = &self.mass + &other.mass;
        self.first = &self.first + &other.first;
        self.second = &self.second + &other.second;
    }
}

/// A validated, ordered list of disjoint pieces whose masses sum to 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceList(Vec<UniformPiece>);

impl PieceList {
    pub fn new(pieces: Vec<UniformPiece>) -> Result<Self, Error> {
        if pieces.is_empty() {
            return Err(Error::InvalidDistribution("no pieces".into()));
        }
        for w in pieces.windows(2) {
            if w[0].right > w[1].left {
                return Err(Error::InvalidDistribution(format!(
                    "pieces [{}, {}] and [{}, {}] overlap or are out of order",
                    w[0].left, w[0].right, w[1].left, w[1].right
                )));
            }
        }
        let total: Rational = pieces.iter().map(UniformPiece::mass).sum();
        if total != Rational::one() {
            return Err(Error::InvalidDistribution(format!(
                "masses sum to {total}, not 1"
            )));
        }
        Ok(PieceList(pieces))
    }
}

impl Deref for PieceList {
    type Target = [UniformPiece];
    fn deref(&self) -> &[UniformPiece] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PiecewiseUniform {
    Finite(PieceList),
    InfiniteGeometric,
}

/// Mass, mean, and second central moment (unnormalized) of the infinite
/// family beyond piece `k`, i.e. of `J_{k+1} ∪ J_{k+2} ∪ ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailMoments {
    pub mass: Rational,
    pub mean: Rational,
    pub central: Rational,
}

impl TailMoments {
    fn about(&self, a: &Rational) -> Moments {
        let shift = &self.mean - a;
        Moments {
            mass: self.mass.clone(),
            first: &self.mass * &shift,
            second: &self.central + &(&self.mass * &(&shift * &shift)),
        }
    }
}

fn pow3(e: u32) -> BigInt {
    BigInt::from(3u32).pow(e)
}

/// `sum_{j > k} q^(-j) = q^(-k) / (q - 1)`.
fn geometric_tail(q: i64, k: u32) -> Rational {
    let qk: BigInt = BigInt::from(q).pow(k);
    Rational::from_bigints(BigInt::from(1), qk * BigInt::from(q - 1)).expect("q > 1")
}

/// Piece `j >= 1` of the infinite geometric family.
pub fn geometric_piece(j: u32) -> UniformPiece {
    assert!(j >= 1, "geometric pieces are indexed from 1");
    let one = Rational::one();
    let left = &one - &Rational::from_bigints(BigInt::from(1), pow3(j - 1)).unwrap();
    let right = &one - &Rational::from_bigints(BigInt::from(2), pow3(j)).unwrap();
    let density =
        Rational::from_bigints(BigInt::from(3u32).pow(j), BigInt::from(2u32).pow(j)).unwrap();
    UniformPiece {
        left,
        right,
        density,
    }
}

/// Closed-form moments of the infinite family beyond piece `k` (`k = 0` is
/// the whole distribution).
///
/// Piece `j` has mass `2^-j`, centre `c_j = 1 - (5/2) 3^-j` and length
/// `3^-j`, so the raw moments are sums of geometric series in `1/2`, `1/6`
/// and `1/18`:
/// `∫ x = Σ 2^-j c_j` and `∫ x^2 = Σ 2^-j (c_j^2 + 9^-j / 12)`.
pub fn tail_moments(k: u32) -> TailMoments {
    let half = geometric_tail(2, k);
    let sixth = geometric_tail(6, k);
    let eighteenth = geometric_tail(18, k);
    let mass = half.clone();
    let first = &half - &(sixth.clone() * Rational::new(5, 2).unwrap());
    let second = &(&half - &(sixth * Rational::integer(5)))
        + &(eighteenth * Rational::new(25 * 3 + 1, 12).unwrap());
    let mean = first.checked_div(&mass).expect("tail mass is positive");
    let central = &second - &(&mass * &(&mean * &mean));
    TailMoments {
        mass,
        mean,
        central,
    }
}

impl PiecewiseUniform {
    pub fn finite(pieces: Vec<UniformPiece>) -> Result<Self, Error> {
        Ok(PiecewiseUniform::Finite(PieceList::new(pieces)?))
    }

    /// Uniform on `[0, 1]`.
    pub fn uniform() -> Self {
        PiecewiseUniform::finite(alloc::vec![UniformPiece::new(
            Rational::zero(),
            Rational::one(),
            Rational::one()
        )
        .unwrap()])
        .unwrap()
    }

    /// Density `3/2` on `[0, 1/3]` and `9/4` on `[2/3, 7/9] ∪ [8/9, 1]`.
    pub fn three_piece() -> Self {
        let r = crate::rational::r;
        PiecewiseUniform::finite(alloc::vec![
            UniformPiece::new(r(0, 1), r(1, 3), r(3, 2)).unwrap(),
            UniformPiece::new(r(2, 3), r(7, 9), r(9, 4)).unwrap(),
            UniformPiece::new(r(8, 9), r(1, 1), r(9, 4)).unwrap(),
        ])
        .unwrap()
    }

    /// Number of pieces, `None` for the infinite family.
    pub fn piece_count(&self) -> Option<usize> {
        match self {
            PiecewiseUniform::Finite(p) => Some(p.len()),
            PiecewiseUniform::InfiniteGeometric => None,
        }
    }

    /// Piece `j`, indexed from 1.
    pub fn piece(&self, j: usize) -> Result<UniformPiece, Error> {
        match self {
            _ if j == 0 => Err(Error::InvalidPieceIndex(j)),
            PiecewiseUniform::Finite(p) => p.get(j - 1).cloned().ok_or(Error::InvalidPieceIndex(j)),
            PiecewiseUniform::InfiniteGeometric => {
                let j = u32::try_from(j).map_err(|_| Error::InvalidPieceIndex(j))?;
                Ok(geometric_piece(j))
            }
        }
    }

    /// Moments of `P` restricted to `[lo, hi]` about `about`.
    pub(crate) fn moments_between(
        &self,
        lo: Option<&Rational>,
        hi: Option<&Rational>,
        about: &Rational,
    ) -> Moments {
        let mut acc = Moments::zero();
        match self {
            PiecewiseUniform::Finite(pieces) => {
                for p in pieces.iter() {
                    acc.add(p.moments_on(lo, hi, about));
                }
            }
            PiecewiseUniform::InfiniteGeometric => {
                let one = Rational::one();
                if lo.is_some_and(|lo| *lo >= one) {
                    return acc;
                }
                // The support accumulates at 1 from the left, so any upper
                // bound at or beyond 1 swallows a whole tail.
                let open_top = hi.is_none_or(|h| *h >= one);
                for j in 1u32.. {
                    let p = geometric_piece(j);
                    if hi.is_some_and(|h| p.left >= *h) {
                        break;
                    }
                    if lo.is_some_and(|lo| p.right <= *lo) {
                        continue;
                    }
                    if open_top && lo.is_none_or(|lo| p.left >= *lo) {
                        acc.add(tail_moments(j - 1).about(about));
                        break;
                    }
                    acc.add(p.moments_on(lo, hi, about));
                }
            }
        }
        acc
    }

    pub fn mean(&self) -> Rational {
        let m = self.moments_between(None, None, &Rational::zero());
        m.first.checked_div(&m.mass).expect("total mass is 1")
    }

    /// Variance, which is also the error of the best single point.
    pub fn variance(&self) -> Rational {
        let mean = self.mean();
        self.moments_between(None, None, &mean).second
    }

    /// Mass of `[lo, hi]`.
    pub fn mass_between(&self, lo: &Rational, hi: &Rational) -> Rational {
        self.moments_between(Some(lo), Some(hi), &Rational::zero())
            .mass
    }

    /// `E[X | lo <= X <= hi]`.
    pub fn conditional_mean(&self, lo: &Rational, hi: &Rational) -> Result<Rational, Error> {
        self.conditional_mean_between(Some(lo), Some(hi))
    }

    pub(crate) fn conditional_mean_between(
        &self,
        lo: Option<&Rational>,
        hi: Option<&Rational>,
    ) -> Result<Rational, Error> {
        let m = self.moments_between(lo, hi, &Rational::zero());
        if !m.mass.is_positive() {
            return Err(Error::ZeroMeasure);
        }
        m.first.checked_div(&m.mass)
    }

    /// Optimal `n` points for `P` conditioned on piece `j` (the midpoints of
    /// `n` equal subdivisions), with the error they contribute on that piece.
    pub fn segment_quantizer(&self, j: usize, n: usize) -> Result<QuantizerSet, Error> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "segment quantizer needs n >= 1".into(),
            ));
        }
        let piece = self.piece(j)?;
        Ok(segment_points(&piece, n))
    }

    /// Exact `∫ min_a (x - a)^2 dP` for a fixed strictly increasing point set.
    ///
    /// Points may sit anywhere, including where `P` has no mass.
    pub fn distortion(&self, points: &[Rational]) -> Result<Rational, Error> {
        check_increasing(points)?;
        let bounds = voronoi_bounds(points);
        Ok(points
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let lo = if i == 0 { None } else { Some(&bounds[i - 1]) };
                let hi = bounds.get(i);
                self.moments_between(lo, hi, a).second
            })
            .sum())
    }

    /// Each point's Voronoi-cell mass and conditional mean (`None` for cells
    /// with zero mass).
    pub fn cell_centroids(&self, points: &[Rational]) -> Result<Vec<Option<Rational>>, Error> {
        check_increasing(points)?;
        let bounds = voronoi_bounds(points);
        Ok((0..points.len())
            .map(|i| {
                let lo = if i == 0 { None } else { Some(&bounds[i - 1]) };
                self.conditional_mean_between(lo, bounds.get(i)).ok()
            })
            .collect())
    }
}

pub(crate) fn segment_points(piece: &UniformPiece, n: usize) -> QuantizerSet {
    let len = piece.length();
    let two_n = Rational::integer(2 * n as i64);
    let points = (1..=n)
        .map(|i| {
            let frac = Rational::integer(2 * i as i64 - 1)
                .checked_div(&two_n)
                .unwrap();
            &piece.left + &(&frac * &len)
        })
        .collect();
    let nn = Rational::integer((n * n) as i64);
    let distortion = (piece.mass() * &len * &len)
        .checked_div(&(Rational::integer(12) * nn))
        .unwrap();
    QuantizerSet { points, distortion }
}

fn check_increasing(points: &[Rational]) -> Result<(), Error> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if points.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::PointsNotIncreasing);
    }
    Ok(())
}

fn voronoi_bounds(points: &[Rational]) -> Vec<Rational> {
    let half = Rational::recip_of(2);
    points.windows(2).map(|w| (&w[0] + &w[1]) * &half).collect()
}

/// A sorted point set together with the exact error it achieves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizerSet {
    pub points: Vec<Rational>,
    pub distortion: Rational,
}

impl QuantizerSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Concatenates sets that cover disjoint, increasing regions.
    pub(crate) fn concat(parts: impl IntoIterator<Item = QuantizerSet>) -> QuantizerSet {
        let mut points = Vec::new();
        let mut distortion = Rational::zero();
        for p in parts {
            points.extend(p.points);
            distortion = distortion + p.distortion;
        }
        debug_assert!(points.windows(2).all(|w| w[0] < w[1]));
        QuantizerSet { points, distortion }
    }
}
