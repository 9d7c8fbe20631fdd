//! Random and Kronecker point sequences on the circle `[0, 1)`, with exact
//! (closed-form, floating point) discrepancy and distortion statistics.
//!
//! Distances are circular, `min(|x - p|, 1 - |x - p|)`. Discrepancy uses the
//! usual interval formulas on the sorted points.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distribution::PiecewiseUniform;
use crate::oracle::FloatModel;
use crate::rational::Rational;
use crate::{optimal_error, Error};

/// Largest denominator `q` for which a `theta` within `1e-12` of some `p/q`
/// is treated as rational and rejected.
pub const RATIONAL_THETA_MAX_DENOM: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    /// Independent uniforms from ChaCha8 seeded with the given value.
    Iid {
        seed: u64,
    },
    Kronecker {
        theta: f64,
    },
    /// Points supplied by the caller.
    Given,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSample {
    pub points: Vec<f64>,
    pub generator: Generator,
}

impl PointSample {
    pub fn from_points(points: Vec<f64>) -> Result<Self, Error> {
        if let Some(p) = points.iter().find(|p| !(0.0..1.0).contains(*p)) {
            return Err(Error::InvalidArgument(format!("point {p} outside [0, 1)")));
        }
        Ok(PointSample {
            points,
            generator: Generator::Given,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn sorted(&self) -> Result<Vec<f64>, Error> {
        if self.points.is_empty() {
            return Err(Error::EmptySample);
        }
        let mut v = self.points.clone();
        v.sort_by(f64::total_cmp);
        Ok(v)
    }
}

pub fn iid_sample(n: usize, seed: u64) -> PointSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PointSample {
        points: uniforms(&mut rng, n),
        generator: Generator::Iid { seed },
    }
}

fn uniforms(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>()).collect()
}

/// A Kronecker rotation number.
#[derive(Debug, Clone, PartialEq)]
pub enum Theta {
    /// `(sqrt 5 - 1) / 2`.
    Golden,
    Float(f64),
    /// `[a0; a1, a2, ...]`, truncated where given.
    ContinuedFraction(Vec<u64>),
}

impl Theta {
    pub fn value(&self) -> f64 {
        match self {
            Theta::Golden => (libm::sqrt(5.0) - 1.0) / 2.0,
            Theta::Float(v) => *v,
            Theta::ContinuedFraction(terms) => {
                let mut it = terms.iter().rev();
                let mut acc = *it.next().unwrap_or(&0) as f64;
                for &a in it {
                    acc = a as f64 + 1.0 / acc;
                }
                acc
            }
        }
    }

    /// Parses `golden`, a continued fraction `[1;1,1,1]`, or a decimal.
    /// Fractions `p/q` and decimals that sit on a rational with a small
    /// denominator are refused, since they give periodic sequences.
    pub fn parse(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = |why: &str| Error::InvalidTheta(format!("{s}: {why}"));
        let theta = if s.eq_ignore_ascii_case("golden") {
            Theta::Golden
        } else if let Some(body) = s.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
            let (head, rest) = body.split_once(';').unwrap_or((body, ""));
            let mut terms = Vec::new();
            for t in core::iter::once(head).chain(rest.split(',').filter(|t| !t.trim().is_empty()))
            {
                terms.push(
                    t.trim()
                        .parse::<u64>()
                        .map_err(|_| bad("bad continued fraction term"))?,
                );
            }
            if terms[1..].contains(&0) {
                return Err(bad(
                    "continued fraction terms after the first must be positive",
                ));
            }
            Theta::ContinuedFraction(terms)
        } else if s.contains('/') {
            return Err(bad("rational theta gives a periodic sequence"));
        } else {
            let v: f64 = s.parse().map_err(|_| bad("not a number"))?;
            Theta::Float(v)
        };
        theta.check()?;
        Ok(theta)
    }

    fn check(&self) -> Result<(), Error> {
        let v = self.value();
        if !v.is_finite() {
            return Err(Error::InvalidTheta(format!("{v} is not finite")));
        }
        if let Some(q) = small_denominator(v) {
            return Err(Error::InvalidTheta(format!(
                "{v} is rational with denominator {q}"
            )));
        }
        Ok(())
    }
}

fn small_denominator(v: f64) -> Option<u64> {
    (1..=RATIONAL_THETA_MAX_DENOM).find(|&q| {
        let x = q as f64 * v;
        (x - libm::round(x)).abs() < 1e-12 * q as f64
    })
}

fn frac(x: f64) -> f64 {
    let f = x - libm::floor(x);
    // rounds up to exactly 1.0 for tiny negatives
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// `frac(k * theta)` for `k = 1..=n`.
pub fn kronecker_sample(theta: &Theta, n: usize) -> Result<PointSample, Error> {
    theta.check()?;
    let t = theta.value();
    let points = (1..=n).map(|k| frac(k as f64 * t)).collect();
    Ok(PointSample {
        points,
        generator: Generator::Kronecker { theta: t },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscrepancyResult {
    pub d_star: f64,
    pub d_extreme: f64,
}

/// Star and extreme discrepancy of the sample. Every call also checks
/// `D* <= D <= 2 D*` on the computed values, to within rounding.
pub fn discrepancy(sample: &PointSample) -> Result<DiscrepancyResult, Error> {
    let x = sample.sorted()?;
    let n = x.len() as f64;
    let mut d_star: f64 = 0.0;
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for (i, &xi) in x.iter().enumerate() {
        let above = (i + 1) as f64 / n - xi;
        let below = xi - i as f64 / n;
        d_star = d_star.max(above).max(below);
        hi = hi.max(above);
        lo = lo.min(above);
    }
    let d_extreme = 1.0 / n + hi - lo;
    // equality cases (a centred lattice has D = 2 D*) can round either way
    let slack = 1.0 + 8.0 * f64::EPSILON;
    if !(d_star <= d_extreme * slack && d_extreme <= 2.0 * d_star * slack) {
        return Err(Error::Invariant(format!("D* = {d_star}, D = {d_extreme}")));
    }
    Ok(DiscrepancyResult { d_star, d_extreme })
}

pub fn circle_distance(x: f64, p: f64) -> f64 {
    let d = frac((x - p).abs());
    d.min(1.0 - d)
}

pub fn min_distance(x: f64, sample: &PointSample) -> Result<f64, Error> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(sample
        .points
        .iter()
        .map(|&p| circle_distance(x, p))
        .fold(f64::INFINITY, f64::min))
}

/// Circular gaps between consecutive sorted points, including the wrap.
fn gaps(sorted: &[f64]) -> Vec<f64> {
    let n = sorted.len();
    let mut g: Vec<f64> = sorted.windows(2).map(|w| w[1] - w[0]).collect();
    g.push(1.0 - sorted[n - 1] + sorted[0]);
    g
}

/// `∫ min_k dist(x, p_k) dx` over the circle: each gap `g` adds `g^2 / 4`.
pub fn mean_min_distance(sample: &PointSample) -> Result<f64, Error> {
    Ok(compensated_sum(
        gaps(&sample.sorted()?).iter().map(|g| g * g / 4.0),
    ))
}

/// `∫ min_k dist(x, p_k)^2 dx` over the circle: each gap `g` adds `g^3 / 12`.
pub fn distortion_of_sample(sample: &PointSample) -> Result<f64, Error> {
    Ok(compensated_sum(
        gaps(&sample.sorted()?).iter().map(|g| g * g * g / 12.0),
    ))
}

/// Neumaier summation, so totals do not depend on accumulation order
/// beyond the last bit.
fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanStats {
    pub mean: f64,
    pub std_error: f64,
}

fn stats(values: &[f64]) -> MeanStats {
    let n = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / n;
    if values.len() < 2 {
        return MeanStats {
            mean,
            std_error: 0.0,
        };
    }
    let var = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (n - 1.0);
    MeanStats {
        mean,
        std_error: libm::sqrt(var / n),
    }
}

fn check_counts(n: usize, trials: usize) -> Result<(), Error> {
    if n == 0 || trials == 0 {
        return Err(Error::InvalidArgument(format!(
            "need n >= 1 and trials >= 1, got {n} and {trials}"
        )));
    }
    Ok(())
}

/// Monte-Carlo mean and standard error of `n * E_x[min_k dist(x, β_k)]`
/// over `trials` IID samples of size `n`. Each sample also passes through
/// [`discrepancy`] and its inequality check.
pub fn mean_min_distance_stats(n: usize, trials: usize, seed: u64) -> Result<MeanStats, Error> {
    check_counts(n, trials)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(trials);
    for _ in 0..trials {
        let s = PointSample {
            points: uniforms(&mut rng, n),
            generator: Generator::Iid { seed },
        };
        discrepancy(&s)?;
        values.push(n as f64 * mean_min_distance(&s)?);
    }
    Ok(stats(&values))
}

/// Fraction of `trials` IID samples of size `n` with `n * min_k dist(0, β_k) >= t`,
/// for each `t` in `t_grid`. Each sample also passes through [`discrepancy`].
pub fn survival_curve(
    n: usize,
    trials: usize,
    seed: u64,
    t_grid: &[f64],
) -> Result<Vec<f64>, Error> {
    check_counts(n, trials)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = alloc::vec![0usize; t_grid.len()];
    for _ in 0..trials {
        let s = PointSample {
            points: uniforms(&mut rng, n),
            generator: Generator::Iid { seed },
        };
        discrepancy(&s)?;
        let m = min_distance(0.0, &s)?;
        for (h, &t) in hits.iter_mut().zip(t_grid) {
            if n as f64 * m >= t {
                *h += 1;
            }
        }
    }
    Ok(hits.iter().map(|&h| h as f64 / trials as f64).collect())
}

/// `(1 - 2t/n)^n`, clamped at 0 once the arc covers the circle.
pub fn survival_law(n: usize, t: f64) -> f64 {
    let base = 1.0 - 2.0 * t / n as f64;
    if base <= 0.0 {
        0.0
    } else {
        libm::pow(base, n as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub n: usize,
    /// Exact optimal error for the chosen distribution, when computable.
    pub v_opt: Option<Rational>,
    pub v_iid_mean: f64,
    pub v_iid_se: f64,
    pub v_kron: f64,
    pub dstar_iid_mean: f64,
    pub dstar_kron: f64,
}

/// One row per `n`: the exact optimum for `dist` next to the error under
/// `dist` and the star discrepancy of IID samples (mean over `trials`) and of
/// the first `n` Kronecker points, each used as an `n`-point quantizer.
/// Errors here use the ordinary interval distance, so none can beat `v_opt`.
pub fn compare_table(
    dist: &PiecewiseUniform,
    n_list: &[usize],
    theta: &Theta,
    trials: usize,
    seed: u64,
) -> Result<Vec<CompareRow>, Error> {
    if n_list.is_empty() {
        return Err(Error::InvalidArgument(String::from("empty list of orders")));
    }
    let model = FloatModel::from_distribution(dist);
    let quantizer_error =
        |s: &PointSample| -> Result<f64, Error> { Ok(model.distortion(&s.sorted()?)) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        check_counts(n, trials)?;
        let mut dist_vals = Vec::with_capacity(trials);
        let mut dstar_vals = Vec::with_capacity(trials);
        for _ in 0..trials {
            let s = PointSample {
                points: uniforms(&mut rng, n),
                generator: Generator::Iid { seed },
            };
            dist_vals.push(quantizer_error(&s)?);
            dstar_vals.push(discrepancy(&s)?.d_star);
        }
        let kron = kronecker_sample(theta, n)?;
        let iid = stats(&dist_vals);
        rows.push(CompareRow {
            n,
            v_opt: optimal_error(dist, n),
            v_iid_mean: iid.mean,
            v_iid_se: iid.std_error,
            v_kron: quantizer_error(&kron)?,
            dstar_iid_mean: stats(&dstar_vals).mean,
            dstar_kron: discrepancy(&kron)?.d_star,
        });
    }
    Ok(rows)
}
