//! The compact support and its finite discretizations.
//!
//! The support is an axis-aligned box. Discretizations are either i.i.d.
//! uniform draws or greedy k-center quantizers picked from a uniform
//! candidate pool, and their quality is measured by the covering radius
//!
//! ```text
//! beta = max_{xi in box} min_{s in samples} |xi - s|
//! ```
//!
//! which is exact in one dimension and grid-bracketed above that.

use std::collections::HashSet;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::scalar::{distance, Scalar};

/// Default number of grid points per axis for `d >= 2` covering radii.
pub const DEFAULT_GRID_PER_DIM: usize = 401;

/// Axis-aligned compact support with a norm bound `m_xi >= |xi|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportBox<T> {
    pub lower: Vec<T>,
    pub upper: Vec<T>,
    pub m_xi: T,
}

impl<T: Scalar> SupportBox<T> {
    /// Box with the tightest norm bound (the largest corner norm).
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        let m_xi = max_corner_norm(&lower, &upper);
        Self::with_norm_bound(lower, upper, m_xi)
    }

    pub fn with_norm_bound(lower: Vec<T>, upper: Vec<T>, m_xi: T) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::InvalidSupport("dimension must be at least 1".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::InvalidSupport("lower and upper differ in length".into()));
        }
        if lower.iter().chain(&upper).any(|v| !v.is_finite()) {
            return Err(Error::InvalidSupport("non-finite bound".into()));
        }
        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(Error::InvalidSupport("lower exceeds upper".into()));
        }
        let corner = max_corner_norm(&lower, &upper);
        if !(m_xi >= corner - T::lp_tol()) {
            return Err(Error::InvalidSupport(format!(
                "norm bound {m_xi} is below the largest corner norm {corner}"
            )));
        }
        Ok(Self { lower, upper, m_xi })
    }

    /// The unit cube `[0, 1]^d`.
    pub fn unit(d: usize) -> Self {
        Self::new(vec![T::zero(); d], vec![T::one(); d]).expect("unit cube is valid")
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn center(&self) -> Vec<T> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&l, &u)| (l + u) / T::lit(2.0))
            .collect()
    }

    pub fn diameter(&self) -> T {
        distance(&self.lower, &self.upper)
    }

    pub fn contains(&self, point: &[T]) -> bool {
        point.len() == self.dim()
            && point
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&x, (&l, &u))| x >= l && x <= u)
    }
}

fn max_corner_norm<T: Scalar>(lower: &[T], upper: &[T]) -> T {
    lower
        .iter()
        .zip(upper)
        .map(|(&l, &u)| {
            let c = l.abs().max(u.abs());
            c * c
        })
        .sum::<T>()
        .sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenerationMode {
    #[serde(alias = "uniform")]
    UniformIid,
    #[serde(alias = "greedy")]
    GreedyQuantizer,
    /// Points supplied by the caller.
    Explicit,
}

impl GenerationMode {
    pub fn label(self) -> &'static str {
        match self {
            GenerationMode::UniformIid => "uniform",
            GenerationMode::GreedyQuantizer => "greedy",
            GenerationMode::Explicit => "explicit",
        }
    }
}

/// A finite discretization of the support: pairwise-distinct points.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet<T> {
    pub points: Vec<Vec<T>>,
    pub seed: u64,
    pub mode: GenerationMode,
}

impl<T: Scalar> SampleSet<T> {
    /// Wraps caller-supplied points after checking they are distinct and of
    /// equal dimension.
    pub fn from_points(points: Vec<Vec<T>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySampleSet);
        }
        let d = points[0].len();
        if let Some(p) = points.iter().find(|p| p.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: p.len(),
            });
        }
        let mut seen = HashSet::new();
        for p in &points {
            if !seen.insert(bit_key(p)) {
                return Err(Error::InvalidDistribution("sample points must be distinct".into()));
            }
        }
        Ok(Self {
            points,
            seed: 0,
            mode: GenerationMode::Explicit,
        })
    }

    /// One-dimensional convenience constructor.
    pub fn from_scalars(values: &[T]) -> Result<Self> {
        Self::from_points(values.iter().map(|&v| vec![v]).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    /// The first `count` points, keeping seed and mode.
    pub fn prefix(&self, count: usize) -> Self {
        Self {
            points: self.points[..count.min(self.len())].to_vec(),
            seed: self.seed,
            mode: self.mode,
        }
    }

    /// Index of the nearest point (lowest index on ties).
    pub fn nearest(&self, query: &[T]) -> usize {
        let mut best = (0, T::infinity());
        for (i, p) in self.points.iter().enumerate() {
            let d = distance(p, query);
            if d < best.1 {
                best = (i, d);
            }
        }
        best.0
    }

    pub fn check_inside(&self, support: &SupportBox<T>) -> Result<()> {
        if self.is_empty() {
            return Err(Error::EmptySampleSet);
        }
        if self.dim() != support.dim() {
            return Err(Error::DimensionMismatch {
                expected: support.dim(),
                actual: self.dim(),
            });
        }
        if self.points.iter().any(|p| !support.contains(p)) {
            return Err(Error::InvalidSupport("sample point outside the support".into()));
        }
        Ok(())
    }
}

pub(crate) fn bit_key<T: Scalar>(p: &[T]) -> Vec<u64> {
    p.iter().map(|v| v.as_f64().to_bits()).collect()
}

/// Draws `count` distinct i.i.d. uniform points from the box.
pub fn sample_uniform<T: Scalar>(support: &SupportBox<T>, count: usize, seed: u64) -> Result<SampleSet<T>> {
    if count == 0 {
        return Err(Error::EmptySampleSet);
    }
    let mut rng = rng_from_seed(seed);
    let mut seen = HashSet::with_capacity(count);
    let mut points = Vec::with_capacity(count);
    while points.len() < count {
        let p: Vec<T> = support
            .lower
            .iter()
            .zip(&support.upper)
            .map(|(&l, &u)| l + T::lit(rng.gen::<f64>()) * (u - l))
            .collect();
        if seen.insert(bit_key(&p)) {
            points.push(p);
        } else if support.lower == support.upper {
            return Err(Error::InvalidSupport("degenerate box admits a single point".into()));
        }
    }
    Ok(SampleSet {
        points,
        seed,
        mode: GenerationMode::UniformIid,
    })
}

/// Greedy k-center selection from a seeded uniform pool.
///
/// The first point is the pool point closest to the box center; every next
/// point is the pool point farthest from those already chosen. Selections for
/// different `count` with the same pool are prefixes of one another.
pub fn quantize_greedy<T: Scalar>(
    support: &SupportBox<T>,
    count: usize,
    pool_size: usize,
    seed: u64,
) -> Result<SampleSet<T>> {
    if count == 0 {
        return Err(Error::EmptySampleSet);
    }
    if pool_size < count {
        return Err(Error::PoolTooSmall { count, pool: pool_size });
    }
    let pool = sample_uniform(support, pool_size, seed)?.points;
    let center = support.center();
    let first = argmin_by(&pool, |p| distance(p, &center));
    let mut chosen = vec![first];
    let mut gap: Vec<T> = pool.iter().map(|p| distance(p, &pool[first])).collect();
    while chosen.len() < count {
        let mut next = 0;
        for (i, &g) in gap.iter().enumerate() {
            if g > gap[next] {
                next = i;
            }
        }
        chosen.push(next);
        let anchor = pool[next].clone();
        gap.par_iter_mut().zip(pool.par_iter()).for_each(|(g, p)| {
            let d = distance(p, &anchor);
            if d < *g {
                *g = d;
            }
        });
    }
    Ok(SampleSet {
        points: chosen.into_iter().map(|i| pool[i].clone()).collect(),
        seed,
        mode: GenerationMode::GreedyQuantizer,
    })
}

fn argmin_by<T: Scalar>(points: &[Vec<T>], key: impl Fn(&[T]) -> T) -> usize {
    let mut best = (0, T::infinity());
    for (i, p) in points.iter().enumerate() {
        let k = key(p);
        if k < best.1 {
            best = (i, k);
        }
    }
    best.0
}

/// Half the diagonal of one cell of the evaluation grid used by
/// [`covering_radius`] when `d >= 2`: the worst-case underestimate.
pub fn grid_half_diagonal<T: Scalar>(support: &SupportBox<T>, grid_per_dim: usize) -> T {
    if support.dim() == 1 {
        return T::zero();
    }
    let cells = T::lit((grid_per_dim.max(2) - 1) as f64);
    support
        .lower
        .iter()
        .zip(&support.upper)
        .map(|(&l, &u)| {
            let h = (u - l) / cells;
            h * h
        })
        .sum::<T>()
        .sqrt()
        / T::lit(2.0)
}

/// Covering radius of `samples` over the box.
///
/// Exact for `d = 1`. For `d >= 2` the maximum nearest-sample distance is
/// taken over a regular grid of `grid_per_dim` points per axis (corners
/// included), so the result `r` satisfies `r <= beta <= r + h/2` with `h` the
/// grid cell diagonal.
pub fn covering_radius<T: Scalar>(support: &SupportBox<T>, samples: &SampleSet<T>, grid_per_dim: usize) -> Result<T> {
    samples.check_inside(support)?;
    if support.dim() == 1 {
        let mut xs: Vec<T> = samples.points.iter().map(|p| p[0]).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
        let two = T::lit(2.0);
        let mut r = (xs[0] - support.lower[0]).max(support.upper[0] - xs[xs.len() - 1]);
        for w in xs.windows(2) {
            r = r.max((w[1] - w[0]) / two);
        }
        return Ok(r);
    }
    let g = grid_per_dim.max(2);
    let d = support.dim();
    let total = (g as f64).powi(d as i32);
    if total > 1e9 {
        return Err(Error::InvalidSupport(format!("grid of {total:e} points is too large")));
    }
    let total = total as usize;
    let tree = KdTree::new(&samples.points);
    let cells = T::lit((g - 1) as f64);
    let steps: Vec<T> = support
        .lower
        .iter()
        .zip(&support.upper)
        .map(|(&l, &u)| (u - l) / cells)
        .collect();
    let best = (0..total)
        .into_par_iter()
        .map_init(
            || vec![T::zero(); d],
            |q, mut k| {
                for axis in 0..d {
                    let idx = k % g;
                    k /= g;
                    q[axis] = if idx == g - 1 {
                        support.upper[axis]
                    } else {
                        support.lower[axis] + T::lit(idx as f64) * steps[axis]
                    };
                }
                tree.nearest_sq(q)
            },
        )
        .reduce(T::zero, |a, b| a.max(b));
    Ok(best.sqrt())
}

/// Implicit kd-tree over a borrowed point list: the median of every index
/// range is the node splitting that range.
struct KdTree<'a, T> {
    points: &'a [Vec<T>],
    order: Vec<usize>,
    dim: usize,
}

impl<'a, T: Scalar> KdTree<'a, T> {
    fn new(points: &'a [Vec<T>]) -> Self {
        let dim = points.first().map_or(1, Vec::len);
        let mut order: Vec<usize> = (0..points.len()).collect();
        Self::build(points, &mut order, 0, dim);
        Self { points, order, dim }
    }

    fn build(points: &[Vec<T>], idx: &mut [usize], depth: usize, dim: usize) {
        if idx.len() <= 1 {
            return;
        }
        let axis = depth % dim;
        let mid = idx.len() / 2;
        idx.select_nth_unstable_by(mid, |&a, &b| {
            points[a][axis].partial_cmp(&points[b][axis]).expect("finite samples")
        });
        let (left, right) = idx.split_at_mut(mid);
        Self::build(points, left, depth + 1, dim);
        Self::build(points, &mut right[1..], depth + 1, dim);
    }

    fn nearest_sq(&self, q: &[T]) -> T {
        let mut best = T::infinity();
        self.search(q, 0, self.order.len(), 0, &mut best);
        best
    }

    fn search(&self, q: &[T], lo: usize, hi: usize, depth: usize, best: &mut T) {
        if lo >= hi {
            return;
        }
        let mid = lo + (hi - lo) / 2;
        let p = &self.points[self.order[mid]];
        let d2: T = p.iter().zip(q).map(|(&a, &b)| (a - b) * (a - b)).sum();
        if d2 < *best {
            *best = d2;
        }
        let axis = depth % self.dim;
        let diff = q[axis] - p[axis];
        let (near, far) = if diff < T::zero() {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.search(q, near.0, near.1, depth + 1, best);
        if diff * diff < *best {
            self.search(q, far.0, far.1, depth + 1, best);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_invariants() {
        assert!(SupportBox::new(vec![1.0], vec![0.0]).is_err());
        assert!(SupportBox::<f64>::new(vec![], vec![]).is_err());
        assert!(SupportBox::with_norm_bound(vec![0.0, 0.0], vec![1.0, 1.0], 1.0).is_err());
        let b = SupportBox::new(vec![-1.0, 0.0], vec![0.5, 2.0]).unwrap();
        assert!((b.m_xi - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn uniform_single_point_and_determinism() {
        let b = SupportBox::<f64>::unit(1);
        let s = sample_uniform(&b, 1, 42).unwrap();
        assert_eq!(s.len(), 1);
        assert!(b.contains(&s.points[0]));
        assert_eq!(sample_uniform(&b, 50, 9).unwrap(), sample_uniform(&b, 50, 9).unwrap());
        assert_ne!(sample_uniform(&b, 50, 9).unwrap(), sample_uniform(&b, 50, 10).unwrap());
    }

    #[test]
    fn uniform_mean_is_near_center() {
        // Independent Monte Carlo: the sample mean of 1000 uniform points.
        let b = SupportBox::<f64>::unit(2);
        let s = sample_uniform(&b, 1000, 3).unwrap();
        for axis in 0..2 {
            let mean: f64 = s.points.iter().map(|p| p[axis]).sum::<f64>() / 1000.0;
            assert!((mean - 0.5).abs() < 0.05, "axis {axis} mean {mean}");
        }
    }

    #[test]
    fn greedy_center_rule_and_exhaustion() {
        let b = SupportBox::<f64>::unit(1);
        let q = quantize_greedy(&b, 1, 2000, 5).unwrap();
        assert!((q.points[0][0] - 0.5).abs() < 0.01);
        let pool = sample_uniform(&b, 30, 5).unwrap();
        let all = quantize_greedy(&b, 30, 30, 5).unwrap();
        let mut a: Vec<Vec<u64>> = pool.points.iter().map(|p| bit_key(p)).collect();
        let mut c: Vec<Vec<u64>> = all.points.iter().map(|p| bit_key(p)).collect();
        a.sort();
        c.sort();
        assert_eq!(a, c);
        assert_eq!(
            quantize_greedy(&b, 5, 4, 0),
            Err(Error::PoolTooSmall { count: 5, pool: 4 })
        );
    }

    #[test]
    fn greedy_prefixes_are_nested() {
        let b = SupportBox::<f64>::unit(2);
        let small = quantize_greedy(&b, 8, 200, 1).unwrap();
        let large = quantize_greedy(&b, 16, 200, 1).unwrap();
        assert_eq!(small.points[..], large.points[..8]);
    }

    #[test]
    fn covering_radius_known_values() {
        let b = SupportBox::<f64>::unit(1);
        let s = SampleSet::from_scalars(&[0.25, 0.75]).unwrap();
        assert_eq!(covering_radius(&b, &s, 0).unwrap(), 0.25);
        let b2 = SupportBox::<f64>::unit(2);
        let s2 = SampleSet::from_points(vec![vec![0.5, 0.5]]).unwrap();
        let r = covering_radius(&b2, &s2, 401).unwrap();
        let exact = 0.5f64.sqrt();
        assert!(r <= exact + 1e-15 && exact <= r + grid_half_diagonal(&b2, 401));
    }

    #[test]
    fn covering_radius_resolution_consistency() {
        let b = SupportBox::<f64>::unit(2);
        let s = sample_uniform(&b, 20, 77).unwrap();
        let coarse = covering_radius(&b, &s, 401).unwrap();
        let fine = covering_radius(&b, &s, 801).unwrap();
        assert!((coarse - fine).abs() <= grid_half_diagonal(&b, 401));
    }

    #[test]
    fn kd_tree_matches_brute_force() {
        let b = SupportBox::<f64>::unit(3);
        let s = sample_uniform(&b, 300, 4).unwrap();
        let q = sample_uniform(&b, 200, 8).unwrap();
        let tree = KdTree::new(&s.points);
        for p in &q.points {
            let brute = s.points.iter().map(|x| distance(x, p)).fold(f64::INFINITY, f64::min);
            assert!((tree.nearest_sq(p).sqrt() - brute).abs() < 1e-14);
        }
    }

    #[test]
    fn empty_or_outside_samples_rejected() {
        let b = SupportBox::<f64>::unit(1);
        assert_eq!(SampleSet::<f64>::from_points(vec![]), Err(Error::EmptySampleSet));
        let s = SampleSet::from_scalars(&[1.5]).unwrap();
        assert!(covering_radius(&b, &s, 10).is_err());
        assert!(SampleSet::from_scalars(&[0.2, 0.2]).is_err());
    }
}
