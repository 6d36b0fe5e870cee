//! Distances between discrete distributions and sets of distributions.
//!
//! Everything here reduces to a transportation LP solved by [`crate::lp`]:
//! the Kantorovich metric (order-1 Wasserstein), order-n Wasserstein
//! distances, the projection of a distribution onto a finite support, the
//! distance from a distribution to a discretized ambiguity set, and a
//! vertex-exposure lower estimate of the Hausdorff distance between two
//! such sets.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ambiguity::DiscretizedAmbiguitySet;
use crate::error::{Error, Result};
use crate::geometry::{bit_key, SampleSet};
use crate::lp::{solve_lp, LpProblem, LpStatus};
use crate::rng::rng_from_seed;
use crate::scalar::{distance, Scalar};

/// Finitely supported probability distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution<T> {
    pub atoms: Vec<Vec<T>>,
    pub weights: Vec<T>,
}

impl<T: Scalar> DiscreteDistribution<T> {
    pub fn new(atoms: Vec<Vec<T>>, weights: Vec<T>) -> Result<Self> {
        let dist = Self { atoms, weights };
        dist.validate()?;
        Ok(dist)
    }

    pub fn point_mass(atom: Vec<T>) -> Self {
        Self {
            atoms: vec![atom],
            weights: vec![T::one()],
        }
    }

    /// Uniform weights over the given atoms.
    pub fn uniform(atoms: Vec<Vec<T>>) -> Result<Self> {
        let w = T::one() / T::lit(atoms.len().max(1) as f64);
        let n = atoms.len();
        Self::new(atoms, vec![w; n])
    }

    /// Distribution on the sample points with probability vector `p`.
    ///
    /// Round-off from LP solutions is tolerated: entries down to
    /// `-LP_TOLERANCE` are clamped to zero and a sum within `LP_TOLERANCE` of
    /// one is renormalized.
    pub fn on_samples(samples: &SampleSet<T>, p: &[T]) -> Result<Self> {
        if p.len() != samples.len() {
            return Err(Error::DimensionMismatch {
                expected: samples.len(),
                actual: p.len(),
            });
        }
        let tol = T::lp_tol();
        if p.iter().any(|&w| !(w >= -tol)) {
            return Err(Error::InvalidDistribution("negative probability".into()));
        }
        let clamped: Vec<T> = p.iter().map(|&w| w.max(T::zero())).collect();
        let sum: T = clamped.iter().copied().sum();
        if (sum - T::one()).abs() > tol {
            return Err(Error::InvalidDistribution(format!("weights sum to {sum}")));
        }
        Ok(Self {
            atoms: samples.points.clone(),
            weights: clamped.into_iter().map(|w| w / sum).collect(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.atoms.is_empty() {
            return Err(Error::InvalidDistribution("no atoms".into()));
        }
        if self.atoms.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.atoms.len(),
                actual: self.weights.len(),
            });
        }
        let d = self.atoms[0].len();
        if let Some(a) = self.atoms.iter().find(|a| a.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: a.len(),
            });
        }
        if self.atoms.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDistribution("non-finite atom".into()));
        }
        if self.weights.iter().any(|&w| !(w >= T::zero())) {
            return Err(Error::InvalidDistribution("negative or NaN weight".into()));
        }
        let sum: T = self.weights.iter().copied().sum();
        if (sum - T::one()).abs() > T::weight_tol() {
            return Err(Error::InvalidDistribution(format!("weights sum to {sum}")));
        }
        let mut seen = std::collections::HashSet::new();
        if !self.atoms.iter().all(|a| seen.insert(bit_key(a))) {
            return Err(Error::InvalidDistribution("atoms must be pairwise distinct".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.atoms.first().map_or(0, Vec::len)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mean(&self) -> Vec<T> {
        weighted_mean(&self.atoms, &self.weights)
    }
}

pub(crate) fn weighted_mean<T: Scalar>(points: &[Vec<T>], weights: &[T]) -> Vec<T> {
    let d = points.first().map_or(0, Vec::len);
    let mut mean = vec![T::zero(); d];
    for (p, &w) in points.iter().zip(weights) {
        for (m, &x) in mean.iter_mut().zip(p) {
            *m += w * x;
        }
    }
    mean
}

/// `(1 - lambda) q0 + lambda q1`, merging atoms that coincide exactly.
pub fn mixture<T: Scalar>(
    q0: &DiscreteDistribution<T>,
    q1: &DiscreteDistribution<T>,
    lambda: T,
) -> DiscreteDistribution<T> {
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut atoms = Vec::new();
    let mut weights: Vec<T> = Vec::new();
    for (dist, scale) in [(q0, T::one() - lambda), (q1, lambda)] {
        for (a, &w) in dist.atoms.iter().zip(&dist.weights) {
            let key = bit_key(a);
            match index.get(&key) {
                Some(&i) => weights[i] += scale * w,
                None => {
                    index.insert(key, atoms.len());
                    atoms.push(a.clone());
                    weights.push(scale * w);
                }
            }
        }
    }
    DiscreteDistribution { atoms, weights }
}

/// Optimal coupling between two discrete distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan<T> {
    /// `plan[i][j]`: mass moved from source atom `i` to target atom `j`.
    pub plan: Vec<Vec<T>>,
    /// Minimal total of `plan[i][j] * |a_i - b_j|^order`.
    pub cost: T,
    pub order: u32,
}

fn cost_matrix<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>], order: u32) -> Vec<Vec<T>> {
    a.iter()
        .map(|x| b.iter().map(|y| distance(x, y).powi(order as i32)).collect())
        .collect()
}

/// Solves the transportation LP between `p` and `q` for cost `|.|^order`.
pub fn optimal_transport<T: Scalar>(
    p: &DiscreteDistribution<T>,
    q: &DiscreteDistribution<T>,
    order: u32,
) -> Result<TransportPlan<T>> {
    if order == 0 {
        return Err(Error::InvalidSpec("Wasserstein order must be at least 1".into()));
    }
    p.validate()?;
    q.validate()?;
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            actual: q.dim(),
        });
    }
    let (k1, k2) = (p.len(), q.len());
    let cost = cost_matrix(&p.atoms, &q.atoms, order);
    let mut lp = LpProblem::new(cost.iter().flatten().map(|&c| -c).collect());
    for i in 0..k1 {
        let mut row = vec![T::zero(); k1 * k2];
        row[i * k2..(i + 1) * k2].iter_mut().for_each(|v| *v = T::one());
        lp.add_eq(row, p.weights[i]);
    }
    for j in 0..k2 {
        let mut row = vec![T::zero(); k1 * k2];
        (0..k1).for_each(|i| row[i * k2 + j] = T::one());
        lp.add_eq(row, q.weights[j]);
    }
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::MalformedProblem(format!(
            "transport LP reported {:?}",
            sol.status
        )));
    }
    let plan: Vec<Vec<T>> = sol.point.chunks(k2).map(<[T]>::to_vec).collect();
    Ok(TransportPlan {
        plan,
        cost: (-sol.value).max(T::zero()),
        order,
    })
}

/// Kantorovich metric: minimal expected transport distance.
pub fn kantorovich<T: Scalar>(
    p: &DiscreteDistribution<T>,
    q: &DiscreteDistribution<T>,
) -> Result<(T, TransportPlan<T>)> {
    let plan = optimal_transport(p, q, 1)?;
    Ok((plan.cost, plan))
}

/// Order-`n` Wasserstein distance `(min sum pi |a - b|^n)^(1/n)`.
pub fn wasserstein_n<T: Scalar>(p: &DiscreteDistribution<T>, q: &DiscreteDistribution<T>, n: u32) -> Result<T> {
    let plan = optimal_transport(p, q, n)?;
    Ok(plan.cost.powf(T::one() / T::lit(n as f64)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionMode {
    /// Move each atom's mass to its nearest sample point.
    NearestAtom,
    /// Minimize the Kantorovich distance over all distributions on the samples.
    ExactLp,
}

/// Projects `p` onto distributions supported on the sample points.
///
/// The result carries every sample point as an atom (possibly with zero
/// weight), in sample order.
pub fn project_to_support<T: Scalar>(
    p: &DiscreteDistribution<T>,
    samples: &SampleSet<T>,
    mode: ProjectionMode,
) -> Result<DiscreteDistribution<T>> {
    if samples.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    p.validate()?;
    if p.dim() != samples.dim() {
        return Err(Error::DimensionMismatch {
            expected: samples.dim(),
            actual: p.dim(),
        });
    }
    let n = samples.len();
    let weights = match mode {
        ProjectionMode::NearestAtom => {
            let mut w = vec![T::zero(); n];
            for (a, &m) in p.atoms.iter().zip(&p.weights) {
                w[samples.nearest(a)] += m;
            }
            w
        }
        ProjectionMode::ExactLp => {
            let k = p.len();
            let cost = cost_matrix(&p.atoms, &samples.points, 1);
            let mut lp = LpProblem::new(cost.iter().flatten().map(|&c| -c).collect());
            for i in 0..k {
                let mut row = vec![T::zero(); k * n];
                row[i * n..(i + 1) * n].iter_mut().for_each(|v| *v = T::one());
                lp.add_eq(row, p.weights[i]);
            }
            let sol = solve_lp(&lp)?;
            if !sol.is_optimal() {
                return Err(Error::MalformedProblem("projection LP not optimal".into()));
            }
            let mut w = vec![T::zero(); n];
            for (idx, &v) in sol.point.iter().enumerate() {
                w[idx % n] += v;
            }
            w
        }
    };
    DiscreteDistribution::on_samples(samples, &weights)
}

/// `min_{p in set} rho(q, p)`, as one LP over a transport plan from `q` to
/// the set's sample points, the set's probability vector, and its auxiliary
/// variables.
pub fn distance_to_set<T: Scalar>(q: &DiscreteDistribution<T>, set: &DiscretizedAmbiguitySet<T>) -> Result<T> {
    if !set.is_linear {
        return Err(Error::NonLinearSet);
    }
    q.validate()?;
    if q.dim() != set.samples.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.samples.dim(),
            actual: q.dim(),
        });
    }
    let k = q.len();
    let n = set.num_probabilities();
    let plan_vars = k * n;
    let total = plan_vars + set.num_variables();
    let cost = cost_matrix(&q.atoms, &set.samples.points, 1);
    let mut objective = vec![T::zero(); total];
    for (o, &c) in objective.iter_mut().zip(cost.iter().flatten()) {
        *o = -c;
    }
    let mut lp = LpProblem::new(objective);
    for i in 0..k {
        let mut row = vec![T::zero(); total];
        row[i * n..(i + 1) * n].iter_mut().for_each(|v| *v = T::one());
        lp.add_eq(row, q.weights[i]);
    }
    for j in 0..n {
        let mut row = vec![T::zero(); total];
        (0..k).for_each(|i| row[i * n + j] = T::one());
        row[plan_vars + j] = -T::one();
        lp.add_eq(row, T::zero());
    }
    set.append_rows(&mut lp, plan_vars);
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok((-sol.value).max(T::zero())),
        _ => Err(Error::InfeasibleSet),
    }
}

/// Probability vectors of the vertices of `set` exposed by `directions`
/// random linear objectives, deduplicated.
pub fn exposed_vertices<T: Scalar>(
    set: &DiscretizedAmbiguitySet<T>,
    directions: usize,
    seed: u64,
) -> Result<Vec<Vec<T>>> {
    if !set.is_linear {
        return Err(Error::NonLinearSet);
    }
    let n = set.num_probabilities();
    let mut rng = rng_from_seed(seed);
    let objectives: Vec<Vec<T>> = (0..directions)
        .map(|_| (0..n).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect())
        .collect();
    let found: Vec<Vec<T>> = objectives
        .into_par_iter()
        .map(|c| {
            let mut objective = c;
            objective.resize(set.num_variables(), T::zero());
            let mut lp = LpProblem::new(objective);
            set.append_rows(&mut lp, 0);
            let sol = solve_lp(&lp)?;
            if !sol.is_optimal() {
                return Err(Error::InfeasibleSet);
            }
            Ok(sol.point[..n].to_vec())
        })
        .collect::<Result<_>>()?;
    let mut unique: Vec<Vec<T>> = Vec::new();
    let tol = T::lit(1e-10);
    for v in found {
        let dup = unique
            .iter()
            .any(|u| u.iter().zip(&v).all(|(&a, &b)| (a - b).abs() <= tol));
        if !dup {
            unique.push(v);
        }
    }
    Ok(unique)
}

fn directed_estimate<T: Scalar>(
    from: &DiscretizedAmbiguitySet<T>,
    to: &DiscretizedAmbiguitySet<T>,
    directions: usize,
    seed: u64,
) -> Result<T> {
    let vertices = exposed_vertices(from, directions, seed)?;
    let distances: Vec<T> = vertices
        .par_iter()
        .map(|p| {
            let dist = DiscreteDistribution::on_samples(&from.samples, p)?;
            distance_to_set(&dist, to)
        })
        .collect::<Result<_>>()?;
    Ok(distances.into_iter().fold(T::zero(), T::max))
}

/// Lower estimate of the Hausdorff distance between two discretized sets.
///
/// Each directed distance `sup_{p in A} d(p, B)` is a maximum of a convex
/// function over a polytope, attained at a vertex; the estimator evaluates it
/// at the vertices exposed by `directions` random objectives and is exact
/// once every vertex has been exposed.
pub fn hausdorff_estimate<T: Scalar>(
    a: &DiscretizedAmbiguitySet<T>,
    b: &DiscretizedAmbiguitySet<T>,
    directions: usize,
    seed: u64,
) -> Result<T> {
    if !a.is_linear || !b.is_linear {
        return Err(Error::NonLinearSet);
    }
    let ab = directed_estimate(a, b, directions, seed)?;
    let ba = directed_estimate(b, a, directions, seed.wrapping_add(1))?;
    Ok(ab.max(ba))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d1(atoms: &[f64], weights: &[f64]) -> DiscreteDistribution<f64> {
        DiscreteDistribution::new(atoms.iter().map(|&a| vec![a]).collect(), weights.to_vec()).unwrap()
    }

    #[test]
    fn kantorovich_trivial_cases() {
        let p = d1(&[0.0, 1.0], &[0.5, 0.5]);
        assert!(kantorovich(&p, &p).unwrap().0.abs() < 1e-12);
        let (v, _) = kantorovich(&d1(&[0.0], &[1.0]), &d1(&[1.0], &[1.0])).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let (v, plan) = kantorovich(&p, &d1(&[0.0], &[1.0])).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        assert!((plan.plan[1][0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn wasserstein_trivial_cases() {
        let a = DiscreteDistribution::point_mass(vec![0.0f64, 0.0]);
        let b = DiscreteDistribution::point_mass(vec![3.0, 4.0]);
        for n in 1..4 {
            assert!((wasserstein_n(&a, &b, n).unwrap() - 5.0).abs() < 1e-12);
        }
        let p = d1(&[0.0, 1.0], &[0.5, 0.5]);
        let w2 = wasserstein_n(&p, &d1(&[0.0], &[1.0]), 2).unwrap();
        assert!((w2 - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn projection_examples() {
        let s = SampleSet::from_scalars(&[0.0, 1.0]).unwrap();
        let p = d1(&[0.1, 0.9], &[0.5, 0.5]);
        for mode in [ProjectionMode::NearestAtom, ProjectionMode::ExactLp] {
            let r = project_to_support(&p, &s, mode).unwrap();
            assert!((r.weights[0] - 0.5).abs() < 1e-12);
            let (rho, _) = kantorovich(&r, &p).unwrap();
            assert!((rho - 0.1).abs() < 1e-12);
        }
        let fixed = d1(&[0.0, 1.0], &[0.3, 0.7]);
        let r = project_to_support(&fixed, &s, ProjectionMode::NearestAtom).unwrap();
        assert_eq!(r, fixed);
    }

    #[test]
    fn mixture_merges_shared_atoms() {
        let a = d1(&[0.0, 1.0], &[0.5, 0.5]);
        let b = d1(&[1.0, 2.0], &[0.5, 0.5]);
        let m = mixture(&a, &b, 0.5);
        assert_eq!(m.atoms.len(), 3);
        assert!((m.weights[1] - 0.5).abs() < 1e-15);
        m.validate().unwrap();
    }

    #[test]
    fn invalid_distributions() {
        assert!(DiscreteDistribution::new(vec![vec![0.0]], vec![0.9]).is_err());
        assert!(DiscreteDistribution::new(vec![vec![0.0], vec![0.0]], vec![0.5, 0.5]).is_err());
        assert!(DiscreteDistribution::new(vec![vec![0.0], vec![1.0]], vec![1.5, -0.5]).is_err());
        assert!(DiscreteDistribution::<f64>::new(vec![], vec![]).is_err());
    }

    #[test]
    fn single_precision_transport() {
        let p = DiscreteDistribution::new(vec![vec![0.0f32], vec![1.0]], vec![0.5, 0.5]).unwrap();
        let q = DiscreteDistribution::point_mass(vec![0.0f32]);
        let (v, _) = kantorovich(&p, &q).unwrap();
        assert!((v - 0.5).abs() < 1e-5);
    }
}
