//! One-sided confidence bounds from independent replicated batches.

use rayon::prelude::*;

use crate::ambiguity::{build_discretized, AmbiguitySpec};
use crate::error::{Error, Result};
use crate::geometry::sample_uniform;
use crate::problem::ProblemInstance;
use crate::rng::derive_seed;
use crate::scalar::Scalar;
use crate::solver::{inner_worst_case, solve_sampled_model};
use crate::tdist::t_critical;

/// Seed stream of the upper-bound evaluation batches.
pub const UPPER_STREAM: u64 = 1;
/// Seed stream of the lower-bound replicate solves.
pub const LOWER_STREAM: u64 = 2;
/// Seed stream of the batch that produces the candidate for the upper bound.
pub const CANDIDATE_STREAM: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSide {
    Upper,
    Lower,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundEstimate<T> {
    /// Values of the replicates that were feasible, in replicate order.
    pub replicate_values: Vec<T>,
    pub mean: T,
    /// Standard error of the mean, `sqrt(sum (v - mean)^2 / (M (M - 1)))`.
    pub sigma_hat: T,
    pub t_value: T,
    pub bound: T,
    pub side: BoundSide,
    pub alpha: T,
    pub omega_size: usize,
    pub skipped_replicates: usize,
}

impl<T: Scalar> BoundEstimate<T> {
    /// `mean +/- t_{alpha, M-1} sigma_hat` over the given replicate values.
    pub fn from_replicates(
        values: Vec<T>,
        side: BoundSide,
        alpha: T,
        omega_size: usize,
        skipped: usize,
    ) -> Result<Self> {
        let m = values.len();
        if m < 2 {
            return Err(Error::TooFewFeasibleReplicates {
                feasible: m,
                total: m + skipped,
            });
        }
        let count = T::lit(m as f64);
        let mean = values.iter().copied().sum::<T>() / count;
        let ss: T = values.iter().map(|&v| (v - mean) * (v - mean)).sum();
        let sigma_hat = (ss / (count * (count - T::one()))).sqrt();
        let t_value = T::lit(t_critical(alpha.as_f64(), m - 1)?);
        let bound = match side {
            BoundSide::Upper => mean + t_value * sigma_hat,
            BoundSide::Lower => mean - t_value * sigma_hat,
        };
        Ok(Self {
            replicate_values: values,
            mean,
            sigma_hat,
            t_value,
            bound,
            side,
            alpha,
            omega_size,
            skipped_replicates: skipped,
        })
    }
}

fn check_inputs<T: Scalar>(replicates: usize, alpha: T) -> Result<()> {
    if replicates < 2 {
        return Err(Error::TooFewReplicates(replicates));
    }
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::InvalidAlpha(alpha.as_f64()));
    }
    Ok(())
}

/// Upper confidence bound on the worst-case value of the fixed decision
/// `x_bar`: batch `m` draws `omega_size` uniform samples and solves the inner
/// problem at `x_bar`. Batches whose inner problem is infeasible are skipped.
pub fn upper_bound<T: Scalar>(
    instance: &ProblemInstance<T>,
    spec: &AmbiguitySpec<T>,
    x_bar: &[T],
    omega_size: usize,
    replicates: usize,
    alpha: T,
    master_seed: u64,
) -> Result<BoundEstimate<T>> {
    check_inputs(replicates, alpha)?;
    let values: Vec<Option<T>> = (0..replicates)
        .into_par_iter()
        .map(|m| {
            let seed = derive_seed(master_seed, UPPER_STREAM, m as u64);
            let samples = sample_uniform(&instance.support, omega_size, seed)?;
            let set = build_discretized(spec, &samples, &instance.support)?;
            let inner = inner_worst_case(instance, x_bar, &set)?;
            Ok(inner.is_feasible().then_some(inner.value))
        })
        .collect::<Result<_>>()?;
    collect(values, BoundSide::Upper, alpha, omega_size)
}

/// Lower confidence bound from `replicates` independent solves of the
/// sampled model. Batches where every candidate is infeasible are skipped.
pub fn lower_bound<T: Scalar>(
    instance: &ProblemInstance<T>,
    spec: &AmbiguitySpec<T>,
    omega_size: usize,
    replicates: usize,
    alpha: T,
    master_seed: u64,
) -> Result<BoundEstimate<T>> {
    check_inputs(replicates, alpha)?;
    let values: Vec<Option<T>> = (0..replicates)
        .into_par_iter()
        .map(|m| {
            let seed = derive_seed(master_seed, LOWER_STREAM, m as u64);
            let samples = sample_uniform(&instance.support, omega_size, seed)?;
            match solve_sampled_model(instance, spec, &samples) {
                Ok(report) => Ok(Some(report.v_hat)),
                Err(Error::AllCandidatesInfeasible) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    collect(values, BoundSide::Lower, alpha, omega_size)
}

/// The decision evaluated by [`upper_bound`]: the sampled-model solution on
/// a batch independent of the evaluation batches.
pub fn independent_candidate<T: Scalar>(
    instance: &ProblemInstance<T>,
    spec: &AmbiguitySpec<T>,
    omega_size: usize,
    master_seed: u64,
) -> Result<Vec<T>> {
    let seed = derive_seed(master_seed, CANDIDATE_STREAM, 0);
    let samples = sample_uniform(&instance.support, omega_size, seed)?;
    Ok(solve_sampled_model(instance, spec, &samples)?.x_hat)
}

fn collect<T: Scalar>(
    values: Vec<Option<T>>,
    side: BoundSide,
    alpha: T,
    omega_size: usize,
) -> Result<BoundEstimate<T>> {
    let total = values.len();
    let feasible: Vec<T> = values.into_iter().flatten().collect();
    let skipped = total - feasible.len();
    if feasible.len() < 2 {
        return Err(Error::TooFewFeasibleReplicates {
            feasible: feasible.len(),
            total,
        });
    }
    BoundEstimate::from_replicates(feasible, side, alpha, omega_size, skipped)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_replicates_give_zero_spread() {
        let e = BoundEstimate::from_replicates(vec![2.5; 10], BoundSide::Upper, 0.05, 8, 0).unwrap();
        assert_eq!(e.sigma_hat, 0.0);
        assert_eq!(e.bound, 2.5);
    }

    #[test]
    fn symmetric_adjustment() {
        let v = vec![1.0f64, 2.0, 4.0, 3.5];
        let up = BoundEstimate::from_replicates(v.clone(), BoundSide::Upper, 0.05, 8, 0).unwrap();
        let lo = BoundEstimate::from_replicates(v, BoundSide::Lower, 0.05, 8, 0).unwrap();
        assert!((up.bound - up.mean - (lo.mean - lo.bound)).abs() < 1e-14);
        let ss: f64 = [1.0f64, 2.0, 4.0, 3.5].iter().map(|x| (x - 2.625) * (x - 2.625)).sum();
        assert!((up.sigma_hat - (ss / 12.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn too_few_replicates() {
        let inst = crate::problem::make_synthetic_1d_instance::<f64>();
        let err = upper_bound(&inst, &AmbiguitySpec::SimplexOnly, &[0.5], 8, 1, 0.05, 0).unwrap_err();
        assert_eq!(err, Error::TooFewReplicates(1));
        assert!(BoundEstimate::from_replicates(vec![1.0], BoundSide::Lower, 0.05, 8, 3).is_err());
    }
}
