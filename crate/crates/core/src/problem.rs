//! Chance-constrained problem instances and the discrete chance constraint.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{SampleSet, SupportBox};
use crate::scalar::{dot, norm, Scalar};

/// Scalar objective `F(x, xi)`.
pub type Objective<T> = Arc<dyn Fn(&[T], &[T]) -> T + Send + Sync>;
/// Vector constraint `G(x, xi)`; the chance constraint asks for `max G <= tau`.
pub type Constraint<T> = Arc<dyn Fn(&[T], &[T]) -> Vec<T> + Send + Sync>;

#[derive(Debug, Clone, PartialEq)]
pub enum DecisionDomain<T> {
    FiniteCandidates(Vec<Vec<T>>),
    /// Lattice with `steps[i] + 1` points on axis `i` (one point if the
    /// bounds coincide), enumerated with the last axis varying fastest.
    GridBox {
        lower: Vec<T>,
        upper: Vec<T>,
        steps: Vec<usize>,
    },
}

impl<T: Scalar> DecisionDomain<T> {
    pub fn candidates(&self) -> Result<Vec<Vec<T>>> {
        match self {
            DecisionDomain::FiniteCandidates(c) => {
                if c.is_empty() {
                    return Err(Error::InvalidDomain("no candidates".into()));
                }
                let d = c[0].len();
                if c.iter().any(|x| x.len() != d) {
                    return Err(Error::InvalidDomain("candidates differ in dimension".into()));
                }
                Ok(c.clone())
            }
            DecisionDomain::GridBox { lower, upper, steps } => {
                if lower.is_empty() || lower.len() != upper.len() || lower.len() != steps.len() {
                    return Err(Error::InvalidDomain(
                        "lower, upper and steps must share a nonzero length".into(),
                    ));
                }
                if lower.iter().zip(upper).any(|(l, u)| !(l <= u)) {
                    return Err(Error::InvalidDomain("lower exceeds upper".into()));
                }
                let axes: Vec<Vec<T>> = lower
                    .iter()
                    .zip(upper)
                    .zip(steps)
                    .map(|((&l, &u), &s)| {
                        if s == 0 || l == u {
                            vec![l]
                        } else {
                            (0..=s).map(|k| l + (u - l) * T::lit(k as f64 / s as f64)).collect()
                        }
                    })
                    .collect();
                let mut out = vec![Vec::new()];
                for axis in &axes {
                    out = out
                        .into_iter()
                        .flat_map(|prefix| {
                            axis.iter().map(move |&v| {
                                let mut x = prefix.clone();
                                x.push(v);
                                x
                            })
                        })
                        .collect();
                }
                Ok(out)
            }
        }
    }
}

/// Optional regularity constants of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LipschitzConstants<T> {
    pub kappa_f: Option<T>,
    pub kappa_g: Option<T>,
    pub kappa_theta: Option<T>,
    pub c_p: Option<T>,
}

/// `min_x max_P E_P[F(x, xi)]` subject to `P(max G(x, xi) <= tau) >= 1 - theta`.
#[derive(Clone)]
pub struct ProblemInstance<T> {
    pub name: String,
    pub objective: Objective<T>,
    pub constraint: Constraint<T>,
    pub domain: DecisionDomain<T>,
    pub support: SupportBox<T>,
    pub theta: T,
    pub lipschitz: LipschitzConstants<T>,
    pub tolerance: T,
}

impl<T: Scalar> fmt::Debug for ProblemInstance<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemInstance")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("support", &self.support)
            .field("theta", &self.theta)
            .field("lipschitz", &self.lipschitz)
            .field("tolerance", &self.tolerance)
            .finish_non_exhaustive()
    }
}

impl<T: Scalar> ProblemInstance<T> {
    pub fn new(
        name: impl Into<String>,
        objective: Objective<T>,
        constraint: Constraint<T>,
        domain: DecisionDomain<T>,
        support: SupportBox<T>,
        theta: T,
    ) -> Result<Self> {
        let instance = Self {
            name: name.into(),
            objective,
            constraint,
            domain,
            support,
            theta,
            lipschitz: LipschitzConstants::default(),
            tolerance: T::zero(),
        };
        instance.validate()?;
        Ok(instance)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta >= T::zero() && self.theta <= T::one()) {
            return Err(Error::InvalidArgument(format!(
                "theta must lie in [0, 1], got {}",
                self.theta
            )));
        }
        if !(self.tolerance >= T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be nonnegative, got {}",
                self.tolerance
            )));
        }
        self.domain.candidates().map(|_| ())
    }

    pub fn with_theta(mut self, theta: T) -> Result<Self> {
        self.theta = theta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_tolerance(mut self, tolerance: T) -> Result<Self> {
        self.tolerance = tolerance;
        self.validate()?;
        Ok(self)
    }

    pub fn with_lipschitz(mut self, lipschitz: LipschitzConstants<T>) -> Self {
        self.lipschitz = lipschitz;
        self
    }

    /// `F(x, xi_w)` at every sample.
    pub fn objective_values(&self, x: &[T], samples: &SampleSet<T>) -> Result<Vec<T>> {
        samples
            .points
            .iter()
            .enumerate()
            .map(|(w, xi)| {
                let v = (self.objective)(x, xi);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::EvaluationError(w))
                }
            })
            .collect()
    }
}

/// Which samples satisfy the constraint at a fixed decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityMask {
    pub bits: Vec<bool>,
}

impl FeasibilityMask {
    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn any(&self) -> bool {
        self.bits.iter().any(|&b| b)
    }
}

/// `bits[w] = max_i G_i(x, xi_w) <= tau`.
pub fn feasible_mask<T: Scalar>(
    instance: &ProblemInstance<T>,
    x: &[T],
    samples: &SampleSet<T>,
) -> Result<FeasibilityMask> {
    let bits = samples
        .points
        .iter()
        .enumerate()
        .map(|(w, xi)| {
            let g = (instance.constraint)(x, xi);
            if g.iter().any(|v| !v.is_finite()) {
                return Err(Error::EvaluationError(w));
            }
            Ok(g.into_iter().fold(T::neg_infinity(), T::max) <= instance.tolerance)
        })
        .collect::<Result<_>>()?;
    Ok(FeasibilityMask { bits })
}

/// Probability of the feasible samples under `p`.
pub fn chance_probability<T: Scalar>(mask: &FeasibilityMask, p: &[T]) -> Result<T> {
    if mask.bits.len() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: mask.bits.len(),
            actual: p.len(),
        });
    }
    Ok(mask.bits.iter().zip(p).filter(|(&b, _)| b).map(|(_, &w)| w).sum())
}

/// All weight vectors on the simplex with entries in multiples of `1 / steps`.
pub fn simplex_grid<T: Scalar>(dim: usize, steps: usize) -> Vec<Vec<T>> {
    fn recurse(dim: usize, remaining: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() + 1 == dim {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=remaining).rev() {
            prefix.push(k);
            recurse(dim, remaining - k, prefix, out);
            prefix.pop();
        }
    }
    let mut raw = Vec::new();
    if dim > 0 {
        recurse(dim, steps, &mut Vec::new(), &mut raw);
    }
    let s = T::lit(steps.max(1) as f64);
    raw.into_iter()
        .map(|v| v.into_iter().map(|k| T::lit(k as f64) / s).collect())
        .collect()
}

/// Portfolio selection over a box of asset returns.
///
/// The objective is the negative return `-xi . x`; the constraint bounds the
/// loss, `-xi . x - loss_threshold <= 0`. Decisions are the simplex weights
/// in multiples of `1 / weight_steps`.
pub fn make_portfolio_instance<T: Scalar>(
    returns: SupportBox<T>,
    loss_threshold: T,
    theta: T,
    weight_steps: usize,
) -> Result<ProblemInstance<T>> {
    if weight_steps == 0 {
        return Err(Error::InvalidDomain("weight_steps must be positive".into()));
    }
    let grid = simplex_grid::<T>(returns.dim(), weight_steps);
    let kappa = grid.iter().map(|x| norm(x)).fold(T::zero(), T::max);
    let objective: Objective<T> = Arc::new(|x: &[T], xi: &[T]| -dot(xi, x));
    let constraint: Constraint<T> = Arc::new(move |x: &[T], xi: &[T]| vec![-dot(xi, x) - loss_threshold]);
    let instance = ProblemInstance::new(
        "portfolio",
        objective,
        constraint,
        DecisionDomain::FiniteCandidates(grid),
        returns,
        theta,
    )?;
    Ok(instance.with_lipschitz(LipschitzConstants {
        kappa_f: Some(kappa),
        kappa_g: Some(kappa),
        kappa_theta: None,
        c_p: None,
    }))
}

/// One-dimensional reference instance on `[0, 1]` with `theta = 0.1`:
/// `F(x, xi) = (x - xi)^2`, `G(x, xi) = xi - x`, and 101 grid decisions.
///
/// `F` is 2-Lipschitz and `G` 1-Lipschitz in `xi` on the unit square.
pub fn make_synthetic_1d_instance<T: Scalar>() -> ProblemInstance<T> {
    let objective: Objective<T> = Arc::new(|x: &[T], xi: &[T]| (x[0] - xi[0]) * (x[0] - xi[0]));
    let constraint: Constraint<T> = Arc::new(|x: &[T], xi: &[T]| vec![xi[0] - x[0]]);
    let domain = DecisionDomain::GridBox {
        lower: vec![T::zero()],
        upper: vec![T::one()],
        steps: vec![100],
    };
    let support = SupportBox::unit(1);
    let two = T::lit(2.0);
    ProblemInstance::new(
        "synthetic1d",
        objective,
        constraint,
        domain,
        support.clone(),
        T::lit(0.1),
    )
    .expect("built-in instance is valid")
    .with_lipschitz(LipschitzConstants {
        kappa_f: Some(two * support.m_xi),
        kappa_g: Some(T::one()),
        kappa_theta: None,
        c_p: None,
    })
}
