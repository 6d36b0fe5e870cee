//! Ambiguity-set specifications and their discretization over a sample set.
//!
//! A discretized set is described by linear rows over the probability vector
//! `p` (one entry per sample point), followed by any auxiliary variables the
//! mode needs. All variables are nonnegative. The mean-variance covariance
//! bound is the one nonlinear constraint; it is kept out of the rows and
//! checked through an eigenvalue slack.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{SampleSet, SupportBox};
use crate::linalg::{min_eigenvalue, spectral_norm};
use crate::lp::LpProblem;
use crate::metrics::{wasserstein_n, weighted_mean, DiscreteDistribution};
use crate::scalar::{distance, dot, Scalar};

/// Componentwise mean bounds `mu0 - gamma_r <= E[xi] <= mu0 + gamma_l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanBounds<T> {
    pub mu0: Vec<T>,
    pub gamma_l: T,
    pub gamma_r: T,
}

/// Bound on `E[coeffs . xi + offset]`; at least one side must be present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMoment<T> {
    pub coeffs: Vec<T>,
    #[serde(default)]
    pub offset: T,
    #[serde(default)]
    pub lower: Option<T>,
    #[serde(default)]
    pub upper: Option<T>,
}

fn default_order() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum AmbiguitySpec<T> {
    /// Every distribution on the samples.
    SimplexOnly,
    /// Box bounds on expectations of affine functions of `xi`.
    MomentBox {
        #[serde(default)]
        mean: Option<MeanBounds<T>>,
        #[serde(default)]
        moments: Vec<AffineMoment<T>>,
    },
    /// Mean bounds plus `Cov(xi) <= gamma_s * sigma0` in the semidefinite order.
    MeanVariance {
        mu0: Vec<T>,
        sigma0: Vec<Vec<T>>,
        gamma_l: T,
        gamma_r: T,
        gamma_s: T,
    },
    /// Order-`order` Wasserstein ball of radius `radius` around `nominal`.
    WassersteinBall {
        nominal: DiscreteDistribution<T>,
        radius: T,
        #[serde(default = "default_order")]
        order: u32,
    },
}

/// One expectation bound `lower <= sum_w p_w (coeffs . xi_w + offset) <= upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentRow<T> {
    pub coeffs: Vec<T>,
    pub offset: T,
    pub lower: Option<T>,
    pub upper: Option<T>,
}

impl<T: Scalar> MomentRow<T> {
    fn value_at(&self, point: &[T]) -> T {
        dot(&self.coeffs, point) + self.offset
    }

    /// Smallest slack of the row at expectation value `value`.
    fn slack(&self, value: T) -> T {
        let lo = self.lower.map_or(T::infinity(), |l| value - l);
        let hi = self.upper.map_or(T::infinity(), |u| u - value);
        lo.min(hi)
    }
}

fn mean_rows<T: Scalar>(mu0: &[T], gamma_l: T, gamma_r: T) -> Vec<MomentRow<T>> {
    (0..mu0.len())
        .map(|i| {
            let mut coeffs = vec![T::zero(); mu0.len()];
            coeffs[i] = T::one();
            MomentRow {
                coeffs,
                offset: T::zero(),
                lower: Some(mu0[i] - gamma_r),
                upper: Some(mu0[i] + gamma_l),
            }
        })
        .collect()
}

impl<T: Scalar> AmbiguitySpec<T> {
    pub fn mode_name(&self) -> &'static str {
        match self {
            AmbiguitySpec::SimplexOnly => "simplex_only",
            AmbiguitySpec::MomentBox { .. } => "moment_box",
            AmbiguitySpec::MeanVariance { .. } => "mean_variance",
            AmbiguitySpec::WassersteinBall { .. } => "wasserstein_ball",
        }
    }

    /// The linear expectation bounds of the spec (mean rows first).
    pub fn moment_rows(&self) -> Vec<MomentRow<T>> {
        match self {
            AmbiguitySpec::MomentBox { mean, moments } => {
                let mut rows = mean
                    .as_ref()
                    .map(|m| mean_rows(&m.mu0, m.gamma_l, m.gamma_r))
                    .unwrap_or_default();
                rows.extend(moments.iter().map(|m| MomentRow {
                    coeffs: m.coeffs.clone(),
                    offset: m.offset,
                    lower: m.lower,
                    upper: m.upper,
                }));
                rows
            }
            AmbiguitySpec::MeanVariance {
                mu0, gamma_l, gamma_r, ..
            } => mean_rows(mu0, *gamma_l, *gamma_r),
            _ => Vec::new(),
        }
    }

    /// Checks the spec against the sample dimension `dim`.
    pub fn validate(&self, dim: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        match self {
            AmbiguitySpec::SimplexOnly => Ok(()),
            AmbiguitySpec::MomentBox { mean, moments } => {
                if let Some(m) = mean {
                    if m.mu0.len() != dim {
                        return Err(Error::DimensionMismatch {
                            expected: dim,
                            actual: m.mu0.len(),
                        });
                    }
                    if !(m.gamma_l >= T::zero() && m.gamma_r >= T::zero()) {
                        return bad("mean tolerances must be nonnegative".into());
                    }
                }
                for (i, m) in moments.iter().enumerate() {
                    if m.coeffs.len() != dim {
                        return Err(Error::DimensionMismatch {
                            expected: dim,
                            actual: m.coeffs.len(),
                        });
                    }
                    match (m.lower, m.upper) {
                        (None, None) => return bad(format!("moment {i} has no bound")),
                        (Some(l), Some(u)) if l > u => return bad(format!("moment {i} has lower > upper")),
                        _ => {}
                    }
                }
                Ok(())
            }
            AmbiguitySpec::MeanVariance {
                mu0,
                sigma0,
                gamma_l,
                gamma_r,
                gamma_s,
            } => {
                if mu0.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        actual: mu0.len(),
                    });
                }
                if sigma0.len() != dim || sigma0.iter().any(|r| r.len() != dim) {
                    return bad("sigma0 must be a d x d matrix".into());
                }
                let scale = sigma0.iter().flatten().fold(T::zero(), |a, v| a.max(v.abs()));
                for i in 0..dim {
                    for j in 0..i {
                        if (sigma0[i][j] - sigma0[j][i]).abs() > T::lit(1e-12) * scale.max(T::one()) {
                            return bad("sigma0 must be symmetric".into());
                        }
                    }
                }
                if !(min_eigenvalue(sigma0) > T::zero()) {
                    return bad("sigma0 must be positive definite".into());
                }
                if !(*gamma_s > T::one()) {
                    return bad("gamma_s must exceed 1".into());
                }
                if !(*gamma_l >= T::zero() && *gamma_r >= T::zero()) {
                    return bad("mean tolerances must be nonnegative".into());
                }
                Ok(())
            }
            AmbiguitySpec::WassersteinBall { nominal, radius, order } => {
                nominal.validate()?;
                if nominal.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        actual: nominal.dim(),
                    });
                }
                if !(*radius >= T::zero()) || !radius.is_finite() {
                    return bad("radius must be finite and nonnegative".into());
                }
                if *order == 0 {
                    return bad("order must be at least 1".into());
                }
                Ok(())
            }
        }
    }
}

/// An ambiguity set restricted to distributions on a fixed sample set.
///
/// Variables are `p` (one per sample) followed by `num_aux` auxiliary
/// variables; for the Wasserstein ball these are the transport plan
/// `pi[i][j]` from sample `i` to nominal atom `j`, stored row-major. Rows
/// always include `sum p = 1`; nonnegativity of every variable is implicit.
#[derive(Debug, Clone)]
pub struct DiscretizedAmbiguitySet<T> {
    pub spec: AmbiguitySpec<T>,
    pub samples: SampleSet<T>,
    pub num_aux: usize,
    pub eq_matrix: Vec<Vec<T>>,
    pub eq_rhs: Vec<T>,
    pub ub_matrix: Vec<Vec<T>>,
    pub ub_rhs: Vec<T>,
    /// False only in mean-variance mode, whose covariance bound is not a row.
    pub is_linear: bool,
}

impl<T: Scalar> DiscretizedAmbiguitySet<T> {
    pub fn num_probabilities(&self) -> usize {
        self.samples.len()
    }

    pub fn num_variables(&self) -> usize {
        self.samples.len() + self.num_aux
    }

    /// Adds the set's rows to `lp`, with the set's variables starting at
    /// column `offset`.
    pub fn append_rows(&self, lp: &mut LpProblem<T>, offset: usize) {
        let width = lp.num_vars();
        let place = |row: &Vec<T>| {
            let mut full = vec![T::zero(); width];
            full[offset..offset + row.len()].copy_from_slice(row);
            full
        };
        for (row, &rhs) in self.eq_matrix.iter().zip(&self.eq_rhs) {
            lp.add_eq(place(row), rhs);
        }
        for (row, &rhs) in self.ub_matrix.iter().zip(&self.ub_rhs) {
            lp.add_ub(place(row), rhs);
        }
    }
}

/// Builds the discretized set of `spec` over `samples`.
///
/// `support` is the box the samples are drawn from; Wasserstein nominal atoms
/// must lie inside it.
pub fn build_discretized<T: Scalar>(
    spec: &AmbiguitySpec<T>,
    samples: &SampleSet<T>,
    support: &SupportBox<T>,
) -> Result<DiscretizedAmbiguitySet<T>> {
    if samples.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    if samples.dim() != support.dim() {
        return Err(Error::DimensionMismatch {
            expected: support.dim(),
            actual: samples.dim(),
        });
    }
    spec.validate(samples.dim())?;
    let n = samples.len();
    let num_aux = match spec {
        AmbiguitySpec::WassersteinBall { nominal, .. } => {
            if let Some(i) = nominal.atoms.iter().position(|a| !support.contains(a)) {
                return Err(Error::NominalOutsideSupport(i));
            }
            n * nominal.len()
        }
        _ => 0,
    };
    let width = n + num_aux;
    let mut set = DiscretizedAmbiguitySet {
        spec: spec.clone(),
        samples: samples.clone(),
        num_aux,
        eq_matrix: Vec::new(),
        eq_rhs: Vec::new(),
        ub_matrix: Vec::new(),
        ub_rhs: Vec::new(),
        is_linear: !matches!(spec, AmbiguitySpec::MeanVariance { .. }),
    };
    let mut simplex = vec![T::zero(); width];
    simplex[..n].iter_mut().for_each(|v| *v = T::one());
    set.eq_matrix.push(simplex);
    set.eq_rhs.push(T::one());

    for row in spec.moment_rows() {
        let values: Vec<T> = samples.points.iter().map(|x| row.value_at(x)).collect();
        if let Some(u) = row.upper {
            let mut r = vec![T::zero(); width];
            r[..n].copy_from_slice(&values);
            set.ub_matrix.push(r);
            set.ub_rhs.push(u);
        }
        if let Some(l) = row.lower {
            let mut r = vec![T::zero(); width];
            r[..n].iter_mut().zip(&values).for_each(|(a, &v)| *a = -v);
            set.ub_matrix.push(r);
            set.ub_rhs.push(-l);
        }
    }

    if let AmbiguitySpec::WassersteinBall { nominal, radius, order } = spec {
        let k = nominal.len();
        for i in 0..n {
            let mut r = vec![T::zero(); width];
            r[i] = -T::one();
            r[n + i * k..n + (i + 1) * k].iter_mut().for_each(|v| *v = T::one());
            set.eq_matrix.push(r);
            set.eq_rhs.push(T::zero());
        }
        for j in 0..k {
            let mut r = vec![T::zero(); width];
            (0..n).for_each(|i| r[n + i * k + j] = T::one());
            set.eq_matrix.push(r);
            set.eq_rhs.push(nominal.weights[j]);
        }
        let mut budget = vec![T::zero(); width];
        for (i, x) in samples.points.iter().enumerate() {
            for (j, y) in nominal.atoms.iter().enumerate() {
                budget[n + i * k + j] = distance(x, y).powi(*order as i32);
            }
        }
        set.ub_matrix.push(budget);
        set.ub_rhs.push(radius.powi(*order as i32));
    }
    Ok(set)
}

/// `sum_w p_w xi_w xi_w^T - mu mu^T` for the distribution `p` on `samples`.
pub fn covariance<T: Scalar>(samples: &SampleSet<T>, p: &[T]) -> Vec<Vec<T>> {
    let mu = weighted_mean(&samples.points, p);
    let d = mu.len();
    let mut cov = vec![vec![T::zero(); d]; d];
    for (x, &w) in samples.points.iter().zip(p) {
        for i in 0..d {
            for j in 0..d {
                cov[i][j] += w * (x[i] - mu[i]) * (x[j] - mu[j]);
            }
        }
    }
    cov
}

fn moment_slack<T: Scalar>(rows: &[MomentRow<T>], samples: &SampleSet<T>, p: &[T]) -> T {
    rows.iter()
        .map(|row| {
            let value: T = samples.points.iter().zip(p).map(|(x, &w)| w * row.value_at(x)).sum();
            row.slack(value)
        })
        .fold(T::infinity(), T::min)
}

/// Whether `p` lies in the set, and the smallest constraint slack.
///
/// Slacks are: each `p_w`, every moment bound, the covariance slack
/// `lambda_min(gamma_s sigma0 - Cov(p))`, and `radius - W_n(p, nominal)`. If
/// `p` is off the simplex by more than `LP_TOLERANCE` the margin is the
/// negative violation and the mode constraints are not evaluated.
pub fn membership<T: Scalar>(set: &DiscretizedAmbiguitySet<T>, p: &[T]) -> Result<(bool, T)> {
    let n = set.num_probabilities();
    if p.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: p.len(),
        });
    }
    let tol = T::lp_tol();
    let mut margin = p.iter().copied().fold(T::infinity(), T::min);
    let sum: T = p.iter().copied().sum();
    if (sum - T::one()).abs() > tol {
        margin = margin.min(-(sum - T::one()).abs());
    }
    if !(margin >= -tol) {
        return Ok((false, margin));
    }
    let rows = set.spec.moment_rows();
    margin = margin.min(moment_slack(&rows, &set.samples, p));
    match &set.spec {
        AmbiguitySpec::MeanVariance { sigma0, gamma_s, .. } => {
            let cov = covariance(&set.samples, p);
            let slack: Vec<Vec<T>> = sigma0
                .iter()
                .zip(&cov)
                .map(|(s, c)| s.iter().zip(c).map(|(&a, &b)| *gamma_s * a - b).collect())
                .collect();
            margin = margin.min(min_eigenvalue(&slack));
        }
        AmbiguitySpec::WassersteinBall { nominal, radius, order } => {
            let dist = DiscreteDistribution::on_samples(&set.samples, p)?;
            margin = margin.min(*radius - wasserstein_n(&dist, nominal, *order)?);
        }
        _ => {}
    }
    Ok((margin >= -tol, margin))
}

/// Smallest moment-bound slack at the anchor `p0` of a moment-box set.
///
/// This is the radius of the largest box-norm ball around the anchor's
/// moment vector that stays inside the bounds.
pub fn slater_margin<T: Scalar>(set: &DiscretizedAmbiguitySet<T>, p0: &[T]) -> Result<T> {
    if !matches!(set.spec, AmbiguitySpec::MomentBox { .. }) {
        return Err(Error::WrongMode { expected: "moment_box" });
    }
    let n = set.num_probabilities();
    if p0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: p0.len(),
        });
    }
    let tol = T::lp_tol();
    let min_p = p0.iter().copied().fold(T::infinity(), T::min);
    let sum: T = p0.iter().copied().sum();
    if min_p < -tol || (sum - T::one()).abs() > tol {
        return Err(Error::InfeasibleAnchor(min_p.min(-(sum - T::one()).abs()).as_f64()));
    }
    let alpha = moment_slack(&set.spec.moment_rows(), &set.samples, p0);
    if alpha < -tol {
        return Err(Error::InfeasibleAnchor(alpha.as_f64()));
    }
    Ok(alpha.max(T::zero()))
}

/// `1 + 2 kappa_psi |1| m_xi / alpha` for a moment set with Slater margin `alpha`.
pub fn moment_box_ch<T: Scalar>(kappa_psi: T, ones_norm: T, m_xi: T, alpha: T) -> Result<T> {
    if !(alpha > T::zero()) {
        return Err(Error::NonPositiveAlpha(alpha.as_f64()));
    }
    Ok(T::one() + T::lit(2.0) * kappa_psi * ones_norm * m_xi / alpha)
}

/// Hausdorff constant `C^H` relating the discretized set to the full set:
/// `H(P_n, P) <= C^H * beta`.
///
/// Moment boxes need the Slater margin `alpha`; mean-variance sets compute
/// `alpha = min(gamma_l, gamma_r, (gamma_s - 1) lambda_min(sigma0))` when it
/// is not supplied. The simplex-only set reports 1: the projection of any
/// distribution onto the samples already lies in the set.
pub fn theoretical_ch<T: Scalar>(spec: &AmbiguitySpec<T>, support: &SupportBox<T>, alpha: Option<T>) -> Result<T> {
    let m_xi = support.m_xi;
    match spec {
        AmbiguitySpec::SimplexOnly => Ok(T::one()),
        AmbiguitySpec::WassersteinBall { .. } => Ok(T::lit(2.0)),
        AmbiguitySpec::MomentBox { .. } => {
            let alpha = alpha.ok_or(Error::MissingConstant("alpha"))?;
            // One row of psi per finite one-sided bound, signed so psi lies in
            // the nonnegative orthant.
            let mut psi = Vec::new();
            for row in spec.moment_rows() {
                if row.upper.is_some() {
                    psi.push(row.coeffs.iter().map(|&c| -c).collect::<Vec<T>>());
                }
                if row.lower.is_some() {
                    psi.push(row.coeffs.clone());
                }
            }
            let kappa = spectral_norm(&psi);
            let ones = T::lit(psi.len() as f64).sqrt();
            moment_box_ch(kappa, ones, m_xi, alpha)
        }
        AmbiguitySpec::MeanVariance {
            sigma0,
            gamma_l,
            gamma_r,
            gamma_s,
            ..
        } => {
            let alpha = alpha.unwrap_or_else(|| {
                gamma_l
                    .min(*gamma_r)
                    .min((*gamma_s - T::one()) * min_eigenvalue(sigma0))
            });
            if !(alpha > T::zero()) {
                return Err(Error::NonPositiveAlpha(alpha.as_f64()));
            }
            let d = T::lit(support.dim() as f64);
            let two = T::lit(2.0);
            let root = (two + T::lit(16.0) * m_xi * m_xi).sqrt();
            Ok(T::one() + two * root * m_xi * (d * d + two * d).sqrt() / alpha)
        }
    }
}
