//! The sampled robust model: worst-case inner problems, outer enumeration,
//! fine-discretization reference values and the theoretical gap bound.

use rayon::prelude::*;

use crate::ambiguity::{build_discretized, membership, theoretical_ch, AmbiguitySpec, DiscretizedAmbiguitySet};
use crate::error::{Error, Result};
use crate::geometry::{covering_radius, quantize_greedy, SampleSet, DEFAULT_GRID_PER_DIM};
use crate::linalg::symmetric_eigen;
use crate::lp::{solve_lp, LpProblem, LpStatus};
use crate::metrics::{weighted_mean, DiscreteDistribution};
use crate::problem::{chance_probability, feasible_mask, FeasibilityMask, ProblemInstance};
use crate::scalar::{dot, Scalar};

/// Smallest sample count accepted by [`reference_value`].
pub const MIN_REFERENCE_COUNT: usize = 1024;
/// Candidate pool size of the reference quantizer, per quantizer point.
pub const REFERENCE_POOL_FACTOR: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerStatus {
    Optimal,
    Infeasible,
    /// Best point found by the mean-variance local solver.
    LocalOptimal,
}

/// Worst-case distribution for one decision.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolution<T> {
    /// Worst-case expected objective; `-inf` when infeasible.
    pub value: T,
    /// `None` exactly when the status is `Infeasible`.
    pub worst_case: Option<DiscreteDistribution<T>>,
    pub chance_prob: T,
    pub status: InnerStatus,
    pub iterations: usize,
}

impl<T: Scalar> InnerSolution<T> {
    fn infeasible() -> Self {
        Self {
            value: T::neg_infinity(),
            worst_case: None,
            chance_prob: T::zero(),
            status: InnerStatus::Infeasible,
            iterations: 0,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.status != InnerStatus::Infeasible
    }

    /// Probability vector of the worst case, aligned with the samples.
    pub fn probabilities(&self) -> Option<&[T]> {
        self.worst_case.as_ref().map(|d| d.weights.as_slice())
    }
}

/// `-sum_{mask} p <= -(1 - theta)`, or `None` when the row is vacuous.
fn chance_row<T: Scalar>(mask: &FeasibilityMask, width: usize, theta: T) -> Option<(Vec<T>, T)> {
    let need = T::one() - theta;
    if need <= T::zero() {
        return None;
    }
    let mut row = vec![T::zero(); width];
    for (r, &b) in row.iter_mut().zip(&mask.bits) {
        if b {
            *r = -T::one();
        }
    }
    Some((row, -need))
}

fn base_lp<T: Scalar>(f: &[T], mask: &FeasibilityMask, set: &DiscretizedAmbiguitySet<T>, theta: T) -> LpProblem<T> {
    let mut objective = f.to_vec();
    objective.resize(set.num_variables(), T::zero());
    let mut lp = LpProblem::new(objective);
    set.append_rows(&mut lp, 0);
    if let Some((row, rhs)) = chance_row(mask, set.num_variables(), theta) {
        lp.add_ub(row, rhs);
    }
    lp
}

fn solution_from<T: Scalar>(
    set: &DiscretizedAmbiguitySet<T>,
    mask: &FeasibilityMask,
    p: &[T],
    value: T,
    status: InnerStatus,
    iterations: usize,
) -> Result<InnerSolution<T>> {
    let dist = DiscreteDistribution::on_samples(&set.samples, p)?;
    let chance_prob = chance_probability(mask, &dist.weights)?;
    Ok(InnerSolution {
        value,
        worst_case: Some(dist),
        chance_prob,
        status,
        iterations,
    })
}

fn check_samples<T: Scalar>(instance: &ProblemInstance<T>, set: &DiscretizedAmbiguitySet<T>) -> Result<()> {
    if set.samples.dim() != instance.support.dim() {
        return Err(Error::DimensionMismatch {
            expected: instance.support.dim(),
            actual: set.samples.dim(),
        });
    }
    Ok(())
}

/// Maximizes `sum_w p_w F(x, xi_w)` over the set, subject to the discrete
/// chance constraint `sum_{w feasible} p_w >= 1 - theta`.
///
/// Linear sets are solved exactly by one LP. Mean-variance sets go through
/// [`inner_worst_case_meanvar`] with default options.
pub fn inner_worst_case<T: Scalar>(
    instance: &ProblemInstance<T>,
    x: &[T],
    set: &DiscretizedAmbiguitySet<T>,
) -> Result<InnerSolution<T>> {
    if !set.is_linear {
        return inner_worst_case_meanvar(instance, x, set, &MeanVarOptions::default());
    }
    check_samples(instance, set)?;
    let f = instance.objective_values(x, &set.samples)?;
    let mask = feasible_mask(instance, x, &set.samples)?;
    if !mask.any() && instance.theta < T::one() {
        return Ok(InnerSolution::infeasible());
    }
    let lp = base_lp(&f, &mask, set, instance.theta);
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => {
            let n = set.num_probabilities();
            solution_from(
                set,
                &mask,
                &sol.point[..n],
                sol.value,
                InnerStatus::Optimal,
                sol.iterations,
            )
        }
        LpStatus::Infeasible => Ok(InnerSolution::infeasible()),
        LpStatus::Unbounded => Err(Error::MalformedProblem("inner LP unbounded".into())),
    }
}

/// Controls for the mean-variance local solver.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanVarOptions<T> {
    pub max_iter: usize,
    /// Stop once an iteration improves the objective by less than this.
    pub tol: T,
    /// Optional feasible starting distribution; disables the multi-start.
    pub start: Option<Vec<T>>,
    /// Cap on eigen-direction cuts per linearized subproblem.
    pub max_cuts: usize,
}

impl<T: Scalar> Default for MeanVarOptions<T> {
    fn default() -> Self {
        Self {
            max_iter: 50,
            tol: T::lit(1e-8),
            start: None,
            max_cuts: 64,
        }
    }
}

/// Data shared by the linearized subproblems of one mean-variance solve.
struct MeanVarContext<'a, T> {
    set: &'a DiscretizedAmbiguitySet<T>,
    f: Vec<T>,
    mask: FeasibilityMask,
    theta: T,
    bound: Vec<Vec<T>>,
    eig_tol: T,
    max_cuts: usize,
}

impl<'a, T: Scalar> MeanVarContext<'a, T> {
    fn value(&self, p: &[T]) -> T {
        dot(&self.f, p)
    }

    fn feasible(&self, p: &[T]) -> Result<bool> {
        let (inside, _) = membership(self.set, p)?;
        let chance = chance_probability(&self.mask, p)?;
        Ok(inside && chance >= T::one() - self.theta - T::lp_tol())
    }

    /// Maximizes the objective subject to the set's linear rows, the chance
    /// row and `sum_w p_w (xi_w - c)(xi_w - c)^T <= gamma_s sigma0`.
    ///
    /// Since the covariance of `p` is that second moment minus
    /// `(mu_p - c)(mu_p - c)^T`, every solution satisfies the covariance
    /// bound. The semidefinite constraint is imposed by cuts along the
    /// directions in `directions`, adding the most violated eigenvector until
    /// none is violated.
    fn linearized(&self, center: &[T], directions: &mut Vec<Vec<T>>) -> Result<Option<Vec<T>>> {
        let points = &self.set.samples.points;
        let n = points.len();
        let d = center.len();
        let shifted: Vec<Vec<T>> = points
            .iter()
            .map(|x| x.iter().zip(center).map(|(&a, &c)| a - c).collect())
            .collect();
        for _ in 0..=self.max_cuts {
            let mut lp = base_lp(&self.f, &self.mask, self.set, self.theta);
            for u in directions.iter() {
                let row: Vec<T> = shifted.iter().map(|s| dot(u, s).powi(2)).collect();
                let rhs: T = (0..d)
                    .map(|i| (0..d).map(|j| u[i] * self.bound[i][j] * u[j]).sum::<T>())
                    .sum();
                lp.add_ub(row, rhs);
            }
            let sol = solve_lp(&lp)?;
            if !sol.is_optimal() {
                return Ok(None);
            }
            let p = sol.point[..n].to_vec();
            let mut slack = self.bound.clone();
            for (s, &w) in shifted.iter().zip(&p) {
                for i in 0..d {
                    for j in 0..d {
                        slack[i][j] -= w * s[i] * s[j];
                    }
                }
            }
            let (values, vectors) = symmetric_eigen(&slack);
            if values[0] >= -self.eig_tol {
                return Ok(Some(p));
            }
            directions.push(vectors[0].clone());
        }
        Ok(None)
    }

    /// Successive linearization from `center`, optionally seeded with a
    /// known feasible point. Returns the best point, its value and the
    /// number of linearized subproblems solved.
    fn run(
        &self,
        center: Vec<T>,
        seed: Option<(Vec<T>, T)>,
        opts: &MeanVarOptions<T>,
        directions: &mut Vec<Vec<T>>,
    ) -> Result<Option<(Vec<T>, T, usize)>> {
        let mut best = seed;
        let mut center = center;
        let mut iterations = 0;
        for _ in 0..opts.max_iter.max(1) {
            iterations += 1;
            let Some(p) = self.linearized(&center, directions)? else {
                break;
            };
            if !self.feasible(&p)? {
                break;
            }
            let value = self.value(&p);
            let gain = best.as_ref().map_or(T::infinity(), |(_, v)| value - *v);
            if gain > T::zero() {
                center = weighted_mean(&self.set.samples.points, &p);
                best = Some((p, value));
            }
            if gain < opts.tol {
                break;
            }
        }
        Ok(best.map(|(p, v)| (p, v, iterations)))
    }
}

/// Local solver for the mean-variance set, whose covariance bound is
/// reverse-convex in `p`.
///
/// Each step replaces the covariance by the second moment about the current
/// mean, which is linear in `p` and dominates the covariance, so the
/// subproblem is a conservative LP (with semidefinite cuts) and every iterate
/// is feasible. The objective never decreases. Without a user start, the
/// linear relaxation is tried first (its optimum is returned if it already
/// satisfies the covariance bound), then the iteration is run from the
/// uniform distribution, the relaxation optimum, the nominal mean and the
/// best feasible single atoms, keeping the best result.
pub fn inner_worst_case_meanvar<T: Scalar>(
    instance: &ProblemInstance<T>,
    x: &[T],
    set: &DiscretizedAmbiguitySet<T>,
    opts: &MeanVarOptions<T>,
) -> Result<InnerSolution<T>> {
    let AmbiguitySpec::MeanVariance {
        mu0, sigma0, gamma_s, ..
    } = &set.spec
    else {
        return Err(Error::WrongMode {
            expected: "mean_variance",
        });
    };
    check_samples(instance, set)?;
    let n = set.num_probabilities();
    let f = instance.objective_values(x, &set.samples)?;
    let mask = feasible_mask(instance, x, &set.samples)?;
    if !mask.any() && instance.theta < T::one() {
        return Ok(InnerSolution::infeasible());
    }
    let bound: Vec<Vec<T>> = sigma0
        .iter()
        .map(|r| r.iter().map(|&v| *gamma_s * v).collect())
        .collect();
    let scale = bound.iter().flatten().fold(T::one(), |a, v| a.max(v.abs()));
    let ctx = MeanVarContext {
        set,
        f,
        mask,
        theta: instance.theta,
        bound,
        eig_tol: T::lit(1e-10) * scale,
        max_cuts: opts.max_cuts,
    };
    let mut directions = symmetric_eigen(sigma0).1;
    let points = &set.samples.points;

    let mut runs: Vec<(Vec<T>, Option<(Vec<T>, T)>)> = Vec::new();
    if let Some(start) = &opts.start {
        if start.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: start.len(),
            });
        }
        if !ctx.feasible(start)? {
            return Err(Error::NoFeasibleStart);
        }
        runs.push((weighted_mean(points, start), Some((start.clone(), ctx.value(start)))));
    } else {
        let relaxed = solve_lp(&base_lp(&ctx.f, &ctx.mask, set, ctx.theta))?;
        match relaxed.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => return Ok(InnerSolution::infeasible()),
            LpStatus::Unbounded => return Err(Error::MalformedProblem("inner LP unbounded".into())),
        }
        let p_relaxed = relaxed.point[..n].to_vec();
        if ctx.feasible(&p_relaxed)? {
            let value = ctx.value(&p_relaxed);
            return solution_from(set, &ctx.mask, &p_relaxed, value, InnerStatus::LocalOptimal, 1);
        }
        let uniform = vec![T::one() / T::lit(n as f64); n];
        let uniform_seed = if ctx.feasible(&uniform)? {
            Some((uniform.clone(), ctx.value(&uniform)))
        } else {
            None
        };
        runs.push((weighted_mean(points, &uniform), uniform_seed));
        runs.push((weighted_mean(points, &p_relaxed), None));
        runs.push((mu0.clone(), None));
        let mut atoms: Vec<usize> = (0..n)
            .filter(|&w| {
                let mut e = vec![T::zero(); n];
                e[w] = T::one();
                ctx.feasible(&e).unwrap_or(false)
            })
            .collect();
        atoms.sort_by(|&a, &b| ctx.f[b].partial_cmp(&ctx.f[a]).unwrap_or(std::cmp::Ordering::Equal));
        for &w in atoms.iter().take(4) {
            let mut e = vec![T::zero(); n];
            e[w] = T::one();
            runs.push((points[w].clone(), Some((e.clone(), ctx.value(&e)))));
        }
    }

    let mut best: Option<(Vec<T>, T, usize)> = None;
    for (center, seed) in runs {
        if let Some(found) = ctx.run(center, seed, opts, &mut directions)? {
            if best.as_ref().map_or(true, |b| found.1 > b.1) {
                best = Some(found);
            }
        }
    }
    let (p, value, iterations) = best.ok_or(Error::NoFeasibleStart)?;
    solution_from(set, &ctx.mask, &p, value, InnerStatus::LocalOptimal, iterations)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Grid resolution for covering radii in dimension two and higher.
    pub grid_per_dim: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            grid_per_dim: DEFAULT_GRID_PER_DIM,
        }
    }
}

/// Result of the sampled outer minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport<T> {
    pub v_hat: T,
    pub x_hat: Vec<T>,
    /// Position of `x_hat` in the candidate enumeration.
    pub x_index: usize,
    pub inner: InnerSolution<T>,
    pub evaluated_candidates: usize,
    pub infeasible_candidates: usize,
    /// Inner value per candidate, `None` where infeasible.
    pub candidate_values: Vec<Option<T>>,
    pub beta: Option<T>,
    pub theoretical_gap: Option<T>,
}

pub fn solve_sampled_model<T: Scalar>(
    instance: &ProblemInstance<T>,
    spec: &AmbiguitySpec<T>,
    samples: &SampleSet<T>,
) -> Result<SolveReport<T>> {
    solve_sampled_model_with(instance, spec, samples, &SolveOptions::default())
}

/// Minimizes the worst-case value over every candidate decision.
///
/// Candidates are evaluated in parallel; the first candidate in enumeration
/// order wins ties. The theoretical gap is reported when all regularity
/// constants of the instance and the set's `C^H` are available.
pub fn solve_sampled_model_with<T: Scalar>(
    instance: &ProblemInstance<T>,
    spec: &AmbiguitySpec<T>,
    samples: &SampleSet<T>,
    opts: &SolveOptions,
) -> Result<SolveReport<T>> {
    samples.check_inside(&instance.support)?;
    let set = build_discretized(spec, samples, &instance.support)?;
    let candidates = instance.domain.candidates()?;
    let inners: Vec<InnerSolution<T>> = candidates
        .par_iter()
        .map(|x| inner_worst_case(instance, x, &set))
        .collect::<Result<_>>()?;
    let mut best: Option<usize> = None;
    for (i, s) in inners.iter().enumerate() {
        if s.is_feasible() && best.map_or(true, |b| s.value < inners[b].value) {
            best = Some(i);
        }
    }
    let index = best.ok_or(Error::AllCandidatesInfeasible)?;
    let infeasible = inners.iter().filter(|s| !s.is_feasible()).count();
    let candidate_values = inners.iter().map(|s| s.is_feasible().then_some(s.value)).collect();
    let (beta, theoretical_gap) = if gap_constants_present(instance, spec) {
        let beta = covering_radius(&instance.support, samples, opts.grid_per_dim)?;
        (Some(beta), Some(theoretical_gap_bound(instance, spec, beta)?))
    } else {
        (None, None)
    };
    let inner = inners[index].clone();
    Ok(SolveReport {
        v_hat: inner.value,
        x_hat: candidates[index].clone(),
        x_index: index,
        inner,
        evaluated_candidates: candidates.len(),
        infeasible_candidates: infeasible,
        candidate_values,
        beta,
        theoretical_gap,
    })
}

fn gap_constants_present<T: Scalar>(instance: &ProblemInstance<T>, spec: &AmbiguitySpec<T>) -> bool {
    let l = &instance.lipschitz;
    l.kappa_f.is_some()
        && l.kappa_g.is_some()
        && l.kappa_theta.is_some()
        && l.c_p.is_some()
        && theoretical_ch(spec, &instance.support, None).is_ok()
}

/// `kappa_F C^H beta + kappa_theta sqrt(2 kappa_G C^P C^H beta)`.
pub fn theoretical_gap_bound<T: Scalar>(instance: &ProblemInstance<T>, spec: &AmbiguitySpec<T>, beta: T) -> Result<T> {
    let l = &instance.lipschitz;
    let kappa_f = l.kappa_f.ok_or(Error::MissingConstant("kappa_f"))?;
    let kappa_g = l.kappa_g.ok_or(Error::MissingConstant("kappa_g"))?;
    let kappa_theta = l.kappa_theta.ok_or(Error::MissingConstant("kappa_theta"))?;
    let c_p = l.c_p.ok_or(Error::MissingConstant("c_p"))?;
    let c_h = theoretical_ch(spec, &instance.support, None)?;
    if !(beta >= T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "covering radius must be nonnegative, got {beta}"
        )));
    }
    Ok(kappa_f * c_h * beta + kappa_theta * (T::lit(2.0) * kappa_g * c_p * c_h * beta).sqrt())
}

/// Optimal value of the sampled model on a fine greedy quantizer, used as a
/// stand-in for the value of the full model.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceValue<T> {
    pub value: T,
    pub x_hat: Vec<T>,
    pub count: usize,
    pub seed: u64,
}

pub fn reference_value<T: Scalar>(
    instance: &ProblemInstance<T>,
    spec: &AmbiguitySpec<T>,
    fine_count: usize,
    seed: u64,
) -> Result<ReferenceValue<T>> {
    if fine_count < MIN_REFERENCE_COUNT {
        return Err(Error::InvalidArgument(format!(
            "reference needs at least {MIN_REFERENCE_COUNT} samples, got {fine_count}"
        )));
    }
    let samples = quantize_greedy(&instance.support, fine_count, REFERENCE_POOL_FACTOR * fine_count, seed)?;
    let report = solve_sampled_model(instance, spec, &samples)?;
    Ok(ReferenceValue {
        value: report.v_hat,
        x_hat: report.x_hat,
        count: fine_count,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambiguity::MeanBounds;
    use crate::geometry::SupportBox;
    use crate::problem::{make_synthetic_1d_instance, DecisionDomain, LipschitzConstants};
    use std::sync::Arc;

    fn set_on(spec: AmbiguitySpec<f64>, pts: &[f64]) -> DiscretizedAmbiguitySet<f64> {
        build_discretized(&spec, &SampleSet::from_scalars(pts).unwrap(), &SupportBox::unit(1)).unwrap()
    }

    #[test]
    fn unconstrained_worst_case_picks_largest_atom() {
        let inst = make_synthetic_1d_instance::<f64>().with_theta(1.0).unwrap();
        let set = set_on(AmbiguitySpec::SimplexOnly, &[0.0, 1.0]);
        let s = inner_worst_case(&inst, &[0.0], &set).unwrap();
        assert_eq!(s.status, InnerStatus::Optimal);
        assert!((s.value - 1.0).abs() < 1e-12);
        assert!((s.probabilities().unwrap()[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_atoms_excluded_at_theta_zero() {
        let inst = make_synthetic_1d_instance::<f64>().with_theta(0.0).unwrap();
        let set = set_on(AmbiguitySpec::SimplexOnly, &[0.1, 0.3, 0.9]);
        let s = inner_worst_case(&inst, &[0.5], &set).unwrap();
        assert!((s.value - 0.16).abs() < 1e-12);
        assert!((s.chance_prob - 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_false_mask_is_infeasible() {
        let inst = make_synthetic_1d_instance::<f64>();
        let set = set_on(AmbiguitySpec::SimplexOnly, &[0.5, 0.9]);
        let s = inner_worst_case(&inst, &[0.0], &set).unwrap();
        assert_eq!(s.status, InnerStatus::Infeasible);
        assert!(s.worst_case.is_none());
    }

    #[test]
    fn moment_box_inner_value() {
        let inst = ProblemInstance::new(
            "linear",
            Arc::new(|_: &[f64], xi: &[f64]| xi[0]),
            Arc::new(|_: &[f64], _: &[f64]| vec![-1.0]),
            DecisionDomain::FiniteCandidates(vec![vec![0.0]]),
            SupportBox::unit(1),
            1.0,
        )
        .unwrap();
        let spec = AmbiguitySpec::MomentBox {
            mean: Some(MeanBounds {
                mu0: vec![0.5],
                gamma_l: 0.1,
                gamma_r: 0.1,
            }),
            moments: vec![],
        };
        let s = inner_worst_case(&inst, &[0.0], &set_on(spec, &[0.0, 1.0])).unwrap();
        assert!((s.value - 0.6).abs() < 1e-12);
    }

    #[test]
    fn meanvar_with_vacuous_covariance_matches_linear() {
        let inst = make_synthetic_1d_instance::<f64>();
        let pts = [0.05, 0.2, 0.45, 0.7, 0.95];
        let mv = AmbiguitySpec::MeanVariance {
            mu0: vec![0.5],
            sigma0: vec![vec![1.0]],
            gamma_l: 0.2,
            gamma_r: 0.2,
            gamma_s: 1e6,
        };
        let mb = AmbiguitySpec::MomentBox {
            mean: Some(MeanBounds {
                mu0: vec![0.5],
                gamma_l: 0.2,
                gamma_r: 0.2,
            }),
            moments: vec![],
        };
        let a = inner_worst_case(&inst, &[0.8], &set_on(mv, &pts)).unwrap();
        let b = inner_worst_case(&inst, &[0.8], &set_on(mb, &pts)).unwrap();
        assert_eq!(a.status, InnerStatus::LocalOptimal);
        assert!((a.value - b.value).abs() < 1e-10);
    }

    #[test]
    fn meanvar_fixed_point_start() {
        let inst = make_synthetic_1d_instance::<f64>().with_theta(1.0).unwrap();
        let spec = AmbiguitySpec::MeanVariance {
            mu0: vec![0.5],
            sigma0: vec![vec![0.04]],
            gamma_l: 0.5,
            gamma_r: 0.5,
            gamma_s: 1.5,
        };
        let set = set_on(spec, &[0.0, 0.5, 1.0]);
        let first = inner_worst_case(&inst, &[0.5], &set).unwrap();
        let (ok, _) = membership(&set, first.probabilities().unwrap()).unwrap();
        assert!(ok);
        let opts = MeanVarOptions {
            start: Some(first.probabilities().unwrap().to_vec()),
            ..Default::default()
        };
        let again = inner_worst_case_meanvar(&inst, &[0.5], &set, &opts).unwrap();
        assert_eq!(again.iterations, 1);
        assert!((again.value - first.value).abs() < 1e-12);
    }

    #[test]
    fn outer_tie_break_and_infeasible_skip() {
        let inst = make_synthetic_1d_instance::<f64>();
        let inst = ProblemInstance {
            domain: DecisionDomain::FiniteCandidates(vec![vec![0.0], vec![1.0], vec![1.0]]),
            ..inst
        };
        let samples = SampleSet::from_scalars(&[0.5, 0.9]).unwrap();
        let r = solve_sampled_model(&inst, &AmbiguitySpec::SimplexOnly, &samples).unwrap();
        assert_eq!(r.x_index, 1);
        assert_eq!(r.infeasible_candidates, 1);
        assert_eq!(r.candidate_values[0], None);
        assert!(r.theoretical_gap.is_none());
    }

    #[test]
    fn all_candidates_infeasible() {
        let inst = make_synthetic_1d_instance::<f64>();
        let inst = ProblemInstance {
            domain: DecisionDomain::FiniteCandidates(vec![vec![0.0]]),
            ..inst
        };
        let samples = SampleSet::from_scalars(&[0.5, 0.9]).unwrap();
        assert_eq!(
            solve_sampled_model(&inst, &AmbiguitySpec::SimplexOnly, &samples).unwrap_err(),
            Error::AllCandidatesInfeasible
        );
    }

    #[test]
    fn gap_bound_values() {
        let inst = make_synthetic_1d_instance::<f64>().with_lipschitz(LipschitzConstants {
            kappa_f: Some(1.0),
            kappa_g: Some(1.0),
            kappa_theta: Some(1.0),
            c_p: Some(1.0),
        });
        let spec = AmbiguitySpec::SimplexOnly;
        assert_eq!(theoretical_gap_bound(&inst, &spec, 0.0).unwrap(), 0.0);
        assert!((theoretical_gap_bound(&inst, &spec, 0.5).unwrap() - 1.5).abs() < 1e-15);
        let missing = make_synthetic_1d_instance::<f64>();
        assert_eq!(
            theoretical_gap_bound(&missing, &spec, 0.5).unwrap_err(),
            Error::MissingConstant("kappa_theta")
        );
    }

    #[test]
    fn reference_requires_fine_count() {
        let inst = make_synthetic_1d_instance::<f64>();
        assert!(reference_value(&inst, &AmbiguitySpec::SimplexOnly, 100, 1).is_err());
    }
}
