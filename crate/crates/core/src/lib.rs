//! Sample-based approximation of distributionally robust chance-constrained
//! optimization models.
//!
//! The continuous support of the uncertain parameter is replaced by a finite
//! sample set; ambiguity sets become polytopes (or, for mean-variance sets, a
//! reverse-convex region) over the sample probabilities, and the robust
//! model is solved by enumerating decisions and solving one worst-case
//! problem per decision. Covering radii, transport distances and replicated
//! confidence bounds quantify the approximation.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! `*F64` aliases below fix the double-precision types used by the CLI.

pub mod ambiguity;
pub mod bounds;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod linalg;
pub mod lp;
pub mod metrics;
pub mod problem;
pub mod rng;
pub mod scalar;
pub mod solver;
pub mod tdist;

pub use ambiguity::{
    build_discretized, membership, slater_margin, theoretical_ch, AffineMoment, AmbiguitySpec, DiscretizedAmbiguitySet,
    MeanBounds,
};
pub use bounds::{lower_bound, upper_bound, BoundEstimate, BoundSide};
pub use error::{Error, Result};
pub use geometry::{covering_radius, quantize_greedy, sample_uniform, GenerationMode, SampleSet, SupportBox};
pub use lp::{solve_lp, LpProblem, LpSolution, LpStatus};
pub use metrics::{
    distance_to_set, hausdorff_estimate, kantorovich, project_to_support, wasserstein_n, DiscreteDistribution,
    ProjectionMode, TransportPlan,
};
pub use problem::{
    chance_probability, feasible_mask, make_portfolio_instance, make_synthetic_1d_instance, DecisionDomain,
    FeasibilityMask, LipschitzConstants, ProblemInstance,
};
pub use scalar::Scalar;
pub use solver::{
    inner_worst_case, inner_worst_case_meanvar, reference_value, solve_sampled_model, theoretical_gap_bound,
    InnerSolution, InnerStatus, MeanVarOptions, SolveReport,
};
pub use tdist::t_critical;

pub type LpProblemF64 = LpProblem<f64>;
pub type SupportBoxF64 = SupportBox<f64>;
pub type SampleSetF64 = SampleSet<f64>;
pub type DiscreteDistributionF64 = DiscreteDistribution<f64>;
pub type AmbiguitySpecF64 = AmbiguitySpec<f64>;
pub type DiscretizedAmbiguitySetF64 = DiscretizedAmbiguitySet<f64>;
pub type ProblemInstanceF64 = ProblemInstance<f64>;
pub type InnerSolutionF64 = InnerSolution<f64>;
pub type SolveReportF64 = SolveReport<f64>;
pub type BoundEstimateF64 = BoundEstimate<f64>;
