//! Exact Bayes success probabilities and minimax lower bounds for testing
//! between finitely many hypotheses.
//!
//! For a family 𝒫 = {P₀, …, P_N} of distributions and a uniform prior over
//! the indices, the optimal average probability of identifying the true
//! index is
//!
//! ```text
//! B̄(𝒫) = (N+1)⁻¹ ∫ max_j p_j dμ,
//! ```
//!
//! and for any probability Q = q·μ dominating the family,
//!
//! ```text
//! (N+1)·B̄(𝒫) = E_Q[ max_j p_j / q ].
//! ```
//!
//! Applying a convex, non-decreasing φ with φ(1) ≤ 1 and Jensen's
//! inequality under the max gives the moment inequality
//!
//! ```text
//! φ((N+1)·B̄(𝒫)) ≤ Σ_j E_Q[ φ(p_j / q) ],
//! ```
//!
//! which this crate evaluates and inverts for a registry of φ choices:
//!
//! * the hinge φ(u) = (u − 1)₊ recovers Le Cam's two-point bound,
//! * the truncated entropy φ(u) = (u ln u − u + 1)·1{u ≥ 1} recovers (and
//!   sharpens) Fano-type bounds driven by the average KL divergence K̃,
//! * powers φ(u) = u^{1+λ} recover the power-divergence bounds, in both the
//!   classical C(λ) = (1+λ)·λ^{−λ/(1+λ)} form and the improved C = 1 form.
//!
//! Every bound is checked against exact oracles: brute-force B̄ on finite
//! alphabets, a primal-dual bracket on the minimax success R̄ ≤ B̄, and
//! closed-form divergences with Monte Carlo success estimates for Gaussian
//! location families. The [`testbed`] module stress-tests all of the
//! structural guarantees on randomized families and produces a minimal
//! reproducer when any of them fails.
//!
//! Modules, bottom up:
//!
//! * [`error`] — the crate-wide error type.
//! * [`numeric`] — small numeric routines (simplex projection, line search,
//!   quadrature, stable log-sum-exp).
//! * [`family`] — measure spaces, finite families, dominating references,
//!   i.i.d. product extensions, Gaussian location families.
//! * [`divergence`] — total variation, KL, power divergences, closed
//!   Gaussian forms, and the tensorization rules.
//! * [`risk`] — exact Bayes success, maximum-likelihood rules, deterministic
//!   rule enumeration, the minimax bracket, and Monte Carlo estimation.
//! * [`bounds`] — the φ registry, the moment inequality and its inversion,
//!   and the named classical bounds.
//! * [`compare`] — side-by-side evaluation with soundness checking, plus
//!   tensorized sweeps over sample size.
//! * [`testbed`] — randomized verification suites.

pub mod bounds;
pub mod compare;
pub mod divergence;
pub mod error;
pub mod family;
pub mod numeric;
pub mod risk;
pub mod testbed;

pub use bounds::{
    birge_bound, c_lambda, fano_ih_bound, fano_new_bound, invert_phi, optimize_lambda,
    optimize_lambda_gaussian, phi_bound, phi_moment_sum, two_point_bound, vj_bound, BoundResult,
    BoundTarget, PhiFunction, BIRGE_KAPPA, MASSART_KAPPA,
};
pub use compare::{
    compare_all, compare_tensorized, CompareConfig, Comparison, FamilyModel, LambdaPolicy,
    McConfig, Method, OracleConfig, RiskSummary, SweepPoint,
};
pub use divergence::{
    avg_kl, gaussian_divergences, kl, per_member_kl, power_divergence, tensorize, total_variation,
    DivergenceKind, DivergenceValue, GaussianDivergences,
};
pub use error::{Error, Result};
pub use family::{
    make_counting_family, make_finite_family, make_gaussian_family, mixture, product_extend,
    product_extend_distribution, resolve_reference, FiniteDistribution, FiniteFamily,
    GaussianFamily, MeasureSpace, ReferenceSpec,
};
pub use risk::{
    bayes_success_via_reference, enumerate_deterministic, exact_bayes_success, mc_bayes_success,
    minimax_success_bracket, ml_rule, McEstimate, MinimaxBracket,
};
pub use testbed::{run_verification, Reproducer, SuiteOutcome, VerificationReport};
