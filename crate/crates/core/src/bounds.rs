//! Upper bounds on the Bayes success B̄(𝒫) and the minimax success R̄(𝒫).
//!
//! Everything routes through one master inequality: for convex, non-decreasing,
//! non-negative φ and any dominating Q,
//!
//!   φ((N+1)·B̄(𝒫)) ≤ Σ_j E_Q[φ(p_j/q)],
//!
//! inverted here by the generalized inverse of φ. Specializing φ recovers the
//! classical bounds, which are also exposed directly in their published forms:
//! the hinge (u−1)₊ gives the two-point bound (1+TV)/2, the truncated entropy
//! (u log u − u + 1)·𝟙[u≥1] gives the Fano analogue (K̃ + N/(N+1))/log(N+1),
//! and the power u^{1+λ} gives C(λ)(N+1)⁻¹(Σ_j D_λ(P_j,Q))^{1/(1+λ)} with
//! C(λ) = (1+λ)λ^{−λ/(1+λ)} originally and C(λ) = 1 improved. The
//! Ibragimov–Has'minskii Fano form (K̃+log 2)/log N and Birgé's
//! κ ∨ (1+1/N)K̄/log(N+1) (κ = 0.7, or 0.84 after Massart) bound the minimax
//! success instead.
//!
//! A bound value u means: success probability ≤ u, hence minimax risk
//! ≥ 1 − u. Raw values ≥ 1 are clamped and flagged vacuous.

use std::fmt;
use std::sync::Arc;

use crate::divergence::{power_divergence, validate_lambda};
use crate::error::{Error, Result};
use crate::family::{
    resolve_reference, FiniteDistribution, FiniteFamily, GaussianFamily, ReferenceSpec,
};
use crate::numeric::{golden_section_min, ENTROPY_INVERT_TOL};

/// Birgé's constant κ.
pub const BIRGE_KAPPA: f64 = 0.7;
/// Massart's variant of κ.
pub const MASSART_KAPPA: f64 = 0.84;

/// Default λ search range for [`optimize_lambda`].
pub const DEFAULT_LAMBDA_RANGE: (f64, f64) = (1e-3, 1e3);
/// Default number of coarse log-grid points.
pub const DEFAULT_GRID_POINTS: usize = 61;
/// Default relative refinement tolerance on λ.
pub const DEFAULT_REFINE_TOL: f64 = 1e-6;

/// Which success probability a bound constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundTarget {
    BayesSuccess,
    MinimaxSuccess,
}

impl BoundTarget {
    pub fn label(self) -> &'static str {
        match self {
            BoundTarget::BayesSuccess => "bayes_success",
            BoundTarget::MinimaxSuccess => "minimax_success",
        }
    }
}

/// A convex, non-decreasing, non-negative test function with φ(1) ≤ 1.
#[derive(Clone)]
pub enum PhiFunction {
    /// (u − 1)₊
    Hinge,
    /// (u log u − u + 1)·𝟙[u ≥ 1]
    TruncatedEntropy,
    /// u^{1+λ}, λ > 0
    Power { lambda: f64 },
    /// Caller-supplied evaluator; the declared flags assert the theorem's
    /// hypotheses, which are additionally sanity-checked on a grid.
    Custom {
        name: String,
        evaluator: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        declared_convex: bool,
        declared_non_decreasing: bool,
    },
}

impl fmt::Debug for PhiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiFunction::Hinge => write!(f, "Hinge"),
            PhiFunction::TruncatedEntropy => write!(f, "TruncatedEntropy"),
            PhiFunction::Power { lambda } => write!(f, "Power({lambda})"),
            PhiFunction::Custom {
                name,
                declared_convex,
                declared_non_decreasing,
                ..
            } => write!(
                f,
                "Custom({name}, convex={declared_convex}, non_decreasing={declared_non_decreasing})"
            ),
        }
    }
}

const PHI_GRID_POINTS: usize = 1000;
const PHI_GRID_MAX: f64 = 10.0;

impl PhiFunction {
    /// Builds a custom φ, running the same grid check as [`validate`].
    pub fn custom(
        name: impl Into<String>,
        evaluator: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        declared_convex: bool,
        declared_non_decreasing: bool,
    ) -> Result<Self> {
        let phi = PhiFunction::Custom {
            name: name.into(),
            evaluator,
            declared_convex,
            declared_non_decreasing,
        };
        phi.validate()?;
        Ok(phi)
    }

    /// Method label used in reports: `phi_hinge`, `phi_entropy`, `phi_power`,
    /// or `phi_custom(name)`.
    pub fn method_label(&self) -> String {
        match self {
            PhiFunction::Hinge => "phi_hinge".into(),
            PhiFunction::TruncatedEntropy => "phi_entropy".into(),
            PhiFunction::Power { .. } => "phi_power".into(),
            PhiFunction::Custom { name, .. } => format!("phi_custom({name})"),
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        match self {
            PhiFunction::Hinge => (u - 1.0).max(0.0),
            PhiFunction::TruncatedEntropy => {
                if u >= 1.0 {
                    // (1+h)·ln(1+h) − h with h = u − 1 avoids the
                    // cancellation of u·ln u − u + 1 near u = 1, where the
                    // true value h²/2 + O(h³) sinks below the ulp of 1
                    let h = u - 1.0;
                    (1.0 + h) * h.ln_1p() - h
                } else {
                    0.0
                }
            }
            PhiFunction::Power { lambda } => u.powf(1.0 + lambda),
            PhiFunction::Custom { evaluator, .. } => evaluator(u),
        }
    }

    pub fn lambda(&self) -> Option<f64> {
        match self {
            PhiFunction::Power { lambda } => Some(*lambda),
            _ => None,
        }
    }

    /// Checks the theorem's hypotheses numerically on a 1000-point grid over
    /// [0, 10]: non-negativity, monotonicity for u ≥ 1, convexity via secant
    /// slopes, and φ(1) ≤ 1. Custom φ must also carry both declared flags.
    pub fn validate(&self) -> Result<()> {
        if let PhiFunction::Power { lambda } = self {
            validate_lambda(*lambda)?;
        }
        if let PhiFunction::Custom {
            name,
            declared_convex,
            declared_non_decreasing,
            ..
        } = self
        {
            if !(*declared_convex && *declared_non_decreasing) {
                return Err(Error::PhiProperty {
                    detail: format!(
                        "custom phi '{name}' must declare both convexity and monotonicity"
                    ),
                });
            }
        }
        let h = PHI_GRID_MAX / (PHI_GRID_POINTS - 1) as f64;
        let values: Vec<f64> = (0..PHI_GRID_POINTS)
            .map(|i| self.eval(i as f64 * h))
            .collect();
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || v < -1e-12 {
                return Err(Error::PhiProperty {
                    detail: format!(
                        "phi({}) = {v}, expected finite and non-negative",
                        i as f64 * h
                    ),
                });
            }
        }
        let mut prev_slope = f64::NEG_INFINITY;
        for (i, w) in values.windows(2).enumerate() {
            let slope = (w[1] - w[0]) / h;
            if slope < prev_slope - 1e-9 {
                return Err(Error::PhiProperty {
                    detail: format!("phi is not convex near u = {}", i as f64 * h),
                });
            }
            prev_slope = slope;
            if (i as f64 + 1.0) * h >= 1.0 && w[1] < w[0] - 1e-9 {
                return Err(Error::PhiProperty {
                    detail: format!("phi is not non-decreasing near u = {}", i as f64 * h),
                });
            }
        }
        let at_one = self.eval(1.0);
        if at_one > 1.0 + 1e-12 {
            return Err(Error::PhiProperty {
                detail: format!("phi(1) = {at_one}, expected <= 1"),
            });
        }
        Ok(())
    }
}

/// One evaluated bound: raw (pre-clamp) and clamped values plus the inputs
/// that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub method: String,
    pub target: BoundTarget,
    /// The formula value before clamping; may exceed 1 or be +∞.
    pub raw_value: f64,
    /// raw clamped into [1/(N+1), 1].
    pub value: f64,
    /// raw_value ≥ 1: the bound carries no information.
    pub vacuous: bool,
    pub lambda_used: Option<f64>,
    /// The reference the divergences were computed against; `None` for
    /// reference-free bounds (two-point).
    pub reference_used: Option<ReferenceSpec>,
    /// Named intermediate quantities (divergences, constants) for reports.
    pub divergence_inputs: Vec<(String, f64)>,
}

impl BoundResult {
    fn from_raw(
        method: impl Into<String>,
        target: BoundTarget,
        raw: f64,
        members: usize,
        lambda_used: Option<f64>,
        reference_used: Option<ReferenceSpec>,
        divergence_inputs: Vec<(String, f64)>,
    ) -> Self {
        let floor = 1.0 / members as f64;
        BoundResult {
            method: method.into(),
            target,
            raw_value: raw,
            value: raw.clamp(floor, 1.0),
            vacuous: raw >= 1.0,
            lambda_used,
            reference_used,
            divergence_inputs,
        }
    }
}

/// Exact moment sum S = Σ_j E_Q[φ(p_j/q)] = Σ_j Σ_x φ(p_j(x)/q(x)) q(x) μ(x).
/// Atoms with q = 0 must carry no member mass (domination); they contribute 0.
pub fn phi_moment_sum(family: &FiniteFamily, phi: &PhiFunction, q: &FiniteDistribution) -> f64 {
    let w = family.space().weights();
    let mut s = 0.0;
    for member in family.members() {
        for ((px, qx), wx) in member.density().iter().zip(q.density()).zip(w) {
            if *qx > 0.0 {
                s += phi.eval(px / qx) * qx * wx;
            } else if *px > 0.0 {
                return f64::INFINITY;
            }
        }
    }
    s
}

/// Largest u ∈ [1, N+1] with φ(u) ≤ S (generalized inverse of the
/// non-decreasing φ); N+1 when S = +∞ or the budget is never exhausted, 1
/// when even φ(1) exceeds S.
pub fn invert_phi(phi: &PhiFunction, s: f64, n: usize) -> f64 {
    let cap = (n + 1) as f64;
    uncapped_invert_phi(phi, s).clamp(1.0, cap)
}

/// The inverse without the N+1 cap; drives `raw_value` so that vacuousness
/// stays visible after clamping.
fn uncapped_invert_phi(phi: &PhiFunction, s: f64) -> f64 {
    debug_assert!(s >= 0.0 || s.is_nan());
    if s.is_infinite() {
        return f64::INFINITY;
    }
    let s = s.max(0.0);
    match phi {
        PhiFunction::Hinge => 1.0 + s,
        PhiFunction::Power { lambda } => s.powf(1.0 / (1.0 + lambda)),
        PhiFunction::TruncatedEntropy | PhiFunction::Custom { .. } => {
            // bisect for the largest u with φ(u) ≤ S, growing the upper end
            // until the budget is exceeded
            if phi.eval(1.0) > s {
                return 1.0;
            }
            let mut hi = 2.0;
            while phi.eval(hi) <= s {
                hi *= 2.0;
                if hi > 1e300 {
                    return f64::INFINITY;
                }
            }
            let mut lo = hi / 2.0;
            lo = lo.max(1.0);
            while hi - lo > ENTROPY_INVERT_TOL * lo.max(1.0) {
                let mid = 0.5 * (lo + hi);
                if phi.eval(mid) <= s {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        }
    }
}

/// The master bound: resolves Q, computes S = Σ_j E_Q[φ(p_j/q)] exactly, and
/// inverts φ. A non-dominating Q yields S = +∞ and a vacuous result rather
/// than an error.
pub fn phi_bound(
    family: &FiniteFamily,
    phi: &PhiFunction,
    reference: &ReferenceSpec,
) -> Result<BoundResult> {
    phi.validate()?;
    let members = family.len();
    let s = match resolve_reference(family, reference) {
        Ok(q) => phi_moment_sum(family, phi, &q),
        Err(Error::Domination { .. }) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    let raw = uncapped_invert_phi(phi, s) / members as f64;
    Ok(BoundResult::from_raw(
        phi.method_label(),
        BoundTarget::BayesSuccess,
        raw,
        members,
        phi.lambda(),
        Some(reference.clone()),
        vec![("phi_moment_sum".into(), s)],
    ))
}

/// Le Cam's two-point bound B̄ ≤ (1 + ‖P₀ − P₁‖_TV)/2 — an equality for
/// two-member families.
pub fn two_point_bound(p0: &FiniteDistribution, p1: &FiniteDistribution) -> Result<BoundResult> {
    let tv = crate::divergence::total_variation(p0, p1)?.value;
    Ok(BoundResult::from_raw(
        "two_point",
        BoundTarget::BayesSuccess,
        (1.0 + tv) / 2.0,
        2,
        None,
        None,
        vec![("total_variation".into(), tv)],
    ))
}

/// Fano's inequality in the Ibragimov–Has'minskii form:
/// R̄ ≤ (K̃ + log 2)/log N, needing N ≥ 2.
pub fn fano_ih_bound(k_tilde: f64, n: usize) -> Result<BoundResult> {
    if n < 2 {
        return Err(Error::Arity {
            method: "fano_ih",
            requirement: "N >= 2",
            n,
        });
    }
    let raw = (k_tilde + std::f64::consts::LN_2) / (n as f64).ln();
    Ok(BoundResult::from_raw(
        "fano_ih",
        BoundTarget::MinimaxSuccess,
        raw,
        n + 1,
        None,
        Some(ReferenceSpec::UniformMixture),
        vec![("k_tilde".into(), k_tilde)],
    ))
}

/// The Fano analogue for the Bayes success:
/// B̄ ≤ (K̃ + N/(N+1))/log(N+1), valid from N = 1 on. The slightly looser
/// (K̃ + 1)/log(N+1) variant is recorded alongside.
pub fn fano_new_bound(k_tilde: f64, n: usize) -> Result<BoundResult> {
    if n < 1 {
        return Err(Error::Arity {
            method: "fano_new",
            requirement: "N >= 1",
            n,
        });
    }
    let log_np1 = ((n + 1) as f64).ln();
    let raw = (k_tilde + n as f64 / (n as f64 + 1.0)) / log_np1;
    Ok(BoundResult::from_raw(
        "fano_new",
        BoundTarget::BayesSuccess,
        raw,
        n + 1,
        None,
        Some(ReferenceSpec::UniformMixture),
        vec![
            ("k_tilde".into(), k_tilde),
            ("variant_k_plus_1".into(), (k_tilde + 1.0) / log_np1),
        ],
    ))
}

/// Birgé's bound R̄ ≤ κ ∨ ((1 + 1/N)·K̄/log(N+1)) with K̄ the average KL
/// divergence to P₀; κ = 0.7, or 0.84 for the Massart variant.
pub fn birge_bound(k_bar: f64, n: usize, kappa: f64) -> Result<BoundResult> {
    if n < 1 {
        return Err(Error::Arity {
            method: "birge",
            requirement: "N >= 1",
            n,
        });
    }
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::Parameter {
            detail: format!("kappa must lie in (0, 1), got {kappa}"),
        });
    }
    let second = (1.0 + 1.0 / n as f64) * k_bar / ((n + 1) as f64).ln();
    let raw = kappa.max(second);
    let method = if (kappa - MASSART_KAPPA).abs() < 1e-15 {
        "birge_massart"
    } else {
        "birge"
    };
    Ok(BoundResult::from_raw(
        method,
        BoundTarget::MinimaxSuccess,
        raw,
        n + 1,
        None,
        Some(ReferenceSpec::Indexed { index: 0 }),
        vec![("k_bar".into(), k_bar), ("kappa".into(), kappa)],
    ))
}

/// C(λ) = (1+λ)·λ^{−λ/(1+λ)}: the constant of the original power-divergence
/// bound. C(1) = 2 exactly, C → 1 at both extremes, and C(1/λ) = C(λ).
pub fn c_lambda(lambda: f64) -> f64 {
    (1.0 + lambda) * (-lambda / (1.0 + lambda) * lambda.ln()).exp()
}

/// The power-divergence bound
/// B̄ ≤ C·(N+1)⁻¹·(Σ_j D_λ(P_j,Q))^{1/(1+λ)}, with C = C(λ) originally and
/// C = 1 in the improved version.
pub fn vj_bound(power_sum: f64, lambda: f64, n: usize, improved: bool) -> Result<BoundResult> {
    validate_lambda(lambda)?;
    if power_sum < 0.0 {
        return Err(Error::Parameter {
            detail: format!("power divergence sum must be non-negative, got {power_sum}"),
        });
    }
    let c = if improved { 1.0 } else { c_lambda(lambda) };
    let members = (n + 1) as f64;
    let raw = c * power_sum.powf(1.0 / (1.0 + lambda)) / members;
    Ok(BoundResult::from_raw(
        if improved { "vj_improved" } else { "vj" },
        BoundTarget::BayesSuccess,
        raw,
        n + 1,
        Some(lambda),
        None,
        vec![("power_sum".into(), power_sum), ("c_lambda".into(), c)],
    ))
}

/// Σ_j D_λ(P_j, Q) for a finite family; +∞ if any member escapes Q's support.
pub fn power_divergence_sum(
    family: &FiniteFamily,
    q: &FiniteDistribution,
    lambda: f64,
) -> Result<f64> {
    let mut s = 0.0;
    for member in family.members() {
        s += power_divergence(member, q, lambda)?.value;
        if s.is_infinite() {
            return Ok(f64::INFINITY);
        }
    }
    Ok(s)
}

fn validate_lambda_search(range: (f64, f64), grid_points: usize, refine_tol: f64) -> Result<()> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
        return Err(Error::Parameter {
            detail: format!("lambda range must satisfy 0 < min < max, got [{lo}, {hi}]"),
        });
    }
    if grid_points < 2 {
        return Err(Error::Parameter {
            detail: format!("lambda grid needs at least 2 points, got {grid_points}"),
        });
    }
    if !(refine_tol.is_finite() && refine_tol > 0.0) {
        return Err(Error::Parameter {
            detail: format!("refine tolerance must be positive, got {refine_tol}"),
        });
    }
    Ok(())
}

/// Minimizes an improved-bound objective f(λ) over λ: a coarse log-spaced
/// grid scan (with λ = 1 always evaluated first when in range, so the result
/// never exceeds the λ = 1 value) followed by golden-section refinement in
/// log λ around the grid minimum. Returns (λ*, f(λ*)).
pub fn optimize_lambda_objective(
    f: &dyn Fn(f64) -> f64,
    range: (f64, f64),
    grid_points: usize,
    refine_tol: f64,
) -> Result<(f64, f64)> {
    validate_lambda_search(range, grid_points, refine_tol)?;
    let (lo, hi) = range;
    let (mut best_l, mut best_v) = if (lo..=hi).contains(&1.0) {
        (1.0, f(1.0))
    } else {
        (lo, f(lo))
    };

    let log_lo = lo.ln();
    let log_hi = hi.ln();
    let step = (log_hi - log_lo) / (grid_points - 1) as f64;
    let grid: Vec<f64> = (0..grid_points)
        .map(|i| {
            if i + 1 == grid_points {
                hi
            } else {
                (log_lo + i as f64 * step).exp()
            }
        })
        .collect();
    let mut grid_best = 0usize;
    let mut grid_best_v = f64::INFINITY;
    for (i, &l) in grid.iter().enumerate() {
        let v = f(l);
        if v < grid_best_v {
            grid_best = i;
            grid_best_v = v;
        }
        if v < best_v {
            best_l = l;
            best_v = v;
        }
    }

    let bracket_lo = grid[grid_best.saturating_sub(1)].ln();
    let bracket_hi = grid[(grid_best + 1).min(grid_points - 1)].ln();
    if bracket_hi > bracket_lo {
        let (t_star, v_star) = golden_section_min(
            |t| f(t.exp()),
            bracket_lo,
            bracket_hi,
            refine_tol.max(1e-12),
        );
        if v_star < best_v {
            best_l = t_star.exp();
            best_v = v_star;
        }
    }
    Ok((best_l, best_v))
}

/// Optimizes the improved power-divergence bound over λ for a finite family.
/// A non-dominating reference makes every λ vacuous; λ = 1 is reported then.
pub fn optimize_lambda(
    family: &FiniteFamily,
    reference: &ReferenceSpec,
    range: (f64, f64),
    grid_points: usize,
    refine_tol: f64,
) -> Result<(f64, BoundResult)> {
    validate_lambda_search(range, grid_points, refine_tol)?;
    let n = family.n();
    let q = match resolve_reference(family, reference) {
        Ok(q) => q,
        Err(Error::Domination { .. }) => {
            let lambda = if (range.0..=range.1).contains(&1.0) {
                1.0
            } else {
                range.0
            };
            let mut result = vj_bound(f64::INFINITY, lambda, n, true)?;
            result.reference_used = Some(reference.clone());
            return Ok((lambda, result));
        }
        Err(e) => return Err(e),
    };
    let objective = |lambda: f64| -> f64 {
        match power_divergence_sum(family, &q, lambda) {
            Ok(s) => s.powf(1.0 / (1.0 + lambda)) / (n as f64 + 1.0),
            Err(_) => f64::INFINITY,
        }
    };
    let (lambda_star, _) = optimize_lambda_objective(&objective, range, grid_points, refine_tol)?;
    let s = power_divergence_sum(family, &q, lambda_star)?;
    let mut result = vj_bound(s, lambda_star, n, true)?;
    result.reference_used = Some(reference.clone());
    Ok((lambda_star, result))
}

/// λ optimization for Gaussian location families via the closed forms
/// D_λ = exp(λ(1+λ)‖θ_j − θ_r‖²/(2σ²)); the reference must be an indexed
/// member.
pub fn optimize_lambda_gaussian(
    family: &GaussianFamily,
    reference: &ReferenceSpec,
    range: (f64, f64),
    grid_points: usize,
    refine_tol: f64,
) -> Result<(f64, BoundResult)> {
    validate_lambda_search(range, grid_points, refine_tol)?;
    let half_rel = gaussian_half_relative_distances(family, reference)?;
    let n = family.n();
    let objective = |lambda: f64| -> f64 {
        let s: f64 = half_rel
            .iter()
            .map(|&c| (lambda * (1.0 + lambda) * c).exp())
            .sum();
        s.powf(1.0 / (1.0 + lambda)) / (n as f64 + 1.0)
    };
    let (lambda_star, _) = optimize_lambda_objective(&objective, range, grid_points, refine_tol)?;
    let s: f64 = half_rel
        .iter()
        .map(|&c| (lambda_star * (1.0 + lambda_star) * c).exp())
        .sum();
    let mut result = vj_bound(s, lambda_star, n, true)?;
    result.reference_used = Some(reference.clone());
    Ok((lambda_star, result))
}

/// ‖θ_j − θ_r‖²/(2σ²) per member against an indexed reference member.
pub(crate) fn gaussian_half_relative_distances(
    family: &GaussianFamily,
    reference: &ReferenceSpec,
) -> Result<Vec<f64>> {
    match reference {
        ReferenceSpec::Indexed { index } => {
            if *index >= family.len() {
                return Err(Error::Parameter {
                    detail: format!(
                        "reference index {index} out of range for {} members",
                        family.len()
                    ),
                });
            }
            let denom = 2.0 * family.sigma() * family.sigma();
            Ok((0..family.len())
                .map(|j| family.squared_distance(j, *index) / denom)
                .collect())
        }
        other => Err(Error::UnsupportedReference {
            detail: format!(
                "gaussian divergence bounds need an indexed reference member, got {}",
                other.label()
            ),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{make_counting_family, make_gaussian_family, mixture};
    use crate::risk::exact_bayes_success;

    fn pair() -> FiniteFamily {
        make_counting_family(vec![vec![0.6, 0.4], vec![0.4, 0.6]]).unwrap()
    }

    fn bernoulli_triple() -> FiniteFamily {
        make_counting_family(vec![vec![0.7, 0.3], vec![0.5, 0.5], vec![0.3, 0.7]]).unwrap()
    }

    fn point_masses() -> FiniteFamily {
        make_counting_family(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn registry_phis_pass_their_own_grid_check() {
        for phi in [
            PhiFunction::Hinge,
            PhiFunction::TruncatedEntropy,
            PhiFunction::Power { lambda: 0.5 },
            PhiFunction::Power { lambda: 1.0 },
            PhiFunction::Power { lambda: 3.0 },
        ] {
            phi.validate().unwrap();
        }
    }

    #[test]
    fn custom_phi_validation() {
        let good = PhiFunction::custom(
            "hinge_squared",
            Arc::new(|u: f64| (u - 1.0).max(0.0).powi(2)),
            true,
            true,
        )
        .unwrap();
        assert_eq!(good.method_label(), "phi_custom(hinge_squared)");

        // concave, so the secant-slope check must reject it
        assert!(matches!(
            PhiFunction::custom("sqrt", Arc::new(|u: f64| u.sqrt()), true, true),
            Err(Error::PhiProperty { .. })
        ));
        // undeclared flags are rejected before any grid evaluation
        assert!(matches!(
            PhiFunction::custom("undeclared", Arc::new(|u: f64| u), true, false),
            Err(Error::PhiProperty { .. })
        ));
        // phi(1) > 1 violates the normalization hypothesis
        assert!(matches!(
            PhiFunction::custom("shifted", Arc::new(|u: f64| u + 0.5), true, true),
            Err(Error::PhiProperty { .. })
        ));
    }

    #[test]
    fn invert_phi_examples() {
        assert_eq!(invert_phi(&PhiFunction::Power { lambda: 1.0 }, 4.0, 1), 2.0);
        let u = invert_phi(&PhiFunction::Hinge, 0.2, 1);
        assert!((u - 1.2).abs() < 1e-15);
        assert_eq!(invert_phi(&PhiFunction::TruncatedEntropy, 0.0, 3), 1.0);
        assert_eq!(invert_phi(&PhiFunction::Hinge, f64::INFINITY, 2), 3.0);
        // entropy inversion: phi(1.4) = 1.4 ln 1.4 − 0.4, so invert recovers 1.4
        let s = 1.4 * 1.4f64.ln() - 0.4;
        let u = invert_phi(&PhiFunction::TruncatedEntropy, s, 2);
        assert!((u - 1.4).abs() < 1e-11, "{u}");
    }

    #[test]
    fn hinge_bound_equals_two_point_on_pairs() {
        let fam = pair();
        let b = phi_bound(&fam, &PhiFunction::Hinge, &ReferenceSpec::UniformMixture).unwrap();
        assert!((b.value - 0.6).abs() < 1e-12);
        let tp = two_point_bound(fam.member(0), fam.member(1)).unwrap();
        assert!((b.value - tp.value).abs() < 1e-12);
        assert!(!b.vacuous);
    }

    #[test]
    fn two_point_examples() {
        let pm = point_masses();
        let b = two_point_bound(pm.member(0), pm.member(1)).unwrap();
        assert_eq!(b.value, 1.0);
        assert!(b.vacuous); // raw = 1 exactly: TV = 1 carries no slack

        let fam = pair();
        let b = two_point_bound(fam.member(0), fam.member(1)).unwrap();
        assert!((b.value - exact_bayes_success(&fam)).abs() < 1e-12);
    }

    #[test]
    fn power_phi_equals_improved_vj() {
        for fam in [pair(), bernoulli_triple()] {
            let q = mixture(&fam, &vec![1.0 / fam.len() as f64; fam.len()]).unwrap();
            for lambda in [0.3, 1.0, 2.5] {
                let via_phi = phi_bound(
                    &fam,
                    &PhiFunction::Power { lambda },
                    &ReferenceSpec::UniformMixture,
                )
                .unwrap();
                let s = power_divergence_sum(&fam, &q, lambda).unwrap();
                let via_vj = vj_bound(s, lambda, fam.n(), true).unwrap();
                let rel = (via_phi.raw_value - via_vj.raw_value).abs() / via_vj.raw_value;
                assert!(rel < 1e-12, "lambda={lambda} rel={rel}");
            }
        }
    }

    #[test]
    fn vj_examples() {
        // Bernoulli pair, λ=1, mixture Q: S = 2·1.04
        let fam = pair();
        let q = mixture(&fam, &[0.5, 0.5]).unwrap();
        let s = power_divergence_sum(&fam, &q, 1.0).unwrap();
        assert!((s - 2.08).abs() < 1e-14);
        let improved = vj_bound(s, 1.0, 1, true).unwrap();
        assert!((improved.value - 0.721_110_255_092_797_9).abs() < 1e-12);
        assert!(improved.value >= 0.6);
        let original = vj_bound(s, 1.0, 1, false).unwrap();
        assert!((original.raw_value - 1.442_220_510_185_595_8).abs() < 1e-12);
        assert!(original.vacuous);
        assert_eq!(original.value, 1.0);

        // point masses: improved bound is exactly 1 for every λ
        let pm = point_masses();
        let qm = mixture(&pm, &[0.5, 0.5]).unwrap();
        for lambda in [0.5, 1.0, 2.0, 7.0] {
            let s = power_divergence_sum(&pm, &qm, lambda).unwrap();
            assert!((s - 2.0 * 2.0f64.powf(lambda)).abs() < 1e-9 * s);
            let b = vj_bound(s, lambda, 1, true).unwrap();
            assert!((b.raw_value - 1.0).abs() < 1e-12, "lambda={lambda}");
        }
    }

    #[test]
    fn vj_ratio_is_exactly_c_lambda() {
        for lambda in [0.1, 1.0, 10.0] {
            let orig = vj_bound(2.08, lambda, 1, false).unwrap();
            let imp = vj_bound(2.08, lambda, 1, true).unwrap();
            let ratio = orig.raw_value / imp.raw_value;
            let rel = (ratio - c_lambda(lambda)).abs() / c_lambda(lambda);
            assert!(rel < 1e-12);
        }
    }

    #[test]
    fn c_lambda_properties() {
        assert_eq!(c_lambda(1.0), 2.0);
        for i in 0..41 {
            let l = 10f64.powf(-2.0 + i as f64 * 0.1);
            let c = c_lambda(l);
            assert!(c >= 1.0, "C({l}) = {c} < 1");
            let sym = c_lambda(1.0 / l);
            assert!((c - sym).abs() <= 1e-12 * c, "C not symmetric at {l}");
        }
        assert!((c_lambda(1e-2) - 1.0).abs() < 0.15);
        assert!((c_lambda(1e2) - 1.0).abs() < 0.15);
    }

    #[test]
    fn fano_ih_examples() {
        let b = fano_ih_bound(0.054878, 2).unwrap();
        assert!((b.raw_value - 1.079_173_065_550_77).abs() < 1e-4);
        assert!(b.vacuous);
        assert_eq!(b.value, 1.0);
        assert!(matches!(
            fano_ih_bound(0.1, 1),
            Err(Error::Arity {
                method: "fano_ih",
                ..
            })
        ));
        let inf = fano_ih_bound(f64::INFINITY, 3).unwrap();
        assert!(inf.vacuous);
    }

    #[test]
    fn fano_new_examples() {
        let k = 0.054_855_252_336_701_21;
        let b = fano_new_bound(k, 2).unwrap();
        assert!((b.raw_value - 0.656_757_553_547_937_1).abs() < 1e-12);
        assert!(b.raw_value > 7.0 / 15.0); // exceeds the exact Bayes success
        assert!(!b.vacuous);

        let zero = fano_new_bound(0.0, 2).unwrap();
        assert!((zero.raw_value - 2.0 / (3.0 * 3.0f64.ln())).abs() < 1e-12);
        assert!((zero.raw_value - 0.607).abs() < 1e-3);

        let n1 = fano_new_bound(0.1, 1).unwrap();
        assert!((n1.raw_value - 0.6 / std::f64::consts::LN_2).abs() < 1e-12);
        assert!((n1.raw_value - 0.8656).abs() < 1e-4);

        // the recorded (K̃+1)/log(N+1) variant is never tighter
        let variant = b
            .divergence_inputs
            .iter()
            .find(|(k, _)| k == "variant_k_plus_1")
            .unwrap()
            .1;
        assert!(variant >= b.raw_value);
    }

    #[test]
    fn birge_examples() {
        let b = birge_bound(0.0, 2, BIRGE_KAPPA).unwrap();
        assert_eq!(b.raw_value, 0.7);
        assert_eq!(b.method, "birge");
        assert!(!b.vacuous);

        // Bernoulli triple against P0: the kappa branch binds
        let k_bar = 0.142_031_945_909_090_1;
        let b = birge_bound(k_bar, 2, BIRGE_KAPPA).unwrap();
        let second = 1.5 * k_bar / 3.0f64.ln();
        assert!(second < 0.7);
        assert_eq!(b.raw_value, 0.7);

        let m = birge_bound(0.0, 2, MASSART_KAPPA).unwrap();
        assert_eq!(m.raw_value, 0.84);
        assert_eq!(m.method, "birge_massart");

        let inf = birge_bound(f64::INFINITY, 2, BIRGE_KAPPA).unwrap();
        assert!(inf.vacuous);
        assert_eq!(inf.value, 1.0);

        assert!(matches!(
            birge_bound(0.1, 2, 1.0),
            Err(Error::Parameter { .. })
        ));
    }

    #[test]
    fn entropy_bound_is_tight_on_the_triple() {
        // ratios p_j/q are {1.4, 1, 0.6}, so S = φ̄(1.4) = φ̄((N+1)·B̄):
        // the master inequality holds with equality and inversion returns B̄
        let fam = bernoulli_triple();
        let b = phi_bound(
            &fam,
            &PhiFunction::TruncatedEntropy,
            &ReferenceSpec::UniformMixture,
        )
        .unwrap();
        assert!((b.value - 7.0 / 15.0).abs() < 1e-11);
        let fano = fano_new_bound(0.054_855_252_336_701_21, 2).unwrap();
        assert!(b.value <= fano.value + 1e-10);
    }

    #[test]
    fn non_dominating_reference_gives_vacuous_phi_bound() {
        let pm = point_masses();
        let b = phi_bound(
            &pm,
            &PhiFunction::Hinge,
            &ReferenceSpec::Indexed { index: 0 },
        )
        .unwrap();
        assert!(b.vacuous);
        assert_eq!(b.value, 1.0);
        assert!(b.raw_value.is_infinite());
        assert!(b.divergence_inputs[0].1.is_infinite());
    }

    #[test]
    fn optimize_lambda_examples() {
        // constant objective on point masses: value 1 for every λ, vacuous
        let pm = point_masses();
        let (_, b) = optimize_lambda(
            &pm,
            &ReferenceSpec::UniformMixture,
            DEFAULT_LAMBDA_RANGE,
            DEFAULT_GRID_POINTS,
            DEFAULT_REFINE_TOL,
        )
        .unwrap();
        assert!((b.raw_value - 1.0).abs() < 1e-12);
        // raw sits exactly on the vacuity boundary, so the flag tracks the
        // sign of the last-ulp rounding
        assert_eq!(b.vacuous, b.raw_value >= 1.0);

        // Bernoulli pair: never worse than λ = 1
        let fam = pair();
        let q = mixture(&fam, &[0.5, 0.5]).unwrap();
        let at_one = vj_bound(power_divergence_sum(&fam, &q, 1.0).unwrap(), 1.0, 1, true).unwrap();
        let (lambda_star, b) = optimize_lambda(
            &fam,
            &ReferenceSpec::UniformMixture,
            DEFAULT_LAMBDA_RANGE,
            DEFAULT_GRID_POINTS,
            DEFAULT_REFINE_TOL,
        )
        .unwrap();
        assert!(b.raw_value <= at_one.raw_value + 1e-12);
        assert!(lambda_star > 0.0);
        // the pair objective decreases toward its infimum B̄ = 0.6
        assert!(b.raw_value >= 0.6 - 1e-12 && b.raw_value < 0.6005);

        // non-dominating reference: vacuous at the reported λ
        let (l, b) = optimize_lambda(
            &pm,
            &ReferenceSpec::Indexed { index: 0 },
            DEFAULT_LAMBDA_RANGE,
            DEFAULT_GRID_POINTS,
            DEFAULT_REFINE_TOL,
        )
        .unwrap();
        assert_eq!(l, 1.0);
        assert!(b.vacuous);
    }

    #[test]
    fn optimize_lambda_gaussian_anchor() {
        // Δ=1, σ=1, Q=P₀: S(λ) = 1 + exp(λ(1+λ)/2); minimizer frozen from a
        // dense-grid run
        let fam = make_gaussian_family(vec![vec![0.0], vec![1.0]], 1.0).unwrap();
        let (lambda_star, b) = optimize_lambda_gaussian(
            &fam,
            &ReferenceSpec::Indexed { index: 0 },
            DEFAULT_LAMBDA_RANGE,
            DEFAULT_GRID_POINTS,
            DEFAULT_REFINE_TOL,
        )
        .unwrap();
        assert!((lambda_star - 0.507_253_097_887_932_7).abs() < 1e-4);
        assert!((b.raw_value - 0.909_906_873_272_309_8).abs() < 1e-9);
        assert!(!b.vacuous);

        assert!(matches!(
            optimize_lambda_gaussian(
                &fam,
                &ReferenceSpec::UniformMixture,
                DEFAULT_LAMBDA_RANGE,
                DEFAULT_GRID_POINTS,
                DEFAULT_REFINE_TOL,
            ),
            Err(Error::UnsupportedReference { .. })
        ));
    }

    #[test]
    fn optimize_rejects_bad_search_parameters() {
        let fam = pair();
        for range in [(0.0, 1.0), (2.0, 1.0), (-1.0, 1.0)] {
            assert!(matches!(
                optimize_lambda(&fam, &ReferenceSpec::UniformMixture, range, 61, 1e-6),
                Err(Error::Parameter { .. })
            ));
        }
        assert!(matches!(
            optimize_lambda(&fam, &ReferenceSpec::UniformMixture, (1e-3, 1e3), 1, 1e-6),
            Err(Error::Parameter { .. })
        ));
    }

    #[test]
    fn master_inequality_on_fixed_families() {
        for fam in [pair(), bernoulli_triple(), point_masses()] {
            let u = fam.len() as f64 * exact_bayes_success(&fam);
            let q = mixture(&fam, &vec![1.0 / fam.len() as f64; fam.len()]).unwrap();
            for phi in [
                PhiFunction::Hinge,
                PhiFunction::TruncatedEntropy,
                PhiFunction::Power { lambda: 1.0 },
            ] {
                let s = phi_moment_sum(&fam, &phi, &q);
                assert!(
                    phi.eval(u) <= s + 1e-10,
                    "phi {:?}: phi(u)={} S={s}",
                    phi,
                    phi.eval(u)
                );
            }
        }
    }
}
