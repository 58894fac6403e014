//! Side-by-side evaluation of every applicable bound against the exact (or
//! Monte Carlo) Bayes success and the minimax bracket, with an always-on
//! soundness check: a reported upper bound falling below the oracle it must
//! dominate aborts the run with [`Error::Violation`] instead of silently
//! producing an unsound table.

use crate::bounds::{
    birge_bound, fano_ih_bound, fano_new_bound, gaussian_half_relative_distances, optimize_lambda,
    optimize_lambda_gaussian, optimize_lambda_objective, phi_bound, power_divergence_sum,
    two_point_bound, vj_bound, BoundResult, BoundTarget, PhiFunction, BIRGE_KAPPA,
    DEFAULT_GRID_POINTS, DEFAULT_LAMBDA_RANGE, DEFAULT_REFINE_TOL, MASSART_KAPPA,
};
use crate::divergence::{per_member_kl, validate_lambda};
use crate::error::{Error, Result};
use crate::family::{
    product_extend, resolve_reference, FiniteDistribution, FiniteFamily, GaussianFamily,
    ReferenceSpec,
};
use crate::risk::{
    bayes_success_via_reference, exact_bayes_success, mc_bayes_success, minimax_success_bracket,
    McEstimate, MinimaxBracket,
};

/// Tolerance for the soundness comparisons (bound vs. oracle).
pub const SOUNDNESS_TOL: f64 = 1e-9;
/// Tolerance for the two-route Bayes success identity.
pub const ROUTE_AGREEMENT_TOL: f64 = 1e-10;

/// A candidate family in either representation.
#[derive(Debug, Clone)]
pub enum FamilyModel {
    Finite(FiniteFamily),
    Gaussian(GaussianFamily),
}

impl FamilyModel {
    pub fn len(&self) -> usize {
        match self {
            FamilyModel::Finite(f) => f.len(),
            FamilyModel::Gaussian(f) => f.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The number of alternatives N: members minus one.
    pub fn n(&self) -> usize {
        self.len() - 1
    }
}

/// Registry of bound methods exposed to callers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    TwoPoint,
    FanoIh,
    FanoNew,
    Birge,
    BirgeMassart,
    Vj,
    VjImproved,
    PhiHinge,
    PhiEntropy,
    PhiPower,
}

impl Method {
    pub const ALL: [Method; 10] = [
        Method::TwoPoint,
        Method::FanoIh,
        Method::FanoNew,
        Method::Birge,
        Method::BirgeMassart,
        Method::Vj,
        Method::VjImproved,
        Method::PhiHinge,
        Method::PhiEntropy,
        Method::PhiPower,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::TwoPoint => "two_point",
            Method::FanoIh => "fano_ih",
            Method::FanoNew => "fano_new",
            Method::Birge => "birge",
            Method::BirgeMassart => "birge_massart",
            Method::Vj => "vj",
            Method::VjImproved => "vj_improved",
            Method::PhiHinge => "phi_hinge",
            Method::PhiEntropy => "phi_entropy",
            Method::PhiPower => "phi_power",
        }
    }

    pub fn parse(name: &str) -> Option<Method> {
        Method::ALL.iter().copied().find(|m| m.name() == name)
    }

    /// Whether the method consumes a power-divergence order λ.
    pub fn needs_lambda(self) -> bool {
        matches!(self, Method::Vj | Method::VjImproved | Method::PhiPower)
    }

    /// Whether tensorized evaluation over i.i.d. products is defined.
    pub fn tensorizes(self) -> bool {
        !matches!(
            self,
            Method::TwoPoint | Method::PhiHinge | Method::PhiEntropy
        )
    }
}

/// How λ is chosen for the power-divergence methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaPolicy {
    Fixed(f64),
    Optimize {
        range: (f64, f64),
        grid_points: usize,
        refine_tol: f64,
    },
}

impl Default for LambdaPolicy {
    fn default() -> Self {
        LambdaPolicy::Optimize {
            range: DEFAULT_LAMBDA_RANGE,
            grid_points: DEFAULT_GRID_POINTS,
            refine_tol: DEFAULT_REFINE_TOL,
        }
    }
}

/// Monte Carlo settings for Gaussian families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            samples: 100_000,
            seed: 42,
        }
    }
}

/// Budgets for the exact oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub minimax_iters: usize,
    pub enum_cap: u64,
    pub product_size_cap: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            minimax_iters: 50_000,
            enum_cap: 100_000,
            product_size_cap: 1_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompareConfig {
    pub reference: ReferenceSpec,
    pub methods: Vec<Method>,
    pub lambda: LambdaPolicy,
    pub mc: McConfig,
    pub oracle: OracleConfig,
    /// Test hook: multiplies the raw power-divergence bounds by this factor
    /// before the soundness check, to prove the check fails loudly.
    pub fault_vj_scale: Option<f64>,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            reference: ReferenceSpec::UniformMixture,
            methods: Method::ALL.to_vec(),
            lambda: LambdaPolicy::default(),
            mc: McConfig::default(),
            oracle: OracleConfig::default(),
            fault_vj_scale: None,
        }
    }
}

/// The oracle quantities evaluated alongside the bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskSummary {
    /// Exact B̄ for finite families.
    pub exact_bayes: Option<f64>,
    /// B̄ recomputed through the configured reference (when it dominates);
    /// always agrees with `exact_bayes` within 1e-10 or the run fails.
    pub via_reference: Option<f64>,
    /// Monte Carlo B̄ for Gaussian families.
    pub mc: Option<McEstimate>,
    /// Minimax bracket for finite families.
    pub bracket: Option<MinimaxBracket>,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub bounds: Vec<BoundResult>,
    pub risk: RiskSummary,
}

fn apply_fault(row: &mut BoundResult, method: Method, members: usize, fault: Option<f64>) {
    if let Some(scale) = fault {
        if matches!(method, Method::Vj | Method::VjImproved) {
            row.raw_value *= scale;
            row.value = row.raw_value.clamp(1.0 / members as f64, 1.0);
            row.vacuous = row.raw_value >= 1.0;
            row.divergence_inputs.push(("fault_scale".into(), scale));
        }
    }
}

fn check_soundness(
    bounds: &[BoundResult],
    bayes_floor: Option<f64>,
    minimax_floor: Option<f64>,
) -> Result<()> {
    for b in bounds {
        let floor = match b.target {
            BoundTarget::BayesSuccess => bayes_floor,
            BoundTarget::MinimaxSuccess => minimax_floor,
        };
        if let Some(floor) = floor {
            if b.value < floor - SOUNDNESS_TOL {
                return Err(Error::Violation {
                    detail: format!(
                        "{} = {} falls below the {} oracle {}",
                        b.method,
                        b.value,
                        b.target.label(),
                        floor
                    ),
                });
            }
        }
    }
    Ok(())
}

/// K̄ = average KL to P₀ plus the index of the first member with infinite
/// divergence, for diagnostics.
fn birge_inputs(family: &FiniteFamily) -> Result<(f64, Option<usize>)> {
    let kls = per_member_kl(family, family.member(0))?;
    let first_inf = kls.iter().position(|v| v.is_infinite());
    Ok((kls.iter().sum::<f64>() / kls.len() as f64, first_inf))
}

/// Evaluates every requested bound plus the risk oracles and checks
/// soundness. Finite families get the exact B̄ (cross-checked through the
/// reference route) and the minimax bracket; Gaussian families get the Monte
/// Carlo B̄, whose lower confidence limit serves as the Bayes-side floor.
pub fn compare_all(model: &FamilyModel, config: &CompareConfig) -> Result<Comparison> {
    match model {
        FamilyModel::Finite(fam) => compare_finite(fam, config),
        FamilyModel::Gaussian(fam) => compare_gaussian(fam, config),
    }
}

fn compare_finite(fam: &FiniteFamily, config: &CompareConfig) -> Result<Comparison> {
    let members = fam.len();
    let n = fam.n();
    let exact = exact_bayes_success(fam);

    let via = match resolve_reference(fam, &config.reference) {
        Ok(_) => {
            let v = bayes_success_via_reference(fam, &config.reference)?;
            if (v - exact).abs() > ROUTE_AGREEMENT_TOL {
                return Err(Error::Violation {
                    detail: format!(
                        "reference-route Bayes success {v} disagrees with exact {exact}"
                    ),
                });
            }
            Some(v)
        }
        Err(Error::Domination { .. }) => None,
        Err(e) => return Err(e),
    };

    let bracket = minimax_success_bracket(fam, config.oracle.minimax_iters)?;

    let needs_k_tilde = config
        .methods
        .iter()
        .any(|m| matches!(m, Method::FanoIh | Method::FanoNew));
    let k_tilde = if needs_k_tilde {
        let p_bar = resolve_reference(fam, &ReferenceSpec::UniformMixture)?;
        Some(per_member_kl(fam, &p_bar)?.iter().sum::<f64>() / members as f64)
    } else {
        None
    };

    let needs_k_bar = config
        .methods
        .iter()
        .any(|m| matches!(m, Method::Birge | Method::BirgeMassart));
    let birge_data = if needs_k_bar {
        Some(birge_inputs(fam)?)
    } else {
        None
    };

    let lambda_star = resolve_lambda(config, || {
        let (l, _) = match config.lambda {
            LambdaPolicy::Optimize {
                range,
                grid_points,
                refine_tol,
            } => optimize_lambda(fam, &config.reference, range, grid_points, refine_tol)?,
            LambdaPolicy::Fixed(_) => unreachable!(),
        };
        Ok(l)
    })?;

    let q = match resolve_reference(fam, &config.reference) {
        Ok(q) => Some(q),
        Err(Error::Domination { .. }) => None,
        Err(e) => return Err(e),
    };

    let mut bounds = Vec::with_capacity(config.methods.len());
    for &method in &config.methods {
        let mut row = match method {
            Method::TwoPoint => {
                if members != 2 {
                    return Err(Error::Arity {
                        method: "two_point",
                        requirement: "N = 1",
                        n,
                    });
                }
                two_point_bound(fam.member(0), fam.member(1))?
            }
            Method::FanoIh => fano_ih_bound(k_tilde.unwrap(), n)?,
            Method::FanoNew => fano_new_bound(k_tilde.unwrap(), n)?,
            Method::Birge | Method::BirgeMassart => {
                let (k_bar, first_inf) = birge_data.unwrap();
                let kappa = if method == Method::Birge {
                    BIRGE_KAPPA
                } else {
                    MASSART_KAPPA
                };
                let mut r = birge_bound(k_bar, n, kappa)?;
                if let Some(j) = first_inf {
                    r.divergence_inputs
                        .push(("first_infinite_member".into(), j as f64));
                }
                r
            }
            Method::Vj | Method::VjImproved => {
                let lambda = lambda_star.unwrap();
                let s = match &q {
                    Some(q) => power_divergence_sum(fam, q, lambda)?,
                    None => f64::INFINITY,
                };
                let mut r = vj_bound(s, lambda, n, method == Method::VjImproved)?;
                r.reference_used = Some(config.reference.clone());
                r
            }
            Method::PhiHinge => phi_bound(fam, &PhiFunction::Hinge, &config.reference)?,
            Method::PhiEntropy => {
                phi_bound(fam, &PhiFunction::TruncatedEntropy, &config.reference)?
            }
            Method::PhiPower => {
                let lambda = lambda_star.unwrap();
                phi_bound(fam, &PhiFunction::Power { lambda }, &config.reference)?
            }
        };
        apply_fault(&mut row, method, members, config.fault_vj_scale);
        bounds.push(row);
    }

    check_soundness(&bounds, Some(exact), Some(bracket.lower))?;
    Ok(Comparison {
        bounds,
        risk: RiskSummary {
            exact_bayes: Some(exact),
            via_reference: via,
            mc: None,
            bracket: Some(bracket),
        },
    })
}

/// λ to use for the power-divergence methods, or `None` when no requested
/// method needs one. `optimize` is only invoked under the optimize policy.
fn resolve_lambda(
    config: &CompareConfig,
    optimize: impl FnOnce() -> Result<f64>,
) -> Result<Option<f64>> {
    if !config.methods.iter().any(|m| m.needs_lambda()) {
        return Ok(None);
    }
    match config.lambda {
        LambdaPolicy::Fixed(l) => {
            validate_lambda(l)?;
            Ok(Some(l))
        }
        LambdaPolicy::Optimize { .. } => Ok(Some(optimize()?)),
    }
}

const GAUSSIAN_METHODS: &str =
    "fano_ih, fano_new, birge, birge_massart, vj, vj_improved, phi_power";

fn compare_gaussian(fam: &GaussianFamily, config: &CompareConfig) -> Result<Comparison> {
    let members = fam.len();
    let n = fam.n();
    if let Some(unsupported) = config
        .methods
        .iter()
        .find(|m| matches!(m, Method::TwoPoint | Method::PhiHinge | Method::PhiEntropy))
    {
        return Err(Error::UnsupportedReference {
            detail: format!(
                "method {} has no closed form for gaussian families; supported methods: {}",
                unsupported.name(),
                GAUSSIAN_METHODS
            ),
        });
    }

    let mc = mc_bayes_success(fam, &config.reference, config.mc.samples, config.mc.seed)?;

    // divergences against the configured (indexed) reference member
    let needs_ref_divergences = config
        .methods
        .iter()
        .any(|m| m.needs_lambda() || matches!(m, Method::FanoIh | Method::FanoNew));
    let half_rel = if needs_ref_divergences {
        Some(gaussian_half_relative_distances(fam, &config.reference)?)
    } else {
        None
    };
    let k_tilde = half_rel
        .as_ref()
        .map(|hr| hr.iter().sum::<f64>() / members as f64);

    let needs_k_bar = config
        .methods
        .iter()
        .any(|m| matches!(m, Method::Birge | Method::BirgeMassart));
    let k_bar = if needs_k_bar {
        let base = gaussian_half_relative_distances(fam, &ReferenceSpec::Indexed { index: 0 })?;
        Some(base.iter().sum::<f64>() / members as f64)
    } else {
        None
    };

    let power_sum = |lambda: f64| -> f64 {
        half_rel
            .as_ref()
            .unwrap()
            .iter()
            .map(|&c| (lambda * (1.0 + lambda) * c).exp())
            .sum()
    };

    let lambda_star = resolve_lambda(config, || {
        let (l, _) = match config.lambda {
            LambdaPolicy::Optimize {
                range,
                grid_points,
                refine_tol,
            } => optimize_lambda_gaussian(fam, &config.reference, range, grid_points, refine_tol)?,
            LambdaPolicy::Fixed(_) => unreachable!(),
        };
        Ok(l)
    })?;

    let mut bounds = Vec::with_capacity(config.methods.len());
    for &method in &config.methods {
        let mut row = match method {
            Method::FanoIh => {
                let mut r = fano_ih_bound(k_tilde.unwrap(), n)?;
                r.reference_used = Some(config.reference.clone());
                r
            }
            Method::FanoNew => {
                let mut r = fano_new_bound(k_tilde.unwrap(), n)?;
                r.reference_used = Some(config.reference.clone());
                r
            }
            Method::Birge | Method::BirgeMassart => {
                let kappa = if method == Method::Birge {
                    BIRGE_KAPPA
                } else {
                    MASSART_KAPPA
                };
                birge_bound(k_bar.unwrap(), n, kappa)?
            }
            Method::Vj | Method::VjImproved | Method::PhiPower => {
                let lambda = lambda_star.unwrap();
                let s = power_sum(lambda);
                let mut r = vj_bound(s, lambda, n, method != Method::Vj)?;
                if method == Method::PhiPower {
                    r.method = "phi_power".into();
                }
                r.reference_used = Some(config.reference.clone());
                r
            }
            Method::TwoPoint | Method::PhiHinge | Method::PhiEntropy => unreachable!(),
        };
        apply_fault(&mut row, method, members, config.fault_vj_scale);
        bounds.push(row);
    }

    // the Bayes-side floor is the lower 99% confidence limit of the MC run;
    // no minimax oracle exists for Gaussian families
    check_soundness(&bounds, Some(mc.ci_low), None)?;
    Ok(Comparison {
        bounds,
        risk: RiskSummary {
            exact_bayes: None,
            via_reference: None,
            mc: Some(mc),
            bracket: None,
        },
    })
}

/// One sweep step: the product size n, the exact product B̄ when the
/// materialization fits the size cap (`None` otherwise), and the tensorized
/// bounds.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub n: usize,
    pub exact_bayes: Option<f64>,
    pub bounds: Vec<BoundResult>,
}

/// Evaluates the requested bounds on the n-fold i.i.d. products for each n,
/// using tensorized divergences (KL → n·K, power → D^n) instead of
/// materializing the product space. Methods without a tensorization rule
/// (two_point, phi_hinge, phi_entropy) are rejected. The exact product B̄ is
/// recomputed while |atoms|^n fits the size cap and the Bayes-side soundness
/// check runs against it.
pub fn compare_tensorized(
    model: &FamilyModel,
    config: &CompareConfig,
    n_values: &[usize],
) -> Result<Vec<SweepPoint>> {
    if n_values.is_empty() || n_values.contains(&0) {
        return Err(Error::Parameter {
            detail: "sweep needs a non-empty list of n >= 1".into(),
        });
    }
    if let Some(bad) = config.methods.iter().find(|m| !m.tensorizes()) {
        let kind = match bad {
            Method::TwoPoint => "total variation (two_point)",
            Method::PhiHinge => "the hinge moment (phi_hinge)",
            Method::PhiEntropy => "the truncated entropy moment (phi_entropy)",
            _ => unreachable!(),
        };
        return Err(Error::Kind { kind });
    }
    match model {
        FamilyModel::Finite(fam) => sweep_finite(fam, config, n_values),
        FamilyModel::Gaussian(fam) => sweep_gaussian(fam, config, n_values),
    }
}

fn sweep_finite(
    fam: &FiniteFamily,
    config: &CompareConfig,
    n_values: &[usize],
) -> Result<Vec<SweepPoint>> {
    let members = fam.len();
    let n = fam.n();

    let needs_k_tilde = config
        .methods
        .iter()
        .any(|m| matches!(m, Method::FanoIh | Method::FanoNew));
    let k_tilde_base = if needs_k_tilde {
        let p_bar = resolve_reference(fam, &ReferenceSpec::UniformMixture)?;
        Some(per_member_kl(fam, &p_bar)?.iter().sum::<f64>() / members as f64)
    } else {
        None
    };
    let needs_k_bar = config
        .methods
        .iter()
        .any(|m| matches!(m, Method::Birge | Method::BirgeMassart));
    let birge_base = if needs_k_bar {
        Some(birge_inputs(fam)?)
    } else {
        None
    };
    let q: Option<FiniteDistribution> = match resolve_reference(fam, &config.reference) {
        Ok(q) => Some(q),
        Err(Error::Domination { .. }) => None,
        Err(e) => return Err(e),
    };
    let needs_lambda = config.methods.iter().any(|m| m.needs_lambda());

    let tensorized_sum = |lambda: f64, copies: usize| -> Result<f64> {
        match &q {
            Some(q) => {
                let mut total = 0.0;
                for member in fam.members() {
                    let d = crate::divergence::power_divergence(member, q, lambda)?.value;
                    total += d.powf(copies as f64);
                }
                Ok(total)
            }
            None => Ok(f64::INFINITY),
        }
    };

    let mut out = Vec::with_capacity(n_values.len());
    for &copies in n_values {
        let exact = match product_extend(fam, copies, config.oracle.product_size_cap) {
            Ok(ext) => Some(exact_bayes_success(&ext)),
            Err(Error::SizeCap { .. }) => None,
            Err(e) => return Err(e),
        };

        let lambda_for_n: Option<f64> = if needs_lambda {
            match config.lambda {
                LambdaPolicy::Fixed(l) => {
                    validate_lambda(l)?;
                    Some(l)
                }
                LambdaPolicy::Optimize {
                    range,
                    grid_points,
                    refine_tol,
                } => {
                    let objective = |lambda: f64| -> f64 {
                        match tensorized_sum(lambda, copies) {
                            Ok(s) => s.powf(1.0 / (1.0 + lambda)) / members as f64,
                            Err(_) => f64::INFINITY,
                        }
                    };
                    let (l, _) =
                        optimize_lambda_objective(&objective, range, grid_points, refine_tol)?;
                    Some(l)
                }
            }
        } else {
            None
        };

        let mut bounds = Vec::with_capacity(config.methods.len());
        for &method in &config.methods {
            let mut row = match method {
                Method::FanoIh => fano_ih_bound(copies as f64 * k_tilde_base.unwrap(), n)?,
                Method::FanoNew => fano_new_bound(copies as f64 * k_tilde_base.unwrap(), n)?,
                Method::Birge | Method::BirgeMassart => {
                    let (k_bar, first_inf) = birge_base.unwrap();
                    let kappa = if method == Method::Birge {
                        BIRGE_KAPPA
                    } else {
                        MASSART_KAPPA
                    };
                    let mut r = birge_bound(copies as f64 * k_bar, n, kappa)?;
                    if let Some(j) = first_inf {
                        r.divergence_inputs
                            .push(("first_infinite_member".into(), j as f64));
                    }
                    r
                }
                Method::Vj | Method::VjImproved | Method::PhiPower => {
                    let lambda = lambda_for_n.unwrap();
                    let s = tensorized_sum(lambda, copies)?;
                    let mut r = vj_bound(s, lambda, n, method != Method::Vj)?;
                    if method == Method::PhiPower {
                        r.method = "phi_power".into();
                    }
                    r.reference_used = Some(config.reference.clone());
                    r
                }
                _ => unreachable!("non-tensorizing methods rejected above"),
            };
            apply_fault(&mut row, method, members, config.fault_vj_scale);
            bounds.push(row);
        }

        check_soundness(&bounds, exact, None)?;
        out.push(SweepPoint {
            n: copies,
            exact_bayes: exact,
            bounds,
        });
    }
    Ok(out)
}

fn sweep_gaussian(
    fam: &GaussianFamily,
    config: &CompareConfig,
    n_values: &[usize],
) -> Result<Vec<SweepPoint>> {
    let members = fam.len();
    let n = fam.n();
    let needs_ref = config
        .methods
        .iter()
        .any(|m| m.needs_lambda() || matches!(m, Method::FanoIh | Method::FanoNew));
    let half_rel = if needs_ref {
        Some(gaussian_half_relative_distances(fam, &config.reference)?)
    } else {
        None
    };
    let k_tilde_base = half_rel
        .as_ref()
        .map(|hr| hr.iter().sum::<f64>() / members as f64);
    let needs_k_bar = config
        .methods
        .iter()
        .any(|m| matches!(m, Method::Birge | Method::BirgeMassart));
    let k_bar_base = if needs_k_bar {
        let base = gaussian_half_relative_distances(fam, &ReferenceSpec::Indexed { index: 0 })?;
        Some(base.iter().sum::<f64>() / members as f64)
    } else {
        None
    };

    let mut out = Vec::with_capacity(n_values.len());
    for &copies in n_values {
        let tensorized_sum = |lambda: f64| -> f64 {
            half_rel
                .as_ref()
                .unwrap()
                .iter()
                .map(|&c| (copies as f64 * lambda * (1.0 + lambda) * c).exp())
                .sum()
        };
        let lambda_for_n: Option<f64> = match config.lambda {
            _ if !config.methods.iter().any(|m| m.needs_lambda()) => None,
            LambdaPolicy::Fixed(l) => {
                validate_lambda(l)?;
                Some(l)
            }
            LambdaPolicy::Optimize {
                range,
                grid_points,
                refine_tol,
            } => {
                let objective = |lambda: f64| -> f64 {
                    tensorized_sum(lambda).powf(1.0 / (1.0 + lambda)) / members as f64
                };
                let (l, _) = optimize_lambda_objective(&objective, range, grid_points, refine_tol)?;
                Some(l)
            }
        };

        let mut bounds = Vec::with_capacity(config.methods.len());
        for &method in &config.methods {
            let mut row = match method {
                Method::FanoIh => {
                    let mut r = fano_ih_bound(copies as f64 * k_tilde_base.unwrap(), n)?;
                    r.reference_used = Some(config.reference.clone());
                    r
                }
                Method::FanoNew => {
                    let mut r = fano_new_bound(copies as f64 * k_tilde_base.unwrap(), n)?;
                    r.reference_used = Some(config.reference.clone());
                    r
                }
                Method::Birge | Method::BirgeMassart => {
                    let kappa = if method == Method::Birge {
                        BIRGE_KAPPA
                    } else {
                        MASSART_KAPPA
                    };
                    birge_bound(copies as f64 * k_bar_base.unwrap(), n, kappa)?
                }
                Method::Vj | Method::VjImproved | Method::PhiPower => {
                    let lambda = lambda_for_n.unwrap();
                    let s = tensorized_sum(lambda);
                    let mut r = vj_bound(s, lambda, n, method != Method::Vj)?;
                    if method == Method::PhiPower {
                        r.method = "phi_power".into();
                    }
                    r.reference_used = Some(config.reference.clone());
                    r
                }
                Method::TwoPoint | Method::PhiHinge | Method::PhiEntropy => {
                    unreachable!("non-tensorizing methods rejected above")
                }
            };
            apply_fault(&mut row, method, members, config.fault_vj_scale);
            bounds.push(row);
        }
        out.push(SweepPoint {
            n: copies,
            exact_bayes: None,
            bounds,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{make_counting_family, make_gaussian_family};

    fn pair() -> FiniteFamily {
        make_counting_family(vec![vec![0.6, 0.4], vec![0.4, 0.6]]).unwrap()
    }

    fn bernoulli_triple() -> FiniteFamily {
        make_counting_family(vec![vec![0.7, 0.3], vec![0.5, 0.5], vec![0.3, 0.7]]).unwrap()
    }

    fn config_with(methods: Vec<Method>, lambda: LambdaPolicy) -> CompareConfig {
        CompareConfig {
            methods,
            lambda,
            ..CompareConfig::default()
        }
    }

    #[test]
    fn pair_comparison_matches_known_values() {
        let model = FamilyModel::Finite(pair());
        let cfg = config_with(
            vec![
                Method::TwoPoint,
                Method::Vj,
                Method::VjImproved,
                Method::PhiHinge,
            ],
            LambdaPolicy::Fixed(1.0),
        );
        let c = compare_all(&model, &cfg).unwrap();
        assert!((c.risk.exact_bayes.unwrap() - 0.6).abs() < 1e-15);
        assert!((c.risk.via_reference.unwrap() - 0.6).abs() < 1e-10);
        let bracket = c.risk.bracket.unwrap();
        assert_eq!(bracket.lower, 0.6);
        assert_eq!(bracket.upper, 0.6);
        assert_eq!(bracket.iterations, 1);

        let by_name = |name: &str| c.bounds.iter().find(|b| b.method == name).unwrap();
        assert!((by_name("two_point").value - 0.6).abs() < 1e-12);
        assert!(by_name("vj").vacuous);
        assert!((by_name("vj_improved").value - 0.721_110_255_092_797_9).abs() < 1e-12);
        assert!((by_name("phi_hinge").value - 0.6).abs() < 1e-12);
    }

    #[test]
    fn triple_comparison_matches_known_values() {
        let model = FamilyModel::Finite(bernoulli_triple());
        let cfg = config_with(
            vec![
                Method::FanoIh,
                Method::FanoNew,
                Method::Birge,
                Method::PhiEntropy,
            ],
            LambdaPolicy::Fixed(1.0),
        );
        let c = compare_all(&model, &cfg).unwrap();
        let by_name = |name: &str| c.bounds.iter().find(|b| b.method == name).unwrap();
        assert!(by_name("fano_ih").vacuous);
        assert!((by_name("fano_new").raw_value - 0.656_757_553_547_937_1).abs() < 1e-12);
        assert_eq!(by_name("birge").raw_value, 0.7);
        assert!((by_name("phi_entropy").value - 7.0 / 15.0).abs() < 1e-10);
        assert!((c.risk.exact_bayes.unwrap() - 7.0 / 15.0).abs() < 1e-15);
        let bracket = c.risk.bracket.unwrap();
        assert!((bracket.lower - 7.0 / 17.0).abs() < 1e-9);
        assert!((bracket.upper - 7.0 / 17.0).abs() < 1e-9);
    }

    #[test]
    fn two_point_on_larger_family_is_an_arity_error() {
        let model = FamilyModel::Finite(bernoulli_triple());
        let cfg = config_with(vec![Method::TwoPoint], LambdaPolicy::Fixed(1.0));
        assert!(matches!(
            compare_all(&model, &cfg),
            Err(Error::Arity {
                method: "two_point",
                ..
            })
        ));
    }

    #[test]
    fn fano_ih_on_pair_is_an_arity_error() {
        let model = FamilyModel::Finite(pair());
        let cfg = config_with(vec![Method::FanoIh], LambdaPolicy::Fixed(1.0));
        assert!(matches!(
            compare_all(&model, &cfg),
            Err(Error::Arity {
                method: "fano_ih",
                ..
            })
        ));
    }

    #[test]
    fn fault_hook_trips_the_soundness_check() {
        let model = FamilyModel::Finite(pair());
        let mut cfg = config_with(vec![Method::VjImproved], LambdaPolicy::Fixed(1.0));
        cfg.fault_vj_scale = Some(0.5);
        // 0.5 · 0.7211 = 0.3606 < B̄ = 0.6: must fail loudly
        assert!(matches!(
            compare_all(&model, &cfg),
            Err(Error::Violation { .. })
        ));
    }

    #[test]
    fn gaussian_comparison_runs_supported_methods() {
        let fam = make_gaussian_family(vec![vec![0.0], vec![1.0]], 1.0).unwrap();
        let model = FamilyModel::Gaussian(fam);
        let mut cfg = config_with(
            vec![Method::Birge, Method::VjImproved, Method::PhiPower],
            LambdaPolicy::Fixed(1.0),
        );
        cfg.reference = ReferenceSpec::Indexed { index: 0 };
        cfg.mc.samples = 20_000;
        let c = compare_all(&model, &cfg).unwrap();
        let mc = c.risk.mc.unwrap();
        assert!(mc.ci_low <= 0.6915 && 0.6914 <= mc.ci_high);
        let vj = c.bounds.iter().find(|b| b.method == "vj_improved").unwrap();
        // S = 1 + e at λ=1: bound = √(1+e)/2
        let expect = (1.0 + std::f64::consts::E).sqrt() / 2.0;
        assert!((vj.raw_value - expect).abs() < 1e-12);
        let pp = c.bounds.iter().find(|b| b.method == "phi_power").unwrap();
        assert_eq!(pp.raw_value, vj.raw_value);
    }

    #[test]
    fn gaussian_rejects_methods_without_closed_forms() {
        let fam = make_gaussian_family(vec![vec![0.0], vec![1.0]], 1.0).unwrap();
        let model = FamilyModel::Gaussian(fam);
        let mut cfg = config_with(vec![Method::TwoPoint], LambdaPolicy::Fixed(1.0));
        cfg.reference = ReferenceSpec::Indexed { index: 0 };
        assert!(matches!(
            compare_all(&model, &cfg),
            Err(Error::UnsupportedReference { .. })
        ));
    }

    #[test]
    fn sweep_pair_matches_hand_values() {
        let model = FamilyModel::Finite(pair());
        let cfg = config_with(vec![Method::VjImproved], LambdaPolicy::Fixed(1.0));
        let points = compare_tensorized(&model, &cfg, &[1, 2, 3]).unwrap();
        let exact: Vec<f64> = points.iter().map(|p| p.exact_bayes.unwrap()).collect();
        assert!((exact[0] - 0.6).abs() < 1e-12);
        assert!((exact[1] - 0.6).abs() < 1e-12);
        assert!((exact[2] - 0.648).abs() < 1e-12);
        for w in exact.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
        for (i, p) in points.iter().enumerate() {
            let s = 2.0 * 1.04f64.powi(i as i32 + 1);
            let expect = s.sqrt() / 2.0;
            assert!((p.bounds[0].raw_value - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn sweep_gaussian_matches_closed_form() {
        let fam = make_gaussian_family(vec![vec![0.0], vec![1.0]], 1.0).unwrap();
        let model = FamilyModel::Gaussian(fam);
        let mut cfg = config_with(vec![Method::VjImproved], LambdaPolicy::Fixed(1.0));
        cfg.reference = ReferenceSpec::Indexed { index: 0 };
        let points = compare_tensorized(&model, &cfg, &[1, 2, 3]).unwrap();
        for p in &points {
            let expect = (1.0 + (p.n as f64).exp()).sqrt() / 2.0;
            assert!((p.bounds[0].raw_value - expect).abs() < 1e-12);
            assert_eq!(p.bounds[0].vacuous, p.n >= 2);
        }
        // the n = 2 tensorized value equals the direct product-family value
        let ext = fam_product_check();
        assert!((points[1].bounds[0].raw_value - ext).abs() < 1e-12);
    }

    fn fam_product_check() -> f64 {
        let fam = make_gaussian_family(vec![vec![0.0], vec![1.0]], 1.0)
            .unwrap()
            .product_extend(2)
            .unwrap();
        let d = crate::divergence::gaussian_divergences(
            &fam,
            &ReferenceSpec::Indexed { index: 0 },
            1.0,
        )
        .unwrap();
        let s: f64 = d.power.iter().sum();
        s.sqrt() / 2.0
    }

    #[test]
    fn sweep_rejects_non_tensorizing_methods_and_bad_n() {
        let model = FamilyModel::Finite(pair());
        let cfg = config_with(vec![Method::TwoPoint], LambdaPolicy::Fixed(1.0));
        assert!(matches!(
            compare_tensorized(&model, &cfg, &[1, 2]),
            Err(Error::Kind { .. })
        ));
        let cfg = config_with(vec![Method::VjImproved], LambdaPolicy::Fixed(1.0));
        assert!(matches!(
            compare_tensorized(&model, &cfg, &[1, 0]),
            Err(Error::Parameter { .. })
        ));
        assert!(matches!(
            compare_tensorized(&model, &cfg, &[]),
            Err(Error::Parameter { .. })
        ));
    }

    #[test]
    fn method_registry_round_trips() {
        for m in Method::ALL {
            assert_eq!(Method::parse(m.name()), Some(m));
        }
        assert_eq!(Method::parse("fanno"), None);
    }

    #[test]
    fn sweep_beyond_cap_omits_exact_values() {
        let model = FamilyModel::Finite(pair());
        let mut cfg = config_with(vec![Method::VjImproved], LambdaPolicy::Fixed(1.0));
        cfg.oracle.product_size_cap = 4;
        let points = compare_tensorized(&model, &cfg, &[1, 2, 3]).unwrap();
        assert!(points[0].exact_bayes.is_some());
        assert!(points[1].exact_bayes.is_some());
        assert!(points[2].exact_bayes.is_none());
    }
}
