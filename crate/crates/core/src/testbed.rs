//! Randomized verification of the engine's structural guarantees: every
//! bound must sit above the exact Bayes success it claims to dominate, the
//! two evaluation routes for B̄ must agree, the unified moment inequality
//! must hold for every convex φ and every dominating reference, and the
//! specializations must reproduce the classical bounds they subsume.
//!
//! A failed check produces a reproducer — the offending family, greedily
//! shrunk while the failure persists — so a regression can be replayed from
//! a single scenario file.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::bounds::{
    c_lambda, fano_new_bound, phi_bound, phi_moment_sum, power_divergence_sum, two_point_bound,
    vj_bound, PhiFunction,
};
use crate::compare::{compare_all, CompareConfig, FamilyModel, LambdaPolicy, Method};
use crate::divergence::{
    kl, per_member_kl, power_divergence, tensorize, total_variation, DivergenceKind,
};
use crate::error::{Error, Result};
use crate::family::{
    make_finite_family, make_gaussian_family, product_extend, product_extend_distribution,
    resolve_reference, FiniteFamily, GaussianFamily, ReferenceSpec,
};
use crate::risk::{
    bayes_success_via_reference, enumerate_deterministic, exact_bayes_success,
    minimax_success_bracket,
};

/// Largest N for randomly generated families.
const MAX_MEMBERS: usize = 9;
/// Largest alphabet for randomly generated families.
const MAX_ALPHABET: usize = 20;
/// Attempts before giving up on drawing a valid random family.
const GENERATOR_RETRIES: usize = 200;
/// Iteration budget for the minimax oracle inside the soundness suite; the
/// bracket's lower edge is valid at any budget, so a small one suffices.
const SOUNDNESS_MINIMAX_ITERS: usize = 2_000;

/// Aggregate result of one named suite.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub checks: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

/// A failing family in plain matrix form, small enough to replay by hand.
#[derive(Debug, Clone)]
pub struct Reproducer {
    pub suite: &'static str,
    pub detail: String,
    pub atom_weights: Vec<f64>,
    pub densities: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub suites: Vec<SuiteOutcome>,
    pub reproducer: Option<Reproducer>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.failures == 0)
    }
}

struct SuiteRun {
    name: &'static str,
    checks: usize,
    failures: usize,
    first_failure: Option<String>,
    reproducer: Option<Reproducer>,
}

impl SuiteRun {
    fn new(name: &'static str) -> Self {
        SuiteRun {
            name,
            checks: 0,
            failures: 0,
            first_failure: None,
            reproducer: None,
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(detail());
            }
        }
    }

    /// Like [`check`](Self::check) but deposits the offending family as a
    /// reproducer on first failure.
    fn check_with_family(
        &mut self,
        ok: bool,
        family: &FiniteFamily,
        detail: impl FnOnce() -> String,
    ) {
        let fresh = !ok && self.first_failure.is_none();
        self.check(ok, detail);
        if fresh {
            self.reproducer = Some(reproducer_from(
                self.name,
                family,
                self.first_failure.clone().unwrap_or_default(),
            ));
        }
    }

    fn finish(self) -> (SuiteOutcome, Option<Reproducer>) {
        (
            SuiteOutcome {
                name: self.name,
                checks: self.checks,
                failures: self.failures,
                first_failure: self.first_failure,
            },
            self.reproducer,
        )
    }
}

fn reproducer_from(suite: &'static str, family: &FiniteFamily, detail: String) -> Reproducer {
    Reproducer {
        suite,
        detail,
        atom_weights: family.space().weights().to_vec(),
        densities: family
            .members()
            .iter()
            .map(|m| m.density().to_vec())
            .collect(),
    }
}

/// Draws a family with `members` rows over a random alphabet of up to
/// `max_alphabet` atoms. Three quarters use counting weights, the rest use
/// random atom weights; one row in five is sparsified to exercise partial
/// supports.
pub fn random_family_sized(
    rng: &mut ChaCha12Rng,
    members: usize,
    max_alphabet: usize,
) -> FiniteFamily {
    for _ in 0..GENERATOR_RETRIES {
        let atoms = rng.random_range(2..=max_alphabet);
        let weights: Vec<f64> = if rng.random::<f64>() < 0.75 {
            vec![1.0; atoms]
        } else {
            (0..atoms).map(|_| rng.random_range(0.5..2.0)).collect()
        };
        let mut rows = Vec::with_capacity(members);
        for _ in 0..members {
            let mut density: Vec<f64> = (0..atoms).map(|_| rng.random_range(0.05..1.0)).collect();
            if rng.random::<f64>() < 0.2 {
                for _ in 0..rng.random_range(1..atoms) {
                    let i = rng.random_range(0..atoms);
                    density[i] = 0.0;
                }
                if density.iter().all(|&d| d == 0.0) {
                    density[0] = 1.0;
                }
            }
            let mass: f64 = density.iter().zip(&weights).map(|(d, w)| d * w).sum();
            for d in &mut density {
                *d /= mass;
            }
            rows.push(density);
        }
        let labels = (0..atoms).map(|i| i.to_string()).collect();
        if let Ok(fam) = make_finite_family(labels, weights.clone(), rows) {
            return fam;
        }
    }
    unreachable!("random family generation failed {GENERATOR_RETRIES} times in a row");
}

/// Draws a family with a random member count in 2..=[`MAX_MEMBERS`].
pub fn random_family(rng: &mut ChaCha12Rng) -> FiniteFamily {
    let members = rng.random_range(2..=MAX_MEMBERS);
    random_family_sized(rng, members, MAX_ALPHABET)
}

fn random_gaussian_pair(rng: &mut ChaCha12Rng) -> GaussianFamily {
    for _ in 0..GENERATOR_RETRIES {
        let dim = rng.random_range(1..=3);
        let sigma = rng.random_range(0.5..2.0);
        let theta: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        if let Ok(fam) = make_gaussian_family(vec![vec![0.0; dim], theta], sigma) {
            return fam;
        }
    }
    unreachable!("random gaussian pair generation failed {GENERATOR_RETRIES} times in a row");
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    if a.is_infinite() || b.is_infinite() {
        return false;
    }
    (a - b).abs() <= tol * 1.0f64.max(a.abs()).max(b.abs())
}

/// Runs every verification suite with families drawn from `seed`.
///
/// `n_families` sizes the main batch shared by the family-parameterized
/// suites. `fault_vj_scale` is the test hook that corrupts the
/// power-divergence bounds inside the soundness suite; a working checker
/// must report failures when it is set.
pub fn run_verification(
    seed: u64,
    n_families: usize,
    fault_vj_scale: Option<f64>,
) -> Result<VerificationReport> {
    if n_families == 0 {
        return Err(Error::Parameter {
            detail: "verification needs at least one family".into(),
        });
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let batch: Vec<FiniteFamily> = (0..n_families).map(|_| random_family(&mut rng)).collect();

    let mut suites = Vec::new();
    let mut reproducer: Option<Reproducer> = None;
    let push = |run: SuiteRun, repro_slot: &mut Option<Reproducer>| {
        let (outcome, repro) = run.finish();
        if repro_slot.is_none() {
            *repro_slot = repro;
        }
        outcome
    };

    let run = suite_two_point_equality(&mut rng);
    suites.push(push(run, &mut reproducer));
    let run = suite_reference_route_agreement(&batch, &mut rng);
    suites.push(push(run, &mut reproducer));
    let run = suite_master_phi_inequality(&batch);
    suites.push(push(run, &mut reproducer));
    let run = suite_power_specialization(&batch);
    suites.push(push(run, &mut reproducer));
    let run = suite_entropy_dominates_fano_new(&batch);
    suites.push(push(run, &mut reproducer));
    let run = suite_c_lambda_properties();
    suites.push(push(run, &mut reproducer));
    let run = suite_compare_soundness(&batch, fault_vj_scale);
    suites.push(push(run, &mut reproducer));
    let run = suite_tensorization_agreement(&mut rng);
    suites.push(push(run, &mut reproducer));
    let run = suite_tensorized_vj_monotone(&mut rng);
    suites.push(push(run, &mut reproducer));
    let run = suite_minimax_bracket_sanity(&mut rng);
    suites.push(push(run, &mut reproducer));

    Ok(VerificationReport { suites, reproducer })
}

/// For N = 1 the two-point bound is an identity: B̄ = (1 + TV)/2.
fn suite_two_point_equality(rng: &mut ChaCha12Rng) -> SuiteRun {
    let mut run = SuiteRun::new("two_point_equality");
    for _ in 0..50 {
        let fam = random_family_sized(rng, 2, MAX_ALPHABET);
        let exact = exact_bayes_success(&fam);
        match two_point_bound(fam.member(0), fam.member(1)) {
            Ok(b) => run.check_with_family((b.value - exact).abs() <= 1e-10, &fam, || {
                format!("two_point {} vs exact {exact}", b.value)
            }),
            Err(e) => run.check_with_family(false, &fam, || format!("two_point failed: {e}")),
        }
    }
    run
}

/// (N+1)·B̄ = E_Q[max_j p_j/q] for every dominating Q, so the direct route
/// and the reference route must agree — and the identity forces
/// (N+1)·B̄ ≥ 1.
fn suite_reference_route_agreement(batch: &[FiniteFamily], rng: &mut ChaCha12Rng) -> SuiteRun {
    let mut run = SuiteRun::new("reference_route_agreement");
    for fam in batch {
        let exact = exact_bayes_success(fam);
        run.check_with_family(fam.len() as f64 * exact >= 1.0 - 1e-12, fam, || {
            format!("(N+1)·B̄ = {} < 1", fam.len() as f64 * exact)
        });

        let mut specs = vec![ReferenceSpec::UniformMixture];
        let raw: Vec<f64> = (0..fam.len()).map(|_| rng.random_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        specs.push(ReferenceSpec::CustomWeights {
            weights: raw.iter().map(|w| w / total).collect(),
        });
        if let Ok(p_bar) = resolve_reference(fam, &ReferenceSpec::UniformMixture) {
            let total_weight: f64 = fam.space().weights().iter().sum();
            let density = p_bar
                .density()
                .iter()
                .map(|&d| 0.9 * d + 0.1 / total_weight)
                .collect();
            specs.push(ReferenceSpec::CustomDensity { density });
        }
        for spec in specs {
            match bayes_success_via_reference(fam, &spec) {
                Ok(via) => run.check_with_family((via - exact).abs() <= 1e-10, fam, || {
                    format!(
                        "route mismatch via {}: {via} vs exact {exact}",
                        spec.label()
                    )
                }),
                Err(e) => run.check_with_family(false, fam, || {
                    format!("reference route {} failed: {e}", spec.label())
                }),
            }
        }
    }
    run
}

/// The unified inequality φ((N+1)·B̄) ≤ Σ_j E_Q[φ(p_j/q)] for every convex,
/// non-decreasing φ with φ(1) ≤ 1 and every dominating reference.
fn suite_master_phi_inequality(batch: &[FiniteFamily]) -> SuiteRun {
    let mut run = SuiteRun::new("master_phi_inequality");
    let phis = [
        PhiFunction::Hinge,
        PhiFunction::TruncatedEntropy,
        PhiFunction::Power { lambda: 1.0 },
    ];
    for fam in batch {
        let scaled = fam.len() as f64 * exact_bayes_success(fam);
        let mut references = Vec::new();
        if let Ok(p_bar) = resolve_reference(fam, &ReferenceSpec::UniformMixture) {
            references.push((p_bar, "uniform mixture"));
        }
        if let Some(member) = fam
            .members()
            .iter()
            .find(|m| m.density().iter().all(|&d| d > 0.0))
        {
            references.push((member.clone(), "full-support member"));
        }
        for phi in &phis {
            for (q, label) in &references {
                let s = phi_moment_sum(fam, phi, q);
                run.check_with_family(phi.eval(scaled) <= s + 1e-10, fam, || {
                    format!(
                        "φ((N+1)B̄) = {} exceeds moment sum {s} for {} against {label}",
                        phi.eval(scaled),
                        phi.method_label()
                    )
                });
            }
        }
    }
    run
}

/// φ(u) = u^{1+λ} reproduces the improved power-divergence bound exactly,
/// and the hinge φ reproduces the two-point bound on pairs.
fn suite_power_specialization(batch: &[FiniteFamily]) -> SuiteRun {
    let mut run = SuiteRun::new("power_specialization");
    for fam in batch {
        for lambda in [0.5, 1.0, 2.0] {
            let via_phi = phi_bound(
                fam,
                &PhiFunction::Power { lambda },
                &ReferenceSpec::UniformMixture,
            );
            let via_vj = resolve_reference(fam, &ReferenceSpec::UniformMixture)
                .and_then(|q| power_divergence_sum(fam, &q, lambda))
                .and_then(|s| vj_bound(s, lambda, fam.n(), true));
            match (via_phi, via_vj) {
                (Ok(a), Ok(b)) => {
                    run.check_with_family(rel_close(a.raw_value, b.raw_value, 1e-12), fam, || {
                        format!(
                            "phi_power raw {} vs improved bound raw {} at λ={lambda}",
                            a.raw_value, b.raw_value
                        )
                    })
                }
                (a, b) => run.check_with_family(false, fam, || {
                    format!("specialization errored: {a:?} vs {b:?}")
                }),
            }
        }
        if fam.len() == 2 {
            let hinge = phi_bound(fam, &PhiFunction::Hinge, &ReferenceSpec::UniformMixture);
            let tp = two_point_bound(fam.member(0), fam.member(1));
            match (hinge, tp) {
                (Ok(a), Ok(b)) => {
                    run.check_with_family((a.value - b.value).abs() <= 1e-12, fam, || {
                        format!("hinge {} vs two_point {}", a.value, b.value)
                    })
                }
                (a, b) => run.check_with_family(false, fam, || {
                    format!("hinge specialization errored: {a:?} vs {b:?}")
                }),
            }
        }
    }
    run
}

/// Exact inversion of the truncated-entropy moment is at least as tight as
/// its linearized form.
fn suite_entropy_dominates_fano_new(batch: &[FiniteFamily]) -> SuiteRun {
    let mut run = SuiteRun::new("entropy_dominates_fano_new");
    for fam in batch {
        let entropy = phi_bound(
            fam,
            &PhiFunction::TruncatedEntropy,
            &ReferenceSpec::UniformMixture,
        );
        let fano = resolve_reference(fam, &ReferenceSpec::UniformMixture)
            .and_then(|p_bar| per_member_kl(fam, &p_bar))
            .map(|kls| kls.iter().sum::<f64>() / fam.len() as f64)
            .and_then(|k_tilde| fano_new_bound(k_tilde, fam.n()));
        match (entropy, fano) {
            (Ok(e), Ok(f)) => {
                run.check_with_family(e.raw_value <= f.raw_value + 1e-10, fam, || {
                    format!(
                        "entropy raw {} above fano_new raw {}",
                        e.raw_value, f.raw_value
                    )
                })
            }
            (e, f) => run.check_with_family(false, fam, || {
                format!("entropy/fano comparison errored: {e:?} vs {f:?}")
            }),
        }
    }
    run
}

/// The constant C(λ) = (1+λ)·λ^{−λ/(1+λ)}: at least 1 everywhere, exactly 2
/// at λ = 1, and symmetric under λ ↔ 1/λ.
fn suite_c_lambda_properties() -> SuiteRun {
    let mut run = SuiteRun::new("c_lambda_properties");
    run.check(c_lambda(1.0) == 2.0, || format!("C(1) = {}", c_lambda(1.0)));
    for i in 0..41 {
        let lambda = 10f64.powf(-2.0 + i as f64 * 0.1);
        let c = c_lambda(lambda);
        run.check(c >= 1.0 - 1e-12, || format!("C({lambda}) = {c} < 1"));
        let mirrored = c_lambda(1.0 / lambda);
        run.check(rel_close(c, mirrored, 1e-12), || {
            format!("C({lambda}) = {c} but C(1/λ) = {mirrored}")
        });
    }
    run
}

fn soundness_methods(members: usize) -> Vec<Method> {
    let mut methods = vec![
        Method::FanoNew,
        Method::Birge,
        Method::BirgeMassart,
        Method::Vj,
        Method::VjImproved,
        Method::PhiHinge,
        Method::PhiEntropy,
        Method::PhiPower,
    ];
    if members == 2 {
        methods.push(Method::TwoPoint);
    } else {
        methods.push(Method::FanoIh);
    }
    methods
}

fn soundness_violation(fam: &FiniteFamily, fault: Option<f64>, optimize: bool) -> Option<String> {
    let config = CompareConfig {
        methods: soundness_methods(fam.len()),
        lambda: if optimize {
            LambdaPolicy::default()
        } else {
            LambdaPolicy::Fixed(1.0)
        },
        oracle: crate::compare::OracleConfig {
            minimax_iters: SOUNDNESS_MINIMAX_ITERS,
            ..Default::default()
        },
        fault_vj_scale: fault,
        ..CompareConfig::default()
    };
    match compare_all(&FamilyModel::Finite(fam.clone()), &config) {
        Ok(_) => None,
        Err(e) => Some(e.to_string()),
    }
}

/// Every bound must clear the oracle it dominates; violations shrink the
/// offending family one member at a time while the failure persists.
fn suite_compare_soundness(batch: &[FiniteFamily], fault: Option<f64>) -> SuiteRun {
    let mut run = SuiteRun::new("compare_soundness");
    let anchors = [
        make_finite_family(
            vec!["0".into(), "1".into()],
            vec![1.0, 1.0],
            vec![vec![0.6, 0.4], vec![0.4, 0.6]],
        )
        .expect("anchor pair"),
        make_finite_family(
            vec!["0".into(), "1".into()],
            vec![1.0, 1.0],
            vec![vec![0.7, 0.3], vec![0.5, 0.5], vec![0.3, 0.7]],
        )
        .expect("anchor triple"),
    ];
    for (i, fam) in anchors.iter().chain(batch.iter()).enumerate() {
        let violation = soundness_violation(fam, fault, false);
        let ok = violation.is_none();
        run.checks += 1;
        if !ok {
            run.failures += 1;
            if run.first_failure.is_none() {
                let detail = violation.unwrap_or_default();
                let minimal = minimize_failure(fam, &|candidate| {
                    soundness_violation(candidate, fault, false).is_some()
                });
                run.first_failure = Some(detail.clone());
                run.reproducer = Some(reproducer_from("compare_soundness", &minimal, detail));
            }
        }
        if i % 10 == 0 {
            let violation = soundness_violation(fam, fault, true);
            run.check_with_family(violation.is_none(), fam, || {
                format!(
                    "optimized-λ comparison failed: {}",
                    violation.clone().unwrap_or_default()
                )
            });
        }
    }
    run
}

/// Greedily drops members while `fails` still holds, yielding a smaller
/// witness of the same failure.
fn minimize_failure(family: &FiniteFamily, fails: &dyn Fn(&FiniteFamily) -> bool) -> FiniteFamily {
    let mut current = family.clone();
    'outer: loop {
        if current.len() <= 2 {
            return current;
        }
        for drop in 0..current.len() {
            let members: Vec<_> = current
                .members()
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != drop)
                .map(|(_, m)| m.clone())
                .collect();
            if let Ok(candidate) = FiniteFamily::new(members) {
                if fails(&candidate) {
                    current = candidate;
                    continue 'outer;
                }
            }
        }
        return current;
    }
}

/// Product rules: KL(P^n‖Q^n) = n·K, D_λ(P^n‖Q^n) = D^n, and no rule at all
/// for total variation. Checked against materialized product families, along
/// with monotonicity of B̄ in n.
fn suite_tensorization_agreement(rng: &mut ChaCha12Rng) -> SuiteRun {
    let mut run = SuiteRun::new("tensorization_agreement");
    for _ in 0..30 {
        let members = rng.random_range(2..=4);
        let fam = random_family_sized(rng, members, 6);
        let q = match resolve_reference(&fam, &ReferenceSpec::UniformMixture) {
            Ok(q) => q,
            Err(e) => {
                run.check_with_family(false, &fam, || format!("mixture failed: {e}"));
                continue;
            }
        };
        let mut previous_exact = exact_bayes_success(&fam);
        for copies in [2usize, 3] {
            let ext = match product_extend(&fam, copies, 1_000_000) {
                Ok(ext) => ext,
                Err(e) => {
                    run.check_with_family(false, &fam, || format!("product failed: {e}"));
                    continue;
                }
            };
            let q_ext = match product_extend_distribution(&q, copies, 1_000_000) {
                Ok(q) => q,
                Err(e) => {
                    run.check_with_family(false, &fam, || format!("product reference failed: {e}"));
                    continue;
                }
            };
            for (j, member) in fam.members().iter().enumerate() {
                let base_kl = kl(member, &q).expect("same space");
                let tens = tensorize(base_kl, copies).expect("kl tensorizes");
                let direct = kl(ext.member(j), &q_ext).expect("same space");
                run.check_with_family(rel_close(tens.value, direct.value, 1e-10), &fam, || {
                    format!(
                        "KL tensorization mismatch member {j} n={copies}: {} vs {}",
                        tens.value, direct.value
                    )
                });
                let base_pow = power_divergence(member, &q, 1.0).expect("same space");
                let tens = tensorize(base_pow, copies).expect("power tensorizes");
                let direct = power_divergence(ext.member(j), &q_ext, 1.0).expect("same space");
                run.check_with_family(rel_close(tens.value, direct.value, 1e-10), &fam, || {
                    format!(
                        "power tensorization mismatch member {j} n={copies}: {} vs {}",
                        tens.value, direct.value
                    )
                });
            }
            let exact = exact_bayes_success(&ext);
            run.check_with_family(exact >= previous_exact - 1e-12, &fam, || {
                format!("B̄ decreased with more data: {exact} after {previous_exact}")
            });
            previous_exact = exact;
        }
        let tv = total_variation(fam.member(0), fam.member(1)).expect("same space");
        run.check_with_family(
            matches!(tensorize(tv, 2), Err(Error::Kind { .. })),
            &fam,
            || "total variation accepted a tensorization rule".into(),
        );
        run.check_with_family(tv.kind == DivergenceKind::TotalVariation, &fam, || {
            "total variation mislabeled".into()
        });
    }
    run
}

/// The tensorized power-divergence bounds grow with n (each D_λ ≥ 1), and a
/// bound that goes vacuous stays vacuous.
fn suite_tensorized_vj_monotone(rng: &mut ChaCha12Rng) -> SuiteRun {
    let mut run = SuiteRun::new("tensorized_vj_monotone");
    let n_values: Vec<usize> = (1..=50).collect();
    let config = CompareConfig {
        methods: vec![Method::Vj, Method::VjImproved],
        lambda: LambdaPolicy::Fixed(1.0),
        reference: ReferenceSpec::Indexed { index: 0 },
        ..CompareConfig::default()
    };
    for _ in 0..10 {
        let fam = random_gaussian_pair(rng);
        match crate::compare::compare_tensorized(
            &FamilyModel::Gaussian(fam.clone()),
            &config,
            &n_values,
        ) {
            Ok(points) => check_monotone(&mut run, &points),
            Err(e) => run.check(false, || format!("gaussian sweep failed: {e}")),
        }
    }
    let finite_config = CompareConfig {
        methods: vec![Method::Vj, Method::VjImproved],
        lambda: LambdaPolicy::Fixed(1.0),
        reference: ReferenceSpec::UniformMixture,
        ..CompareConfig::default()
    };
    for _ in 0..5 {
        let fam = random_family_sized(rng, 2, MAX_ALPHABET);
        match crate::compare::compare_tensorized(
            &FamilyModel::Finite(fam.clone()),
            &finite_config,
            &n_values,
        ) {
            Ok(points) => check_monotone(&mut run, &points),
            Err(e) => run.check_with_family(false, &fam, || format!("finite sweep failed: {e}")),
        }
    }
    run
}

fn check_monotone(run: &mut SuiteRun, points: &[crate::compare::SweepPoint]) {
    for method_idx in 0..points[0].bounds.len() {
        let mut previous = f64::NEG_INFINITY;
        let mut was_vacuous = false;
        for p in points {
            let b = &p.bounds[method_idx];
            run.check(b.raw_value >= previous - 1e-12, || {
                format!(
                    "{} raw decreased from {previous} to {} at n={}",
                    b.method, b.raw_value, p.n
                )
            });
            run.check(!was_vacuous || b.vacuous, || {
                format!("{} left vacuity at n={}", b.method, p.n)
            });
            previous = b.raw_value;
            was_vacuous = b.vacuous;
        }
    }
}

/// The minimax bracket must stay ordered, sit below B̄, and dominate every
/// deterministic rule's worst-case success.
fn suite_minimax_bracket_sanity(rng: &mut ChaCha12Rng) -> SuiteRun {
    let mut run = SuiteRun::new("minimax_bracket_sanity");
    for _ in 0..20 {
        let members = rng.random_range(2..=3);
        let fam = random_family_sized(rng, members, 4);
        let bracket = match minimax_success_bracket(&fam, 20_000) {
            Ok(b) => b,
            Err(e) => {
                run.check_with_family(false, &fam, || format!("bracket failed: {e}"));
                continue;
            }
        };
        let exact = exact_bayes_success(&fam);
        run.check_with_family(bracket.lower <= bracket.upper + 1e-12, &fam, || {
            format!("inverted bracket [{}, {}]", bracket.lower, bracket.upper)
        });
        run.check_with_family(bracket.upper <= exact + 1e-9, &fam, || {
            format!("minimax upper {} above B̄ {exact}", bracket.upper)
        });
        match enumerate_deterministic(&fam, 1_000_000) {
            Ok(best) => run.check_with_family(best <= bracket.upper + 1e-9, &fam, || {
                format!(
                    "best deterministic rule {best} above minimax upper {}",
                    bracket.upper
                )
            }),
            Err(e) => run.check_with_family(false, &fam, || format!("enumeration failed: {e}")),
        }
    }
    run
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_run_passes_every_suite() {
        let report = run_verification(7, 40, None).unwrap();
        for suite in &report.suites {
            assert_eq!(
                suite.failures, 0,
                "suite {} failed: {:?}",
                suite.name, suite.first_failure
            );
            assert!(suite.checks > 0, "suite {} ran no checks", suite.name);
        }
        assert!(report.passed());
        assert!(report.reproducer.is_none());
        assert_eq!(report.suites.len(), 10);
    }

    #[test]
    fn fault_hook_is_caught_and_produces_a_reproducer() {
        let report = run_verification(7, 10, Some(0.5)).unwrap();
        assert!(!report.passed());
        let soundness = report
            .suites
            .iter()
            .find(|s| s.name == "compare_soundness")
            .unwrap();
        assert!(soundness.failures > 0);
        let repro = report.reproducer.expect("reproducer expected");
        assert_eq!(repro.suite, "compare_soundness");
        assert_eq!(
            repro.densities.len(),
            2,
            "greedy shrink should reach a pair"
        );
        assert!(!repro.detail.is_empty());
    }

    #[test]
    fn generated_families_are_valid_and_varied() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let mut saw_sparse = false;
        let mut saw_weighted = false;
        for _ in 0..50 {
            let fam = random_family(&mut rng);
            assert!(fam.len() >= 2 && fam.len() <= MAX_MEMBERS);
            assert!(fam.space().len() >= 2 && fam.space().len() <= MAX_ALPHABET);
            if fam.members().iter().any(|m| m.density().contains(&0.0)) {
                saw_sparse = true;
            }
            if fam.space().weights().iter().any(|&w| w != 1.0) {
                saw_weighted = true;
            }
        }
        assert!(saw_sparse, "sparsified rows never appeared");
        assert!(saw_weighted, "non-counting weights never appeared");
    }

    #[test]
    fn zero_families_is_rejected() {
        assert!(matches!(
            run_verification(1, 0, None),
            Err(Error::Parameter { .. })
        ));
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let a = run_verification(11, 5, None).unwrap();
        let b = run_verification(11, 5, None).unwrap();
        let counts_a: Vec<_> = a
            .suites
            .iter()
            .map(|s| (s.name, s.checks, s.failures))
            .collect();
        let counts_b: Vec<_> = b
            .suites
            .iter()
            .map(|s| (s.name, s.checks, s.failures))
            .collect();
        assert_eq!(counts_a, counts_b);
    }
}
