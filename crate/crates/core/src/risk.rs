//! Success probabilities of testing strategies.
//!
//! For a family 𝒫 = {P₀,…,P_N} on a finite space, the Bayes success under the
//! uniform prior is B̄(𝒫) = (N+1)⁻¹ ∫ max_j p_j dμ, attained by the
//! maximum-likelihood rule. The minimax success R̄(𝒫) = max_T min_j P_j[T=j]
//! over randomized rules satisfies R̄ ≤ B̄ and is bracketed here by a
//! projected-subgradient game solver whose certificates are explicit
//! strategies: every upper bound is the Bayes value of a concrete prior and
//! every lower bound the worst-case success of a concrete (mixture) rule, so
//! the bracket is valid even when it has not converged.
//!
//! Monte Carlo estimation covers Gaussian location families, where no finite
//! sum is available.

use std::collections::HashSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::family::{validate_mixture_weights, FiniteFamily, GaussianFamily, ReferenceSpec};
use crate::numeric::{log_sum_exp, project_to_simplex, sample_moments};

/// A deterministic decision rule: the member index chosen at each atom.
pub type DeterministicRule = Vec<usize>;

/// B̄(𝒫) = (N+1)⁻¹ Σ_x max_j p_j(x) μ(x).
pub fn exact_bayes_success(family: &FiniteFamily) -> f64 {
    let w = family.space().weights();
    let mut total = 0.0;
    for (x, wx) in w.iter().enumerate() {
        let mx = family
            .members()
            .iter()
            .map(|p| p.density()[x])
            .fold(f64::NEG_INFINITY, f64::max);
        total += mx * wx;
    }
    total / family.len() as f64
}

/// B̄ computed through a dominating reference: (N+1)⁻¹ E_Q[max_j p_j/q].
/// Equal to [`exact_bayes_success`] whenever Q dominates the family; the
/// domination check fails otherwise.
pub fn bayes_success_via_reference(
    family: &FiniteFamily,
    reference: &ReferenceSpec,
) -> Result<f64> {
    let q = crate::family::resolve_reference(family, reference)?;
    let w = family.space().weights();
    let mut total = 0.0;
    for (x, wx) in w.iter().enumerate() {
        let qx = q.density()[x];
        if qx <= 0.0 {
            continue; // domination guarantees every p_j(x) = 0 here too
        }
        let mx = family
            .members()
            .iter()
            .map(|p| p.density()[x] / qx)
            .fold(f64::NEG_INFINITY, f64::max);
        total += qx * mx * wx;
    }
    Ok(total / family.len() as f64)
}

/// The maximum-likelihood rule: argmax_j p_j(x), ties resolved to the lowest
/// index. Its average success equals B̄ exactly.
pub fn ml_rule(family: &FiniteFamily) -> DeterministicRule {
    let a = family.space().len();
    (0..a)
        .map(|x| {
            let mut best = 0usize;
            let mut best_val = family.member(0).density()[x];
            for (j, p) in family.members().iter().enumerate().skip(1) {
                let v = p.density()[x];
                if v > best_val {
                    best = j;
                    best_val = v;
                }
            }
            best
        })
        .collect()
}

/// Per-member success probabilities P_j[T = j] of a deterministic rule.
pub fn rule_success_vector(family: &FiniteFamily, rule: &[usize]) -> Result<Vec<f64>> {
    let a = family.space().len();
    if rule.len() != a {
        return Err(Error::Dimension {
            what: "decision rule",
            expected: a,
            found: rule.len(),
        });
    }
    if let Some(&j) = rule.iter().find(|&&j| j >= family.len()) {
        return Err(Error::Parameter {
            detail: format!("rule assigns member {j}, family has {}", family.len()),
        });
    }
    Ok(success_vector_unchecked(family, rule))
}

/// (N+1)⁻¹ Σ_j P_j[T = j], the uniform-prior average success of a rule.
pub fn rule_average_success(family: &FiniteFamily, rule: &[usize]) -> Result<f64> {
    let s = rule_success_vector(family, rule)?;
    Ok(s.iter().sum::<f64>() / family.len() as f64)
}

fn success_vector_unchecked(family: &FiniteFamily, rule: &[usize]) -> Vec<f64> {
    let w = family.space().weights();
    let mut s = vec![0.0; family.len()];
    for (x, &j) in rule.iter().enumerate() {
        s[j] += family.member(j).density()[x] * w[x];
    }
    s
}

/// Monte Carlo estimate of B̄ with a two-sided 99% confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: usize,
    pub seed: u64,
    /// Sample kurtosis m₄/m₂² of the likelihood ratios; large values signal
    /// an ill-matched reference and an untrustworthy interval.
    pub kurtosis: f64,
}

const MC_BATCH: usize = 4096;
const MC_MIN_SAMPLES: usize = 1000;
const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;
/// Two-sided 99% normal quantile.
const Z_99: f64 = 2.576;

/// Estimates B̄ of a Gaussian location family by importance sampling from the
/// resolved reference Q: B̄ = (N+1)⁻¹ E_Q[max_j p_j/q]. Ratios are formed in
/// the log domain, so the shared Gaussian normalization cancels exactly.
/// Deterministic for a fixed `(samples, seed)` pair; batches are seeded
/// independently so the sample count can grow without reshuffling history.
pub fn mc_bayes_success(
    family: &GaussianFamily,
    reference: &ReferenceSpec,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if samples < MC_MIN_SAMPLES {
        return Err(Error::Parameter {
            detail: format!("Monte Carlo needs at least {MC_MIN_SAMPLES} samples, got {samples}"),
        });
    }
    let m = family.len();
    let weights: Vec<f64> = match reference {
        ReferenceSpec::UniformMixture => vec![1.0 / m as f64; m],
        ReferenceSpec::Indexed { index } => {
            if *index >= m {
                return Err(Error::Parameter {
                    detail: format!("reference index {index} out of range for {m} members"),
                });
            }
            let mut w = vec![0.0; m];
            w[*index] = 1.0;
            w
        }
        ReferenceSpec::CustomWeights { weights } => {
            validate_mixture_weights(m, weights)?;
            weights.clone()
        }
        ReferenceSpec::CustomDensity { .. } => {
            return Err(Error::UnsupportedReference {
                detail: "custom reference densities are not defined for Gaussian families".into(),
            })
        }
    };
    let log_weights: Vec<f64> = weights
        .iter()
        .map(|&w| if w > 0.0 { w.ln() } else { f64::NEG_INFINITY })
        .collect();
    let mut cum = Vec::with_capacity(m);
    let mut acc = 0.0;
    for &w in &weights {
        acc += w;
        cum.push(acc);
    }
    let dim = family.dim();
    let sigma = family.sigma();
    let inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);

    let mut ratios = Vec::with_capacity(samples);
    let mut x = vec![0.0; dim];
    let mut log_lik = vec![0.0; m];
    let mut weighted = vec![0.0; m];
    let batches = samples.div_ceil(MC_BATCH);
    for b in 0..batches {
        let batch_seed = seed ^ (b as u64 + 1).wrapping_mul(SEED_STRIDE);
        let mut rng = ChaCha12Rng::seed_from_u64(batch_seed);
        let count = MC_BATCH.min(samples - b * MC_BATCH);
        for _ in 0..count {
            let u: f64 = rng.random();
            let j = cum
                .iter()
                .position(|&c| u < c)
                .unwrap_or_else(|| weights.iter().rposition(|&w| w > 0.0).unwrap());
            let theta_j = family.mean(j);
            for (xi, &mu) in x.iter_mut().zip(theta_j) {
                let z: f64 = rng.sample(StandardNormal);
                *xi = mu + sigma * z;
            }
            for (r, ll) in log_lik.iter_mut().enumerate() {
                let theta_r = family.mean(r);
                let d2: f64 = x.iter().zip(theta_r).map(|(a, b)| (a - b) * (a - b)).sum();
                *ll = -d2 * inv_two_sigma2;
            }
            let log_max = log_lik.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            for ((wv, &lw), &ll) in weighted.iter_mut().zip(&log_weights).zip(&log_lik) {
                *wv = lw + ll;
            }
            let log_q = log_sum_exp(&weighted);
            ratios.push((log_max - log_q).exp());
        }
    }

    let (mean, sd, kurtosis) = sample_moments(&ratios);
    let half = Z_99 * sd / (samples as f64).sqrt();
    let scale = 1.0 / m as f64;
    Ok(McEstimate {
        estimate: mean * scale,
        ci_low: (mean - half) * scale,
        ci_high: (mean + half) * scale,
        samples,
        seed,
        kurtosis,
    })
}

/// A two-sided bracket on the minimax success R̄.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimaxBracket {
    /// Worst-case success of an explicit (mixture) rule: lower ≤ R̄.
    pub lower: f64,
    /// Bayes value of an explicit prior: R̄ ≤ upper.
    pub upper: f64,
    /// Subgradient iterations actually executed.
    pub iterations: usize,
}

const MINIMAX_EARLY_STOP: f64 = 1e-12;
/// Families this small get an exact finishing step after the subgradient run.
const POLISH_MAX_MEMBERS: usize = 3;
/// Full deterministic-rule enumeration threshold for the lower-bound polish.
const POLISH_ENUM_LIMIT: u128 = 512;
/// Cap on columns entering the three-way equalizer search.
const POLISH_TRIPLE_LIMIT: usize = 128;

/// Brackets R̄ = min_π V(π), V(π) = Σ_x max_j π_j p_j(x) μ(x), by projected
/// subgradient descent on the prior simplex with step 1/√t from the uniform
/// prior, with Polyak and doubling-window averaging. Upper bounds are values
/// V(π) of visited priors (V(uniform) = B̄, so upper ≤ B̄ from the start);
/// lower bounds are min_j of success vectors of visited Bayes rules and of
/// their window mixtures. Stops early once the width is ≤ 1e-12. Families
/// with at most three members get an exact finishing step: the upper bound
/// from enumerating the tie-hyperplane vertices of V, the lower bound from an
/// equalizer search over rule mixtures; both remain explicit strategies.
pub fn minimax_success_bracket(family: &FiniteFamily, max_iters: usize) -> Result<MinimaxBracket> {
    if max_iters == 0 {
        return Err(Error::Parameter {
            detail: "minimax bracket needs at least one iteration".into(),
        });
    }
    let m = family.len();
    let mut pi = vec![1.0 / m as f64; m];
    let mut pi_sum = vec![0.0; m];
    let mut g_sum = vec![0.0; m];
    let mut window_sum = vec![0.0; m];
    let mut window_len = 0usize;
    let mut best_upper = f64::INFINITY;
    let mut best_lower = 0.0f64;
    let mut iterations = 0;

    let keep_rules = m <= POLISH_MAX_MEMBERS;
    let mut seen_rules: HashSet<DeterministicRule> = HashSet::new();
    let mut visited_vectors: Vec<Vec<f64>> = Vec::new();

    for t in 1..=max_iters {
        iterations = t;
        let (value, rule) = bayes_value_and_rule(family, &pi);
        let g = success_vector_unchecked(family, &rule);

        best_upper = best_upper.min(value);
        best_lower = best_lower.max(min_coord(&g));

        for (s, &p) in pi_sum.iter_mut().zip(&pi) {
            *s += p;
        }
        for (s, &gj) in g_sum.iter_mut().zip(&g) {
            *s += gj;
        }
        for (s, &gj) in window_sum.iter_mut().zip(&g) {
            *s += gj;
        }
        window_len += 1;

        // mixture-of-rules lower bounds: cumulative and doubling-window
        let cum_lower = g_sum.iter().fold(f64::INFINITY, |acc, &s| acc.min(s)) / t as f64;
        best_lower = best_lower.max(cum_lower);
        let win_lower =
            window_sum.iter().fold(f64::INFINITY, |acc, &s| acc.min(s)) / window_len as f64;
        best_lower = best_lower.max(win_lower);
        if window_len.is_power_of_two() && window_len >= 16 {
            window_sum.iter_mut().for_each(|s| *s = 0.0);
            window_len = 0;
        }

        if keep_rules && seen_rules.len() < 4096 && seen_rules.insert(rule) {
            visited_vectors.push(g.clone());
        }

        // evaluate the Polyak average occasionally for a better upper bound
        if t % 64 == 0 || t == max_iters {
            let avg: Vec<f64> = pi_sum.iter().map(|s| s / t as f64).collect();
            let (v_avg, _) = bayes_value_and_rule(family, &avg);
            best_upper = best_upper.min(v_avg);
        }

        if best_upper - best_lower <= MINIMAX_EARLY_STOP {
            break;
        }

        let step = 1.0 / (t as f64).sqrt();
        for (p, &gj) in pi.iter_mut().zip(&g) {
            *p -= step * gj;
        }
        project_to_simplex(&mut pi);
    }

    if m <= POLISH_MAX_MEMBERS && best_upper - best_lower > MINIMAX_EARLY_STOP {
        best_upper = best_upper.min(polish_upper(family));
        best_lower = best_lower.max(polish_lower(family, &visited_vectors));
    }
    // numerical dust can leave an inverted hairline bracket after polish
    if best_lower > best_upper {
        let mid = 0.5 * (best_lower + best_upper);
        debug_assert!(best_lower - best_upper < 1e-9);
        best_lower = mid;
        best_upper = mid;
    }

    Ok(MinimaxBracket {
        lower: best_lower,
        upper: best_upper,
        iterations,
    })
}

fn min_coord(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

/// V(π) and the Bayes rule attaining it (ties to the lowest index).
fn bayes_value_and_rule(family: &FiniteFamily, pi: &[f64]) -> (f64, DeterministicRule) {
    let w = family.space().weights();
    let mut value = 0.0;
    let mut rule = Vec::with_capacity(w.len());
    for (x, &wx) in w.iter().enumerate() {
        let mut best = 0usize;
        let mut best_val = pi[0] * family.member(0).density()[x];
        for (j, &pj) in pi.iter().enumerate().skip(1) {
            let v = pj * family.member(j).density()[x];
            if v > best_val {
                best = j;
                best_val = v;
            }
        }
        value += best_val * wx;
        rule.push(best);
    }
    (value, rule)
}

/// Exact upper bound for families of ≤ 3 members: the piecewise-linear V
/// attains its minimum at an intersection of two hyperplanes drawn from the
/// per-atom tie planes {π_i p_i(x) = π_j p_j(x)} and the simplex facets
/// {π_k = 0}, so evaluating V on every such vertex finds min_π V(π).
fn polish_upper(family: &FiniteFamily) -> f64 {
    let m = family.len();
    let mut best = f64::INFINITY;
    let mut consider = |pi: &[f64]| {
        let (v, _) = bayes_value_and_rule(family, pi);
        if v < best {
            best = v;
        }
    };

    match m {
        2 => {
            consider(&[1.0, 0.0]);
            consider(&[0.0, 1.0]);
            consider(&[0.5, 0.5]);
            for x in 0..family.space().len() {
                let p0 = family.member(0).density()[x];
                let p1 = family.member(1).density()[x];
                if p0 + p1 > 0.0 {
                    let a = p1 / (p0 + p1);
                    consider(&[a, 1.0 - a]);
                }
            }
        }
        3 => {
            // constraint rows r·π = c: tie planes (c = 0) and facets (c = 0),
            // paired with the simplex plane Σπ = 1
            let mut rows: Vec<[f64; 3]> = Vec::new();
            for x in 0..family.space().len() {
                let p: Vec<f64> = (0..3).map(|j| family.member(j).density()[x]).collect();
                for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
                    if p[i] > 0.0 || p[j] > 0.0 {
                        let mut r = [0.0; 3];
                        r[i] = p[i];
                        r[j] = -p[j];
                        rows.push(r);
                    }
                }
            }
            for k in 0..3 {
                let mut r = [0.0; 3];
                r[k] = 1.0;
                rows.push(r);
            }
            consider(&[1.0 / 3.0; 3]);
            for a in 0..rows.len() {
                for b in (a + 1)..rows.len() {
                    let mat = [rows[a], rows[b], [1.0, 1.0, 1.0]];
                    if let Some(mut pi) = solve3(&mat, [0.0, 0.0, 1.0]) {
                        if pi.iter().all(|&v| v >= -1e-9) {
                            let mut sum = 0.0;
                            for v in pi.iter_mut() {
                                *v = v.max(0.0);
                                sum += *v;
                            }
                            if sum > 0.0 {
                                pi.iter_mut().for_each(|v| *v /= sum);
                                consider(&pi);
                            }
                        }
                    }
                }
            }
        }
        _ => {}
    }
    best
}

/// Exact lower bound for families of ≤ 3 members: searches mixtures of
/// deterministic rules for the maximizer of min_j P_j[T = j]. An optimal
/// mixture needs at most m support rules, so singles, pairs (with the weight
/// at every coordinate-tie breakpoint), and equalized triples suffice.
fn polish_lower(family: &FiniteFamily, visited: &[Vec<f64>]) -> f64 {
    let m = family.len();
    let a = family.space().len();
    let rule_count = deterministic_rule_count(m, a);
    let mut columns: Vec<Vec<f64>> = if rule_count <= POLISH_ENUM_LIMIT {
        all_rule_success_vectors(family)
    } else {
        let mut cols = visited.to_vec();
        cols.push(success_vector_unchecked(family, &ml_rule(family)));
        cols
    };
    if columns.is_empty() {
        return 0.0;
    }

    let mut best = 0.0f64;
    for c in &columns {
        best = best.max(min_coord(c));
    }

    // pairs: maximize min over coordinates of w·u + (1-w)·v on w ∈ [0,1];
    // the optimum sits at an endpoint or where two coordinates tie
    for i in 0..columns.len() {
        for j in (i + 1)..columns.len() {
            let (u, v) = (&columns[i], &columns[j]);
            let mut candidates = vec![0.0, 1.0];
            for c0 in 0..m {
                for c1 in (c0 + 1)..m {
                    let denom = (u[c0] - v[c0]) - (u[c1] - v[c1]);
                    if denom.abs() > 1e-15 {
                        let w = (v[c1] - v[c0]) / denom;
                        if (0.0..=1.0).contains(&w) {
                            candidates.push(w);
                        }
                    }
                }
            }
            for &w in &candidates {
                let val = (0..m)
                    .map(|c| w * u[c] + (1.0 - w) * v[c])
                    .fold(f64::INFINITY, f64::min);
                best = best.max(val);
            }
        }
    }

    if m == 3 {
        if columns.len() > POLISH_TRIPLE_LIMIT {
            let mut order: Vec<usize> = (0..columns.len()).collect();
            order.sort_by(|&x, &y| {
                min_coord(&columns[y])
                    .total_cmp(&min_coord(&columns[x]))
                    .then(x.cmp(&y))
            });
            order.truncate(POLISH_TRIPLE_LIMIT);
            order.sort_unstable();
            columns = order.into_iter().map(|i| columns[i].clone()).collect();
        }
        // triples: weights equalizing all three coordinates solve
        // (rowₖ − rowₖ₊₁)·w = 0 twice together with Σw = 1
        let n = columns.len();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let (u, v, z) = (&columns[i], &columns[j], &columns[k]);
                    let mat = [
                        [u[0] - u[1], v[0] - v[1], z[0] - z[1]],
                        [u[1] - u[2], v[1] - v[2], z[1] - z[2]],
                        [1.0, 1.0, 1.0],
                    ];
                    if let Some(w) = solve3(&mat, [0.0, 0.0, 1.0]) {
                        if w.iter().all(|&wi| wi >= -1e-12) {
                            let w: Vec<f64> = w.iter().map(|&wi| wi.max(0.0)).collect();
                            let total: f64 = w.iter().sum();
                            if total > 0.0 {
                                let val = (0..3)
                                    .map(|c| (w[0] * u[c] + w[1] * v[c] + w[2] * z[c]) / total)
                                    .fold(f64::INFINITY, f64::min);
                                best = best.max(val);
                            }
                        }
                    }
                }
            }
        }
    }
    best
}

fn all_rule_success_vectors(family: &FiniteFamily) -> Vec<Vec<f64>> {
    let m = family.len();
    let a = family.space().len();
    let mut rule = vec![0usize; a];
    let mut out = Vec::new();
    loop {
        out.push(success_vector_unchecked(family, &rule));
        if !advance_rule(&mut rule, m) {
            return out;
        }
    }
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn solve3(m: &[[f64; 3]; 3], rhs: [f64; 3]) -> Option<[f64; 3]> {
    let d = det3(m);
    if d.abs() < 1e-14 {
        return None;
    }
    let mut out = [0.0; 3];
    for (col, slot) in out.iter_mut().enumerate() {
        let mut mc = *m;
        for (row, mc_row) in mc.iter_mut().enumerate() {
            mc_row[col] = rhs[row];
        }
        *slot = det3(&mc) / d;
    }
    if out.iter().all(|v| v.is_finite()) {
        Some(out)
    } else {
        None
    }
}

/// Number of deterministic rules m^a, saturating at `u128::MAX`.
pub fn deterministic_rule_count(members: usize, atoms: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..atoms {
        acc = acc.saturating_mul(members as u128);
    }
    acc
}

/// max over all deterministic rules of min_j P_j[T = j] — the deterministic
/// minimax success, a lower bound on R̄. Errors with the exact rule count when
/// m^a exceeds `cap`.
pub fn enumerate_deterministic(family: &FiniteFamily, cap: u64) -> Result<f64> {
    let m = family.len();
    let a = family.space().len();
    let required = deterministic_rule_count(m, a);
    if required > cap as u128 {
        return Err(Error::SizeCap { required, cap });
    }
    let mut rule = vec![0usize; a];
    let mut best = f64::NEG_INFINITY;
    loop {
        let s = success_vector_unchecked(family, &rule);
        best = best.max(min_coord(&s));
        if !advance_rule(&mut rule, m) {
            break;
        }
    }
    Ok(best)
}

/// Odometer step with the last coordinate fastest; false when exhausted.
fn advance_rule(rule: &mut [usize], base: usize) -> bool {
    for digit in rule.iter_mut().rev() {
        *digit += 1;
        if *digit < base {
            return true;
        }
        *digit = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::make_counting_family;

    fn pair() -> FiniteFamily {
        make_counting_family(vec![vec![0.6, 0.4], vec![0.4, 0.6]]).unwrap()
    }

    fn bernoulli_triple() -> FiniteFamily {
        make_counting_family(vec![vec![0.7, 0.3], vec![0.5, 0.5], vec![0.3, 0.7]]).unwrap()
    }

    #[test]
    fn exact_bayes_examples() {
        assert!((exact_bayes_success(&pair()) - 0.6).abs() < 1e-15);
        assert!((exact_bayes_success(&bernoulli_triple()) - 7.0 / 15.0).abs() < 1e-15);
        let disjoint = make_counting_family(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(exact_bayes_success(&disjoint), 1.0);
    }

    #[test]
    fn reference_route_matches_exact() {
        for fam in [pair(), bernoulli_triple()] {
            let exact = exact_bayes_success(&fam);
            let via = bayes_success_via_reference(&fam, &ReferenceSpec::UniformMixture).unwrap();
            assert!((via - exact).abs() < 1e-10);
            let via0 =
                bayes_success_via_reference(&fam, &ReferenceSpec::Indexed { index: 0 }).unwrap();
            assert!((via0 - exact).abs() < 1e-10);
        }
    }

    #[test]
    fn reference_route_rejects_non_dominating() {
        let disjoint = make_counting_family(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            bayes_success_via_reference(&disjoint, &ReferenceSpec::Indexed { index: 0 }),
            Err(Error::Domination { .. })
        ));
    }

    #[test]
    fn ml_rule_examples() {
        assert_eq!(ml_rule(&pair()), vec![0, 1]);
        // tie at the first atom resolves to the lowest index
        let fam = make_counting_family(vec![vec![0.4, 0.3, 0.3], vec![0.4, 0.5, 0.1]]).unwrap();
        assert_eq!(ml_rule(&fam), vec![0, 1, 0]);
    }

    #[test]
    fn ml_rule_success_equals_bayes() {
        for fam in [pair(), bernoulli_triple()] {
            let rule = ml_rule(&fam);
            let s = rule_average_success(&fam, &rule).unwrap();
            assert!((s - exact_bayes_success(&fam)).abs() < 1e-12);
        }
    }

    #[test]
    fn rule_validation() {
        let fam = pair();
        assert!(matches!(
            rule_success_vector(&fam, &[0]),
            Err(Error::Dimension { .. })
        ));
        assert!(matches!(
            rule_success_vector(&fam, &[0, 5]),
            Err(Error::Parameter { .. })
        ));
    }

    #[test]
    fn bracket_pair_closes_immediately() {
        let b = minimax_success_bracket(&pair(), 1000).unwrap();
        assert_eq!(b.iterations, 1);
        assert_eq!(b.lower, 0.6);
        assert_eq!(b.upper, 0.6);
    }

    #[test]
    fn bracket_triple_finds_game_value() {
        // value 7/17: mixture (3/17, 7/17, 7/17) over three rules equalizes
        // every member at 7/17, and the prior (5/17, 7/17, 5/17) certifies it
        let b = minimax_success_bracket(&bernoulli_triple(), 50_000).unwrap();
        let truth = 7.0 / 17.0;
        assert!((b.lower - truth).abs() < 1e-9, "lower {}", b.lower);
        assert!((b.upper - truth).abs() < 1e-9, "upper {}", b.upper);
        assert!(b.lower <= b.upper + 1e-15);
    }

    #[test]
    fn bracket_upper_never_exceeds_bayes() {
        let fam = bernoulli_triple();
        let b = minimax_success_bracket(&fam, 10).unwrap();
        assert!(b.upper <= exact_bayes_success(&fam) + 1e-15);
        assert!(b.lower >= 0.0);
    }

    #[test]
    fn bracket_rejects_zero_iterations() {
        assert!(matches!(
            minimax_success_bracket(&pair(), 0),
            Err(Error::Parameter { .. })
        ));
    }

    #[test]
    fn enumerate_examples() {
        assert!((enumerate_deterministic(&pair(), 100_000).unwrap() - 0.6).abs() < 1e-15);
        // two atoms cannot separate three members: every deterministic rule
        // abandons someone, so the deterministic minimax success is zero
        assert_eq!(
            enumerate_deterministic(&bernoulli_triple(), 100_000).unwrap(),
            0.0
        );
    }

    #[test]
    fn enumerate_respects_cap() {
        let rows: Vec<Vec<f64>> = (0..3)
            .map(|j| {
                let mut row = vec![1.0 / 12.0; 12];
                row[j] = 1.0 / 12.0 + 0.5;
                let s: f64 = row.iter().sum();
                row.iter_mut().for_each(|v| *v /= s);
                row
            })
            .collect();
        let fam = make_counting_family(rows).unwrap();
        match enumerate_deterministic(&fam, 100_000) {
            Err(Error::SizeCap { required, cap }) => {
                assert_eq!(required, 531_441);
                assert_eq!(cap, 100_000);
            }
            other => panic!("expected SizeCap, got {other:?}"),
        }
    }

    #[test]
    fn mc_is_deterministic_and_sane() {
        let fam = crate::family::make_gaussian_family(vec![vec![0.0], vec![1.0]], 1.0).unwrap();
        let a = mc_bayes_success(&fam, &ReferenceSpec::UniformMixture, 20_000, 7).unwrap();
        let b = mc_bayes_success(&fam, &ReferenceSpec::UniformMixture, 20_000, 7).unwrap();
        assert_eq!(a, b);
        // truth: Φ(1/2) = 0.6914624612740132 for two unit-variance Gaussians
        let truth = 0.691_462_461_274_013_2;
        assert!(a.ci_low <= truth && truth <= a.ci_high, "{a:?}");
        assert!(a.estimate >= 0.5); // max_j p_j dominates the mixture
        assert!(a.kurtosis.is_finite());
    }

    #[test]
    fn mc_rejects_small_sample_sizes() {
        let fam = crate::family::make_gaussian_family(vec![vec![0.0], vec![1.0]], 1.0).unwrap();
        assert!(matches!(
            mc_bayes_success(&fam, &ReferenceSpec::UniformMixture, 999, 7),
            Err(Error::Parameter { .. })
        ));
    }

    #[test]
    fn mc_indexed_reference_matches_mixture_reference() {
        let fam = crate::family::make_gaussian_family(vec![vec![0.0], vec![1.0]], 1.0).unwrap();
        let mix = mc_bayes_success(&fam, &ReferenceSpec::UniformMixture, 50_000, 11).unwrap();
        let idx = mc_bayes_success(&fam, &ReferenceSpec::Indexed { index: 0 }, 50_000, 11).unwrap();
        assert!((mix.estimate - idx.estimate).abs() < 0.02);
    }

    #[test]
    fn rule_count_saturates() {
        assert_eq!(deterministic_rule_count(2, 3), 8);
        assert_eq!(deterministic_rule_count(1, 10), 1);
        assert_eq!(deterministic_rule_count(usize::MAX, 200), u128::MAX);
    }
}
