//! Finite measure spaces, candidate families, Gaussian location families,
//! product extensions, and reference distributions Q.
//!
//! A family 𝒫 = {P₀, …, P_N} of N+1 ≥ 2 distinct probabilities is represented
//! by densities p_j with respect to a shared measure μ with explicit atom
//! weights, so every integral below is an exact finite sum. Gaussian location
//! families N(θ_j, σ²I) are kept symbolic and serve the closed-form divergence
//! and Monte Carlo paths.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{DISTINCTNESS_TOL, NORMALIZATION_TOL};

/// A finite measure space: ordered atoms with strictly positive weights μ(x).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpace {
    atoms: Vec<String>,
    weights: Vec<f64>,
}

impl MeasureSpace {
    /// Builds a measure space, validating positivity and label uniqueness.
    pub fn new(atoms: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Parameter {
                detail: "measure space needs at least one atom".into(),
            });
        }
        if atoms.len() != weights.len() {
            return Err(Error::Dimension {
                what: "atom weights",
                expected: atoms.len(),
                found: weights.len(),
            });
        }
        for (label, &w) in atoms.iter().zip(&weights) {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::Parameter {
                    detail: format!("atom '{label}' has non-positive weight {w}"),
                });
            }
        }
        let mut seen = atoms.clone();
        seen.sort();
        if seen.windows(2).any(|p| p[0] == p[1]) {
            return Err(Error::Parameter {
                detail: "atom labels must be unique".into(),
            });
        }
        Ok(Self { atoms, weights })
    }

    /// Counting measure on atoms labeled "0", "1", …: all weights 1.
    pub fn counting(n_atoms: usize) -> Result<Self> {
        Self::new(
            (0..n_atoms).map(|i| i.to_string()).collect(),
            vec![1.0; n_atoms],
        )
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

fn same_space(a: &Arc<MeasureSpace>, b: &Arc<MeasureSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A probability P = p · μ given by its density on a [`MeasureSpace`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteDistribution {
    space: Arc<MeasureSpace>,
    density: Vec<f64>,
}

impl FiniteDistribution {
    /// Validates non-negativity and normalization (Σ p(x) μ(x) = 1 within
    /// 1e-10). `what` names the density in error messages.
    pub fn new(space: Arc<MeasureSpace>, density: Vec<f64>, what: &str) -> Result<Self> {
        if density.len() != space.len() {
            return Err(Error::Dimension {
                what: "density vector",
                expected: space.len(),
                found: density.len(),
            });
        }
        for (label, &p) in space.atoms().iter().zip(&density) {
            if !(p.is_finite() && p >= 0.0) {
                return Err(Error::Parameter {
                    detail: format!("{what}: density at atom '{label}' is {p}"),
                });
            }
        }
        let sum: f64 = density
            .iter()
            .zip(space.weights())
            .map(|(p, w)| p * w)
            .sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Normalization {
                what: what.to_string(),
                sum,
            });
        }
        Ok(Self { space, density })
    }

    pub fn space(&self) -> &Arc<MeasureSpace> {
        &self.space
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// Checks that both distributions share a measure space.
    pub fn check_same_space(&self, other: &FiniteDistribution) -> Result<()> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }
}

/// The family 𝒫 = {P₀, …, P_N} of N+1 ≥ 2 distinct probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteFamily {
    space: Arc<MeasureSpace>,
    members: Vec<FiniteDistribution>,
}

impl FiniteFamily {
    /// Builds a family from pre-validated member distributions.
    pub fn new(members: Vec<FiniteDistribution>) -> Result<Self> {
        if members.len() < 2 {
            return Err(Error::Parameter {
                detail: format!("a family needs N+1 >= 2 members, got {}", members.len()),
            });
        }
        let space = Arc::clone(members[0].space());
        for m in &members[1..] {
            if !same_space(&space, m.space()) {
                return Err(Error::SpaceMismatch);
            }
        }
        // Pairwise distinctness: some atom where the densities differ by more
        // than the tolerance. All atoms carry positive weight by construction.
        for i in 0..members.len() {
            for j in (i + 1)..members.len() {
                let apart = members[i]
                    .density()
                    .iter()
                    .zip(members[j].density())
                    .any(|(a, b)| (a - b).abs() > DISTINCTNESS_TOL);
                if !apart {
                    return Err(Error::Distinctness {
                        first: i,
                        second: j,
                    });
                }
            }
        }
        Ok(Self { space, members })
    }

    /// Number of members, N + 1.
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees at least two members
    }

    /// The number of alternatives N: members minus one.
    pub fn n(&self) -> usize {
        self.members.len() - 1
    }

    pub fn space(&self) -> &Arc<MeasureSpace> {
        &self.space
    }

    pub fn members(&self) -> &[FiniteDistribution] {
        &self.members
    }

    pub fn member(&self, j: usize) -> &FiniteDistribution {
        &self.members[j]
    }
}

/// Builds a family from atom labels, atom weights, and one density row per
/// member. Rows are validated, never silently renormalized.
pub fn make_finite_family(
    atom_labels: Vec<String>,
    weights: Vec<f64>,
    density_matrix: Vec<Vec<f64>>,
) -> Result<FiniteFamily> {
    if density_matrix.len() < 2 {
        return Err(Error::Parameter {
            detail: format!(
                "a family needs N+1 >= 2 density rows, got {}",
                density_matrix.len()
            ),
        });
    }
    let n_atoms = atom_labels.len();
    for row in &density_matrix {
        if row.len() != n_atoms {
            return Err(Error::Dimension {
                what: "density matrix row",
                expected: n_atoms,
                found: row.len(),
            });
        }
    }
    let space = Arc::new(MeasureSpace::new(atom_labels, weights)?);
    let members = density_matrix
        .into_iter()
        .enumerate()
        .map(|(j, row)| FiniteDistribution::new(Arc::clone(&space), row, &format!("member {j}")))
        .collect::<Result<Vec<_>>>()?;
    FiniteFamily::new(members)
}

/// Convenience constructor on the counting measure with atoms "0", "1", ….
pub fn make_counting_family(density_matrix: Vec<Vec<f64>>) -> Result<FiniteFamily> {
    let n_atoms = density_matrix.first().map_or(0, |r| r.len());
    make_finite_family(
        (0..n_atoms).map(|i| i.to_string()).collect(),
        vec![1.0; n_atoms],
        density_matrix,
    )
}

/// The mixture Σ_j w_j P_j of the family members.
pub fn mixture(family: &FiniteFamily, mix_weights: &[f64]) -> Result<FiniteDistribution> {
    validate_mixture_weights(family.len(), mix_weights)?;
    let mut density = vec![0.0; family.space().len()];
    for (j, member) in family.members().iter().enumerate() {
        for (d, p) in density.iter_mut().zip(member.density()) {
            *d += mix_weights[j] * p;
        }
    }
    FiniteDistribution::new(Arc::clone(family.space()), density, "mixture")
}

pub(crate) fn validate_mixture_weights(expected_len: usize, weights: &[f64]) -> Result<()> {
    if weights.len() != expected_len {
        return Err(Error::Weight {
            detail: format!("expected {} weights, got {}", expected_len, weights.len()),
        });
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::Weight {
            detail: format!("weights must be non-negative and finite, got {w}"),
        });
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Weight {
            detail: format!("weights sum to {sum}, expected 1 within 1e-10"),
        });
    }
    Ok(())
}

/// How the dominating probability Q = q · μ is chosen.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReferenceSpec {
    /// Q̄ = P̄ = (N+1)⁻¹ Σ_j P_j.
    #[default]
    UniformMixture,
    /// Q = P_j for the given member index.
    Indexed { index: usize },
    /// Q = Σ_j w_j P_j for explicit mixture weights.
    CustomWeights { weights: Vec<f64> },
    /// An explicit density over the family's atoms.
    CustomDensity { density: Vec<f64> },
}

impl ReferenceSpec {
    /// Short label used in reports and error messages.
    pub fn label(&self) -> String {
        match self {
            ReferenceSpec::UniformMixture => "uniform_mixture".into(),
            ReferenceSpec::Indexed { index } => format!("indexed({index})"),
            ReferenceSpec::CustomWeights { .. } => "custom_weights".into(),
            ReferenceSpec::CustomDensity { .. } => "custom_density".into(),
        }
    }
}

/// Resolves a [`ReferenceSpec`] against a family and verifies domination:
/// Q dominates 𝒫 iff every atom with q(x) = 0 has p_j(x) = 0 for all j.
///
/// Returns [`Error::Domination`] otherwise; callers may catch that to report
/// an infinite-divergence / vacuous bound instead of failing.
pub fn resolve_reference(
    family: &FiniteFamily,
    spec: &ReferenceSpec,
) -> Result<FiniteDistribution> {
    let q = match spec {
        ReferenceSpec::UniformMixture => {
            let w = vec![1.0 / family.len() as f64; family.len()];
            mixture(family, &w)?
        }
        ReferenceSpec::Indexed { index } => {
            if *index >= family.len() {
                return Err(Error::Parameter {
                    detail: format!(
                        "reference index {index} out of range for {} members",
                        family.len()
                    ),
                });
            }
            family.member(*index).clone()
        }
        ReferenceSpec::CustomWeights { weights } => mixture(family, weights)?,
        ReferenceSpec::CustomDensity { density } => FiniteDistribution::new(
            Arc::clone(family.space()),
            density.clone(),
            "custom reference density",
        )?,
    };
    check_domination(family, &q, &spec.label())?;
    Ok(q)
}

/// Scans atoms for domination failures of an explicit Q.
pub fn check_domination(family: &FiniteFamily, q: &FiniteDistribution, label: &str) -> Result<()> {
    family.member(0).check_same_space(q)?;
    for (x, &qx) in q.density().iter().enumerate() {
        if qx > 0.0 {
            continue;
        }
        for (j, member) in family.members().iter().enumerate() {
            if member.density()[x] > 0.0 {
                return Err(Error::Domination {
                    reference: label.to_string(),
                    member: j,
                    atom: family.space().atoms()[x].clone(),
                });
            }
        }
    }
    Ok(())
}

fn product_space_size(base: usize, n: usize, size_cap: u64) -> Result<usize> {
    let mut total: u128 = 1;
    for _ in 0..n {
        total = total.saturating_mul(base as u128);
    }
    if total > size_cap as u128 {
        return Err(Error::SizeCap {
            required: total,
            cap: size_cap,
        });
    }
    Ok(total as usize)
}

fn product_space(space: &MeasureSpace, n: usize, total: usize) -> Result<Arc<MeasureSpace>> {
    let base = space.len();
    let mut atoms = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    let mut idx = vec![0usize; n];
    for _ in 0..total {
        let label = idx
            .iter()
            .map(|&k| space.atoms()[k].as_str())
            .collect::<Vec<_>>()
            .join(":");
        let weight: f64 = idx.iter().map(|&k| space.weights()[k]).product();
        atoms.push(label);
        weights.push(weight);
        // odometer: last coordinate fastest
        for pos in (0..n).rev() {
            idx[pos] += 1;
            if idx[pos] < base {
                break;
            }
            idx[pos] = 0;
        }
    }
    Ok(Arc::new(MeasureSpace::new(atoms, weights)?))
}

fn product_density(base: &[f64], n_base: usize, n: usize, total: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; n];
    for _ in 0..total {
        out.push(idx.iter().map(|&k| base[k]).product());
        for pos in (0..n).rev() {
            idx[pos] += 1;
            if idx[pos] < n_base {
                break;
            }
            idx[pos] = 0;
        }
    }
    out
}

/// Materializes the n-fold product family on the product alphabet:
/// atom weight = product of component weights, density of member j at
/// (x₁,…,x_n) = Π_i p_j(x_i). Fails with [`Error::SizeCap`] when
/// |atoms|^n exceeds `size_cap`.
pub fn product_extend(family: &FiniteFamily, n: usize, size_cap: u64) -> Result<FiniteFamily> {
    if n == 0 {
        return Err(Error::Parameter {
            detail: "product extension needs n >= 1".into(),
        });
    }
    let base = family.space().len();
    let total = product_space_size(base, n, size_cap)?;
    let space = product_space(family.space(), n, total)?;
    let members = family
        .members()
        .iter()
        .enumerate()
        .map(|(j, m)| {
            FiniteDistribution::new(
                Arc::clone(&space),
                product_density(m.density(), base, n, total),
                &format!("member {j} (n={n} product)"),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    FiniteFamily::new(members)
}

/// The n-fold product Q^{⊗n} of a single distribution, on the same product
/// space construction as [`product_extend`].
pub fn product_extend_distribution(
    dist: &FiniteDistribution,
    n: usize,
    size_cap: u64,
) -> Result<FiniteDistribution> {
    if n == 0 {
        return Err(Error::Parameter {
            detail: "product extension needs n >= 1".into(),
        });
    }
    let base = dist.space().len();
    let total = product_space_size(base, n, size_cap)?;
    let space = product_space(dist.space(), n, total)?;
    FiniteDistribution::new(
        space,
        product_density(dist.density(), base, n, total),
        &format!("reference (n={n} product)"),
    )
}

/// An isotropic Gaussian location family {N(θ_j, σ²I_d)}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianFamily {
    means: Vec<Vec<f64>>,
    sigma: f64,
}

impl GaussianFamily {
    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The number of alternatives N: members minus one.
    pub fn n(&self) -> usize {
        self.means.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.means[0].len()
    }

    pub fn means(&self) -> &[Vec<f64>] {
        &self.means
    }

    pub fn mean(&self, j: usize) -> &[f64] {
        &self.means[j]
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// ‖θ_i − θ_j‖².
    pub fn squared_distance(&self, i: usize, j: usize) -> f64 {
        self.means[i]
            .iter()
            .zip(&self.means[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    /// The n-fold i.i.d. product: a Gaussian family in dimension d·n with
    /// stacked means and the same σ.
    pub fn product_extend(&self, n: usize) -> Result<GaussianFamily> {
        if n == 0 {
            return Err(Error::Parameter {
                detail: "product extension needs n >= 1".into(),
            });
        }
        let means = self
            .means
            .iter()
            .map(|m| m.iter().copied().cycle().take(m.len() * n).collect())
            .collect();
        make_gaussian_family(means, self.sigma)
    }
}

/// Builds a Gaussian location family, validating dimensions, σ > 0, and
/// pairwise distinct means (Euclidean distance > 1e-12).
pub fn make_gaussian_family(means: Vec<Vec<f64>>, sigma: f64) -> Result<GaussianFamily> {
    if means.len() < 2 {
        return Err(Error::Parameter {
            detail: format!("a family needs N+1 >= 2 means, got {}", means.len()),
        });
    }
    let dim = means[0].len();
    if dim == 0 {
        return Err(Error::Parameter {
            detail: "means must have dimension >= 1".into(),
        });
    }
    for m in &means {
        if m.len() != dim {
            return Err(Error::Dimension {
                what: "mean vector",
                expected: dim,
                found: m.len(),
            });
        }
        if let Some(c) = m.iter().find(|c| !c.is_finite()) {
            return Err(Error::Parameter {
                detail: format!("mean coordinate {c} is not finite"),
            });
        }
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::Parameter {
            detail: format!("sigma must be positive, got {sigma}"),
        });
    }
    let fam = GaussianFamily { means, sigma };
    for i in 0..fam.len() {
        for j in (i + 1)..fam.len() {
            if fam.squared_distance(i, j).sqrt() <= DISTINCTNESS_TOL {
                return Err(Error::Distinctness {
                    first: i,
                    second: j,
                });
            }
        }
    }
    Ok(fam)
}
