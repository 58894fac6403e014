//! Total variation, Kullback–Leibler divergence, and the power divergence
//! D_λ(P,Q) = ∫ p^{1+λ} q^{−λ} dμ.
//!
//! All logarithms are natural. Exact finite sums on finite alphabets; closed
//! forms for isotropic Gaussian location families; tensorization over i.i.d.
//! products (K tensorizes additively, D_λ multiplicatively, total variation
//! deliberately has no tensorization rule).
//!
//! Zero-handling conventions are the standard measure-theoretic ones:
//! 0·log(0/q) = 0 and 0^{1+λ} q^{−λ} = 0, while p > 0 against q = 0 yields
//! +∞. Infinity is a first-class value, not an error; bounds consuming it
//! report vacuous results.

use crate::error::{Error, Result};
use crate::family::{FiniteDistribution, FiniteFamily, GaussianFamily, ReferenceSpec};

/// Which divergence a [`DivergenceValue`] carries; drives tensorization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceKind {
    TotalVariation,
    Kl,
    Power,
}

impl DivergenceKind {
    fn name(self) -> &'static str {
        match self {
            DivergenceKind::TotalVariation => "total variation",
            DivergenceKind::Kl => "KL",
            DivergenceKind::Power => "power",
        }
    }
}

/// A computed divergence: an extended non-negative real tagged with its kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceValue {
    pub kind: DivergenceKind,
    pub value: f64,
}

/// ½ ∫ |p₁ − p₀| dμ. Symmetric, in [0, 1]. The half-absolute-sum and the
/// positive-part-sum ∫ (p₁ − p₀)₊ dμ are both computed and must agree.
pub fn total_variation(
    p0: &FiniteDistribution,
    p1: &FiniteDistribution,
) -> Result<DivergenceValue> {
    p0.check_same_space(p1)?;
    let w = p0.space().weights();
    let mut half_abs = 0.0;
    let mut pos_part = 0.0;
    for ((a, b), wx) in p0.density().iter().zip(p1.density()).zip(w) {
        half_abs += 0.5 * (b - a).abs() * wx;
        pos_part += (b - a).max(0.0) * wx;
    }
    debug_assert!(
        (half_abs - pos_part).abs() <= 1e-12,
        "total variation formulas disagree: {half_abs} vs {pos_part}"
    );
    Ok(DivergenceValue {
        kind: DivergenceKind::TotalVariation,
        value: half_abs,
    })
}

/// K(P,Q) = ∫ p log(p/q) dμ over atoms with p > 0; +∞ when P is not
/// absolutely continuous with respect to Q.
pub fn kl(p: &FiniteDistribution, q: &FiniteDistribution) -> Result<DivergenceValue> {
    p.check_same_space(q)?;
    let w = p.space().weights();
    let mut sum = 0.0;
    for ((px, qx), wx) in p.density().iter().zip(q.density()).zip(w) {
        if *px <= 0.0 {
            continue;
        }
        if *qx <= 0.0 {
            return Ok(DivergenceValue {
                kind: DivergenceKind::Kl,
                value: f64::INFINITY,
            });
        }
        sum += px * (px / qx).ln() * wx;
    }
    Ok(DivergenceValue {
        kind: DivergenceKind::Kl,
        value: sum,
    })
}

/// D_λ(P,Q) = ∫ p^{1+λ} q^{−λ} dμ for λ > 0. Finite values are ≥ 1 by
/// Jensen, with equality iff P = Q on atoms of positive weight.
pub fn power_divergence(
    p: &FiniteDistribution,
    q: &FiniteDistribution,
    lambda: f64,
) -> Result<DivergenceValue> {
    validate_lambda(lambda)?;
    p.check_same_space(q)?;
    let w = p.space().weights();
    let mut sum = 0.0;
    for ((px, qx), wx) in p.density().iter().zip(q.density()).zip(w) {
        if *px <= 0.0 {
            continue;
        }
        if *qx <= 0.0 {
            return Ok(DivergenceValue {
                kind: DivergenceKind::Power,
                value: f64::INFINITY,
            });
        }
        sum += px * (px / qx).powf(lambda) * wx;
    }
    Ok(DivergenceValue {
        kind: DivergenceKind::Power,
        value: sum,
    })
}

pub(crate) fn validate_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Parameter {
            detail: format!("lambda must be positive and finite, got {lambda}"),
        });
    }
    Ok(())
}

/// (N+1)⁻¹ Σ_j K(P_j, Q): the K̃ of the Fano-type bounds when Q = P̄, and the
/// K̄ of Birgé's bound when Q = P₀. Returns +∞ if any term is infinite.
pub fn avg_kl(family: &FiniteFamily, q: &FiniteDistribution) -> Result<f64> {
    Ok(per_member_kl(family, q)?.iter().sum::<f64>() / family.len() as f64)
}

/// K(P_j, Q) for every member j, in order.
pub fn per_member_kl(family: &FiniteFamily, q: &FiniteDistribution) -> Result<Vec<f64>> {
    family
        .members()
        .iter()
        .map(|m| kl(m, q).map(|d| d.value))
        .collect()
}

/// Per-member divergences of a Gaussian family against one of its members.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianDivergences {
    /// K(N(θ_j,σ²I), N(θ_r,σ²I)) = ‖θ_j − θ_r‖² / (2σ²).
    pub kl: Vec<f64>,
    /// D_λ = exp(λ(1+λ)‖θ_j − θ_r‖² / (2σ²)); +∞ on overflow.
    pub power: Vec<f64>,
    pub lambda: f64,
}

/// Closed-form per-member KL and power divergences for a Gaussian location
/// family. The reference must be a single member ([`ReferenceSpec::Indexed`]):
/// mixtures of Gaussians have no closed form and route to Monte Carlo in the
/// risk layer instead.
pub fn gaussian_divergences(
    fam: &GaussianFamily,
    reference: &ReferenceSpec,
    lambda: f64,
) -> Result<GaussianDivergences> {
    validate_lambda(lambda)?;
    let r = match reference {
        ReferenceSpec::Indexed { index } => {
            if *index >= fam.len() {
                return Err(Error::Parameter {
                    detail: format!(
                        "reference index {index} out of range for {} members",
                        fam.len()
                    ),
                });
            }
            *index
        }
        other => {
            return Err(Error::UnsupportedReference {
                detail: format!(
                    "gaussian closed forms need an indexed reference member, got {}; \
                     mixture references route to Monte Carlo",
                    other.label()
                ),
            })
        }
    };
    let half_rel: Vec<f64> = (0..fam.len())
        .map(|j| fam.squared_distance(j, r) / (2.0 * fam.sigma() * fam.sigma()))
        .collect();
    Ok(GaussianDivergences {
        kl: half_rel.clone(),
        power: half_rel
            .iter()
            .map(|c| (lambda * (1.0 + lambda) * c).exp())
            .collect(),
        lambda,
    })
}

/// Scales a single-copy divergence to the n-fold i.i.d. product:
/// KL → n·K, power → D^n. Total variation is rejected — there is no such
/// product rule for it.
pub fn tensorize(value: DivergenceValue, n: usize) -> Result<DivergenceValue> {
    if n == 0 {
        return Err(Error::Parameter {
            detail: "tensorization needs n >= 1".into(),
        });
    }
    match value.kind {
        DivergenceKind::TotalVariation => Err(Error::Kind {
            kind: value.kind.name(),
        }),
        DivergenceKind::Kl => Ok(DivergenceValue {
            kind: value.kind,
            value: n as f64 * value.value,
        }),
        DivergenceKind::Power => Ok(DivergenceValue {
            kind: value.kind,
            value: value.value.powi(n as i32),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{make_counting_family, make_gaussian_family, mixture};
    use crate::numeric::adaptive_simpson;

    fn pair() -> FiniteFamily {
        make_counting_family(vec![vec![0.6, 0.4], vec![0.4, 0.6]]).unwrap()
    }

    fn point_masses() -> FiniteFamily {
        make_counting_family(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn tv_examples() {
        let fam = pair();
        let same = total_variation(fam.member(0), fam.member(0)).unwrap();
        assert_eq!(same.value, 0.0);

        let disjoint = point_masses();
        let d = total_variation(disjoint.member(0), disjoint.member(1)).unwrap();
        assert_eq!(d.value, 1.0);

        let tv = total_variation(fam.member(0), fam.member(1)).unwrap();
        assert!((tv.value - 0.2).abs() < 1e-15);
    }

    #[test]
    fn tv_is_symmetric() {
        let fam = make_counting_family(vec![vec![0.1, 0.2, 0.7], vec![0.3, 0.3, 0.4]]).unwrap();
        let a = total_variation(fam.member(0), fam.member(1)).unwrap().value;
        let b = total_variation(fam.member(1), fam.member(0)).unwrap().value;
        assert_eq!(a, b);
    }

    #[test]
    fn kl_examples() {
        let fam = point_masses();
        let q = mixture(&fam, &[0.5, 0.5]).unwrap();
        assert_eq!(kl(fam.member(0), fam.member(0)).unwrap().value, 0.0);
        let v = kl(fam.member(0), &q).unwrap().value;
        assert!((v - std::f64::consts::LN_2).abs() < 1e-15);
        // support violation: (0.5,0.5) against (1,0)
        let v = kl(&q, fam.member(0)).unwrap().value;
        assert!(v.is_infinite());
    }

    #[test]
    fn kl_is_asymmetric_on_a_witness_pair() {
        let fam = make_counting_family(vec![vec![0.9, 0.1], vec![0.5, 0.5]]).unwrap();
        let a = kl(fam.member(0), fam.member(1)).unwrap().value;
        let b = kl(fam.member(1), fam.member(0)).unwrap().value;
        assert!((a - b).abs() > 1e-3);
    }

    #[test]
    fn power_examples() {
        let fam = pair();
        let q = mixture(&fam, &[0.5, 0.5]).unwrap();
        assert!(
            (power_divergence(fam.member(0), fam.member(0), 1.0)
                .unwrap()
                .value
                - 1.0)
                .abs()
                < 1e-15
        );
        let v = power_divergence(fam.member(0), &q, 1.0).unwrap().value;
        assert!((v - 1.04).abs() < 1e-15);

        let pm = point_masses();
        let qm = mixture(&pm, &[0.5, 0.5]).unwrap();
        assert!((power_divergence(pm.member(0), &qm, 1.0).unwrap().value - 2.0).abs() < 1e-15);
        assert!(power_divergence(&qm, pm.member(0), 1.0)
            .unwrap()
            .value
            .is_infinite());
    }

    #[test]
    fn power_rejects_bad_lambda() {
        let fam = pair();
        assert!(matches!(
            power_divergence(fam.member(0), fam.member(1), 0.0),
            Err(Error::Parameter { .. })
        ));
        assert!(matches!(
            power_divergence(fam.member(0), fam.member(1), -1.0),
            Err(Error::Parameter { .. })
        ));
    }

    #[test]
    fn power_is_monotone_in_lambda() {
        let fam = make_counting_family(vec![vec![0.7, 0.3], vec![0.2, 0.8]]).unwrap();
        let q = mixture(&fam, &[0.5, 0.5]).unwrap();
        let grid = [0.1, 0.5, 1.0, 2.0, 5.0];
        let mut last = 1.0;
        for &l in &grid {
            let v = power_divergence(fam.member(0), &q, l).unwrap().value;
            assert!(v >= last - 1e-12, "D_lambda not monotone at {l}");
            last = v;
        }
    }

    #[test]
    fn avg_kl_examples() {
        // Bernoulli triple 0.3/0.5/0.7 against its uniform mixture Bern(0.5):
        // independent binary-KL arithmetic gives 0.054855252336701…
        let fam =
            make_counting_family(vec![vec![0.7, 0.3], vec![0.5, 0.5], vec![0.3, 0.7]]).unwrap();
        let q = mixture(&fam, &[1.0 / 3.0; 3]).unwrap();
        let k = avg_kl(&fam, &q).unwrap();
        assert!((k - 0.054_855_252_336_701_21).abs() < 1e-14);

        let fam2 = pair();
        let q2 = mixture(&fam2, &[0.5, 0.5]).unwrap();
        assert!(avg_kl(&fam2, &q2).unwrap() > 0.0);
        assert!(avg_kl(&fam2, fam2.member(0)).unwrap() > 0.0);

        // one infinite term makes the average infinite
        let pm = point_masses();
        assert!(avg_kl(&pm, pm.member(0)).unwrap().is_infinite());
    }

    #[test]
    fn gaussian_closed_forms_match_quadrature() {
        let fam = make_gaussian_family(vec![vec![0.0], vec![1.0]], 1.0).unwrap();
        let d = gaussian_divergences(&fam, &ReferenceSpec::Indexed { index: 0 }, 1.0).unwrap();
        assert_eq!(d.kl[0], 0.0);
        assert_eq!(d.power[0], 1.0);
        assert!((d.kl[1] - 0.5).abs() < 1e-15);
        assert!((d.power[1] - std::f64::consts::E).abs() < 1e-12);

        // quadrature oracle for the same quantities
        let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        let p = move |x: f64| norm * (-(x - 1.0) * (x - 1.0) / 2.0).exp();
        let q = move |x: f64| norm * (-x * x / 2.0).exp();
        let kl_quad = adaptive_simpson(&|x| p(x) * (p(x) / q(x)).ln(), -12.0, 13.0, 1e-12);
        assert!((kl_quad - 0.5).abs() < 1e-8);
        let pow_quad = adaptive_simpson(&|x| p(x) * p(x) / q(x), -12.0, 14.0, 1e-12);
        assert!((pow_quad - std::f64::consts::E).abs() < 1e-8);
    }

    #[test]
    fn gaussian_rejects_mixture_reference() {
        let fam = make_gaussian_family(vec![vec![0.0], vec![1.0]], 1.0).unwrap();
        assert!(matches!(
            gaussian_divergences(&fam, &ReferenceSpec::UniformMixture, 1.0),
            Err(Error::UnsupportedReference { .. })
        ));
    }

    #[test]
    fn tensorize_examples() {
        let v = tensorize(
            DivergenceValue {
                kind: DivergenceKind::Kl,
                value: 0.5,
            },
            4,
        )
        .unwrap();
        assert_eq!(v.value, 2.0);

        let v = tensorize(
            DivergenceValue {
                kind: DivergenceKind::Power,
                value: 1.04,
            },
            2,
        )
        .unwrap();
        assert!((v.value - 1.0816).abs() < 1e-15);

        let v = tensorize(
            DivergenceValue {
                kind: DivergenceKind::Power,
                value: 1.0,
            },
            17,
        )
        .unwrap();
        assert_eq!(v.value, 1.0);

        assert!(matches!(
            tensorize(
                DivergenceValue {
                    kind: DivergenceKind::TotalVariation,
                    value: 0.2,
                },
                2,
            ),
            Err(Error::Kind { .. })
        ));
    }

    #[test]
    fn space_mismatch_is_reported() {
        let a = pair();
        let b = make_counting_family(vec![vec![0.2, 0.3, 0.5], vec![0.5, 0.3, 0.2]]).unwrap();
        assert!(matches!(
            total_variation(a.member(0), b.member(0)),
            Err(Error::SpaceMismatch)
        ));
        assert!(matches!(
            kl(a.member(0), b.member(0)),
            Err(Error::SpaceMismatch)
        ));
    }
}
