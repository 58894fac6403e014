//! Numeric utilities: shared tolerances, simplex projection, golden-section
//! search, adaptive Simpson quadrature, and log-sum-exp.
//!
//! Everything here is a small, self-contained routine used by more than one
//! module (or by a module and its oracle tests).

/// Tolerance for density normalization checks: Σ p(x) μ(x) must be within
/// this of 1.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Sup-norm tolerance below which two densities count as identical.
pub const DISTINCTNESS_TOL: f64 = 1e-12;

/// Absolute bisection tolerance for inverting the truncated entropy.
pub const ENTROPY_INVERT_TOL: f64 = 1e-12;

/// Euclidean projection of `v` onto the probability simplex
/// { w : w_i >= 0, Σ w_i = 1 } (sort-based algorithm of Duchi et al.).
pub fn project_to_simplex(v: &mut [f64]) {
    let n = v.len();
    debug_assert!(n > 0);
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("non-NaN projection input"));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (i as f64 + 1.0);
        if u - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
    // Guard against accumulated rounding: renormalize the (non-negative) result.
    let s: f64 = v.iter().sum();
    if s > 0.0 {
        for x in v.iter_mut() {
            *x /= s;
        }
    } else {
        let u = 1.0 / n as f64;
        for x in v.iter_mut() {
            *x = u;
        }
    }
}

/// Golden-section minimization of `f` on `[a, b]`.
///
/// Shrinks the interval until its width is at most `abs_tol`, and returns the
/// best point evaluated anywhere along the way (so the result never regresses
/// behind the initial bracket endpoints even on non-unimodal inputs).
pub fn golden_section_min(f: impl Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9; // (sqrt(5) - 1) / 2
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut best = (a, f(a));
    let fb = f(b);
    if fb < best.1 {
        best = (b, fb);
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..400 {
        if fc < best.1 {
            best = (c, fc);
        }
        if fd < best.1 {
            best = (d, fd);
        }
        if (b - a) <= abs_tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    best
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to the given absolute
/// tolerance. Used as the 1-d oracle for Gaussian closed forms.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(fa, fm, fb, b - a);
    rec(f, a, b, fa, fm, fb, whole, abs_tol, 48)
}

/// Numerically stable log(Σ exp(x_i)); returns -inf on an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let s: f64 = xs.iter().map(|x| (x - m).exp()).sum();
    m + s.ln()
}

/// Sample moments of a batch: (mean, sample standard deviation, kurtosis).
///
/// Kurtosis is the raw ratio m4/m2^2 of central moments (3 for a Gaussian);
/// it is reported so callers can warn about heavy-tailed Monte Carlo
/// integrands. Returns kurtosis 0 for degenerate (constant) samples.
pub fn sample_moments(xs: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    assert!(n >= 2.0, "need at least two samples");
    let mean = xs.iter().sum::<f64>() / n;
    let mut m2 = 0.0;
    let mut m4 = 0.0;
    for &x in xs {
        let d = x - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    let var_sample = m2 / (n - 1.0);
    m2 /= n;
    m4 /= n;
    let kurtosis = if m2 > 0.0 { m4 / (m2 * m2) } else { 0.0 };
    (mean, var_sample.sqrt(), kurtosis)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_projection_fixed_points_and_clipping() {
        let mut v = vec![0.25, 0.25, 0.5];
        project_to_simplex(&mut v);
        assert!((v[0] - 0.25).abs() < 1e-15);
        assert!((v[2] - 0.5).abs() < 1e-15);

        let mut v = vec![2.0, -1.0];
        project_to_simplex(&mut v);
        assert_eq!(v, vec![1.0, 0.0]);

        let mut v = vec![0.6, 0.6];
        project_to_simplex(&mut v);
        assert!((v[0] - 0.5).abs() < 1e-15 && (v[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn simplex_projection_sums_to_one() {
        let mut v = vec![3.0, -2.5, 0.1, 7.0, -0.3];
        project_to_simplex(&mut v);
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(v.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, fx) = golden_section_min(|x| (x - 1.25) * (x - 1.25) + 0.5, -4.0, 6.0, 1e-10);
        assert!((x - 1.25).abs() < 1e-8);
        assert!((fx - 0.5).abs() < 1e-14);
    }

    #[test]
    fn golden_section_keeps_best_endpoint() {
        // Monotone decreasing on the bracket: best point is the right endpoint.
        let (x, _) = golden_section_min(|x| -x, 0.0, 2.0, 1e-12);
        assert!(x > 2.0 - 1e-9);
    }

    #[test]
    fn simpson_matches_known_integrals() {
        let v = adaptive_simpson(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12);
        assert!((v - 2.0).abs() < 1e-10);
        let v = adaptive_simpson(&|x: f64| (-x * x / 2.0).exp(), -10.0, 10.0, 1e-12);
        assert!((v - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn log_sum_exp_is_stable() {
        let v = log_sum_exp(&[1000.0, 1000.0]);
        assert!((v - (1000.0 + 2.0_f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn moments_of_constant_and_simple_batches() {
        let (mean, sd, kurt) = sample_moments(&[2.0, 2.0, 2.0]);
        assert_eq!(mean, 2.0);
        assert_eq!(sd, 0.0);
        assert_eq!(kurt, 0.0);
        let (mean, sd, _) = sample_moments(&[1.0, 3.0]);
        assert_eq!(mean, 2.0);
        assert!((sd - std::f64::consts::SQRT_2).abs() < 1e-15);
    }
}
