//! Independent reference implementations used as test oracles.
//!
//! Everything here is deliberately written without touching the main library
//! so that agreement between the two is meaningful: quadrature instead of
//! recurrences, library CDFs instead of hand-rolled tail sums, closed-form
//! combinatorics instead of enumeration. Test-support only, never a runtime
//! dependency.

use statrs::distribution::{Beta, ChiSquared, ContinuousCDF, Normal};
use statrs::function::gamma::ln_gamma;

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance
/// `tol`. The interval is pre-split into nine panels so periodic integrands
/// cannot alias with the refinement points and fake early convergence.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let panels = 9;
    let width = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + i as f64 * width;
            let hi = if i == panels - 1 { b } else { lo + width };
            adaptive_simpson_panel(f, lo, hi, tol / panels as f64)
        })
        .sum()
}

fn adaptive_simpson_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 50)
}

/// k-th central moment of Beta(alpha, beta) by quadrature.
///
/// Uses the substitution x = sin²θ so the integrand stays bounded for
/// shape parameters down to 1/2.
pub fn beta_central_moment_quadrature(alpha: f64, beta: f64, k: u32) -> f64 {
    assert!(
        alpha >= 0.5 && beta >= 0.5,
        "quadrature needs shapes >= 1/2"
    );
    let mean = alpha / (alpha + beta);
    let ln_b = ln_gamma(alpha) + ln_gamma(beta) - ln_gamma(alpha + beta);
    let integrand = |theta: f64| {
        let s = theta.sin();
        let c = theta.cos();
        let x = s * s;
        2.0 * s.powf(2.0 * alpha - 1.0) * c.powf(2.0 * beta - 1.0) * (x - mean).powi(k as i32)
            / ln_b.exp()
    };
    adaptive_simpson(&integrand, 0.0, std::f64::consts::FRAC_PI_2, 1e-13)
}

/// E |X/m - 1|^k for X ~ chi-squared with m degrees of freedom, by quadrature
/// split at the kink x = m.
pub fn chi2_scaled_abs_central_moment(m: u32, k: u32) -> f64 {
    let mf = m as f64;
    let ln_norm = (mf / 2.0) * 2.0f64.ln() + ln_gamma(mf / 2.0);
    let pdf = move |x: f64| {
        if x <= 0.0 {
            0.0
        } else {
            ((mf / 2.0 - 1.0) * x.ln() - x / 2.0 - ln_norm).exp()
        }
    };
    let integrand = move |x: f64| (x / mf - 1.0).abs().powi(k as i32) * pdf(x);
    let hi = mf + 40.0 * (2.0 * mf).sqrt() + 40.0;
    adaptive_simpson(&integrand, 0.0, mf, 1e-13) + adaptive_simpson(&integrand, mf, hi, 1e-13)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().cdf(x)
}

/// Chi-squared CDF with `k` degrees of freedom.
pub fn chi_squared_cdf(x: f64, k: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        ChiSquared::new(k).unwrap().cdf(x)
    }
}

/// Beta quantile function.
pub fn beta_inv_cdf(p: f64, alpha: f64, beta: f64) -> f64 {
    Beta::new(alpha, beta).unwrap().inverse_cdf(p)
}

/// Kolmogorov-Smirnov statistic of a sample against a CDF. Sorts a copy of
/// the sample.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d
}

/// E[(|S_i ∩ S_j|)^p] for independent uniformly random s-subsets of
/// {1, ..., m}: the overlap is hypergeometric, so the moment is a finite sum
/// with exact binomial weights.
pub fn hypergeometric_overlap_moment(m: u64, s: u64, p: u32) -> f64 {
    assert!(s <= m);
    let total = binomial(m, s);
    let mut acc = 0.0f64;
    let lo = s.saturating_sub(m - s);
    for j in lo..=s {
        let ways = binomial(s, j) * binomial(m - s, s - j);
        acc += (ways as f64 / total as f64) * (j as f64).powi(p as i32);
    }
    acc
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num: u128 = 1;
    for i in 0..k {
        num = num * (n - i) as u128 / (i + 1) as u128;
    }
    num
}
