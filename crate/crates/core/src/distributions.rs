//! Special functions and the null laws used by the tests.
//!
//! Everything exact here reduces to the symmetric beta law `Be(m, m)`: under
//! conditional independence, `(1 + r) / 2` is `Be(m, m)` with `m = (n - N) / 2`,
//! where `r` is the sample partial correlation from `n` observations of `N`
//! variables. Half-integer `m` is routine (odd `n - N`).

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

const CF_MAX_ITER: usize = 2000;
const CF_EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// Bracket width, relative to the upper end, at which quantile bisection
/// hands over to a secant step.
const BISECT_WIDTH: f64 = 1e-13;

fn ln_beta(p: f64, q: f64) -> f64 {
    libm::lgamma(p) + libm::lgamma(q) - libm::lgamma(p + q)
}

/// Regularized incomplete beta function `I_x(p, q)`.
pub fn reg_inc_beta(x: f64, p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0) || !(q > 0.0) || !p.is_finite() || !q.is_finite() {
        return Err(Error::Domain(format!("beta shapes must be positive, got ({p}, {q})")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("incomplete beta argument {x} outside [0, 1]")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    if x == 0.5 && p == q {
        return Ok(0.5);
    }
    // The continued fraction converges fast for x < (p + 1) / (p + q + 2).
    if x < (p + 1.0) / (p + q + 2.0) {
        Ok(beta_front(x, p, q) * beta_cf(x, p, q) / p)
    } else {
        Ok(1.0 - beta_front(1.0 - x, q, p) * beta_cf(1.0 - x, q, p) / q)
    }
}

/// `x^p (1-x)^q / B(p, q)`.
fn beta_front(x: f64, p: f64, q: f64) -> f64 {
    (p * x.ln() + q * (-x).ln_1p() - ln_beta(p, q)).exp()
}

/// Modified Lentz evaluation of the incomplete beta continued fraction.
fn beta_cf(x: f64, p: f64, q: f64) -> f64 {
    let qab = p + q;
    let qap = p + 1.0;
    let qam = p - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (q - m) * x / ((qam + m2) * (p + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(p + m) * (qab + m) * x / ((p + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h
}

fn check_shape(m: f64) -> Result<()> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::Domain(format!("beta shape must be positive, got {m}")));
    }
    Ok(())
}

/// CDF of the symmetric beta law `Be(m, m)`.
pub fn beta_sym_cdf(x: f64, m: f64) -> Result<f64> {
    check_shape(m)?;
    reg_inc_beta(x, m, m)
}

/// Quantile of `Be(m, m)`: the `u` with `I_u(m, m) = prob`.
///
/// Computed on the lower half and reflected, so `q(1 - p) = 1 - q(p)`.
pub fn beta_sym_quantile(prob: f64, m: f64) -> Result<f64> {
    check_shape(m)?;
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::Domain(format!("probability {prob} outside (0, 1)")));
    }
    if prob == 0.5 {
        return Ok(0.5);
    }
    if prob > 0.5 {
        return Ok(1.0 - lower_half_quantile(1.0 - prob, m));
    }
    Ok(lower_half_quantile(prob, m))
}

fn lower_half_quantile(prob: f64, m: f64) -> f64 {
    let cdf = |u: f64| reg_inc_beta(u, m, m).expect("u in [0, 0.5] and m > 0");
    let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
    let (mut f_lo, mut f_hi) = (0.0_f64, 0.5_f64);
    while hi - lo > BISECT_WIDTH * hi {
        let mid = 0.5 * (lo + hi);
        let f_mid = cdf(mid);
        if f_mid < prob {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    if f_hi > f_lo {
        let x = lo + (prob - f_lo) * (hi - lo) / (f_hi - f_lo);
        x.clamp(lo, hi)
    } else {
        0.5 * (lo + hi)
    }
}

/// Exact null law of the sample partial correlation from `n` observations of
/// `dim` variables: density proportional to `(1 - x^2)^((n - dim - 2) / 2)` on `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullCorrLaw {
    n: usize,
    dim: usize,
}

impl NullCorrLaw {
    pub fn new(n: usize, dim: usize) -> Result<Self> {
        if n <= dim {
            return Err(Error::InsufficientSample { n, dim });
        }
        Ok(Self { n, dim })
    }

    /// `n - dim`.
    pub fn degrees(&self) -> usize {
        self.n - self.dim
    }

    /// Shape `m` of the equivalent `Be(m, m)` law of `(1 + r) / 2`.
    pub fn shape(&self) -> f64 {
        self.degrees() as f64 / 2.0
    }

    pub fn cdf(&self, r: f64) -> Result<f64> {
        if !(-1.0..=1.0).contains(&r) {
            return Err(Error::Domain(format!("correlation {r} outside [-1, 1]")));
        }
        reg_inc_beta(0.5 * (1.0 + r), self.shape(), self.shape())
    }

    pub fn density(&self, r: f64) -> f64 {
        if !(-1.0..=1.0).contains(&r) {
            return 0.0;
        }
        let m = self.shape();
        // (1+r)/2 ~ Be(m, m) with Jacobian 1/2
        let u = 0.5 * (1.0 + r);
        ((m - 1.0) * (u.ln() + (1.0 - u).ln()) - ln_beta(m, m)).exp() * 0.5
    }

    /// Two-sided critical value `c`: `P(|r| >= c) = alpha`, i.e. `1 - 2 q(alpha/2)`.
    pub fn critical_value(&self, alpha: f64) -> Result<f64> {
        check_alpha_closed(alpha)?;
        Ok(1.0 - 2.0 * beta_sym_quantile(0.5 * alpha, self.shape())?)
    }

    /// Two-sided p-value `2 min(F(r), 1 - F(r))`.
    pub fn two_sided_p_value(&self, r: f64) -> Result<f64> {
        let f = self.cdf(r.clamp(-1.0, 1.0))?;
        Ok((2.0 * f.min(1.0 - f)).clamp(0.0, 1.0))
    }
}

fn check_alpha_closed(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!("significance level {alpha} outside (0, 1]")));
    }
    Ok(())
}

/// `(1 - alpha/2)`-quantile of the null law of `r`; the acceptance region is `|r| < c`.
pub fn null_corr_quantile(alpha: f64, n: usize, dim: usize) -> Result<f64> {
    NullCorrLaw::new(n, dim)?.critical_value(alpha)
}

pub fn null_corr_cdf(r: f64, n: usize, dim: usize) -> Result<f64> {
    NullCorrLaw::new(n, dim)?.cdf(r)
}

/// Fisher statistic `(sqrt(n) / 2) ln((1 + r) / (1 - r))`.
pub fn fisher_z(r: f64, n: usize) -> Result<f64> {
    if !(r.abs() < 1.0) {
        return Err(Error::Domain(format!("Fisher transform needs |r| < 1, got {r}")));
    }
    Ok((n as f64).sqrt() * r.atanh())
}

pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Two-sided normal p-value `2 (1 - Phi(|z|))`.
pub fn std_normal_two_sided(z: f64) -> f64 {
    libm::erfc(z.abs() * FRAC_1_SQRT_2).min(1.0)
}

/// `Phi^{-1}(p)`: Acklam's rational approximation followed by one Halley step.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("probability {p} outside (0, 1)")));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    #[allow(clippy::excessive_precision)]
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let tail = |t: f64| {
        let s = (-2.0 * t.ln()).sqrt();
        (((((C[0] * s + C[1]) * s + C[2]) * s + C[3]) * s + C[4]) * s + C[5])
            / ((((D[0] * s + D[1]) * s + D[2]) * s + D[3]) * s + 1.0)
    };
    let mut x = if p < P_LOW {
        tail(p)
    } else if p > 1.0 - P_LOW {
        -tail(1.0 - p)
    } else {
        let s = p - 0.5;
        let r = s * s;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * s
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    // Work in the lower tail so the residual keeps relative accuracy.
    let (target, sign) = if p > 0.5 { (1.0 - p, -1.0) } else { (p, 1.0) };
    x *= sign;
    let e = std_normal_cdf(x) - target;
    let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    x -= u / (1.0 + 0.5 * x * u);
    Ok(sign * x)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite Simpson rule, fine grid; test-only oracle.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        let mut s = f(a) + f(b);
        for k in 1..panels {
            let x = a + h * k as f64;
            s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        s * h / 3.0
    }

    #[test]
    fn reg_inc_beta_basics() {
        for m in [0.5, 1.0, 2.5, 7.0, 30.0] {
            assert!((reg_inc_beta(0.5, m, m).unwrap() - 0.5).abs() < 1e-14);
        }
        assert!((reg_inc_beta(0.3, 1.0, 1.0).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(reg_inc_beta(0.0, 2.0, 3.0).unwrap(), 0.0);
        assert_eq!(reg_inc_beta(1.0, 2.0, 3.0).unwrap(), 1.0);
        let quad = simpson(|u| 6.0 * u * (1.0 - u), 0.0, 0.25, 64);
        assert!((quad - 0.15625).abs() < 1e-15);
        assert!((reg_inc_beta(0.25, 2.0, 2.0).unwrap() - quad).abs() < 1e-14);
        let a = reg_inc_beta(0.37, 2.5, 4.0).unwrap();
        let b = reg_inc_beta(0.63, 4.0, 2.5).unwrap();
        assert!((a + b - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reg_inc_beta_domain() {
        assert!(reg_inc_beta(-0.1, 1.0, 1.0).is_err());
        assert!(reg_inc_beta(1.1, 1.0, 1.0).is_err());
        assert!(reg_inc_beta(0.5, 0.0, 1.0).is_err());
        assert!(reg_inc_beta(0.5, 1.0, -2.0).is_err());
    }

    #[test]
    fn beta_quantile_examples() {
        assert!((beta_sym_quantile(0.025, 1.0).unwrap() - 0.025).abs() < 1e-13);
        for m in [0.5, 1.0, 3.5, 20.0] {
            assert_eq!(beta_sym_quantile(0.5, m).unwrap(), 0.5);
        }
        // 3q^2 - 2q^3 = 0.025, bisection on the polynomial
        let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if 3.0 * mid * mid - 2.0 * mid.powi(3) < 0.025 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((beta_sym_quantile(0.025, 2.0).unwrap() - lo).abs() < 1e-12);
        assert!(beta_sym_quantile(0.0, 2.0).is_err());
        assert!(beta_sym_quantile(0.5, 0.0).is_err());
    }

    #[test]
    fn beta_quantile_symmetry_and_accuracy() {
        for m in [0.5, 1.0, 1.5, 2.0, 5.0, 10.0, 24.5, 60.0] {
            for p in [1e-6, 0.005, 0.025, 0.05, 0.1, 0.25, 0.4] {
                let q = beta_sym_quantile(p, m).unwrap();
                let q_up = beta_sym_quantile(1.0 - p, m).unwrap();
                assert!((q + q_up - 1.0).abs() <= 1e-12);
                assert!((reg_inc_beta(q, m, m).unwrap() - p).abs() <= 1e-12, "m={m} p={p}");
            }
        }
    }

    #[test]
    fn half_shape_has_closed_form() {
        // I_x(1/2, 1/2) = (2/pi) asin(sqrt x)
        for p in [0.005, 0.025, 0.3] {
            let q = beta_sym_quantile(p, 0.5).unwrap();
            let closed = (0.5 * PI * p).sin().powi(2);
            assert!((q - closed).abs() < 1e-13, "{q} {closed}");
        }
    }

    #[test]
    fn null_corr_examples() {
        assert!((null_corr_quantile(0.05, 12, 10).unwrap() - 0.95).abs() < 1e-13);
        assert!(null_corr_quantile(1.0, 12, 10).unwrap().abs() < 1e-15);
        assert_eq!(
            null_corr_quantile(0.05, 5, 5),
            Err(Error::InsufficientSample { n: 5, dim: 5 })
        );
        assert!((null_corr_cdf(0.0, 30, 4).unwrap() - 0.5).abs() < 1e-15);
        assert!((null_corr_cdf(0.5, 12, 10).unwrap() - 0.75).abs() < 1e-14);
        assert_eq!(null_corr_cdf(-1.0, 30, 4).unwrap(), 0.0);
        assert_eq!(null_corr_cdf(1.0, 30, 4).unwrap(), 1.0);
        // n - N = 8: density (1-x^2)^3 * 35/32
        // antiderivative of (1-x^2)^3 is x - x^3 + 3x^5/5 - x^7/7
        let anti = |x: f64| x - x.powi(3) + 0.6 * x.powi(5) - x.powi(7) / 7.0;
        let exact = 35.0 / 32.0 * (anti(0.3) - anti(-1.0));
        assert!((null_corr_cdf(0.3, 18, 10).unwrap() - exact).abs() < 1e-13);
        let law = NullCorrLaw::new(18, 10).unwrap();
        assert!((law.density(0.3) - 35.0 / 32.0 * 0.91_f64.powi(3)).abs() < 1e-13);
    }

    #[test]
    fn null_quantile_round_trip() {
        for deg in 1..=40usize {
            for alpha in [0.2, 0.1, 0.05, 0.01] {
                let c = null_corr_quantile(alpha, 50 + deg, 50).unwrap();
                let f = null_corr_cdf(c, 50 + deg, 50).unwrap();
                assert!((f - (1.0 - alpha / 2.0)).abs() <= 1e-10, "deg={deg} alpha={alpha}");
            }
        }
    }

    #[test]
    fn fisher_examples() {
        assert_eq!(fisher_z(0.0, 17).unwrap(), 0.0);
        let z = fisher_z(0.5, 100).unwrap();
        assert!((z - 5.0 * 3.0_f64.ln()).abs() < 1e-13);
        assert!((fisher_z(-0.5, 100).unwrap() + z).abs() < 1e-15);
        assert!(fisher_z(1.0, 10).is_err());
        assert!(fisher_z(-1.0, 10).is_err());
    }

    #[test]
    fn normal_quantile_examples() {
        assert_eq!(std_normal_quantile(0.5).unwrap(), 0.0);
        // bisection against the erf-based CDF
        let (mut lo, mut hi) = (0.0_f64, 5.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if 0.5 * (1.0 + libm::erf(mid / 2.0_f64.sqrt())) < 0.975 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let z = std_normal_quantile(0.975).unwrap();
        assert!((z - lo).abs() < 1e-10);
        assert!((z - 1.959963984540054).abs() < 1e-12);
        assert!((std_normal_quantile(0.025).unwrap() + z).abs() < 1e-12);
        for p in [1e-12, 1e-6, 0.01, 0.3, 0.7, 0.99, 1.0 - 1e-9] {
            let x = std_normal_quantile(p).unwrap();
            let back = std_normal_cdf(x);
            assert!((back - p).abs() <= 1e-10 * p.min(1.0 - p).max(1e-3), "p={p}");
        }
        assert!(std_normal_quantile(1.0).is_err());
    }
}
