//! Independent numerical oracles shared by the integration tests.
//!
//! Nothing here calls the library's special functions: distribution values
//! come from adaptive Simpson quadrature of the densities, inverted by bisection.

#![allow(dead_code)]

use concgraph::SymmetricMatrix;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    let c = 0.5 * (a + b);
    let (fa, fb, fc) = (f(a), f(b), f(c));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
    simpson_step(f, a, b, fa, fb, fc, whole, eps, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fc: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let c = 0.5 * (a + b);
    let (d, e) = (0.5 * (a + c), 0.5 * (c + b));
    let (fd, fe) = (f(d), f(e));
    let left = (c - a) / 6.0 * (fa + 4.0 * fd + fc);
    let right = (b - c) / 6.0 * (fc + 4.0 * fe + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, c, fa, fc, fd, left, 0.5 * eps, depth - 1)
        + simpson_step(f, c, b, fc, fb, fe, right, 0.5 * eps, depth - 1)
}

/// Be(m, m) CDF by quadrature. With `u = t^2` the integrand
/// `2 t (4 t^2 (1 - t^2))^(m-1)` is bounded on `[0, sqrt(1/2)]` for `m >= 1/2`.
pub fn beta_sym_cdf_quad(x: f64, m: f64) -> f64 {
    if x > 0.5 {
        return 1.0 - beta_sym_cdf_quad(1.0 - x, m);
    }
    let g = |t: f64| {
        let v = 4.0 * t * t * (1.0 - t * t);
        if v <= 0.0 {
            if m >= 1.0 {
                0.0
            } else {
                // 2t * (4t^2)^(m-1) = 2 * 4^(m-1) * t^(2m-1)
                2.0 * 4f64.powf(m - 1.0) * t.powf(2.0 * m - 1.0)
            }
        } else {
            2.0 * t * v.powf(m - 1.0)
        }
    };
    let half = adaptive_simpson(&g, 0.0, 0.5f64.sqrt(), 1e-15);
    adaptive_simpson(&g, 0.0, x.sqrt(), 1e-15) / (2.0 * half)
}

/// Quantile of Be(m, m) by bisection on the quadrature CDF.
pub fn beta_sym_quantile_quad(p: f64, m: f64) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if beta_sym_cdf_quad(mid, m) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `c` with `P(|r| >= c) = alpha` under the density `(1 - x^2)^((deg - 2) / 2)` on `[-1, 1]`.
///
/// Upper tail mass `int_c^1 (1-x^2)^k dx` uses `x = 1 - s^2`, giving the
/// integrand `2 s^(2k+1) (2 - s^2)^k`, bounded for `deg >= 1`.
pub fn null_corr_critical_quad(alpha: f64, deg: usize) -> f64 {
    let k = (deg as f64 - 2.0) / 2.0;
    let g = move |s: f64| {
        let base = if 2.0 * k + 1.0 == 0.0 {
            1.0
        } else {
            s.powf(2.0 * k + 1.0)
        };
        2.0 * base * (2.0 - s * s).powf(k)
    };
    let tail = |c: f64| adaptive_simpson(&g, 0.0, (1.0 - c).sqrt(), 1e-15);
    let total = 2.0 * tail(0.0);
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if tail(mid) / total > 0.5 * alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `B B^T / dim + 0.1 I` with standard normal `B`.
pub fn random_spd(dim: usize, rng: &mut ChaCha8Rng) -> SymmetricMatrix {
    let b: Vec<f64> = (0..dim * dim).map(|_| rng.sample(StandardNormal)).collect();
    let mut e = vec![0.0; dim * dim];
    for r in 0..dim {
        for c in r..dim {
            let mut s: f64 = (0..dim).map(|k| b[r * dim + k] * b[c * dim + k]).sum::<f64>() / dim as f64;
            if r == c {
                s += 0.1;
            }
            e[r * dim + c] = s;
            e[c * dim + r] = s;
        }
    }
    SymmetricMatrix::new(dim, e).expect("finite symmetric")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_index_pair(dim: usize, rng: &mut ChaCha8Rng) -> (usize, usize) {
    let i = rng.random_range(0..dim);
    let mut j = rng.random_range(0..dim - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}
