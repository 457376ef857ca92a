//! Synthetic Gaussian data and Monte Carlo calibration of the tests.
//!
//! Replication `k` of a run draws from its own ChaCha stream `k + 1` of the run
//! seed (stream 0 belongs to [`sample_gaussian`]). Replications therefore do
//! not depend on scheduling, and parallel runs reproduce serial ones exactly.
//! Rejections are reduced as integer counts.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::ci_tests::{run_test, verify_equivalence, Method};
use crate::distributions::{beta_sym_cdf, NullCorrLaw};
use crate::error::{Error, Result};
use crate::estimators::{sample_covariance, Dataset};
use crate::graph::edge_pairs;
use crate::matrix::SymmetricMatrix;

pub const MIN_REPLICATIONS: usize = 1000;

/// Generator for replication `k` of a run seeded with `seed`.
pub fn replication_rng(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k + 1);
    rng
}

/// A zero-mean Gaussian model given by its precision matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionSpec {
    precision: SymmetricMatrix,
    /// Lower Cholesky factor of the covariance, row-major.
    cov_factor: Vec<f64>,
}

impl PrecisionSpec {
    pub fn new(precision: SymmetricMatrix) -> Result<Self> {
        let covariance = invert_spd(&precision)?;
        let cov_factor = covariance.cholesky()?;
        Ok(Self { precision, cov_factor })
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(SymmetricMatrix::identity(dim)).expect("identity is positive definite")
    }

    /// Unit-diagonal precision whose only off-diagonal pair gives partial correlation `rho` on `(i, j)`.
    pub fn single_edge(dim: usize, i: usize, j: usize, rho: f64) -> Result<Self> {
        if i >= dim || j >= dim || i == j {
            return Err(Error::IndexOutOfRange { row: i, col: j, dim });
        }
        if !(rho.abs() < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "partial correlation {rho} outside (-1, 1)"
            )));
        }
        Self::new(SymmetricMatrix::identity(dim).with_pair(i, j, -rho))
    }

    pub fn dim(&self) -> usize {
        self.precision.dim()
    }

    pub fn precision(&self) -> &SymmetricMatrix {
        &self.precision
    }

    pub fn covariance(&self) -> SymmetricMatrix {
        let n = self.dim();
        let l = &self.cov_factor;
        let mut e = vec![0.0; n * n];
        for r in 0..n {
            for c in 0..n {
                e[r * n + c] = (0..=r.min(c)).map(|k| l[r * n + k] * l[c * n + k]).sum();
            }
        }
        SymmetricMatrix::from_square_symmetrized(n, e)
    }

    /// `-p_ij / sqrt(p_ii p_jj)`.
    pub fn partial_correlation(&self, i: usize, j: usize) -> f64 {
        let p = &self.precision;
        -p.get(i, j) / (p.get(i, i) * p.get(j, j)).sqrt()
    }

    /// The same model with the `(i, j)` precision entry set to zero.
    pub fn matched_null(&self, i: usize, j: usize) -> Result<Self> {
        Self::new(self.precision.with_pair(i, j, 0.0))
    }

    fn draw(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<Dataset> {
        let p = self.dim();
        let l = &self.cov_factor;
        let mut values = Vec::with_capacity(n * p);
        let mut z = vec![0.0; p];
        for _ in 0..n {
            for zk in z.iter_mut() {
                *zk = rng.sample(StandardNormal);
            }
            for r in 0..p {
                values.push((0..=r).map(|k| l[r * p + k] * z[k]).sum());
            }
        }
        Dataset::with_default_names(p, values)
    }
}

/// Inverse of a symmetric positive-definite matrix through Cholesky solves.
fn invert_spd(m: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    let n = m.dim();
    let l = m.cholesky()?;
    let mut inv = vec![0.0; n * n];
    let mut col = vec![0.0; n];
    for c in 0..n {
        // L y = e_c
        for r in 0..n {
            let mut s = if r == c { 1.0 } else { 0.0 };
            for k in 0..r {
                s -= l[r * n + k] * col[k];
            }
            col[r] = s / l[r * n + r];
        }
        // L^T x = y
        for r in (0..n).rev() {
            let mut s = col[r];
            for k in r + 1..n {
                s -= l[k * n + r] * col[k];
            }
            col[r] = s / l[r * n + r];
        }
        for r in 0..n {
            inv[r * n + c] = col[r];
        }
    }
    Ok(SymmetricMatrix::from_square_symmetrized(n, inv))
}

/// `n` independent draws from the model; identical for identical seeds.
pub fn sample_gaussian(spec: &PrecisionSpec, n: usize, seed: u64) -> Result<Dataset> {
    if n < 2 {
        return Err(Error::InvalidDataset(format!("need at least 2 observations, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    spec.draw(n, &mut rng)
}

/// Diagonally dominant random precision matrix with largest partial correlation near `level`.
///
/// Off-diagonal entries start uniform on `[-1, 1]`; each diagonal entry is its
/// row's absolute off-diagonal sum plus `0.1`. The off-diagonal part is then
/// scaled so the largest `|rho_ij|` equals `level`, capped at scale 1 so that
/// dominance (and hence positive definiteness) survives.
pub fn random_precision_matrix(dim: usize, level: f64, seed: u64) -> Result<PrecisionSpec> {
    if dim < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 variables, got {dim}")));
    }
    if !(0.0..1.0).contains(&level) {
        return Err(Error::InvalidParameter(format!("level {level} outside [0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in i + 1..dim {
            let v: f64 = rng.random_range(-1.0..1.0);
            w[i * dim + j] = v;
            w[j * dim + i] = v;
        }
    }
    let diag: Vec<f64> = (0..dim)
        .map(|i| (0..dim).map(|j| w[i * dim + j].abs()).sum::<f64>() + 0.1)
        .collect();
    let mut rho_max = 0.0_f64;
    for i in 0..dim {
        for j in i + 1..dim {
            rho_max = rho_max.max(w[i * dim + j].abs() / (diag[i] * diag[j]).sqrt());
        }
    }
    let scale = if rho_max > 0.0 { (level / rho_max).min(1.0) } else { 0.0 };
    let mut e = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            e[i * dim + j] = if i == j { diag[i] } else { scale * w[i * dim + j] };
        }
    }
    PrecisionSpec::new(SymmetricMatrix::new(dim, e)?)
}

/// Rejection count and rate for one method.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodRate {
    pub method: Method,
    pub rejections: u64,
    pub rejection_rate: f64,
    pub std_error: f64,
}

impl MethodRate {
    fn from_count(method: Method, rejections: u64, reps: usize) -> Self {
        let p = rejections as f64 / reps as f64;
        Self {
            method,
            rejections,
            rejection_rate: p,
            std_error: (p * (1.0 - p) / reps as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportKind {
    Size,
    Power,
}

/// Monte Carlo rejection frequencies on one edge.
///
/// `rejection_rate` and `std_error` describe the requested method; `methods`
/// covers all three on the same replications. For power runs, `null_methods`
/// holds the rates at the matched null (precision entry zeroed, same seed).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub kind: ReportKind,
    pub dim: usize,
    pub n: usize,
    pub alpha: f64,
    pub edge: (usize, usize),
    pub partial_correlation: f64,
    pub method: Method,
    pub replications: usize,
    pub seed: u64,
    pub rejection_rate: f64,
    pub std_error: f64,
    pub methods: Vec<MethodRate>,
    /// KS distance of `(1 + r) / 2` from `Be(m, m)` over the null replications.
    pub ks_statistic: Option<f64>,
    pub null_rejection_rate: Option<f64>,
    pub null_methods: Option<Vec<MethodRate>>,
}

impl MonteCarloReport {
    pub fn rate(&self, method: Method) -> &MethodRate {
        self.methods
            .iter()
            .find(|m| m.method == method)
            .expect("all methods are reported")
    }

    pub fn null_rate(&self, method: Method) -> Option<&MethodRate> {
        self.null_methods.as_ref()?.iter().find(|m| m.method == method)
    }
}

struct RunTally {
    counts: [u64; 3],
    stats: Vec<f64>,
}

fn check_run(spec: &PrecisionSpec, edge: (usize, usize), n: usize, alpha: f64, reps: usize) -> Result<()> {
    let dim = spec.dim();
    if edge.0 >= dim || edge.1 >= dim || edge.0 == edge.1 {
        return Err(Error::IndexOutOfRange {
            row: edge.0,
            col: edge.1,
            dim,
        });
    }
    NullCorrLaw::new(n, dim)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "significance level {alpha} outside (0, 1)"
        )));
    }
    if reps < MIN_REPLICATIONS {
        return Err(Error::InvalidParameter(format!(
            "at least {MIN_REPLICATIONS} replications required, got {reps}"
        )));
    }
    Ok(())
}

fn tally(spec: &PrecisionSpec, edge: (usize, usize), n: usize, alpha: f64, reps: usize, seed: u64) -> Result<RunTally> {
    let (i, j) = edge;
    let per_rep = (0..reps as u64)
        .into_par_iter()
        .map(|k| {
            let d = spec.draw(n, &mut replication_rng(seed, k))?;
            let s = sample_covariance(&d);
            let mut hits = [false; 3];
            let mut r = 0.0;
            for (slot, method) in Method::ALL.iter().enumerate() {
                let dec = run_test(*method, &s, i, j, n, alpha)?;
                hits[slot] = dec.reject;
                if *method == Method::PartialCorr {
                    r = dec.statistic;
                }
            }
            Ok((hits, r))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut counts = [0u64; 3];
    let mut stats = Vec::with_capacity(reps);
    for (hits, r) in per_rep {
        for (c, h) in counts.iter_mut().zip(hits) {
            *c += h as u64;
        }
        stats.push(r);
    }
    Ok(RunTally { counts, stats })
}

fn rates(counts: [u64; 3], reps: usize) -> Vec<MethodRate> {
    Method::ALL
        .iter()
        .zip(counts)
        .map(|(m, c)| MethodRate::from_count(*m, c, reps))
        .collect()
}

/// Kolmogorov-Smirnov distance of `(1 + r) / 2` from `Be(m, m)`.
pub fn ks_beta_sym(correlations: &[f64], m: f64) -> Result<f64> {
    let mut u: Vec<f64> = correlations.iter().map(|r| (0.5 * (1.0 + r)).clamp(0.0, 1.0)).collect();
    u.sort_by(f64::total_cmp);
    let n = u.len() as f64;
    let mut d = 0.0_f64;
    for (k, &x) in u.iter().enumerate() {
        let f = beta_sym_cdf(x, m)?;
        d = d.max((k + 1) as f64 / n - f).max(f - k as f64 / n);
    }
    Ok(d)
}

/// Empirical size on an edge whose true partial correlation is zero.
pub fn estimate_size(
    spec: &PrecisionSpec,
    edge: (usize, usize),
    n: usize,
    alpha: f64,
    method: Method,
    reps: usize,
    seed: u64,
) -> Result<MonteCarloReport> {
    check_run(spec, edge, n, alpha, reps)?;
    let rho = spec.partial_correlation(edge.0, edge.1);
    if rho != 0.0 {
        return Err(Error::InvalidParameter(format!(
            "size needs a null edge, but ({}, {}) has partial correlation {rho}",
            edge.0, edge.1
        )));
    }
    let run = tally(spec, edge, n, alpha, reps, seed)?;
    let methods = rates(run.counts, reps);
    let m = NullCorrLaw::new(n, spec.dim())?.shape();
    let primary = methods
        .iter()
        .find(|r| r.method == method)
        .cloned()
        .expect("method present");
    Ok(MonteCarloReport {
        kind: ReportKind::Size,
        dim: spec.dim(),
        n,
        alpha,
        edge,
        partial_correlation: 0.0,
        method,
        replications: reps,
        seed,
        rejection_rate: primary.rejection_rate,
        std_error: primary.std_error,
        methods,
        ks_statistic: Some(ks_beta_sym(&run.stats, m)?),
        null_rejection_rate: None,
        null_methods: None,
    })
}

/// Empirical power on an edge, alongside the size at the matched null.
///
/// With a zero partial correlation on the edge this is [`estimate_size`].
pub fn estimate_power(
    spec: &PrecisionSpec,
    edge: (usize, usize),
    n: usize,
    alpha: f64,
    method: Method,
    reps: usize,
    seed: u64,
) -> Result<MonteCarloReport> {
    check_run(spec, edge, n, alpha, reps)?;
    let rho = spec.partial_correlation(edge.0, edge.1);
    if rho == 0.0 {
        return estimate_size(spec, edge, n, alpha, method, reps, seed);
    }
    let null_spec = spec.matched_null(edge.0, edge.1)?;
    let null = estimate_size(&null_spec, edge, n, alpha, method, reps, seed)?;
    let run = tally(spec, edge, n, alpha, reps, seed)?;
    let methods = rates(run.counts, reps);
    let primary = methods
        .iter()
        .find(|r| r.method == method)
        .cloned()
        .expect("method present");
    Ok(MonteCarloReport {
        kind: ReportKind::Power,
        dim: spec.dim(),
        n,
        alpha,
        edge,
        partial_correlation: rho,
        method,
        replications: reps,
        seed,
        rejection_rate: primary.rejection_rate,
        std_error: primary.std_error,
        methods,
        ks_statistic: null.ks_statistic,
        null_rejection_rate: Some(null.rejection_rate),
        null_methods: Some(null.methods),
    })
}

/// Rejection rate of one method on every edge, sharing replications across edges.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeRate {
    pub i: usize,
    pub j: usize,
    pub rejections: u64,
    pub rejection_rate: f64,
}

pub fn edge_rejection_rates(
    spec: &PrecisionSpec,
    n: usize,
    alpha: f64,
    method: Method,
    reps: usize,
    seed: u64,
) -> Result<Vec<EdgeRate>> {
    let pairs = edge_pairs(spec.dim());
    check_run(spec, pairs[0], n, alpha, reps)?;
    let hits = (0..reps as u64)
        .into_par_iter()
        .map(|k| {
            let d = spec.draw(n, &mut replication_rng(seed, k))?;
            let s = sample_covariance(&d);
            pairs
                .iter()
                .map(|&(i, j)| run_test(method, &s, i, j, n, alpha).map(|d| d.reject))
                .collect::<Result<Vec<bool>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(pairs
        .iter()
        .enumerate()
        .map(|(e, &(i, j))| {
            let c = hits.iter().filter(|h| h[e]).count() as u64;
            EdgeRate {
                i,
                j,
                rejections: c,
                rejection_rate: c as f64 / reps as f64,
            }
        })
        .collect())
}

/// How often two methods reach the same decision on one edge over shared replications.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementReport {
    pub first: Method,
    pub second: Method,
    pub replications: usize,
    pub agreements: u64,
    pub agreement_rate: f64,
    pub first_rejections: u64,
    pub second_rejections: u64,
}

pub fn decision_agreement(
    spec: &PrecisionSpec,
    edge: (usize, usize),
    n: usize,
    alpha: f64,
    methods: (Method, Method),
    reps: usize,
    seed: u64,
) -> Result<AgreementReport> {
    check_run(spec, edge, n, alpha, reps)?;
    let (i, j) = edge;
    let pairs = (0..reps as u64)
        .into_par_iter()
        .map(|k| {
            let d = spec.draw(n, &mut replication_rng(seed, k))?;
            let s = sample_covariance(&d);
            let a = run_test(methods.0, &s, i, j, n, alpha)?.reject;
            let b = run_test(methods.1, &s, i, j, n, alpha)?.reject;
            Ok((a, b))
        })
        .collect::<Result<Vec<_>>>()?;
    let agreements = pairs.iter().filter(|(a, b)| a == b).count() as u64;
    Ok(AgreementReport {
        first: methods.0,
        second: methods.1,
        replications: reps,
        agreements,
        agreement_rate: agreements as f64 / reps as f64,
        first_rejections: pairs.iter().filter(|p| p.0).count() as u64,
        second_rejections: pairs.iter().filter(|p| p.1).count() as u64,
    })
}

/// Summary of [`equivalence_sweep`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceSummary {
    pub instances: usize,
    pub edges_checked: usize,
    pub decision_disagreements: usize,
    pub raw_form_disagreements: usize,
    pub max_statistic_gap: f64,
    pub max_threshold_gap: f64,
    pub seed: u64,
    pub passed: bool,
}

/// Random instance `k`: `N` in 3..=6, `n` in `N+2..=50`, `alpha` in {0.1, 0.05, 0.01},
/// and a sample covariance drawn from a random precision matrix.
pub fn equivalence_instance(seed: u64, k: u64) -> Result<(SymmetricMatrix, usize, f64)> {
    let mut rng = replication_rng(seed, k);
    let dim: usize = rng.random_range(3..=6);
    let n: usize = rng.random_range(dim + 2..=50);
    let alpha = [0.1, 0.05, 0.01][rng.random_range(0..3usize)];
    let level: f64 = rng.random_range(0.0..0.9);
    let spec = random_precision_matrix(dim, level, rng.random())?;
    let d = spec.draw(n, &mut rng)?;
    Ok((sample_covariance(&d), n, alpha))
}

/// Runs [`verify_equivalence`] on every edge of `instances` random instances.
///
/// `flip_sign` negates the UMPU statistic before checking; it exists only as a
/// negative control and must make the sweep fail.
pub fn equivalence_sweep(instances: usize, seed: u64, flip_sign: bool) -> Result<EquivalenceSummary> {
    let per_instance = (0..instances as u64)
        .into_par_iter()
        .map(|k| {
            let (s, n, alpha) = equivalence_instance(seed, k)?;
            edge_pairs(s.dim())
                .into_iter()
                .map(|(i, j)| {
                    let v = verify_equivalence(&s, i, j, n, alpha)?;
                    Ok(if flip_sign { v.with_flipped_umpu_sign() } else { v })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let reports: Vec<_> = per_instance.into_iter().flatten().collect();
    let max_statistic_gap = reports.iter().fold(0.0_f64, |m, r| m.max(r.statistic_gap));
    let max_threshold_gap = reports.iter().fold(0.0_f64, |m, r| m.max(r.threshold_gap));
    Ok(EquivalenceSummary {
        instances,
        edges_checked: reports.len(),
        decision_disagreements: reports.iter().filter(|r| !r.same_decision).count(),
        raw_form_disagreements: reports.iter().filter(|r| !r.raw_form_agrees).count(),
        max_statistic_gap,
        max_threshold_gap,
        seed,
        passed: reports.iter().all(|r| r.passes()),
    })
}
