//! Observations and the sample statistics computed from them.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;

/// `n` observations of `N` named variables, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n: usize,
    dim: usize,
    values: Vec<f64>,
    names: Vec<String>,
}

impl Dataset {
    pub fn new(names: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let dim = names.len();
        if dim == 0 {
            return Err(Error::InvalidDataset("no variables".into()));
        }
        if !values.len().is_multiple_of(dim) {
            return Err(Error::InvalidDataset(format!(
                "{} values do not fill rows of {dim} variables",
                values.len()
            )));
        }
        let n = values.len() / dim;
        if n < 2 {
            return Err(Error::InvalidDataset(format!("need at least 2 observations, got {n}")));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / dim,
                col: pos % dim,
            });
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidDataset(format!("duplicate variable name {name:?}")));
            }
        }
        Ok(Self { n, dim, values, names })
    }

    /// Names `X1..XN`.
    pub fn with_default_names(dim: usize, values: Vec<f64>) -> Result<Self> {
        Self::new((1..=dim).map(|k| format!("X{k}")).collect(), values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.values[t * self.dim..(t + 1) * self.dim]
    }

    /// Dataset with columns reordered: new column `k` is old column `perm[k]`.
    pub fn permuted_columns(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.dim {
            return Err(Error::InvalidParameter("permutation length mismatch".into()));
        }
        let names = perm.iter().map(|&k| self.names[k].clone()).collect();
        let mut values = Vec::with_capacity(self.values.len());
        for t in 0..self.n {
            let row = self.row(t);
            values.extend(perm.iter().map(|&k| row[k]));
        }
        Self::new(names, values)
    }
}

/// Sample covariance with the `1/n` normalization.
///
/// May be singular (for example with a constant column); callers that need a
/// positive-definite matrix validate it themselves.
pub fn sample_covariance(d: &Dataset) -> SymmetricMatrix {
    covariance_with_divisor(d, d.n as f64)
}

/// Sample covariance with the unbiased `1/(n-1)` normalization.
pub fn sample_covariance_unbiased(d: &Dataset) -> SymmetricMatrix {
    covariance_with_divisor(d, (d.n - 1) as f64)
}

fn covariance_with_divisor(d: &Dataset, divisor: f64) -> SymmetricMatrix {
    let (n, p) = (d.n, d.dim);
    let mut mean = vec![0.0; p];
    for t in 0..n {
        for (m, v) in mean.iter_mut().zip(d.row(t)) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut acc = vec![0.0; p * p];
    let mut dev = vec![0.0; p];
    for t in 0..n {
        for ((dv, v), m) in dev.iter_mut().zip(d.row(t)).zip(&mean) {
            *dv = v - m;
        }
        for k in 0..p {
            for l in k..p {
                acc[k * p + l] += dev[k] * dev[l];
            }
        }
    }
    for k in 0..p {
        for l in k..p {
            let v = acc[k * p + l] / divisor;
            acc[k * p + l] = v;
            acc[l * p + k] = v;
        }
    }
    SymmetricMatrix::from_square_symmetrized(p, acc)
}

/// Sample partial correlation `r_ij = -S^{ij} / sqrt(S^{ii} S^{jj})` given all other variables.
pub fn sample_partial_correlation(s: &SymmetricMatrix, i: usize, j: usize) -> Result<f64> {
    s.cholesky()?;
    s.cofactor_partial_correlation(i, j)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn dataset_validation() {
        assert!(Dataset::with_default_names(2, vec![1.0, 2.0]).is_err());
        assert!(Dataset::with_default_names(2, vec![1.0, 2.0, 3.0]).is_err());
        assert_eq!(
            Dataset::with_default_names(2, vec![1.0, 2.0, f64::INFINITY, 4.0]),
            Err(Error::NonFinite { row: 1, col: 0 })
        );
        assert!(Dataset::new(vec!["a".into(), "a".into()], vec![1.0, 2.0, 3.0, 4.0]).is_err());
    }

    #[test]
    fn covariance_examples() {
        let d = Dataset::with_default_names(3, vec![1.0, 2.0, 3.0, 1.0, 2.0, 3.0, 1.0, 2.0, 3.0]).unwrap();
        assert!(sample_covariance(&d).as_slice().iter().all(|&v| v == 0.0));

        let d = Dataset::with_default_names(2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(sample_covariance(&d).as_slice(), &[1.0, 1.0, 1.0, 1.0]);

        let base = vec![1.0, 0.5, 2.0, -1.0, 0.0, 3.0, 4.0, 1.5, -2.0, 2.5, 0.1, 0.7];
        let d = Dataset::with_default_names(3, base.clone()).unwrap();
        let mut scaled = base;
        for t in 0..4 {
            scaled[t * 3 + 1] *= 3.0;
        }
        let ds = Dataset::with_default_names(3, scaled).unwrap();
        let (s, t) = (sample_covariance(&d), sample_covariance(&ds));
        assert!(close(t.get(1, 1), 9.0 * s.get(1, 1), 1e-12));
        assert!(close(t.get(0, 1), 3.0 * s.get(0, 1), 1e-12));
        assert!(close(t.get(0, 2), s.get(0, 2), 1e-15));
    }

    #[test]
    fn partial_correlation_examples() {
        let id = SymmetricMatrix::identity(4);
        assert_eq!(sample_partial_correlation(&id, 1, 3).unwrap(), 0.0);
        let s = SymmetricMatrix::from_rows(&[[1.0, 0.5, 0.0], [0.5, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        assert!(close(sample_partial_correlation(&s, 0, 1).unwrap(), 0.5, 1e-15));
        let bad = SymmetricMatrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        assert!(matches!(
            sample_partial_correlation(&bad, 0, 1),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn upper_boundary_gives_plus_one() {
        let s = SymmetricMatrix::from_rows(&[[2.0, 0.4, 1.0], [0.4, 2.0, 1.0], [1.0, 1.0, 2.0]]).unwrap();
        let iv = s.quadratic_decomposition(0, 1).unwrap().pd_interval().unwrap();
        let r = s.with_pair(0, 1, iv.x2).cofactor_partial_correlation(0, 1).unwrap();
        assert!(close(r, 1.0, 1e-12));
    }

    #[test]
    fn divisor_convention_is_irrelevant() {
        let vals = vec![
            0.3, 1.2, -0.7, 2.2, -1.1, 0.4, 0.9, 0.0, 1.6, 1.0, -0.2, 0.8, -0.5, 0.6, 2.0, 1.4, 0.2, -1.3,
        ];
        let d = Dataset::with_default_names(3, vals).unwrap();
        let a = sample_covariance(&d);
        let b = sample_covariance_unbiased(&d);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let ra = sample_partial_correlation(&a, i, j).unwrap();
            let rb = sample_partial_correlation(&b, i, j).unwrap();
            assert!(close(ra, rb, 1e-12), "{ra} {rb}");
        }
    }

    #[test]
    fn independent_third_variable_reduces_to_plain_correlation() {
        let s = SymmetricMatrix::from_rows(&[[2.0, 0.6, 0.0], [0.6, 0.5, 0.0], [0.0, 0.0, 3.0]]).unwrap();
        let plain = 0.6 / (2.0_f64 * 0.5).sqrt();
        assert!(close(sample_partial_correlation(&s, 0, 1).unwrap(), plain, 1e-14));
    }
}
