//! Dense symmetric matrices and the edge-wise structure of their determinant.
//!
//! Fixing every entry of a symmetric matrix except the pair `(i, j)`/`(j, i)`
//! and writing `x` for that pair, the determinant is a quadratic in `x`:
//!
//! ```text
//! det M(x) = -a x^2 + b x + c
//! ```
//!
//! [`QuadCoeffs`] holds `(a, b, c)`. The interval between the two roots is the
//! set of values for which `M(x)` stays positive definite, and the cofactor of
//! the `(i, j)` entry is affine in `x`: `cof_ij(M(x)) = -a x + b / 2`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative pivot floor used by the positive-definiteness check.
const PIVOT_REL_FLOOR: f64 = 1e-12;

/// An `N x N` real symmetric matrix, stored row-major.
///
/// Symmetry is exact: construction fails unless `m[k][l] == m[l][k]` bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl SymmetricMatrix {
    /// Builds a matrix from row-major entries, validating symmetry and finiteness.
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("matrix dimension must be positive".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::InvalidParameter(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        for row in 0..dim {
            for col in 0..dim {
                let v = entries[row * dim + col];
                if !v.is_finite() {
                    return Err(Error::NonFinite { row, col });
                }
                if col > row && v != entries[col * dim + row] {
                    return Err(Error::NotSymmetric { row, col });
                }
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for (k, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::InvalidParameter(format!(
                    "row {k} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            entries.extend_from_slice(row);
        }
        Self::new(dim, entries)
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut entries = vec![0.0; dim * dim];
        for (k, &d) in diag.iter().enumerate() {
            entries[k * dim + k] = d;
        }
        Self { dim, entries }
    }

    /// Symmetrizes an arbitrary square buffer as `(A + A^T) / 2`.
    pub(crate) fn from_square_symmetrized(dim: usize, mut entries: Vec<f64>) -> Self {
        for row in 0..dim {
            for col in row + 1..dim {
                let avg = 0.5 * (entries[row * dim + col] + entries[col * dim + row]);
                entries[row * dim + col] = avg;
                entries[col * dim + row] = avg;
            }
        }
        Self { dim, entries }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|k| self.get(k, k)).sum()
    }

    fn check_index(&self, row: usize, col: usize) -> Result<()> {
        if row >= self.dim || col >= self.dim {
            return Err(Error::IndexOutOfRange {
                row,
                col,
                dim: self.dim,
            });
        }
        Ok(())
    }

    fn check_edge(&self, i: usize, j: usize) -> Result<()> {
        self.check_index(i, j)?;
        if i == j {
            return Err(Error::Domain(format!("edge endpoints must differ, got ({i}, {j})")));
        }
        Ok(())
    }

    /// Copy of the matrix with entries `(i, j)` and `(j, i)` replaced by `x`.
    pub fn with_pair(&self, i: usize, j: usize, x: f64) -> Self {
        let mut entries = self.entries.clone();
        entries[i * self.dim + j] = x;
        entries[j * self.dim + i] = x;
        Self { dim: self.dim, entries }
    }

    /// Simultaneous row/column permutation: result `[k][l] = self[perm[k]][perm[l]]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.dim;
        let mut entries = vec![0.0; n * n];
        for k in 0..n {
            for l in 0..n {
                entries[k * n + l] = self.get(perm[k], perm[l]);
            }
        }
        Self { dim: n, entries }
    }

    /// Lower Cholesky factor (row-major), or the first pivot that fails.
    ///
    /// A pivot fails when it is not above `1e-12 * trace` (or not positive when
    /// the trace is not positive).
    pub fn cholesky(&self) -> Result<Vec<f64>> {
        let n = self.dim;
        let floor = PIVOT_REL_FLOOR * self.trace().max(0.0);
        let mut l = vec![0.0; n * n];
        for k in 0..n {
            let mut pivot = self.get(k, k);
            for p in 0..k {
                pivot -= l[k * n + p] * l[k * n + p];
            }
            if !(pivot > floor) || pivot <= 0.0 {
                return Err(Error::NotPositiveDefinite { pivot: k, value: pivot });
            }
            let d = pivot.sqrt();
            l[k * n + k] = d;
            for r in k + 1..n {
                let mut s = self.get(r, k);
                for p in 0..k {
                    s -= l[r * n + p] * l[k * n + p];
                }
                l[r * n + k] = s / d;
            }
        }
        Ok(l)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.cholesky().is_ok()
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> f64 {
        det_square(self.entries.clone(), self.dim)
    }

    /// `(-1)^(k+l)` times the determinant of the matrix with row `k` and column `l` removed.
    pub fn cofactor(&self, k: usize, l: usize) -> Result<f64> {
        self.check_index(k, l)?;
        let n = self.dim;
        let mut minor = Vec::with_capacity((n - 1) * (n - 1));
        for r in (0..n).filter(|&r| r != k) {
            for c in (0..n).filter(|&c| c != l) {
                minor.push(self.get(r, c));
            }
        }
        let sign = if (k + l).is_multiple_of(2) { 1.0 } else { -1.0 };
        Ok(sign * det_square(minor, n - 1))
    }

    /// Cofactor of the 2x2 block on rows and columns `{i, j}`: the determinant
    /// with both rows and both columns removed.
    pub fn pair_cofactor(&self, i: usize, j: usize) -> Result<f64> {
        self.check_edge(i, j)?;
        let keep: Vec<usize> = (0..self.dim).filter(|&r| r != i && r != j).collect();
        let m = keep.len();
        let mut minor = Vec::with_capacity(m * m);
        for &r in &keep {
            for &c in &keep {
                minor.push(self.get(r, c));
            }
        }
        Ok(det_square(minor, m))
    }

    /// `-C_ij / sqrt(C_ii C_jj)` from cofactors, clamped to `[-1, 1]`.
    ///
    /// No positive-definiteness check; this is also evaluated on the singular
    /// boundary of the positive-definite interval.
    pub fn cofactor_partial_correlation(&self, i: usize, j: usize) -> Result<f64> {
        self.check_edge(i, j)?;
        let (i, j) = (i.min(j), i.max(j));
        let cij = self.cofactor(i, j)?;
        let norm = self.cofactor(i, i)? * self.cofactor(j, j)?;
        if !(norm > 0.0) {
            return Err(Error::DegenerateEdge { i, j });
        }
        Ok((-cij / norm.sqrt()).clamp(-1.0, 1.0))
    }

    /// Range of `x` over which the quadratic decomposition is checked: `1 + max|m_kl|`.
    pub fn probe_scale(&self) -> f64 {
        1.0 + self.max_abs_entry()
    }

    /// Interpolation abscissa for the pair: `sqrt(m_ii m_jj)`, which bounds the
    /// positive-definite interval, else `probe_scale()`.
    ///
    /// Tracking the pair's own scale keeps `b` free of cancellation when the
    /// variables have very different variances.
    fn pair_probe_scale(&self, i: usize, j: usize) -> f64 {
        let h = (self.get(i, i) * self.get(j, j)).sqrt();
        if h.is_finite() && h > 0.0 {
            h
        } else {
            self.probe_scale()
        }
    }

    /// Coefficients of `det M(x) = -a x^2 + b x + c` for the pair `(i, j)`.
    ///
    /// Interpolates the determinant at `x in {0, h, -h}` with `h = sqrt(m_ii m_jj)`.
    pub fn quadratic_decomposition(&self, i: usize, j: usize) -> Result<QuadCoeffs> {
        self.check_edge(i, j)?;
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        let h = self.pair_probe_scale(i, j);
        let d0 = self.with_pair(i, j, 0.0).determinant();
        let dp = self.with_pair(i, j, h).determinant();
        let dm = self.with_pair(i, j, -h).determinant();
        let a = (2.0 * d0 - dp - dm) / (2.0 * h * h);
        let b = (dp - dm) / (2.0 * h);
        Ok(QuadCoeffs { a, b, c: d0, i, j })
    }
}

/// Determinant of a row-major square buffer (consumed as scratch space).
fn det_square(mut a: Vec<f64>, n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].abs();
        for r in col + 1..n {
            let v = a[r * n + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            if f != 0.0 {
                for c in col + 1..n {
                    a[r * n + c] -= f * a[col * n + c];
                }
            }
        }
    }
    det
}

/// `det M(x) = -a x^2 + b x + c` for the pair `(i, j)`, `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub i: usize,
    pub j: usize,
}

impl QuadCoeffs {
    pub fn eval(&self, x: f64) -> f64 {
        (-self.a * x + self.b) * x + self.c
    }

    /// `b^2 + 4ac`.
    pub fn discriminant(&self) -> f64 {
        self.b * self.b + 4.0 * self.a * self.c
    }

    /// Cofactor of the `(i, j)` entry as a function of `x`.
    pub fn cofactor_at(&self, x: f64) -> f64 {
        -self.a * x + 0.5 * self.b
    }

    /// `b^2/4 + ac`, which equals `C_ii * C_jj`.
    pub fn cofactor_norm_sq(&self) -> f64 {
        0.25 * self.b * self.b + self.a * self.c
    }

    /// `(a x - b/2) / sqrt(b^2/4 + ac)`; the partial correlation of `M(x)`.
    pub fn standardized(&self, x: f64) -> f64 {
        (self.a * x - 0.5 * self.b) / self.cofactor_norm_sq().sqrt()
    }

    /// Roots `x1 < x2` of the determinant.
    pub fn pd_interval(&self) -> Result<PdInterval> {
        let disc = self.discriminant();
        if !(self.a > 0.0) || !(disc > 0.0) {
            return Err(Error::DegenerateEdge { i: self.i, j: self.j });
        }
        let root = disc.sqrt();
        Ok(PdInterval {
            x1: (self.b - root) / (2.0 * self.a),
            x2: (self.b + root) / (2.0 * self.a),
        })
    }
}

/// The open interval of values of the free pair on which the matrix is positive definite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PdInterval {
    pub x1: f64,
    pub x2: f64,
}

impl PdInterval {
    pub fn width(&self) -> f64 {
        self.x2 - self.x1
    }

    pub fn contains(&self, x: f64) -> bool {
        self.x1 < x && x < self.x2
    }
}

/// Probe points for the identity residuals.
fn probes(m: &SymmetricMatrix) -> [f64; 5] {
    let h = m.probe_scale();
    [-h, -0.5 * h, 0.0, 0.5 * h, h]
}

/// Max over five probes of `|cof_ij(M(x)) - (-a x + b/2)|`.
///
/// Compare against `1e-9 * max(1, |a|, |b|)`.
pub fn lemma_residual(m: &SymmetricMatrix, i: usize, j: usize) -> Result<f64> {
    let q = m.quadratic_decomposition(i, j)?;
    let mut worst = 0.0_f64;
    for x in probes(m) {
        let direct = m.with_pair(i, j, x).cofactor(i, j)?;
        worst = worst.max((direct - q.cofactor_at(x)).abs());
    }
    Ok(worst)
}

/// `|C_pair det M - (C_ii C_jj - C_ij^2)|`, an absolute residual.
pub fn sylvester_residual(m: &SymmetricMatrix, i: usize, j: usize) -> Result<f64> {
    let terms = SylvesterTerms::of(m, i, j)?;
    Ok(terms.residual())
}

/// The two sides of the Sylvester identity for one pair.
#[derive(Debug, Clone, Copy)]
pub struct SylvesterTerms {
    pub pair_times_det: f64,
    pub diag_product: f64,
    pub off_sq: f64,
}

impl SylvesterTerms {
    pub fn of(m: &SymmetricMatrix, i: usize, j: usize) -> Result<Self> {
        let pair = m.pair_cofactor(i, j)?;
        let cij = m.cofactor(i, j)?;
        Ok(Self {
            pair_times_det: pair * m.determinant(),
            diag_product: m.cofactor(i, i)? * m.cofactor(j, j)?,
            off_sq: cij * cij,
        })
    }

    pub fn residual(&self) -> f64 {
        (self.pair_times_det - (self.diag_product - self.off_sq)).abs()
    }

    pub fn scale(&self) -> f64 {
        1.0_f64
            .max(self.pair_times_det.abs())
            .max(self.diag_product.abs())
            .max(self.off_sq)
    }
}
