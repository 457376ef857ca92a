//! Gaussian concentration graph selection by exact pairwise tests of
//! conditional independence.
//!
//! An edge `(i, j)` belongs to the concentration graph when `X_i` and `X_j` are
//! dependent given all other variables, i.e. when the partial correlation
//! `rho_ij` is nonzero. Each pair is tested with one of three tests (see
//! [`ci_tests`]); the conditional UMPU test and the exact partial-correlation
//! test coincide, and [`ci_tests::verify_equivalence`] checks this numerically.

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod distributions;
pub mod error;
pub mod estimators;
pub mod graph;
pub mod matrix;
pub mod simulate;

pub use ci_tests::{
    fisher_test, partial_correlation_test, umpu_test, verify_equivalence, EdgeDecision, EquivalenceReport, Method,
    TestConfig,
};
pub use error::{Error, Result};
pub use estimators::{sample_covariance, sample_partial_correlation, Dataset};
pub use graph::{edge_pvalues, select_graph, ConcentrationGraph, Correction};
pub use matrix::{PdInterval, QuadCoeffs, SymmetricMatrix};
pub use simulate::{estimate_power, estimate_size, sample_gaussian, MonteCarloReport, PrecisionSpec};
