//! Concentration graph selection: one test per pair of variables.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::ci_tests::{run_test, EdgeDecision, Method, TestConfig};
use crate::distributions::NullCorrLaw;
use crate::error::{Error, Result};
use crate::estimators::{sample_covariance, Dataset};
use crate::matrix::SymmetricMatrix;

/// Multiplicity adjustment applied across the `N(N-1)/2` edge tests.
///
/// `None` tests each edge at `alpha`. The other two control the family-wise
/// error rate and sit outside any per-edge optimality argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Correction {
    #[default]
    None,
    Bonferroni,
    Holm,
}

impl Correction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Correction::None => "none",
            Correction::Bonferroni => "bonferroni",
            Correction::Holm => "holm",
        }
    }
}

impl fmt::Display for Correction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Correction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Correction::None),
            "bonferroni" => Ok(Correction::Bonferroni),
            "holm" => Ok(Correction::Holm),
            other => Err(Error::InvalidParameter(format!("unknown correction {other:?}"))),
        }
    }
}

/// Estimated concentration graph; `(i, j)` is an edge iff its decision rejects.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationGraph {
    pub n: usize,
    pub names: Vec<String>,
    pub alpha: f64,
    pub method: Method,
    pub correction: Correction,
    /// Rejected pairs, `i < j`, lexicographic.
    pub edges: Vec<(usize, usize)>,
    /// One decision per pair, lexicographic.
    pub decisions: Vec<EdgeDecision>,
}

impl ConcentrationGraph {
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let key = (i.min(j), i.max(j));
        self.edges.binary_search(&key).is_ok()
    }
}

/// All pairs `(i, j)` with `i < j` in lexicographic order.
pub fn edge_pairs(dim: usize) -> Vec<(usize, usize)> {
    (0..dim).flat_map(|i| (i + 1..dim).map(move |j| (i, j))).collect()
}

/// Covariance of the dataset, checked for sample size and positive definiteness.
fn checked_covariance(d: &Dataset) -> Result<SymmetricMatrix> {
    NullCorrLaw::new(d.n(), d.dim())?;
    let s = sample_covariance(d);
    s.cholesky()?;
    Ok(s)
}

pub fn select_graph(d: &Dataset, cfg: TestConfig, correction: Correction) -> Result<ConcentrationGraph> {
    let s = checked_covariance(d)?;
    let pairs = edge_pairs(d.dim());
    let (alpha, method, n) = (cfg.alpha(), cfg.method(), d.n());
    let m = pairs.len().max(1) as f64;

    let decisions = match correction {
        Correction::None => pairs
            .iter()
            .map(|&(i, j)| run_test(method, &s, i, j, n, alpha))
            .collect::<Result<Vec<_>>>()?,
        Correction::Bonferroni => pairs
            .iter()
            .map(|&(i, j)| run_test(method, &s, i, j, n, alpha / m))
            .collect::<Result<Vec<_>>>()?,
        Correction::Holm => holm_decisions(&s, &pairs, n, alpha, method)?,
    };

    let edges = decisions.iter().filter(|d| d.reject).map(|d| (d.i, d.j)).collect();
    Ok(ConcentrationGraph {
        n,
        names: d.names().to_vec(),
        alpha,
        method,
        correction,
        edges,
        decisions,
    })
}

/// Step-down Holm: the `k`-th smallest p-value (0-based) is tested at
/// `alpha / (M - k)` until the first acceptance; every later edge is tested at
/// the level where the procedure stopped.
fn holm_decisions(
    s: &SymmetricMatrix,
    pairs: &[(usize, usize)],
    n: usize,
    alpha: f64,
    method: Method,
) -> Result<Vec<EdgeDecision>> {
    let m = pairs.len();
    let first = pairs
        .iter()
        .map(|&(i, j)| run_test(method, s, i, j, n, alpha))
        .collect::<Result<Vec<_>>>()?;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| first[a].p_value.total_cmp(&first[b].p_value).then(a.cmp(&b)));

    let mut out = first.clone();
    let mut stopped_at: Option<f64> = None;
    for (rank, &idx) in order.iter().enumerate() {
        let level = stopped_at.unwrap_or(alpha / (m - rank) as f64);
        let (i, j) = pairs[idx];
        let d = run_test(method, s, i, j, n, level)?;
        if !d.reject && stopped_at.is_none() {
            stopped_at = Some(level);
        }
        out[idx] = d;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgePValue {
    pub i: usize,
    pub j: usize,
    pub p_value: f64,
}

/// p-values for every pair under the method's null law, lexicographic.
pub fn edge_pvalues(d: &Dataset, method: Method) -> Result<Vec<EdgePValue>> {
    let s = checked_covariance(d)?;
    edge_pairs(d.dim())
        .into_iter()
        .map(|(i, j)| {
            // the level only affects thresholds, not p-values
            let dec = run_test(method, &s, i, j, d.n(), 0.05)?;
            Ok(EdgePValue {
                i,
                j,
                p_value: dec.p_value,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Three variables where X1 and X2 share a strong common factor and X3 is noise.
    fn strong_pair(n: usize) -> Dataset {
        let mut vals = Vec::with_capacity(n * 3);
        for t in 0..n {
            let f = ((t * 7919) % 101) as f64 / 101.0 - 0.5;
            let e1 = ((t * 104729) % 37) as f64 / 370.0;
            let e2 = ((t * 1299709) % 41) as f64 / 410.0;
            let z = ((t * 15485863) % 53) as f64 / 53.0;
            vals.extend_from_slice(&[f + e1, f + e2, z]);
        }
        Dataset::with_default_names(3, vals).unwrap()
    }

    #[test]
    fn strong_pair_is_an_edge() {
        let d = strong_pair(30);
        let s = sample_covariance(&d);
        let r = s.cofactor_partial_correlation(0, 1).unwrap();
        assert!(r > 0.95, "{r}");
        let cfg = TestConfig::new(0.05, Method::Umpu).unwrap();
        let g = select_graph(&d, cfg, Correction::None).unwrap();
        assert!(g.has_edge(0, 1) && g.has_edge(1, 0));
        let p = edge_pvalues(&d, Method::PartialCorr).unwrap();
        assert_eq!((p[0].i, p[0].j), (0, 1));
        assert!(p[0].p_value <= 1e-6);
    }

    #[test]
    fn bonferroni_level() {
        let d = strong_pair(30);
        let cfg = TestConfig::new(0.05, Method::PartialCorr).unwrap();
        let g = select_graph(&d, cfg, Correction::Bonferroni).unwrap();
        assert!(g.decisions.iter().all(|d| (d.level - 0.05 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn holm_contains_bonferroni() {
        let d = strong_pair(40);
        for method in Method::ALL {
            let cfg = TestConfig::new(0.2, method).unwrap();
            let b = select_graph(&d, cfg, Correction::Bonferroni).unwrap();
            let h = select_graph(&d, cfg, Correction::Holm).unwrap();
            assert!(b.edges.iter().all(|e| h.edges.contains(e)));
            for dec in &h.decisions {
                assert_eq!(dec.reject, dec.statistic <= dec.lower || dec.statistic >= dec.upper);
            }
        }
    }

    #[test]
    fn insufficient_and_singular() {
        let d = Dataset::with_default_names(3, vec![1.0, 2.0, 0.5, 0.0, 1.0, 3.0, 2.0, 2.0, 1.0]).unwrap();
        let cfg = TestConfig::new(0.05, Method::Umpu).unwrap();
        assert_eq!(
            select_graph(&d, cfg, Correction::None),
            Err(Error::InsufficientSample { n: 3, dim: 3 })
        );
        // constant third column
        let d = Dataset::with_default_names(
            3,
            vec![
                1.0, 2.0, 5.0, 0.0, 1.0, 5.0, 2.0, 2.0, 5.0, 3.0, 0.5, 5.0, 1.5, 1.0, 5.0,
            ],
        )
        .unwrap();
        match select_graph(&d, cfg, Correction::None) {
            Err(Error::NotPositiveDefinite { pivot, .. }) => assert_eq!(pivot, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pairs_are_lexicographic() {
        assert_eq!(edge_pairs(4), vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
    }
}
