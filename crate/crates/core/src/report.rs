//! The shared inequality report emitted by every checker.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// One inequality inside a report. `margin` is its signed slack:
/// `rhs - lhs` for `lhs <= rhs` terms and `lhs - rhs` for `lhs >= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

impl Term {
    pub fn new(label: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            label: label.into(),
            lhs,
            rhs,
            margin: rhs - lhs,
        }
    }

    /// `lhs >= rhs`, with margin `lhs - rhs`.
    pub fn at_least(label: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            label: label.into(),
            lhs,
            rhs,
            margin: lhs - rhs,
        }
    }
}

/// Verdict, signed slack and witness for one or more inequalities.
///
/// `margin` is the smallest slack over all terms and `lhs`/`rhs` are the
/// sides of the term attaining it. `verdict` holds exactly when
/// `margin >= -tol`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub verdict: bool,
    pub margin: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub tol: f64,
    #[serde(default)]
    pub witness: BTreeMap<String, f64>,
    #[serde(default)]
    pub cases: Vec<String>,
    #[serde(default)]
    pub terms: Vec<Term>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl InequalityReport {
    /// Builds a report from its terms. An empty term list yields a vacuous
    /// pass with zero margin.
    pub fn from_terms(terms: Vec<Term>, tol: f64) -> Self {
        let binding = terms
            .iter()
            .min_by(|a, b| a.margin.total_cmp(&b.margin))
            .cloned();
        let (margin, lhs, rhs) = match binding {
            Some(t) => (t.margin, t.lhs, t.rhs),
            None => (0.0, 0.0, 0.0),
        };
        Self {
            verdict: margin >= -tol,
            margin,
            lhs,
            rhs,
            tol,
            witness: BTreeMap::new(),
            cases: Vec::new(),
            terms,
            warnings: Vec::new(),
        }
    }

    /// Default tolerance `1e-9 * (1 + max |side|)` over the given terms.
    pub fn default_tol(terms: &[Term]) -> f64 {
        let scale = terms
            .iter()
            .flat_map(|t| [t.lhs.abs(), t.rhs.abs()])
            .fold(0.0_f64, f64::max);
        1e-9 * (1.0 + scale)
    }

    pub fn with_default_tol(terms: Vec<Term>) -> Self {
        let tol = Self::default_tol(&terms);
        Self::from_terms(terms, tol)
    }

    pub fn witness(mut self, key: &str, value: f64) -> Self {
        self.witness.insert(key.to_string(), value);
        self
    }

    pub fn case(mut self, label: impl Into<String>) -> Self {
        self.cases.push(label.into());
        self
    }

    pub fn warn_all(mut self, warnings: Vec<String>) -> Self {
        self.warnings.extend(warnings);
        self
    }

    pub fn term(&self, label: &str) -> Option<&Term> {
        self.terms.iter().find(|t| t.label == label)
    }

    /// Merges several reports into one; the merged margin is the minimum.
    pub fn combine(reports: Vec<InequalityReport>) -> Self {
        let tol = reports.iter().map(|r| r.tol).fold(0.0_f64, f64::max);
        let mut terms = Vec::new();
        let mut witness = BTreeMap::new();
        let mut cases = Vec::new();
        let mut warnings = Vec::new();
        for r in reports {
            terms.extend(r.terms);
            witness.extend(r.witness);
            cases.extend(r.cases);
            for w in r.warnings {
                if !warnings.contains(&w) {
                    warnings.push(w);
                }
            }
        }
        let mut out = Self::from_terms(terms, tol);
        out.witness = witness;
        out.cases = cases;
        out.warnings = warnings;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margin_is_minimum_slack() {
        let r = InequalityReport::from_terms(
            alloc::vec![Term::new("a", 1.0, 3.0), Term::new("b", 2.0, 2.5)],
            1e-9,
        );
        assert!(r.verdict);
        assert_eq!(r.margin, 0.5);
        assert_eq!((r.lhs, r.rhs), (2.0, 2.5));
    }

    #[test]
    fn verdict_tracks_tolerance() {
        let r = InequalityReport::from_terms(alloc::vec![Term::new("a", 1.0 + 1e-12, 1.0)], 1e-9);
        assert!(r.verdict);
        let r = InequalityReport::from_terms(alloc::vec![Term::new("a", 1.1, 1.0)], 1e-9);
        assert!(!r.verdict);
    }
}
