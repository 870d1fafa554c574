//! Factor catalog, expert survey matrices and their aggregation into a
//! direct influence matrix.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::SquareMatrix;

/// Scale assumed for survey files that do not declare one.
pub const DEFAULT_SCALE_MAX: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    /// Short identifier such as `x_22`.
    pub code: String,
    pub name: String,
    /// Category label, e.g. "Organisational Structure".
    pub group: String,
    #[serde(default)]
    pub description: String,
}

impl Factor {
    pub fn new(code: impl Into<String>, name: impl Into<String>, group: impl Into<String>) -> Self {
        Factor {
            code: code.into(),
            name: name.into(),
            group: group.into(),
            description: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CatalogViolation {
    TooFewFactors { found: usize },
    EmptyCode { position: usize },
    DuplicateCode { code: String, first: usize, second: usize },
    EmptyGroup { code: String },
}

impl fmt::Display for CatalogViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogViolation::TooFewFactors { found } => {
                write!(f, "catalog needs at least 2 factors, found {found}")
            }
            CatalogViolation::EmptyCode { position } => {
                write!(f, "factor at position {} has an empty code", position + 1)
            }
            CatalogViolation::DuplicateCode { code, first, second } => write!(
                f,
                "duplicate factor code {code} at positions {} and {}",
                first + 1,
                second + 1
            ),
            CatalogViolation::EmptyGroup { code } => write!(f, "factor {code} has an empty group"),
        }
    }
}

/// Every violated catalog invariant, in the order found. Empty when valid.
pub fn validate_catalog(factors: &[Factor]) -> Vec<CatalogViolation> {
    let mut violations = Vec::new();
    if factors.len() < 2 {
        violations.push(CatalogViolation::TooFewFactors {
            found: factors.len(),
        });
    }
    let mut seen: Vec<(&str, usize)> = Vec::new();
    for (pos, factor) in factors.iter().enumerate() {
        let code = factor.code.trim();
        if code.is_empty() {
            violations.push(CatalogViolation::EmptyCode { position: pos });
        } else if let Some(&(_, first)) = seen.iter().find(|(c, _)| *c == code) {
            violations.push(CatalogViolation::DuplicateCode {
                code: code.to_string(),
                first,
                second: pos,
            });
        } else {
            seen.push((code, pos));
        }
        if factor.group.trim().is_empty() {
            violations.push(CatalogViolation::EmptyGroup {
                code: factor.code.clone(),
            });
        }
    }
    violations
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("invalid factor catalog: {}", join_violations(.0))]
    InvalidCatalog(Vec<CatalogViolation>),
    #[error("no surveys")]
    NoSurveys,
    #[error("survey {respondent}: expected {expected}x{expected} matrix, found {found}x{found}")]
    DimensionMismatch {
        respondent: String,
        expected: usize,
        found: usize,
    },
    #[error("survey {respondent}: scale_max {found} differs from {expected}")]
    ScaleMismatch {
        respondent: String,
        expected: f64,
        found: f64,
    },
    #[error("survey {respondent}: scale_max must be positive and finite, got {scale_max}")]
    InvalidScale { respondent: String, scale_max: f64 },
    #[error("survey {respondent}: nonzero diagonal at row {index}")]
    NonzeroDiagonal { respondent: String, index: usize },
    #[error("survey {respondent}: score {value} at ({row}, {col}) outside [0, {scale_max}]")]
    OutOfScale {
        respondent: String,
        row: usize,
        col: usize,
        value: f64,
        scale_max: f64,
    },
    #[error("direct influence matrix: {0}")]
    InvalidDirectInfluence(String),
}

fn join_violations(v: &[CatalogViolation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Ordered set of factors. The order fixes the row/column order of every
/// matrix derived from this catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorCatalog {
    factors: Vec<Factor>,
}

impl FactorCatalog {
    pub fn new(factors: Vec<Factor>) -> Result<Self, ModelError> {
        let violations = validate_catalog(&factors);
        if !violations.is_empty() {
            return Err(ModelError::InvalidCatalog(violations));
        }
        Ok(FactorCatalog { factors })
    }

    /// Catalog of bare codes, with every factor in one group.
    pub fn from_codes<S: AsRef<str>>(codes: &[S]) -> Result<Self, ModelError> {
        Self::new(
            codes
                .iter()
                .map(|c| Factor::new(c.as_ref(), c.as_ref(), "default"))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn get(&self, index: usize) -> Option<&Factor> {
        self.factors.get(index)
    }

    pub fn code(&self, index: usize) -> &str {
        &self.factors[index].code
    }

    pub fn codes(&self) -> impl Iterator<Item = &str> {
        self.factors.iter().map(|f| f.code.as_str())
    }

    pub fn index_of(&self, code: &str) -> Option<usize> {
        self.factors.iter().position(|f| f.code == code)
    }

    /// Distinct groups in order of first appearance.
    pub fn groups(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.factors
            .iter()
            .map(|f| f.group.as_str())
            .filter(|g| seen.insert(*g))
            .collect()
    }

    /// Catalog with factor `i` of the result being factor `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        FactorCatalog {
            factors: perm.iter().map(|&p| self.factors[p].clone()).collect(),
        }
    }
}

/// One respondent's scores. Entry `(i, j)` is the influence of factor `i`
/// on factor `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurveyMatrix {
    respondent: String,
    scores: SquareMatrix,
    scale_max: f64,
}

impl SurveyMatrix {
    pub fn new(
        respondent: impl Into<String>,
        scores: SquareMatrix,
        scale_max: f64,
    ) -> Result<Self, ModelError> {
        let respondent = respondent.into();
        if !(scale_max.is_finite() && scale_max > 0.0) {
            return Err(ModelError::InvalidScale {
                respondent,
                scale_max,
            });
        }
        let n = scores.dim();
        for i in 0..n {
            for j in 0..n {
                let value = scores[(i, j)];
                if i == j && value != 0.0 {
                    return Err(ModelError::NonzeroDiagonal {
                        respondent,
                        index: i,
                    });
                }
                if !(0.0..=scale_max).contains(&value) {
                    return Err(ModelError::OutOfScale {
                        respondent,
                        row: i,
                        col: j,
                        value,
                        scale_max,
                    });
                }
            }
        }
        Ok(SurveyMatrix {
            respondent,
            scores,
            scale_max,
        })
    }

    pub fn respondent(&self) -> &str {
        &self.respondent
    }

    pub fn scores(&self) -> &SquareMatrix {
        &self.scores
    }

    pub fn scale_max(&self) -> f64 {
        self.scale_max
    }

    pub fn dim(&self) -> usize {
        self.scores.dim()
    }
}

/// Aggregated direct influence matrix: square, zero diagonal, non-negative.
///
/// An all-zero matrix is representable; normalization rejects it.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectInfluenceMatrix {
    entries: SquareMatrix,
}

impl DirectInfluenceMatrix {
    pub fn new(entries: SquareMatrix) -> Result<Self, ModelError> {
        let n = entries.dim();
        for i in 0..n {
            for j in 0..n {
                let v = entries[(i, j)];
                if !v.is_finite() || v < 0.0 {
                    return Err(ModelError::InvalidDirectInfluence(format!(
                        "entry ({i}, {j}) = {v} is not a non-negative number"
                    )));
                }
                if i == j && v != 0.0 {
                    return Err(ModelError::InvalidDirectInfluence(format!(
                        "diagonal entry {i} is {v}"
                    )));
                }
            }
        }
        Ok(DirectInfluenceMatrix { entries })
    }

    pub fn entries(&self) -> &SquareMatrix {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }
}

/// Entrywise arithmetic mean of the survey matrices.
pub fn aggregate_surveys(surveys: &[SurveyMatrix]) -> Result<DirectInfluenceMatrix, ModelError> {
    let first = surveys.first().ok_or(ModelError::NoSurveys)?;
    let n = first.dim();
    for s in &surveys[1..] {
        if s.dim() != n {
            return Err(ModelError::DimensionMismatch {
                respondent: s.respondent.clone(),
                expected: n,
                found: s.dim(),
            });
        }
        if s.scale_max != first.scale_max {
            return Err(ModelError::ScaleMismatch {
                respondent: s.respondent.clone(),
                expected: first.scale_max,
                found: s.scale_max,
            });
        }
    }
    let mut sum = SquareMatrix::zeros(n);
    for s in surveys {
        sum = sum.add(&s.scores);
    }
    DirectInfluenceMatrix::new(sum.scale(1.0 / surveys.len() as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> SquareMatrix {
        SquareMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn duplicate_code_reported_once() {
        let factors = vec![Factor::new("x_1", "a", "g"), Factor::new("x_1", "b", "g")];
        let report = validate_catalog(&factors);
        assert_eq!(report.len(), 1);
        assert!(matches!(report[0], CatalogViolation::DuplicateCode { .. }));
    }

    #[test]
    fn single_factor_is_too_small() {
        let report = validate_catalog(&[Factor::new("x_1", "a", "g")]);
        assert_eq!(report, vec![CatalogViolation::TooFewFactors { found: 1 }]);
    }

    #[test]
    fn empty_code_and_group() {
        let factors = vec![Factor::new("", "a", "g"), Factor::new("x_2", "b", " ")];
        let report = validate_catalog(&factors);
        assert_eq!(
            report,
            vec![
                CatalogViolation::EmptyCode { position: 0 },
                CatalogViolation::EmptyGroup { code: "x_2".into() }
            ]
        );
        assert!(FactorCatalog::new(factors).is_err());
    }

    #[test]
    fn single_survey_passes_through() {
        let s = SurveyMatrix::new("e1", m(&[&[0.0, 3.0], &[1.5, 0.0]]), 4.0).unwrap();
        let a = aggregate_surveys(std::slice::from_ref(&s)).unwrap();
        assert_eq!(a.entries(), s.scores());
    }

    #[test]
    fn two_surveys_average() {
        let s1 = SurveyMatrix::new("e1", m(&[&[0.0, 2.0], &[4.0, 0.0]]), 4.0).unwrap();
        let s2 = SurveyMatrix::new("e2", m(&[&[0.0, 4.0], &[0.0, 0.0]]), 4.0).unwrap();
        let a = aggregate_surveys(&[s1, s2]).unwrap();
        assert_eq!(a.entries(), &m(&[&[0.0, 3.0], &[2.0, 0.0]]));
    }

    #[test]
    fn aggregation_errors() {
        assert_eq!(aggregate_surveys(&[]), Err(ModelError::NoSurveys));
        let s1 = SurveyMatrix::new("e1", SquareMatrix::zeros(2), 4.0).unwrap();
        let s2 = SurveyMatrix::new("e2", SquareMatrix::zeros(3), 4.0).unwrap();
        let err = aggregate_surveys(&[s1.clone(), s2]).unwrap_err();
        assert!(err.to_string().contains("e2"), "{err}");
        let s3 = SurveyMatrix::new("e3", SquareMatrix::zeros(2), 5.0).unwrap();
        assert!(matches!(
            aggregate_surveys(&[s1, s3]),
            Err(ModelError::ScaleMismatch { .. })
        ));
    }

    #[test]
    fn survey_invariants() {
        let diag = SurveyMatrix::new("e", m(&[&[1.0, 0.0], &[0.0, 0.0]]), 4.0);
        assert!(matches!(diag, Err(ModelError::NonzeroDiagonal { index: 0, .. })));
        let big = SurveyMatrix::new("e", m(&[&[0.0, 5.0], &[0.0, 0.0]]), 4.0);
        assert!(matches!(big, Err(ModelError::OutOfScale { row: 0, col: 1, .. })));
        let neg = SurveyMatrix::new("e", m(&[&[0.0, -1.0], &[0.0, 0.0]]), 4.0);
        assert!(neg.is_err());
        let nan = SurveyMatrix::new("e", m(&[&[0.0, f64::NAN], &[0.0, 0.0]]), 4.0);
        assert!(nan.is_err());
        assert!(SurveyMatrix::new("e", SquareMatrix::zeros(2), 0.0).is_err());
        // non-integer scores are fine
        assert!(SurveyMatrix::new("e", m(&[&[0.0, 2.5], &[0.25, 0.0]]), 4.0).is_ok());
    }
}
