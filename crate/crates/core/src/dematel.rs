//! DEMATEL: normalization, total influence and per-factor scores.
//!
//! Rows carry influence *from* a factor, columns influence *on* it. The
//! total influence matrix sums every direct and indirect influence chain,
//! `T = G + G^2 + ... = G (I - G)^-1`, and is computed by exact dense
//! inversion rather than by truncating the series.

use serde::Serialize;
use thiserror::Error;

use crate::matrix::SquareMatrix;
use crate::model::DirectInfluenceMatrix;

/// Default pivot and residual tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DematelError {
    #[error("zero normalizer: every row of the direct influence matrix sums to 0")]
    ZeroNormalizer,
    #[error("invalid normalized matrix: {0}")]
    InvalidNormalized(String),
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("singular (I - G): pivot {magnitude:e} in column {column} is below tolerance")]
    Singular { column: usize, magnitude: f64 },
    #[error("non-convergent total influence: {0}")]
    NonConvergent(String),
    #[error("total influence matrix has non-finite entries")]
    NonFinite,
}

/// `G = A / max_i sum_j a_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedMatrix {
    entries: SquareMatrix,
    normalizer: f64,
}

impl NormalizedMatrix {
    /// Wraps an already-normalized matrix, recording a normalizer of 1.
    pub fn from_entries(entries: SquareMatrix) -> Result<Self, DematelError> {
        let n = entries.dim();
        for i in 0..n {
            for j in 0..n {
                let v = entries[(i, j)];
                if !(0.0..=1.0).contains(&v) {
                    return Err(DematelError::InvalidNormalized(format!(
                        "entry ({i}, {j}) = {v} outside [0, 1]"
                    )));
                }
                if i == j && v != 0.0 {
                    return Err(DematelError::InvalidNormalized(format!(
                        "diagonal entry {i} is {v}"
                    )));
                }
            }
        }
        Ok(NormalizedMatrix {
            entries,
            normalizer: 1.0,
        })
    }

    pub fn entries(&self) -> &SquareMatrix {
        &self.entries
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }
}

/// Divides every entry by the largest row sum.
pub fn normalize(a: &DirectInfluenceMatrix) -> Result<NormalizedMatrix, DematelError> {
    let normalizer = a.entries().max_row_sum();
    if !(normalizer > 0.0) {
        return Err(DematelError::ZeroNormalizer);
    }
    Ok(NormalizedMatrix {
        entries: a.entries().map(|v| v / normalizer),
        normalizer,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TotalInfluenceMatrix {
    entries: SquareMatrix,
    /// `max |G + G T - T|` for the computed `T`.
    residual: f64,
    /// Largest row sum of `G`; the series converges whenever it is below 1.
    norm_bound: f64,
}

impl TotalInfluenceMatrix {
    /// Wraps a precomputed matrix. No convergence metadata is available, so
    /// the residual is recorded as 0 and the bound as NaN.
    pub fn from_entries(entries: SquareMatrix) -> Result<Self, DematelError> {
        if !entries.is_finite() {
            return Err(DematelError::NonFinite);
        }
        Ok(TotalInfluenceMatrix {
            entries,
            residual: 0.0,
            norm_bound: f64::NAN,
        })
    }

    pub fn entries(&self) -> &SquareMatrix {
        &self.entries
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }
}

/// `T = G (I - G)^-1` by Gauss-Jordan inversion with partial pivoting.
///
/// `T = G + G T` holds algebraically for any invertible `I - G`, so the
/// residual alone cannot reveal a divergent series. For non-negative `G`
/// the series converges exactly when `T` comes out non-negative, which is
/// checked as well.
pub fn total_influence(
    g: &NormalizedMatrix,
    tol: f64,
) -> Result<TotalInfluenceMatrix, DematelError> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(DematelError::InvalidTolerance(tol));
    }
    let n = g.dim();
    let gm = g.entries();
    let i_minus_g = SquareMatrix::identity(n).sub(gm);
    let inv = i_minus_g.inverse(tol).map_err(|p| DematelError::Singular {
        column: p.column,
        magnitude: p.magnitude,
    })?;
    let t = gm.mul(&inv);
    if !t.is_finite() {
        return Err(DematelError::NonFinite);
    }
    let residual = gm.add(&gm.mul(&t)).max_abs_diff(&t);
    if residual > 10.0 * tol {
        return Err(DematelError::NonConvergent(format!(
            "residual {residual:e} exceeds {:e}",
            10.0 * tol
        )));
    }
    let most_negative = t.iter().copied().fold(0.0, f64::min);
    if most_negative < -tol {
        return Err(DematelError::NonConvergent(format!(
            "series diverges (spectral radius of G >= 1); entry {most_negative:e} is negative"
        )));
    }
    Ok(TotalInfluenceMatrix {
        // clear round-off below zero so downstream sums stay non-negative
        entries: t.map(|v| v.max(0.0)),
        residual,
        norm_bound: gm.max_row_sum(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CausalRole {
    Cause,
    Effect,
    Neutral,
}

impl CausalRole {
    pub fn as_str(self) -> &'static str {
        match self {
            CausalRole::Cause => "cause",
            CausalRole::Effect => "effect",
            CausalRole::Neutral => "neutral",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FactorScore {
    /// Row sum of `T`.
    pub influence: f64,
    /// Column sum of `T`.
    pub influenced: f64,
    pub centrality: f64,
    pub causality: f64,
}

impl FactorScore {
    pub fn from_parts(influence: f64, influenced: f64) -> Self {
        FactorScore {
            influence,
            influenced,
            centrality: influence + influenced,
            causality: influence - influenced,
        }
    }

    pub fn role(&self) -> CausalRole {
        if self.causality > 0.0 {
            CausalRole::Cause
        } else if self.causality < 0.0 {
            CausalRole::Effect
        } else {
            CausalRole::Neutral
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DematelScores {
    scores: Vec<FactorScore>,
}

impl DematelScores {
    pub fn scores(&self) -> &[FactorScore] {
        &self.scores
    }

    pub fn get(&self, index: usize) -> FactorScore {
        self.scores[index]
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn total_influence(&self) -> f64 {
        self.scores.iter().map(|s| s.influence).sum()
    }

    pub fn total_influenced(&self) -> f64 {
        self.scores.iter().map(|s| s.influenced).sum()
    }

    /// Factor indices by decreasing centrality; ties keep catalog order.
    pub fn rank_by_centrality(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.scores.len()).collect();
        idx.sort_by(|&a, &b| {
            self.scores[b]
                .centrality
                .total_cmp(&self.scores[a].centrality)
        });
        idx
    }
}

pub fn dematel_scores(t: &TotalInfluenceMatrix) -> Result<DematelScores, DematelError> {
    let m = t.entries();
    if !m.is_finite() {
        return Err(DematelError::NonFinite);
    }
    let scores = (0..m.dim())
        .map(|i| FactorScore::from_parts(m.row_sum(i), m.col_sum(i)))
        .collect();
    Ok(DematelScores { scores })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq(rows: &[&[f64]]) -> SquareMatrix {
        SquareMatrix::from_rows(rows).unwrap()
    }

    fn g(rows: &[&[f64]]) -> NormalizedMatrix {
        NormalizedMatrix::from_entries(sq(rows)).unwrap()
    }

    #[test]
    fn normalize_by_max_row_sum() {
        let a = DirectInfluenceMatrix::new(sq(&[&[0.0, 1.0], &[2.0, 0.0]])).unwrap();
        let n = normalize(&a).unwrap();
        assert_eq!(n.normalizer(), 2.0);
        assert_eq!(n.entries(), &sq(&[&[0.0, 0.5], &[1.0, 0.0]]));
    }

    #[test]
    fn normalize_three_by_three() {
        // row sums 3, 4, 4; each cell divided by 4 by hand
        let a = DirectInfluenceMatrix::new(sq(&[
            &[0.0, 2.0, 1.0],
            &[1.0, 0.0, 3.0],
            &[2.0, 2.0, 0.0],
        ]))
        .unwrap();
        let n = normalize(&a).unwrap();
        assert_eq!(n.normalizer(), 4.0);
        assert_eq!(
            n.entries(),
            &sq(&[&[0.0, 0.5, 0.25], &[0.25, 0.0, 0.75], &[0.5, 0.5, 0.0]])
        );
    }

    #[test]
    fn zero_matrix_has_no_normalizer() {
        let a = DirectInfluenceMatrix::new(SquareMatrix::zeros(2)).unwrap();
        let err = normalize(&a).unwrap_err();
        assert_eq!(err, DematelError::ZeroNormalizer);
        assert!(err.to_string().contains("zero normalizer"));
    }

    #[test]
    fn total_influence_of_zero_is_zero() {
        let t = total_influence(&g(&[&[0.0, 0.0], &[0.0, 0.0]]), DEFAULT_TOL).unwrap();
        assert_eq!(t.entries(), &SquareMatrix::zeros(2));
    }

    #[test]
    fn nilpotent_series_terminates() {
        let t = total_influence(&g(&[&[0.0, 0.5], &[0.0, 0.0]]), DEFAULT_TOL).unwrap();
        assert!(t.entries().max_abs_diff(&sq(&[&[0.0, 0.5], &[0.0, 0.0]])) < 1e-15);
    }

    #[test]
    fn symmetric_pair_matches_closed_form() {
        // (I - G)^-1 = (1/0.75) [[1, 0.5], [0.5, 1]]; times G gives [[1/3, 2/3], [2/3, 1/3]]
        let t = total_influence(&g(&[&[0.0, 0.5], &[0.5, 0.0]]), DEFAULT_TOL).unwrap();
        let expected = sq(&[&[1.0 / 3.0, 2.0 / 3.0], &[2.0 / 3.0, 1.0 / 3.0]]);
        assert!(t.entries().max_abs_diff(&expected) < 1e-15);
        assert!(t.residual() < 1e-15);
        assert_eq!(t.norm_bound(), 0.5);
    }

    #[test]
    fn unit_spectral_radius_is_singular() {
        let err = total_influence(&g(&[&[0.0, 1.0], &[1.0, 0.0]]), DEFAULT_TOL).unwrap_err();
        assert!(matches!(err, DematelError::Singular { .. }));
        assert!(err.to_string().contains("singular (I - G)"));
    }

    #[test]
    fn divergent_series_is_rejected() {
        // spectral radius 1.8
        let err = total_influence(
            &g(&[&[0.0, 0.9, 0.9], &[0.9, 0.0, 0.9], &[0.9, 0.9, 0.0]]),
            DEFAULT_TOL,
        )
        .unwrap_err();
        assert!(matches!(err, DematelError::NonConvergent(_)), "{err}");
    }

    #[test]
    fn bad_tolerance() {
        let gm = g(&[&[0.0, 0.5], &[0.0, 0.0]]);
        assert!(total_influence(&gm, 0.0).is_err());
        assert!(total_influence(&gm, f64::NAN).is_err());
    }

    #[test]
    fn scores_of_symmetric_total() {
        let t = TotalInfluenceMatrix::from_entries(sq(&[
            &[1.0 / 3.0, 2.0 / 3.0],
            &[2.0 / 3.0, 1.0 / 3.0],
        ]))
        .unwrap();
        let s = dematel_scores(&t).unwrap();
        for f in s.scores() {
            assert!((f.influence - 1.0).abs() < 1e-15);
            assert!((f.influenced - 1.0).abs() < 1e-15);
            assert!((f.centrality - 2.0).abs() < 1e-15);
            assert!(f.causality.abs() < 1e-15);
        }
    }

    #[test]
    fn score_identities_for_reported_row() {
        let s = FactorScore::from_parts(0.703, 1.125);
        assert!((s.centrality - 1.828).abs() < 1e-12);
        assert!((s.causality + 0.422).abs() < 1e-12);
        assert_eq!(s.role(), CausalRole::Effect);
    }

    #[test]
    fn zero_total_gives_zero_scores() {
        let t = TotalInfluenceMatrix::from_entries(SquareMatrix::zeros(3)).unwrap();
        let s = dematel_scores(&t).unwrap();
        assert!(s.scores().iter().all(|f| *f == FactorScore::from_parts(0.0, 0.0)));
        assert!(s.scores().iter().all(|f| f.role() == CausalRole::Neutral));
    }

    #[test]
    fn non_finite_total_rejected() {
        assert!(TotalInfluenceMatrix::from_entries(sq(&[&[0.0, f64::INFINITY], &[0.0, 0.0]])).is_err());
    }
}
