//! MICMAC driving/dependence analysis over a reachability matrix.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::ism::ReachabilityMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MicmacError {
    #[error("no factors to classify")]
    Empty,
    #[error("quadrant cuts must be positive and finite, got ({0}, {1})")]
    InvalidCuts(f64, f64),
    #[error("unknown threshold mode {0:?}; expected mean, midpoint or <driving>,<dependence>")]
    UnknownMode(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Powers {
    /// Row sum of the reachability matrix.
    pub driving: usize,
    /// Column sum of the reachability matrix.
    pub dependence: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MicmacScores {
    powers: Vec<Powers>,
}

impl MicmacScores {
    pub fn from_powers(powers: Vec<Powers>) -> Self {
        MicmacScores { powers }
    }

    pub fn powers(&self) -> &[Powers] {
        &self.powers
    }

    pub fn get(&self, index: usize) -> Powers {
        self.powers[index]
    }

    pub fn len(&self) -> usize {
        self.powers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.powers.is_empty()
    }

    pub fn total_driving(&self) -> usize {
        self.powers.iter().map(|p| p.driving).sum()
    }

    pub fn total_dependence(&self) -> usize {
        self.powers.iter().map(|p| p.dependence).sum()
    }
}

pub fn micmac_powers(m: &ReachabilityMatrix) -> MicmacScores {
    let e = m.entries();
    let powers = (0..m.dim())
        .map(|i| Powers {
            driving: e.row_count(i),
            dependence: e.col_count(i),
        })
        .collect();
    MicmacScores { powers }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum ThresholdMode {
    /// Both cuts at the mean power (the two means coincide).
    Mean,
    /// Cuts halfway between 1 and the largest observed power on each axis.
    Midpoint,
    Explicit { driving: f64, dependence: f64 },
}

impl FromStr for ThresholdMode {
    type Err = MicmacError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "mean" => Ok(ThresholdMode::Mean),
            "midpoint" => Ok(ThresholdMode::Midpoint),
            other => {
                let (d, r) = other
                    .split_once(',')
                    .ok_or_else(|| MicmacError::UnknownMode(other.to_string()))?;
                let parse = |v: &str| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| MicmacError::UnknownMode(other.to_string()))
                };
                let (driving, dependence) = (parse(d)?, parse(r)?);
                check_cuts(driving, dependence)?;
                Ok(ThresholdMode::Explicit {
                    driving,
                    dependence,
                })
            }
        }
    }
}

impl fmt::Display for ThresholdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdMode::Mean => f.write_str("mean"),
            ThresholdMode::Midpoint => f.write_str("midpoint"),
            ThresholdMode::Explicit {
                driving,
                dependence,
            } => write!(f, "{driving},{dependence}"),
        }
    }
}

fn check_cuts(driving: f64, dependence: f64) -> Result<(), MicmacError> {
    let ok = |v: f64| v.is_finite() && v > 0.0;
    if ok(driving) && ok(dependence) {
        Ok(())
    } else {
        Err(MicmacError::InvalidCuts(driving, dependence))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadrantThresholds {
    pub driving_cut: f64,
    pub dependence_cut: f64,
    pub mode: ThresholdMode,
}

pub fn thresholds(scores: &MicmacScores, mode: ThresholdMode) -> Result<QuadrantThresholds, MicmacError> {
    if scores.is_empty() {
        return Err(MicmacError::Empty);
    }
    let n = scores.len() as f64;
    let (driving_cut, dependence_cut) = match mode {
        ThresholdMode::Mean => {
            let cut = scores.total_driving() as f64 / n;
            (cut, cut)
        }
        ThresholdMode::Midpoint => {
            let max_d = scores.powers.iter().map(|p| p.driving).max().unwrap_or(1);
            let max_r = scores.powers.iter().map(|p| p.dependence).max().unwrap_or(1);
            ((1 + max_d) as f64 / 2.0, (1 + max_r) as f64 / 2.0)
        }
        ThresholdMode::Explicit {
            driving,
            dependence,
        } => (driving, dependence),
    };
    check_cuts(driving_cut, dependence_cut)?;
    Ok(QuadrantThresholds {
        driving_cut,
        dependence_cut,
        mode,
    })
}

/// Quadrant families. `Driving` is also called "independent" in the
/// MICMAC literature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadrant {
    Autonomous,
    Dependent,
    Linkage,
    Driving,
}

impl Quadrant {
    /// Values equal to a cut count as high.
    pub fn of(p: Powers, cuts: &QuadrantThresholds) -> Self {
        let high_driving = p.driving as f64 >= cuts.driving_cut;
        let high_dependence = p.dependence as f64 >= cuts.dependence_cut;
        match (high_driving, high_dependence) {
            (false, false) => Quadrant::Autonomous,
            (false, true) => Quadrant::Dependent,
            (true, true) => Quadrant::Linkage,
            (true, false) => Quadrant::Driving,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Quadrant::Autonomous => "autonomous",
            Quadrant::Dependent => "dependent",
            Quadrant::Linkage => "linkage",
            Quadrant::Driving => "driving",
        }
    }
}

impl fmt::Display for Quadrant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MicmacClassification {
    pub scores: MicmacScores,
    pub cuts: QuadrantThresholds,
    pub labels: Vec<Quadrant>,
}

pub fn classify(scores: &MicmacScores, cuts: &QuadrantThresholds) -> MicmacClassification {
    MicmacClassification {
        scores: scores.clone(),
        cuts: *cuts,
        labels: scores.powers.iter().map(|&p| Quadrant::of(p, cuts)).collect(),
    }
}
