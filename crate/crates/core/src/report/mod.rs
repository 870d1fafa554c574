//! File ingestion, pipeline orchestration and report emission.

mod emit;
mod load;
mod pipeline;

use std::path::PathBuf;

use thiserror::Error;

use crate::model::CatalogViolation;

pub use emit::{emit_report, format_fixed, render_outputs, OutputFile};
pub use load::{
    load_adjacency, load_dematel_table, load_factor_catalog, load_reachability, load_surveys,
    parse_adjacency, parse_dematel_table, parse_factor_catalog, parse_reachability, parse_survey,
    sha256_hex, DematelTableRow,
};
pub use pipeline::{
    analyze, run_pipeline, AnalysisConfig, AnalysisInput, AnalysisReport, AnalysisSettings,
    DematelStage, InputDigest, InputSource, LambdaChoice, Provenance,
};

/// Exit status for input and validation failures.
pub const EXIT_INPUT: i32 = 1;
/// Exit status for singular or non-convergent numerics.
pub const EXIT_NUMERIC: i32 = 2;

/// Pipeline stage names attached to errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Aggregate,
    Normalize,
    TotalInfluence,
    Scores,
    Adjacency,
    Partition,
    Skeleton,
    Thresholds,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Aggregate => "aggregate",
            Stage::Normalize => "normalize",
            Stage::TotalInfluence => "total_influence",
            Stage::Scores => "dematel_scores",
            Stage::Adjacency => "derive_adjacency",
            Stage::Partition => "partition_levels",
            Stage::Skeleton => "skeleton",
            Stage::Thresholds => "thresholds",
        }
    }

    fn is_numeric(self) -> bool {
        matches!(self, Stage::Normalize | Stage::TotalInfluence | Stage::Scores)
    }
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}{}: {message}", line.map(|l| format!(", line {l}")).unwrap_or_default())]
    Parse {
        path: String,
        line: Option<u64>,
        message: String,
    },
    #[error("{0}: no factors")]
    NoFactors(String),
    #[error("{path}: {}", violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Catalog {
        path: String,
        violations: Vec<CatalogViolation>,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("stage {stage}: {message}")]
    Stage { stage: Stage, message: String },
    #[error("serializing {what}: {source}")]
    Json {
        what: &'static str,
        #[source]
        source: serde_json::Error,
    },
}

impl ReportError {
    pub(crate) fn stage(stage: Stage, err: impl std::fmt::Display) -> Self {
        ReportError::Stage {
            stage,
            message: err.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            ReportError::Stage { stage, .. } if stage.is_numeric() => EXIT_NUMERIC,
            _ => EXIT_INPUT,
        }
    }
}
