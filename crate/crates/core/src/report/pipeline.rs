use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use super::load::{self, read_file, sha256_hex};
use super::{ReportError, Stage};
use crate::dematel::{
    dematel_scores, normalize, total_influence, DematelScores, NormalizedMatrix, TotalInfluenceMatrix,
    DEFAULT_TOL,
};
use crate::ism::{
    derive_adjacency, partition_levels, reachability_sets, regions, skeleton, suggested_lambda,
    transitive_closure, AdjacencyMatrix, LevelPartition, ReachabilityMatrix, ReachabilitySets,
    SkeletonDigraph,
};
use crate::micmac::{classify, micmac_powers, thresholds, MicmacClassification, QuadrantThresholds, ThresholdMode};
use crate::model::{aggregate_surveys, DirectInfluenceMatrix, FactorCatalog, SurveyMatrix};

pub const DEFAULT_PRECISION: usize = 3;

/// Threshold turning total influence into ISM adjacency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaChoice {
    Value(f64),
    /// Mean plus population standard deviation of all cells of `T`.
    AutoMeanPlusStd,
}

impl FromStr for LambdaChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "auto" | "auto-mean-plus-std" => Ok(LambdaChoice::AutoMeanPlusStd),
            other => match other.parse::<f64>() {
                Ok(v) if v >= 0.0 && v.is_finite() => Ok(LambdaChoice::Value(v)),
                _ => Err(format!("lambda must be a non-negative number or \"auto\", got {other:?}")),
            },
        }
    }
}

/// Which file drives the ISM stage.
#[derive(Debug, Clone, PartialEq)]
pub enum InputSource {
    Surveys(Vec<PathBuf>),
    Adjacency(PathBuf),
    Reachability(PathBuf),
}

impl InputSource {
    fn kind(&self) -> &'static str {
        match self {
            InputSource::Surveys(_) => "surveys",
            InputSource::Adjacency(_) => "adjacency",
            InputSource::Reachability(_) => "reachability",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisSettings {
    /// Required when the input is a set of surveys.
    pub lambda: Option<LambdaChoice>,
    pub micmac_mode: ThresholdMode,
    pub tol: f64,
    pub precision: usize,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        AnalysisSettings {
            lambda: None,
            micmac_mode: ThresholdMode::Mean,
            tol: DEFAULT_TOL,
            precision: DEFAULT_PRECISION,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub factors: PathBuf,
    pub input: InputSource,
    pub settings: AnalysisSettings,
    pub out_dir: PathBuf,
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<(), ReportError> {
        validate_settings(&self.settings, matches!(self.input, InputSource::Surveys(_)))?;
        if let InputSource::Surveys(paths) = &self.input {
            if paths.is_empty() {
                return Err(ReportError::Config("no surveys".into()));
            }
        }
        Ok(())
    }
}

fn validate_settings(settings: &AnalysisSettings, needs_lambda: bool) -> Result<(), ReportError> {
    if !(settings.tol.is_finite() && settings.tol > 0.0) {
        return Err(ReportError::Config(format!("tol must be positive, got {}", settings.tol)));
    }
    if let Some(LambdaChoice::Value(v)) = settings.lambda {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(ReportError::Config(format!("lambda must be non-negative, got {v}")));
        }
    }
    if needs_lambda && settings.lambda.is_none() {
        return Err(ReportError::Config(
            "survey input needs --lambda (a number, or \"auto\" for mean + std of T)".into(),
        ));
    }
    Ok(())
}

/// In-memory form of [`InputSource`].
#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisInput {
    Surveys(Vec<SurveyMatrix>),
    Adjacency(AdjacencyMatrix),
    Reachability(ReachabilityMatrix),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputDigest {
    pub role: &'static str,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DematelProvenance {
    pub respondents: usize,
    pub normalizer: f64,
    pub residual: f64,
    pub norm_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub input_kind: &'static str,
    pub inputs: Vec<InputDigest>,
    pub lambda_mode: Option<&'static str>,
    pub lambda: Option<f64>,
    pub tol: f64,
    pub precision: usize,
    pub dematel: Option<DematelProvenance>,
    /// `None` when the reachability matrix was supplied directly.
    pub closure_exponent: Option<usize>,
    pub cuts: QuadrantThresholds,
    pub level_count: usize,
    pub cycle_groups: usize,
    /// Files written by [`super::emit_report`], filled in at emission.
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DematelStage {
    pub direct: DirectInfluenceMatrix,
    pub normalized: NormalizedMatrix,
    pub total: TotalInfluenceMatrix,
    pub scores: DematelScores,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub catalog: FactorCatalog,
    /// Present only for survey input.
    pub dematel: Option<DematelStage>,
    /// Absent when the reachability matrix was supplied directly.
    pub adjacency: Option<AdjacencyMatrix>,
    pub reachability: ReachabilityMatrix,
    pub sets: ReachabilitySets,
    pub levels: LevelPartition,
    pub skeleton: SkeletonDigraph,
    pub regions: Vec<Vec<usize>>,
    pub micmac: MicmacClassification,
    pub provenance: Provenance,
}

/// Loads every input named by `config` and runs the full analysis.
pub fn run_pipeline(config: &AnalysisConfig) -> Result<AnalysisReport, ReportError> {
    config.validate()?;
    let mut digests = Vec::new();
    let mut digest = |role: &'static str, path: &Path| -> Result<Vec<u8>, ReportError> {
        let bytes = read_file(path)?;
        digests.push(InputDigest {
            role,
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        Ok(bytes)
    };
    let catalog = load::parse_factor_catalog(&digest("factors", &config.factors)?, &config.factors)?;
    let input = match &config.input {
        InputSource::Surveys(paths) => {
            let surveys = paths
                .iter()
                .map(|p| load::parse_survey(&digest("survey", p)?, p, &catalog))
                .collect::<Result<Vec<_>, _>>()?;
            AnalysisInput::Surveys(surveys)
        }
        InputSource::Adjacency(p) => AnalysisInput::Adjacency(load::parse_adjacency(&digest("adjacency", p)?, p, &catalog)?),
        InputSource::Reachability(p) => {
            AnalysisInput::Reachability(load::parse_reachability(&digest("reachability", p)?, p, &catalog)?)
        }
    };
    let mut report = analyze(catalog, input, &config.settings)?;
    debug_assert_eq!(report.provenance.input_kind, config.input.kind());
    report.provenance.inputs = digests;
    Ok(report)
}

/// Runs aggregate → normalize → total influence → scores → adjacency →
/// closure → sets → levels → skeleton → powers → cuts → classes, entering
/// at the stage the input allows.
pub fn analyze(
    catalog: FactorCatalog,
    input: AnalysisInput,
    settings: &AnalysisSettings,
) -> Result<AnalysisReport, ReportError> {
    validate_settings(settings, matches!(input, AnalysisInput::Surveys(_)))?;
    let n = catalog.len();
    let check_dim = |found: usize| {
        if found == n {
            Ok(())
        } else {
            Err(ReportError::Config(format!(
                "input is {found}x{found} but the catalog has {n} factors"
            )))
        }
    };

    let mut dematel = None;
    let mut dematel_prov = None;
    let mut lambda_used = None;
    let input_kind;
    let (adjacency, reachability) = match input {
        AnalysisInput::Surveys(surveys) => {
            input_kind = "surveys";
            let respondents = surveys.len();
            let direct = aggregate_surveys(&surveys).map_err(|e| ReportError::stage(Stage::Aggregate, e))?;
            check_dim(direct.dim())?;
            let normalized = normalize(&direct).map_err(|e| ReportError::stage(Stage::Normalize, e))?;
            let total =
                total_influence(&normalized, settings.tol).map_err(|e| ReportError::stage(Stage::TotalInfluence, e))?;
            let scores = dematel_scores(&total).map_err(|e| ReportError::stage(Stage::Scores, e))?;
            let lambda = match settings.lambda {
                Some(LambdaChoice::Value(v)) => v,
                _ => suggested_lambda(&total),
            };
            lambda_used = Some(lambda);
            let adjacency = derive_adjacency(&total, lambda).map_err(|e| ReportError::stage(Stage::Adjacency, e))?;
            dematel_prov = Some(DematelProvenance {
                respondents,
                normalizer: normalized.normalizer(),
                residual: total.residual(),
                norm_bound: total.norm_bound(),
            });
            dematel = Some(DematelStage {
                direct,
                normalized,
                total,
                scores,
            });
            let closure = transitive_closure(&adjacency);
            (Some(adjacency), closure)
        }
        AnalysisInput::Adjacency(adjacency) => {
            input_kind = "adjacency";
            check_dim(adjacency.dim())?;
            let closure = transitive_closure(&adjacency);
            (Some(adjacency), closure)
        }
        AnalysisInput::Reachability(m) => {
            input_kind = "reachability";
            check_dim(m.dim())?;
            (None, m)
        }
    };

    let sets = reachability_sets(&reachability);
    let levels = partition_levels(&sets).map_err(|e| ReportError::stage(Stage::Partition, e))?;
    let skeleton = skeleton(&reachability, &levels).map_err(|e| ReportError::stage(Stage::Skeleton, e))?;
    let regions = regions(&reachability);
    let powers = micmac_powers(&reachability);
    let cuts = thresholds(&powers, settings.micmac_mode).map_err(|e| ReportError::stage(Stage::Thresholds, e))?;
    let micmac = classify(&powers, &cuts);

    let lambda_mode = match (input_kind, settings.lambda) {
        ("surveys", Some(LambdaChoice::Value(_))) => Some("explicit"),
        ("surveys", _) => Some("auto-mean-plus-std"),
        _ => None,
    };
    let provenance = Provenance {
        tool: format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
        input_kind,
        inputs: Vec::new(),
        lambda_mode,
        lambda: lambda_used,
        tol: settings.tol,
        precision: settings.precision,
        dematel: dematel_prov,
        closure_exponent: reachability.exponent(),
        cuts,
        level_count: levels.len(),
        cycle_groups: skeleton.nodes.iter().filter(|node| node.members.len() > 1).count(),
        outputs: Vec::new(),
    };

    Ok(AnalysisReport {
        catalog,
        dematel,
        adjacency,
        reachability,
        sets,
        levels,
        skeleton,
        regions,
        micmac,
        provenance,
    })
}
