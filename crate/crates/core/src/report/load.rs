//! CSV loaders for catalogs, survey matrices and 0/1 relation matrices.
//!
//! Matrix files carry factor codes in the first row and first column. The
//! codes may come in any order as long as each catalog code appears exactly
//! once on each axis; cells are realigned to catalog order on load.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::ReportError;
use crate::dematel::FactorScore;
use crate::ism::{AdjacencyMatrix, ReachabilityMatrix};
use crate::matrix::{BoolMatrix, SquareMatrix};
use crate::model::{Factor, FactorCatalog, ModelError, SurveyMatrix, DEFAULT_SCALE_MAX};

const SCALE_PREFIX: &str = "scale_max=";

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>, ReportError> {
    fs::read(path).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn parse_error(path: &Path, line: Option<u64>, message: impl Into<String>) -> ReportError {
    ReportError::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

pub fn load_factor_catalog(path: &Path) -> Result<FactorCatalog, ReportError> {
    let bytes = read_file(path)?;
    parse_factor_catalog(&bytes, path)
}

/// Parses a `code,group,name[,description]` CSV. `origin` is only used in
/// error messages.
pub fn parse_factor_catalog(bytes: &[u8], origin: &Path) -> Result<FactorCatalog, ReportError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(bytes);
    let mut factors = Vec::new();
    for record in reader.deserialize::<Factor>() {
        let factor = record.map_err(|e| {
            let line = e.position().map(|p| p.line());
            parse_error(origin, line, e.to_string())
        })?;
        factors.push(factor);
    }
    if factors.is_empty() {
        return Err(ReportError::NoFactors(origin.display().to_string()));
    }
    FactorCatalog::new(factors).map_err(|e| match e {
        ModelError::InvalidCatalog(violations) => ReportError::Catalog {
            path: origin.display().to_string(),
            violations,
        },
        other => ReportError::Config(other.to_string()),
    })
}

/// A code-labelled square grid of raw cells, realigned to catalog order.
struct CodeGrid {
    corner: String,
    /// `cells[i][j]` holds the text and line number for catalog factors `i`, `j`.
    cells: Vec<Vec<(String, u64)>>,
}

fn read_code_grid(bytes: &[u8], origin: &Path, catalog: &FactorCatalog) -> Result<CodeGrid, ReportError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| parse_error(origin, e.position().map(|p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(str::is_empty) {
            continue;
        }
        records.push((rec, line));
    }
    let (header, header_line) = records
        .first()
        .ok_or_else(|| parse_error(origin, None, "empty matrix file"))?;
    let n = catalog.len();
    let col_index = map_codes(header.iter().skip(1), catalog, origin, *header_line, "column")?;
    let body = &records[1..];
    if body.len() != n {
        return Err(parse_error(
            origin,
            None,
            format!("expected {n} data rows, found {}", body.len()),
        ));
    }
    let row_index = map_codes(body.iter().map(|(r, _)| &r[0]), catalog, origin, 0, "row")?;
    let mut cells = vec![vec![(String::new(), 0); n]; n];
    for (pos, (rec, line)) in body.iter().enumerate() {
        if rec.len() != n + 1 {
            return Err(parse_error(
                origin,
                Some(*line),
                format!("expected {} cells, found {}", n + 1, rec.len()),
            ));
        }
        let i = row_index[pos];
        for (cpos, cell) in rec.iter().skip(1).enumerate() {
            cells[i][col_index[cpos]] = (cell.to_string(), *line);
        }
    }
    Ok(CodeGrid {
        corner: header[0].to_string(),
        cells,
    })
}

// Maps the position of each code label to its catalog index.
fn map_codes<'a>(
    labels: impl Iterator<Item = &'a str>,
    catalog: &FactorCatalog,
    origin: &Path,
    line: u64,
    axis: &str,
) -> Result<Vec<usize>, ReportError> {
    let lookup: HashMap<&str, usize> = catalog.codes().enumerate().map(|(i, c)| (c, i)).collect();
    let mut seen = vec![false; catalog.len()];
    let mut out = Vec::new();
    let line = (line > 0).then_some(line);
    for label in labels {
        let idx = *lookup
            .get(label)
            .ok_or_else(|| parse_error(origin, line, format!("unknown {axis} code {label:?}")))?;
        if seen[idx] {
            return Err(parse_error(origin, line, format!("duplicate {axis} code {label}")));
        }
        seen[idx] = true;
        out.push(idx);
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(parse_error(
            origin,
            line,
            format!("missing {axis} code {}", catalog.code(missing)),
        ));
    }
    Ok(out)
}

/// Loads one survey file. The corner cell may declare the scale as
/// `scale_max=<value>`; otherwise the default 0..4 scale applies. The file
/// stem becomes the respondent id.
pub fn parse_survey(bytes: &[u8], origin: &Path, catalog: &FactorCatalog) -> Result<SurveyMatrix, ReportError> {
    let grid = read_code_grid(bytes, origin, catalog)?;
    let scale_max = match grid.corner.strip_prefix(SCALE_PREFIX) {
        Some(v) => v
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|s| s.is_finite() && *s > 0.0)
            .ok_or_else(|| parse_error(origin, Some(1), format!("invalid scale declaration {:?}", grid.corner)))?,
        None => DEFAULT_SCALE_MAX,
    };
    let n = catalog.len();
    let mut scores = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let (text, line) = &grid.cells[i][j];
            let at = || format!("({},{})", catalog.code(i), catalog.code(j));
            let value: f64 = text
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| parse_error(origin, Some(*line), format!("non-numeric cell {text:?} at {}", at())))?;
            if i == j && value != 0.0 {
                return Err(parse_error(
                    origin,
                    Some(*line),
                    format!("nonzero diagonal at {}", catalog.code(i)),
                ));
            }
            if !(0.0..=scale_max).contains(&value) {
                return Err(parse_error(
                    origin,
                    Some(*line),
                    format!("value {value} at {} outside [0, {scale_max}]", at()),
                ));
            }
            scores[(i, j)] = value;
        }
    }
    let respondent = origin
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| origin.display().to_string());
    SurveyMatrix::new(respondent, scores, scale_max).map_err(|e| parse_error(origin, None, e.to_string()))
}

pub fn load_surveys<P: AsRef<Path>>(paths: &[P], catalog: &FactorCatalog) -> Result<Vec<SurveyMatrix>, ReportError> {
    paths
        .iter()
        .map(|p| {
            let p = p.as_ref();
            parse_survey(&read_file(p)?, p, catalog)
        })
        .collect()
}

fn parse_binary_grid(bytes: &[u8], origin: &Path, catalog: &FactorCatalog) -> Result<BoolMatrix, ReportError> {
    let grid = read_code_grid(bytes, origin, catalog)?;
    let n = catalog.len();
    let mut m = BoolMatrix::new(n);
    for i in 0..n {
        for j in 0..n {
            let (text, line) = &grid.cells[i][j];
            let bit = match text.as_str() {
                "0" => false,
                "1" => true,
                other => {
                    return Err(parse_error(
                        origin,
                        Some(*line),
                        format!(
                            "expected 0 or 1 at ({},{}), found {other:?}",
                            catalog.code(i),
                            catalog.code(j)
                        ),
                    ))
                }
            };
            m.set(i, j, bit);
        }
    }
    Ok(m)
}

pub fn parse_adjacency(bytes: &[u8], origin: &Path, catalog: &FactorCatalog) -> Result<AdjacencyMatrix, ReportError> {
    let m = parse_binary_grid(bytes, origin, catalog)?;
    AdjacencyMatrix::new(m).map_err(|e| parse_error(origin, None, relabel(&e.to_string(), catalog)))
}

pub fn parse_reachability(
    bytes: &[u8],
    origin: &Path,
    catalog: &FactorCatalog,
) -> Result<ReachabilityMatrix, ReportError> {
    let m = parse_binary_grid(bytes, origin, catalog)?;
    ReachabilityMatrix::from_matrix(m).map_err(|e| parse_error(origin, None, relabel(&e.to_string(), catalog)))
}

pub fn load_adjacency(path: &Path, catalog: &FactorCatalog) -> Result<AdjacencyMatrix, ReportError> {
    parse_adjacency(&read_file(path)?, path, catalog)
}

pub fn load_reachability(path: &Path, catalog: &FactorCatalog) -> Result<ReachabilityMatrix, ReportError> {
    parse_reachability(&read_file(path)?, path, catalog)
}

// Index-based messages from the library are fine for callers holding the
// matrix; file users get a hint with the codes appended.
fn relabel(message: &str, catalog: &FactorCatalog) -> String {
    let codes: Vec<&str> = catalog.codes().collect();
    format!("{message} (indices are 0-based into [{}])", codes.join(", "))
}

/// One row of a published DEMATEL score table.
#[derive(Debug, Clone, PartialEq)]
pub struct DematelTableRow {
    pub code: String,
    pub name: String,
    pub score: FactorScore,
}

#[derive(serde::Deserialize)]
struct RawDematelRow {
    code: String,
    #[serde(default)]
    name: String,
    influence: f64,
    influenced: f64,
    centrality: f64,
    causality: f64,
}

/// Reads a `code,name,influence,influenced,centrality,causality` table as
/// given, without recomputing centrality or causality.
pub fn parse_dematel_table(bytes: &[u8], origin: &Path) -> Result<Vec<DematelTableRow>, ReportError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
    let mut rows = Vec::new();
    for rec in reader.deserialize::<RawDematelRow>() {
        let r = rec.map_err(|e| parse_error(origin, e.position().map(|p| p.line()), e.to_string()))?;
        rows.push(DematelTableRow {
            code: r.code,
            name: r.name,
            score: FactorScore {
                influence: r.influence,
                influenced: r.influenced,
                centrality: r.centrality,
                causality: r.causality,
            },
        });
    }
    Ok(rows)
}

pub fn load_dematel_table(path: &Path) -> Result<Vec<DematelTableRow>, ReportError> {
    parse_dematel_table(&read_file(path)?, path)
}
