use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::pipeline::AnalysisReport;
use super::ReportError;
use crate::matrix::BoolMatrix;
use crate::model::FactorCatalog;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub name: &'static str,
    pub contents: String,
}

/// Fixed-point formatting. Rust's float formatting rounds the exact binary
/// value, with exact ties going to even. A rounded negative zero prints
/// without its sign.
pub fn format_fixed(value: f64, precision: usize) -> String {
    let s = format!("{value:.precision$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

fn bool_matrix_csv(catalog: &FactorCatalog, m: &BoolMatrix) -> String {
    let mut out = header_row(catalog);
    for i in 0..catalog.len() {
        out.push_str(&csv_field(catalog.code(i)));
        for j in 0..catalog.len() {
            out.push_str(if m.get(i, j) { ",1" } else { ",0" });
        }
        out.push('\n');
    }
    out
}

fn header_row(catalog: &FactorCatalog) -> String {
    let mut out = String::from("code");
    for code in catalog.codes() {
        out.push(',');
        out.push_str(&csv_field(code));
    }
    out.push('\n');
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Serialize)]
struct LevelEntry<'a> {
    level: usize,
    factors: Vec<&'a str>,
}

#[derive(Serialize)]
struct SetsEntry<'a> {
    code: &'a str,
    reachable: Vec<&'a str>,
    antecedent: Vec<&'a str>,
    intersection: Vec<&'a str>,
}

#[derive(Serialize)]
struct LevelsDoc<'a> {
    levels: Vec<LevelEntry<'a>>,
    cycle_groups: Vec<Vec<&'a str>>,
    regions: Vec<Vec<&'a str>>,
    reachability_sets: Vec<SetsEntry<'a>>,
}

fn codes<'a>(catalog: &'a FactorCatalog, idx: impl IntoIterator<Item = &'a usize>) -> Vec<&'a str> {
    idx.into_iter().map(|&i| catalog.code(i)).collect()
}

fn levels_json(report: &AnalysisReport) -> Result<String, ReportError> {
    let cat = &report.catalog;
    let doc = LevelsDoc {
        levels: report
            .levels
            .levels()
            .iter()
            .enumerate()
            .map(|(k, l)| LevelEntry {
                level: k + 1,
                factors: codes(cat, l),
            })
            .collect(),
        cycle_groups: report
            .skeleton
            .nodes
            .iter()
            .filter(|node| node.members.len() > 1)
            .map(|node| codes(cat, &node.members))
            .collect(),
        regions: report.regions.iter().map(|r| codes(cat, r)).collect(),
        reachability_sets: report
            .sets
            .sets()
            .iter()
            .enumerate()
            .map(|(i, s)| SetsEntry {
                code: cat.code(i),
                reachable: codes(cat, &s.reachable),
                antecedent: codes(cat, &s.antecedent),
                intersection: codes(cat, &s.intersection),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).map_err(|source| ReportError::Json {
        what: "levels.json",
        source,
    })?;
    s.push('\n');
    Ok(s)
}

fn dot_id(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Nodes clustered by level, `L1` drawn on top; edges point toward `L1`.
fn hierarchy_dot(report: &AnalysisReport) -> String {
    let cat = &report.catalog;
    let sk = &report.skeleton;
    let node_id = |idx: usize| dot_id(cat.code(sk.nodes[idx].members[0]));
    let mut out = String::new();
    out.push_str("digraph hierarchy {\n");
    out.push_str("  rankdir=BT;\n");
    out.push_str("  node [shape=box];\n");
    for level in 0..report.levels.len() {
        let _ = writeln!(out, "  subgraph cluster_L{} {{", level + 1);
        let _ = writeln!(out, "    label=\"L{}\";", level + 1);
        out.push_str("    rank=same;\n");
        for (idx, node) in sk.nodes.iter().enumerate().filter(|(_, n)| n.level == level) {
            let label: Vec<&str> = codes(cat, &node.members);
            let _ = writeln!(out, "    {} [label={}];", node_id(idx), dot_id(&label.join(", ")));
        }
        out.push_str("  }\n");
    }
    for &(a, b) in &sk.edges {
        let _ = writeln!(out, "  {} -> {};", node_id(a), node_id(b));
    }
    out.push_str("}\n");
    out
}

/// Renders every output file in memory, in emission order. The provenance
/// file comes last and lists the others.
pub fn render_outputs(report: &AnalysisReport) -> Result<Vec<OutputFile>, ReportError> {
    let cat = &report.catalog;
    let p = report.provenance.precision;
    let fx = |v: f64| format_fixed(v, p);
    let mut files = Vec::new();

    if let Some(d) = &report.dematel {
        let mut table = String::from("code,influence,influenced,centrality,causality\n");
        let mut scatter = String::from("code,influence,influenced,centrality,causality,role\n");
        for (i, s) in d.scores.scores().iter().enumerate() {
            let row = format!(
                "{},{},{},{},{}",
                csv_field(cat.code(i)),
                fx(s.influence),
                fx(s.influenced),
                fx(s.centrality),
                fx(s.causality)
            );
            let _ = writeln!(table, "{row}");
            let _ = writeln!(scatter, "{row},{}", s.role().as_str());
        }
        files.push(OutputFile {
            name: "dematel.csv",
            contents: table,
        });
        let mut total = header_row(cat);
        let t = d.total.entries();
        for i in 0..cat.len() {
            total.push_str(&csv_field(cat.code(i)));
            for v in t.row(i) {
                total.push(',');
                total.push_str(&fx(*v));
            }
            total.push('\n');
        }
        files.push(OutputFile {
            name: "total_influence.csv",
            contents: total,
        });
        files.push(OutputFile {
            name: "dematel_scatter.csv",
            contents: scatter,
        });
    }
    if let Some(a) = &report.adjacency {
        files.push(OutputFile {
            name: "adjacency.csv",
            contents: bool_matrix_csv(cat, a.entries()),
        });
    }
    files.push(OutputFile {
        name: "reachability.csv",
        contents: bool_matrix_csv(cat, report.reachability.entries()),
    });
    files.push(OutputFile {
        name: "levels.json",
        contents: levels_json(report)?,
    });

    let mc = &report.micmac;
    let mut micmac = String::from("code,driving,dependence,quadrant\n");
    let mut scatter = String::from("code,dependence,driving,quadrant\n");
    for (i, (pw, label)) in mc.scores.powers().iter().zip(&mc.labels).enumerate() {
        let code = csv_field(cat.code(i));
        let _ = writeln!(micmac, "{code},{},{},{label}", pw.driving, pw.dependence);
        let _ = writeln!(scatter, "{code},{},{},{label}", pw.dependence, pw.driving);
    }
    files.push(OutputFile {
        name: "micmac.csv",
        contents: micmac,
    });
    files.push(OutputFile {
        name: "hierarchy.dot",
        contents: hierarchy_dot(report),
    });
    files.push(OutputFile {
        name: "micmac_scatter.csv",
        contents: scatter,
    });

    let mut provenance = report.provenance.clone();
    provenance.outputs = files.iter().map(|f| f.name.to_string()).collect();
    provenance.outputs.push("provenance.json".into());
    let mut prov = serde_json::to_string_pretty(&provenance).map_err(|source| ReportError::Json {
        what: "provenance.json",
        source,
    })?;
    prov.push('\n');
    files.push(OutputFile {
        name: "provenance.json",
        contents: prov,
    });
    Ok(files)
}

/// Writes every output into `out_dir`, creating it if needed.
pub fn emit_report(report: &AnalysisReport, out_dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    let files = render_outputs(report)?;
    fs::create_dir_all(out_dir).map_err(|source| ReportError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::with_capacity(files.len());
    for f in files {
        let path = out_dir.join(f.name);
        fs::write(&path, f.contents.as_bytes()).map_err(|source| ReportError::Io {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}
