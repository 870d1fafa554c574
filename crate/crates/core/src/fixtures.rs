//! Bundled reference dataset: a 26-factor catalog of enterprise financial
//! risk under digital transformation, its published reachability matrix and
//! its published DEMATEL score table (rounded to 3 decimals).

use std::path::{Path, PathBuf};

use crate::ism::ReachabilityMatrix;
use crate::model::FactorCatalog;
use crate::report::{parse_dematel_table, parse_factor_catalog, parse_reachability, DematelTableRow};

pub const FACTORS_TABLE1_CSV: &str = include_str!("../fixtures/factors_table1.csv");
pub const REACHABILITY_TABLE3_CSV: &str = include_str!("../fixtures/reachability_table3.csv");
pub const DEMATEL_TABLE2_CSV: &str = include_str!("../fixtures/dematel_table2.csv");

/// Directory holding the fixture files in the source tree.
pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn factor_catalog() -> FactorCatalog {
    parse_factor_catalog(FACTORS_TABLE1_CSV.as_bytes(), Path::new("factors_table1.csv"))
        .expect("bundled catalog is valid")
}

pub fn reachability() -> ReachabilityMatrix {
    parse_reachability(
        REACHABILITY_TABLE3_CSV.as_bytes(),
        Path::new("reachability_table3.csv"),
        &factor_catalog(),
    )
    .expect("bundled reachability matrix is valid")
}

pub fn dematel_table() -> Vec<DematelTableRow> {
    parse_dematel_table(DEMATEL_TABLE2_CSV.as_bytes(), Path::new("dematel_table2.csv"))
        .expect("bundled DEMATEL table is valid")
}
