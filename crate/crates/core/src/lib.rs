//! Structural analysis of factor-influence systems.
//!
//! The pipeline runs in three stages over one ordered [`model::FactorCatalog`]:
//!
//! * [`dematel`] turns averaged expert scores into a total influence matrix
//!   and per-factor influence, influenced degree, centrality and causality;
//! * [`ism`] thresholds that matrix into a binary relation, closes it into a
//!   reachability matrix and peels the factors into hierarchy levels;
//! * [`micmac`] reads driving and dependence powers off the reachability
//!   matrix and sorts factors into four quadrant families.
//!
//! [`report`] wires the stages together, reads CSV inputs and writes the
//! result tables. [`fixtures`] bundles a 26-factor financial-risk dataset.

pub mod dematel;
pub mod fixtures;
pub mod ism;
pub mod matrix;
pub mod micmac;
pub mod model;
pub mod report;

pub use dematel::{dematel_scores, normalize, total_influence};
pub use ism::{derive_adjacency, partition_levels, reachability_sets, skeleton, transitive_closure};
pub use micmac::{classify, micmac_powers, thresholds};
pub use model::{aggregate_surveys, validate_catalog};
