//! Granular association rule mining over two-table relational data.
//!
//! An MMER couples two information systems (e.g. users and movies) through a
//! many-to-many relation (rates). Numeric columns are discretized first with
//! one of the registered methods, then rules
//! `<a: v> ∧ ... ⇒ <b: w> ∧ ...` are mined under four thresholds: source
//! coverage, target coverage, source confidence and target confidence.

pub mod cli;
pub mod dataio;
pub mod discretize;
pub mod error;
pub mod fraction;
pub mod measures;
pub mod miner;
pub mod model;

pub use error::{Error, Result};
pub use fraction::Fraction;
pub use measures::{GranularRule, RuleMeasures, Thresholds};
pub use miner::{mine, MiningResult};
pub use model::{Attribute, AttributeKind, AttributeValue, BinaryRelation, Granule, InformationSystem, Mmer, Side};
