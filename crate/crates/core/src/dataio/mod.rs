//! Loading MMERs from disk.

mod generic;
pub mod movielens;

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

pub use generic::{
    load_mmer, load_mmer_with_stats, load_relation, load_table, write_generic, ColumnConfig, RelationConfig,
    RelationStats, Role, SchemaConfig, TableConfig, WriteOptions,
};
pub use movielens::{collapse_genre, grouplens_age_chain, load_movielens, MovieLensOptions};

use crate::error::{Error, Result};

/// Hex SHA-256 of a file's bytes.
pub fn file_sha256(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}
