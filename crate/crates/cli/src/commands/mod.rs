pub mod bench;
pub mod eval;
pub mod labelgen;
pub mod losscheck;
pub mod postprocess;

use std::path::Path;

use textkernel_core::io::read_ndjson;
use textkernel_core::loss::{MapKind, ProbMap};
use serde::de::DeserializeOwned;

use crate::error::{CliError, CliResult};
use crate::fsutil::read;

pub fn load_ndjson<T: DeserializeOwned>(path: &Path) -> CliResult<Vec<T>> {
    let bytes = read(path)?;
    read_ndjson(&bytes[..]).map_err(|e| CliError::data(path, e))
}

pub fn load_pmap(path: &Path) -> CliResult<ProbMap> {
    let bytes = read(path)?;
    textkernel_core::io::parse_pmap(&bytes, MapKind::Probabilities).map_err(|e| CliError::data(path, e))
}

/// First error in input order, or every value.
pub fn collect_ordered<T>(results: Vec<CliResult<T>>) -> CliResult<Vec<T>> {
    results.into_iter().collect()
}
