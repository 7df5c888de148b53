//! Shared fixtures for the benchmarks.

use std::path::PathBuf;

/// Path of a bundled dataset, e.g. `dataset("breastwisc")`.
pub fn dataset(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(format!("{name}.csv"))
}
