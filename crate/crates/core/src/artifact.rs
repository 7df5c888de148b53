//! Versioned JSON files for models, MDTs and layouts.
//!
//! Every file is an object with `format_version`, `kind` and a payload.
//! Writing is deterministic, so write → read → write reproduces the same bytes.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boosting::{BoostedEnsemble, Leverage};
use crate::data::Schema;
use crate::layout::DiskLayout;
use crate::mdt::MonotonicDecisionTree;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path} is not valid JSON for a {kind} file: {source}")]
    Json {
        path: String,
        kind: &'static str,
        source: serde_json::Error,
    },
    #[error("{path} has format_version {found}, this build reads version {expected}; regenerate the file with this build")]
    Version {
        path: String,
        found: u64,
        expected: u32,
    },
    #[error("{path} is a `{found}` file, expected `{expected}`")]
    Kind {
        path: String,
        found: String,
        expected: &'static str,
    },
    #[error("{path} lacks the `format_version`/`kind` header; was it written by this tool?")]
    MissingHeader { path: String },
}

/// Payload types that can be stored in an artifact file.
pub trait Artifact: Serialize + DeserializeOwned {
    const KIND: &'static str;
}

/// Training configuration recorded with a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub label: String,
    pub positive: String,
    pub trees: usize,
    pub tree_size: usize,
    pub folds: usize,
    pub seed: u64,
}

/// Per-fold cross-validation result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldModel {
    pub fold: usize,
    pub test_error: f64,
    pub mdt_test_error: f64,
    pub ensemble: BoostedEnsemble,
}

/// Output of `train`: the per-fold ensembles and one ensemble fit on all rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub config: TrainConfig,
    pub schema: Schema,
    pub folds: Vec<FoldModel>,
    pub ensemble: BoostedEnsemble,
}

impl Artifact for ModelFile {
    const KIND: &'static str = "model";
}

/// MDTs of every tree of an ensemble, with the ensemble's leverages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdtFile {
    pub schema: Schema,
    pub leverages: Vec<Leverage>,
    pub trees: Vec<MonotonicDecisionTree>,
}

impl Artifact for MdtFile {
    const KIND: &'static str = "mdt";
}

/// Layout of tree `tree` of an [`MdtFile`], with a copy of that MDT so the
/// file can be rescaled on its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutFile {
    pub tree: usize,
    pub mdt: MonotonicDecisionTree,
    pub layout: DiskLayout,
}

impl Artifact for LayoutFile {
    const KIND: &'static str = "layout";
}

#[derive(Serialize)]
struct EnvelopeRef<'a, T> {
    format_version: u32,
    kind: &'static str,
    payload: &'a T,
}

#[derive(Deserialize)]
struct Envelope<T> {
    payload: T,
}

#[derive(Deserialize)]
struct Header {
    format_version: Option<u64>,
    kind: Option<String>,
}

pub fn to_json<T: Artifact>(value: &T) -> String {
    let env = EnvelopeRef {
        format_version: FORMAT_VERSION,
        kind: T::KIND,
        payload: value,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("artifact types serialize");
    s.push('\n');
    s
}

/// Parses `text`; `origin` names the source in error messages.
pub fn from_json<T: Artifact>(text: &str, origin: &str) -> Result<T, ArtifactError> {
    let json_err = |source| ArtifactError::Json {
        path: origin.to_string(),
        kind: T::KIND,
        source,
    };
    let header: Header = serde_json::from_str(text).map_err(json_err)?;
    let (Some(found), Some(kind)) = (header.format_version, header.kind) else {
        return Err(ArtifactError::MissingHeader {
            path: origin.to_string(),
        });
    };
    if found != u64::from(FORMAT_VERSION) {
        return Err(ArtifactError::Version {
            path: origin.to_string(),
            found,
            expected: FORMAT_VERSION,
        });
    }
    if kind != T::KIND {
        return Err(ArtifactError::Kind {
            path: origin.to_string(),
            found: kind,
            expected: T::KIND,
        });
    }
    let env: Envelope<T> = serde_json::from_str(text).map_err(json_err)?;
    Ok(env.payload)
}

pub fn write<T: Artifact>(value: &T, path: impl AsRef<Path>) -> Result<(), ArtifactError> {
    let path = path.as_ref();
    std::fs::write(path, to_json(value)).map_err(|source| ArtifactError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read<T: Artifact>(path: impl AsRef<Path>) -> Result<T, ArtifactError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ArtifactError::Io {
        path: path.display().to_string(),
        source,
    })?;
    from_json(&text, &path.display().to_string())
}
