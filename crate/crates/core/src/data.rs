//! Binary-labelled datasets: CSV ingestion, example weights and stratified folds.

use std::collections::BTreeSet;
use std::io::Read;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("empty cell at row {row}, column '{column}' (missing values are not supported)")]
    EmptyCell { row: usize, column: String },
    #[error("row {row}, column '{column}': '{value}' is not a number but the column is numeric")]
    NotNumeric {
        row: usize,
        column: String,
        value: String,
    },
    #[error("label column '{0}' not found in header")]
    MissingLabelColumn(String),
    #[error("label column must hold exactly 2 distinct values, found {count}: {values:?}")]
    LabelCount { count: usize, values: Vec<String> },
    #[error("positive label '{positive}' does not occur; labels are {values:?}")]
    PositiveLabelAbsent {
        positive: String,
        values: Vec<String>,
    },
    #[error("row {row}: label '{value}' is neither '{positive}' nor '{negative}'")]
    UnknownLabel {
        row: usize,
        value: String,
        positive: String,
        negative: String,
    },
    #[error("header does not match the model schema: {0}")]
    SchemaMismatch(String),
    #[error("need at least 2 examples, got {0}")]
    TooFewRows(usize),
    #[error("fold count must be at least 2, got {0}")]
    InvalidFoldCount(usize),
    #[error("class {label:+} has {count} examples, fewer than the {k} folds")]
    ClassTooSmall { label: i8, count: usize, k: usize },
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
}

/// How a feature column is read.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureKind {
    Numeric,
    /// Levels sorted lexicographically; a value's code is its index.
    Categorical {
        levels: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: FeatureKind,
}

/// Column layout and label coding of a dataset, stored with trained models so
/// that new files are decoded identically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    pub features: Vec<FeatureSpec>,
    pub label_column: String,
    pub positive_label: String,
    pub negative_label: String,
}

/// One feature value. Categorical codes index into the schema's levels;
/// codes beyond them denote categories unseen when the schema was built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Num(f64),
    Cat(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Numeric(Vec<f64>),
    Categorical(Vec<u32>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize) -> Value {
        match self {
            Column::Numeric(v) => Value::Num(v[i]),
            Column::Categorical(v) => Value::Cat(v[i]),
        }
    }

    fn select(&self, idx: &[usize]) -> Column {
        match self {
            Column::Numeric(v) => Column::Numeric(idx.iter().map(|&i| v[i]).collect()),
            Column::Categorical(v) => Column::Categorical(idx.iter().map(|&i| v[i]).collect()),
        }
    }
}

/// A weighted sample `S = {(x_i, y_i)}` with labels in `{-1, +1}`, stored by column.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    schema: Schema,
    columns: Vec<Column>,
    labels: Vec<i8>,
    weights: Vec<f64>,
}

impl Sample {
    /// Builds a sample from columns; weights default to 1.
    pub fn new(schema: Schema, columns: Vec<Column>, labels: Vec<i8>) -> Result<Self, DataError> {
        if schema.features.len() != columns.len() {
            return Err(DataError::SchemaMismatch(format!(
                "{} features declared, {} columns given",
                schema.features.len(),
                columns.len()
            )));
        }
        if let Some(c) = columns.iter().find(|c| c.len() != labels.len()) {
            return Err(DataError::SchemaMismatch(format!(
                "column of length {} for {} labels",
                c.len(),
                labels.len()
            )));
        }
        for (spec, col) in schema.features.iter().zip(&columns) {
            let ok = matches!(
                (&spec.kind, col),
                (FeatureKind::Numeric, Column::Numeric(_))
                    | (FeatureKind::Categorical { .. }, Column::Categorical(_))
            );
            if !ok {
                return Err(DataError::SchemaMismatch(format!(
                    "column '{}' has the wrong kind",
                    spec.name
                )));
            }
        }
        if labels.iter().any(|&y| y != 1 && y != -1) {
            return Err(DataError::SchemaMismatch("labels must be +1 or -1".into()));
        }
        let m = labels.len();
        Ok(Sample {
            schema,
            columns,
            labels,
            weights: vec![1.0; m],
        })
    }

    /// Numeric-only sample from row vectors; features are named `x1, x2, …`.
    pub fn from_numeric_rows(rows: &[Vec<f64>], labels: Vec<i8>) -> Result<Self, DataError> {
        let d = rows.first().map_or(0, |r| r.len());
        let schema = Schema {
            features: (1..=d)
                .map(|j| FeatureSpec {
                    name: format!("x{j}"),
                    kind: FeatureKind::Numeric,
                })
                .collect(),
            label_column: "class".into(),
            positive_label: "+1".into(),
            negative_label: "-1".into(),
        };
        let columns = (0..d)
            .map(|j| Column::Numeric(rows.iter().map(|r| r[j]).collect()))
            .collect();
        Sample::new(schema, columns, labels)
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self, DataError> {
        self.set_weights(weights)?;
        Ok(self)
    }

    pub fn set_weights(&mut self, weights: Vec<f64>) -> Result<(), DataError> {
        if weights.len() != self.len() {
            return Err(DataError::InvalidWeights(format!(
                "{} weights for {} examples",
                weights.len(),
                self.len()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(DataError::InvalidWeights(
                "weights must be finite and nonnegative".into(),
            ));
        }
        if !(weights.iter().sum::<f64>() > 0.0) {
            return Err(DataError::InvalidWeights("total weight is zero".into()));
        }
        self.weights = weights;
        Ok(())
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &Column {
        &self.columns[j]
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn value(&self, i: usize, j: usize) -> Value {
        self.columns[j].get(i)
    }

    pub fn row(&self, i: usize) -> Vec<Value> {
        self.columns.iter().map(|c| c.get(i)).collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = Vec<Value>> + '_ {
        (0..self.len()).map(|i| self.row(i))
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|&&y| y == 1).count();
        (pos, self.len() - pos)
    }

    /// Examples at `idx`, in that order, with their weights.
    pub fn subset(&self, idx: &[usize]) -> Sample {
        Sample {
            schema: self.schema.clone(),
            columns: self.columns.iter().map(|c| c.select(idx)).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            weights: idx.iter().map(|&i| self.weights[i]).collect(),
        }
    }
}

fn read_records<R: Read>(reader: R) -> Result<(Vec<String>, Vec<csv::StringRecord>), DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    let records = rdr.records().collect::<Result<Vec<_>, _>>()?;
    Ok((header, records))
}

fn open(path: &Path) -> Result<std::fs::File, DataError> {
    std::fs::File::open(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Reads a headered CSV file. See [`read_csv`].
pub fn load_csv(
    path: impl AsRef<Path>,
    label_column: &str,
    positive_label: &str,
) -> Result<Sample, DataError> {
    read_csv(open(path.as_ref())?, label_column, positive_label)
}

/// Parses CSV text with a header row. A column is numeric when every cell
/// parses as `f64`, categorical otherwise. Rows are numbered from 1, not
/// counting the header.
pub fn read_csv<R: Read>(
    reader: R,
    label_column: &str,
    positive_label: &str,
) -> Result<Sample, DataError> {
    let (header, records) = read_records(reader)?;
    let label_idx = header
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| DataError::MissingLabelColumn(label_column.to_owned()))?;
    check_cells(&header, &records)?;

    let values: BTreeSet<&str> = records.iter().map(|r| &r[label_idx]).collect();
    let values: Vec<String> = values.into_iter().map(str::to_owned).collect();
    if values.len() != 2 {
        return Err(DataError::LabelCount {
            count: values.len(),
            values,
        });
    }
    if !values.iter().any(|v| v == positive_label) {
        return Err(DataError::PositiveLabelAbsent {
            positive: positive_label.to_owned(),
            values,
        });
    }
    let negative = values
        .iter()
        .find(|v| *v != positive_label)
        .unwrap()
        .clone();

    let features = header
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != label_idx)
        .map(|(j, name)| {
            let numeric = records
                .iter()
                .all(|r| r[j].parse::<f64>().is_ok_and(f64::is_finite));
            let kind = if numeric {
                FeatureKind::Numeric
            } else {
                let levels: BTreeSet<&str> = records.iter().map(|r| &r[j]).collect();
                FeatureKind::Categorical {
                    levels: levels.into_iter().map(str::to_owned).collect(),
                }
            };
            FeatureSpec {
                name: name.clone(),
                kind,
            }
        })
        .collect();
    let schema = Schema {
        features,
        label_column: label_column.to_owned(),
        positive_label: positive_label.to_owned(),
        negative_label: negative,
    };
    let sample = decode(&schema, &header, &records)?;
    if sample.len() < 2 {
        return Err(DataError::TooFewRows(sample.len()));
    }
    Ok(sample)
}

/// Reads a CSV file against an existing schema (same column names; the
/// label column may hold one or both labels). Unseen categories get codes
/// past the schema's levels.
pub fn load_csv_with_schema(path: impl AsRef<Path>, schema: &Schema) -> Result<Sample, DataError> {
    read_csv_with_schema(open(path.as_ref())?, schema)
}

pub fn read_csv_with_schema<R: Read>(reader: R, schema: &Schema) -> Result<Sample, DataError> {
    let (header, records) = read_records(reader)?;
    check_cells(&header, &records)?;
    decode(schema, &header, &records)
}

fn check_cells(header: &[String], records: &[csv::StringRecord]) -> Result<(), DataError> {
    for (i, r) in records.iter().enumerate() {
        for (j, cell) in r.iter().enumerate() {
            if cell.is_empty() {
                return Err(DataError::EmptyCell {
                    row: i + 1,
                    column: header[j].clone(),
                });
            }
        }
    }
    Ok(())
}

fn decode(
    schema: &Schema,
    header: &[String],
    records: &[csv::StringRecord],
) -> Result<Sample, DataError> {
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DataError::SchemaMismatch(format!("column '{name}' missing")))
    };
    let label_idx = find(&schema.label_column)?;
    let mut columns = Vec::with_capacity(schema.features.len());
    for spec in &schema.features {
        let j = find(&spec.name)?;
        columns.push(match &spec.kind {
            FeatureKind::Numeric => Column::Numeric(
                records
                    .iter()
                    .enumerate()
                    .map(|(i, r)| {
                        r[j].parse::<f64>()
                            .ok()
                            .filter(|v| v.is_finite())
                            .ok_or_else(|| DataError::NotNumeric {
                                row: i + 1,
                                column: spec.name.clone(),
                                value: r[j].to_owned(),
                            })
                    })
                    .collect::<Result<_, _>>()?,
            ),
            FeatureKind::Categorical { levels } => {
                let mut unseen: Vec<String> = Vec::new();
                let codes = records
                    .iter()
                    .map(|r| {
                        let v = &r[j];
                        match levels.binary_search_by(|l| l.as_str().cmp(v)) {
                            Ok(c) => c as u32,
                            Err(_) => {
                                let k = unseen.iter().position(|u| u == v).unwrap_or_else(|| {
                                    unseen.push(v.to_owned());
                                    unseen.len() - 1
                                });
                                (levels.len() + k) as u32
                            }
                        }
                    })
                    .collect();
                Column::Categorical(codes)
            }
        });
    }
    let labels = records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let v = &r[label_idx];
            if v == schema.positive_label {
                Ok(1)
            } else if v == schema.negative_label {
                Ok(-1)
            } else {
                Err(DataError::UnknownLabel {
                    row: i + 1,
                    value: v.to_owned(),
                    positive: schema.positive_label.clone(),
                    negative: schema.negative_label.clone(),
                })
            }
        })
        .collect::<Result<Vec<i8>, _>>()?;
    Sample::new(schema.clone(), columns, labels)
}

/// Assignment of every example to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub assignments: Vec<usize>,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] != fold)
            .collect()
    }
}

/// Stratified k-fold assignment: each class is shuffled with a ChaCha8 stream
/// seeded by `seed` and dealt round-robin, the dealing position carrying over
/// from the positive to the negative class. Per-fold class counts then differ
/// by at most one.
pub fn stratified_folds(sample: &Sample, k: usize, seed: u64) -> Result<FoldPlan, DataError> {
    if k < 2 {
        return Err(DataError::InvalidFoldCount(k));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignments = vec![0usize; sample.len()];
    let mut offset = 0;
    for label in [1i8, -1] {
        let mut idx: Vec<usize> = (0..sample.len())
            .filter(|&i| sample.labels[i] == label)
            .collect();
        if idx.len() < k {
            return Err(DataError::ClassTooSmall {
                label,
                count: idx.len(),
                k,
            });
        }
        idx.shuffle(&mut rng);
        for (j, &i) in idx.iter().enumerate() {
            assignments[i] = (offset + j) % k;
        }
        offset += idx.len();
    }
    Ok(FoldPlan {
        k,
        seed,
        assignments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_row_labels() {
        let s = read_csv("f,y\n1.5,a\n2.0,b\n".as_bytes(), "y", "a").unwrap();
        assert_eq!(s.labels(), &[1, -1]);
        assert_eq!(s.schema().features[0].kind, FeatureKind::Numeric);
        assert_eq!(s.value(1, 0), Value::Num(2.0));
        assert_eq!(s.weights(), &[1.0, 1.0]);
    }

    #[test]
    fn categorical_inference() {
        let s = read_csv("c,n,y\nred,1,p\nblue,2,n\nred,x3,p\n".as_bytes(), "y", "p").unwrap();
        let levels = |j: usize| match &s.schema().features[j].kind {
            FeatureKind::Categorical { levels } => levels.clone(),
            _ => vec![],
        };
        assert_eq!(levels(0), ["blue", "red"]);
        assert_eq!(levels(1), ["1", "2", "x3"]);
        assert_eq!(s.value(0, 0), Value::Cat(1));
    }

    #[test]
    fn empty_cell_names_location() {
        let e = read_csv("a,b,y\n1,2,p\n3,,n\n".as_bytes(), "y", "p").unwrap_err();
        match e {
            DataError::EmptyCell { row, column } => assert_eq!((row, column.as_str()), (2, "b")),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn label_checks() {
        assert!(matches!(
            read_csv("a,y\n1,p\n2,q\n3,r\n".as_bytes(), "y", "p"),
            Err(DataError::LabelCount { count: 3, .. })
        ));
        assert!(matches!(
            read_csv("a,y\n1,p\n2,q\n".as_bytes(), "y", "z"),
            Err(DataError::PositiveLabelAbsent { .. })
        ));
        assert!(matches!(
            read_csv("a,y\n1,p\n".as_bytes(), "z", "p"),
            Err(DataError::MissingLabelColumn(_))
        ));
    }

    #[test]
    fn schema_reload_maps_unseen_categories() {
        let s = read_csv("c,y\nu,p\nv,n\n".as_bytes(), "y", "p").unwrap();
        let t = read_csv_with_schema("y,c\nn,w\np,v\n".as_bytes(), s.schema()).unwrap();
        assert_eq!(t.labels(), &[-1, 1]);
        assert_eq!(t.value(0, 0), Value::Cat(2));
        assert_eq!(t.value(1, 0), Value::Cat(1));
        assert!(read_csv_with_schema("c,y\nu,q\n".as_bytes(), s.schema()).is_err());
    }

    fn balanced(pos: usize, neg: usize) -> Sample {
        let rows: Vec<Vec<f64>> = (0..pos + neg).map(|i| vec![i as f64]).collect();
        let labels = (0..pos + neg)
            .map(|i| if i < pos { 1 } else { -1 })
            .collect();
        Sample::from_numeric_rows(&rows, labels).unwrap()
    }

    #[test]
    fn folds_examples() {
        let s = balanced(10, 10);
        let plan = stratified_folds(&s, 2, 3).unwrap();
        for f in 0..2 {
            let idx = plan.test_indices(f);
            let pos = idx.iter().filter(|&&i| s.labels()[i] == 1).count();
            assert_eq!((pos, idx.len() - pos), (5, 5));
        }
        assert_eq!(plan, stratified_folds(&s, 2, 3).unwrap());
        assert!(matches!(
            stratified_folds(&balanced(9, 30), 10, 0),
            Err(DataError::ClassTooSmall { .. })
        ));
        assert!(stratified_folds(&s, 1, 0).is_err());
    }

    #[test]
    fn weights_validation() {
        let s = balanced(2, 2);
        assert!(s.clone().with_weights(vec![1.0, 0.0, 0.0, 0.0]).is_ok());
        assert!(s.clone().with_weights(vec![0.0; 4]).is_err());
        assert!(s.clone().with_weights(vec![1.0, -1.0, 1.0, 1.0]).is_err());
        assert!(s.with_weights(vec![1.0; 3]).is_err());
    }
}
