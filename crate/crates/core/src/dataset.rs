//! Delimited dataset ingestion.
//!
//! Expected layout: a header row, first column the sample id, last column
//! the target unless the dataset is loaded as unlabeled. The delimiter (tab
//! or comma) is auto-detected from the header. Every feature cell must
//! parse as a real number; errors name the offending line and column.

use std::path::Path;

use crate::error::{HdcError, Result};

/// Per-row target of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Labels(Vec<String>),
    Values(Vec<f64>),
    None,
}

/// What the last column holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    Classification,
    Regression,
    Unlabeled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub sample_ids: Vec<String>,
    pub feature_names: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
    pub target: Target,
}

impl Dataset {
    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn labels(&self) -> Result<&[String]> {
        match &self.target {
            Target::Labels(l) => Ok(l),
            _ => Err(HdcError::InvalidInput("dataset has no class labels".into())),
        }
    }

    pub fn values(&self) -> Result<&[f64]> {
        match &self.target {
            Target::Values(v) => Ok(v),
            _ => Err(HdcError::InvalidInput(
                "dataset has no numeric targets".into(),
            )),
        }
    }
}

pub fn load_dataset(path: impl AsRef<Path>, kind: TargetKind) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)?;
    parse_dataset(&text, kind)
}

pub fn parse_dataset(text: &str, kind: TargetKind) -> Result<Dataset> {
    let mut lines = text
        .lines()
        .map(|l| l.trim_end_matches('\r'))
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());

    let (_, header) = lines
        .next()
        .ok_or(HdcError::EmptyInput("dataset file is empty"))?;
    let delimiter = if header.contains('\t') { '\t' } else { ',' };
    let columns: Vec<&str> = header.split(delimiter).collect();
    let has_target = kind != TargetKind::Unlabeled;
    let min_columns = if has_target { 3 } else { 2 };
    if columns.len() < min_columns {
        return Err(HdcError::Parse {
            line: 1,
            column: columns.len(),
            message: format!(
                "header has {} columns, need at least {min_columns} (id, features{})",
                columns.len(),
                if has_target { ", target" } else { "" }
            ),
        });
    }
    let feature_end = if has_target {
        columns.len() - 1
    } else {
        columns.len()
    };
    let feature_names: Vec<String> = columns[1..feature_end]
        .iter()
        .map(|s| s.to_string())
        .collect();

    let mut sample_ids = Vec::new();
    let mut matrix = Vec::new();
    let mut labels = Vec::new();
    let mut values = Vec::new();

    for (lineno, line) in lines {
        let fields: Vec<&str> = line.split(delimiter).collect();
        if fields.len() != columns.len() {
            return Err(HdcError::Parse {
                line: lineno + 1,
                column: fields.len(),
                message: format!(
                    "ragged row: {} fields, header has {}",
                    fields.len(),
                    columns.len()
                ),
            });
        }
        sample_ids.push(fields[0].to_string());
        let mut row = Vec::with_capacity(feature_names.len());
        for (col, cell) in fields[1..feature_end].iter().enumerate() {
            let value: f64 = cell.trim().parse().map_err(|_| HdcError::Parse {
                line: lineno + 1,
                column: col + 2,
                message: format!(
                    "non-numeric value {:?} in feature column {:?}",
                    cell, feature_names[col]
                ),
            })?;
            row.push(value);
        }
        matrix.push(row);
        match kind {
            TargetKind::Classification => labels.push(fields[feature_end].to_string()),
            TargetKind::Regression => {
                let cell = fields[feature_end];
                let value: f64 = cell.trim().parse().map_err(|_| HdcError::Parse {
                    line: lineno + 1,
                    column: columns.len(),
                    message: format!("non-numeric target {:?}", cell),
                })?;
                values.push(value);
            }
            TargetKind::Unlabeled => {}
        }
    }

    if matrix.is_empty() {
        return Err(HdcError::EmptyInput("dataset has a header but no rows"));
    }

    let target = match kind {
        TargetKind::Classification => Target::Labels(labels),
        TargetKind::Regression => Target::Values(values),
        TargetKind::Unlabeled => Target::None,
    };
    Ok(Dataset {
        sample_ids,
        feature_names,
        matrix,
        target,
    })
}
