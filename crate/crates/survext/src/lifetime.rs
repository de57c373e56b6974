//! Grouped failure-time divergence analysis: pairwise symmetric
//! survival-extropy divergence between labeled lifetime groups.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::empirical::{
    estimate_symmetric_dsed, estimate_symmetric_sed, EmpiricalSample, EstimateError,
};

#[derive(Debug, Error)]
pub enum LifetimeError {
    #[error("cannot read `{path}`: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
    #[error("bad input schema: {0}")]
    Schema(String),
    #[error("group `{0}` needs at least 2 records")]
    GroupTooSmall(String),
}

/// Labeled lifetime records, in days.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LifetimeDataset {
    pub records: Vec<(String, f64)>,
    /// Rows discarded during ingestion (negative or non-numeric lifetimes).
    pub dropped: usize,
}

impl LifetimeDataset {
    /// Records bucketed by group label, sorted ascending within groups.
    pub fn groups(&self) -> BTreeMap<String, Vec<f64>> {
        let mut map: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for (label, life) in &self.records {
            map.entry(label.clone()).or_default().push(*life);
        }
        for v in map.values_mut() {
            v.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        }
        map
    }
}

/// Load a lifetime CSV, dropping invalid rows (counted, not fatal).
pub fn ingest(
    path: &Path,
    group_column: &str,
    lifetime_column: &str,
) -> Result<LifetimeDataset, LifetimeError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => LifetimeError::File {
            path: path.display().to_string(),
            source: std::io::Error::other(e.to_string()),
        },
        _ => LifetimeError::Schema(e.to_string()),
    })?;
    let headers = reader
        .headers()
        .map_err(|e| LifetimeError::Schema(e.to_string()))?
        .clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
            .ok_or_else(|| LifetimeError::Schema(format!("missing column `{name}`")))
    };
    let group_idx = find(group_column)?;
    let lifetime_idx = find(lifetime_column)?;

    let mut records = Vec::new();
    let mut dropped = 0usize;
    for row in reader.records() {
        let row = row.map_err(|e| LifetimeError::Schema(e.to_string()))?;
        let group = match row.get(group_idx) {
            Some(g) if !g.trim().is_empty() => g.trim().to_string(),
            _ => {
                dropped += 1;
                continue;
            }
        };
        match row.get(lifetime_idx).and_then(|v| v.trim().parse::<f64>().ok()) {
            Some(v) if v.is_finite() && v >= 0.0 => records.push((group, v)),
            _ => dropped += 1,
        }
    }
    if records.is_empty() {
        return Err(LifetimeError::Schema("no usable rows".into()));
    }
    Ok(LifetimeDataset { records, dropped })
}

/// The symmetric divergence to compute between groups.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DivergenceMeasure {
    /// Static symmetric survival extropy divergence.
    Ssj,
    /// Dynamic symmetric divergence at truncation age t.
    SsjDynamic { t: f64 },
}

impl DivergenceMeasure {
    pub fn name(&self) -> String {
        match self {
            DivergenceMeasure::Ssj => "SSJ".to_string(),
            DivergenceMeasure::SsjDynamic { t } => format!("SSJ_dynamic(t={t})"),
        }
    }
}

/// Square matrix of pairwise symmetric divergence estimates. Cells where
/// the dynamic measure is undefined (empirical survival zero at t) are
/// `None`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DivergenceMatrix {
    pub labels: Vec<String>,
    pub values: Vec<Vec<Option<f64>>>,
    pub measure: DivergenceMeasure,
}

impl DivergenceMatrix {
    /// Label with the highest mean off-diagonal divergence magnitude, or
    /// `None` when every defined cell is zero.
    pub fn most_divergent(&self) -> Option<String> {
        let k = self.labels.len();
        let mut best: Option<(f64, usize)> = None;
        let mut any_nonzero = false;
        for i in 0..k {
            let mut acc = 0.0;
            let mut count = 0usize;
            for j in 0..k {
                if i == j {
                    continue;
                }
                if let Some(v) = self.values[i][j] {
                    acc += v.abs();
                    count += 1;
                    if v != 0.0 {
                        any_nonzero = true;
                    }
                }
            }
            if count > 0 {
                let mean = acc / count as f64;
                if best.map_or(true, |(b, _)| mean > b) {
                    best = Some((mean, i));
                }
            }
        }
        if !any_nonzero {
            return None;
        }
        best.map(|(_, i)| self.labels[i].clone())
    }
}

/// All pairwise symmetric divergences between the dataset's groups.
pub fn divergence_matrix(
    dataset: &LifetimeDataset,
    measure: DivergenceMeasure,
) -> Result<DivergenceMatrix, LifetimeError> {
    let groups = dataset.groups();
    let mut labels = Vec::new();
    let mut samples = Vec::new();
    for (label, values) in groups {
        let sample = EmpiricalSample::new(values)
            .map_err(|_| LifetimeError::GroupTooSmall(label.clone()))?;
        labels.push(label);
        samples.push(sample);
    }
    let k = labels.len();
    let mut values = vec![vec![Some(0.0); k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let cell = match measure {
                DivergenceMeasure::Ssj => Some(estimate_symmetric_sed(&samples[i], &samples[j])),
                DivergenceMeasure::SsjDynamic { t } => {
                    match estimate_symmetric_dsed(&samples[i], &samples[j], t) {
                        Ok(v) => Some(v),
                        Err(EstimateError::ZeroSurvivalAtT { .. }) => None,
                        Err(_) => None,
                    }
                }
            };
            values[i][j] = cell;
            values[j][i] = cell;
        }
    }
    Ok(DivergenceMatrix {
        labels,
        values,
        measure,
    })
}

/// A rendered multi-section report over one or more divergence matrices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub sections: Vec<DivergenceSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DivergenceSection {
    pub measure: String,
    pub labels: Vec<String>,
    pub values: Vec<Vec<Option<f64>>>,
    pub most_divergent: Option<String>,
}

pub fn divergence_report(matrices: &[DivergenceMatrix]) -> DivergenceReport {
    DivergenceReport {
        sections: matrices
            .iter()
            .map(|m| DivergenceSection {
                measure: m.measure.name(),
                labels: m.labels.clone(),
                values: m.values.clone(),
                most_divergent: m.most_divergent(),
            })
            .collect(),
    }
}

impl DivergenceReport {
    /// CSV rendering: one row per cell, sectioned by measure.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("measure,group_a,group_b,value\n");
        for section in &self.sections {
            for (i, a) in section.labels.iter().enumerate() {
                for (j, b) in section.labels.iter().enumerate() {
                    let cell = match section.values[i][j] {
                        Some(v) => format!("{v:.17e}"),
                        None => "NA".to_string(),
                    };
                    out.push_str(&format!("{},{a},{b},{cell}\n", section.measure));
                }
            }
            out.push_str(&format!(
                "{},most_divergent,,{}\n",
                section.measure,
                section.most_divergent.as_deref().unwrap_or("none")
            ));
        }
        out
    }
}
