//! Named feature vectors and per-corpus feature tables.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureGroup {
    Lexical,
    Syntactic,
}

impl fmt::Display for FeatureGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureGroup::Lexical => "lexical",
            FeatureGroup::Syntactic => "syntactic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feature {
    pub name: String,
    pub group: FeatureGroup,
    /// `None` marks an undefined value (zero denominator, too few tokens).
    pub value: Option<f64>,
}

/// Ordered named features. Non-finite values are stored as absent.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    features: Vec<Feature>,
}

impl FeatureVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, group: FeatureGroup, value: Option<f64>) {
        let value = value.filter(|v| v.is_finite());
        self.features.push(Feature {
            name: name.into(),
            group,
            value,
        });
    }

    pub fn extend(&mut self, other: FeatureVector) {
        self.features.extend(other.features);
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Feature> {
        self.features.iter()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.features.iter().map(|f| f.name.as_str())
    }

    pub fn feature(&self, name: &str) -> Option<&Feature> {
        self.features.iter().find(|f| f.name == name)
    }

    /// Value of a feature; `None` when the feature is unknown or absent.
    pub fn value(&self, name: &str) -> Option<f64> {
        self.feature(name).and_then(|f| f.value)
    }
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("document {doc} has feature layout different from the first document")]
    Layout { doc: String },
    #[error("feature table has {rows} rows but {labels} labels")]
    Labels { rows: usize, labels: usize },
}

/// Feature values for every document of one corpus at one alteration level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureTable {
    pub alteration_level: u8,
    pub feature_names: Vec<String>,
    pub groups: Vec<FeatureGroup>,
    pub doc_ids: Vec<String>,
    /// Class index per document, in `0..2`.
    pub labels: Vec<usize>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl FeatureTable {
    pub fn from_vectors(
        alteration_level: u8,
        docs: Vec<(String, usize, FeatureVector)>,
    ) -> Result<Self, TableError> {
        let (feature_names, groups) = match docs.first() {
            Some((_, _, v)) => (
                v.names().map(str::to_string).collect::<Vec<_>>(),
                v.iter().map(|f| f.group).collect::<Vec<_>>(),
            ),
            None => (Vec::new(), Vec::new()),
        };
        let mut table = FeatureTable {
            alteration_level,
            feature_names,
            groups,
            doc_ids: Vec::with_capacity(docs.len()),
            labels: Vec::with_capacity(docs.len()),
            rows: Vec::with_capacity(docs.len()),
        };
        for (id, label, v) in docs {
            if v.len() != table.feature_names.len()
                || v.names().zip(&table.feature_names).any(|(a, b)| a != b)
            {
                return Err(TableError::Layout { doc: id });
            }
            table.rows.push(v.iter().map(|f| f.value).collect());
            table.doc_ids.push(id);
            table.labels.push(label);
        }
        Ok(table)
    }

    pub fn n_docs(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = Option<f64>> + '_ {
        self.rows.iter().map(move |r| r[j])
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n == name)
    }

    /// Keeps only the listed feature columns, in the given order.
    pub fn select(&self, names: &[&str]) -> Option<FeatureTable> {
        let idx: Option<Vec<usize>> = names.iter().map(|n| self.feature_index(n)).collect();
        let idx = idx?;
        Some(FeatureTable {
            alteration_level: self.alteration_level,
            feature_names: idx.iter().map(|&j| self.feature_names[j].clone()).collect(),
            groups: idx.iter().map(|&j| self.groups[j]).collect(),
            doc_ids: self.doc_ids.clone(),
            labels: self.labels.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| idx.iter().map(|&j| r[j]).collect())
                .collect(),
        })
    }

    /// Keeps the columns of one feature group.
    pub fn group(&self, group: FeatureGroup) -> FeatureTable {
        let names: Vec<&str> = self
            .feature_names
            .iter()
            .zip(&self.groups)
            .filter(|(_, g)| **g == group)
            .map(|(n, _)| n.as_str())
            .collect();
        self.select(&names).expect("names come from this table")
    }

    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self, TableError> {
        if labels.len() != self.rows.len() {
            return Err(TableError::Labels {
                rows: self.rows.len(),
                labels: labels.len(),
            });
        }
        self.labels = labels;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vector(a: f64, b: Option<f64>) -> FeatureVector {
        let mut v = FeatureVector::new();
        v.push("a", FeatureGroup::Lexical, Some(a));
        v.push("b", FeatureGroup::Syntactic, b);
        v
    }

    #[test]
    fn non_finite_values_become_absent() {
        let mut v = FeatureVector::new();
        v.push("x", FeatureGroup::Lexical, Some(f64::NAN));
        v.push("y", FeatureGroup::Lexical, Some(f64::INFINITY));
        assert_eq!(v.value("x"), None);
        assert_eq!(v.value("y"), None);
        assert!(serde_json::to_string(&v).unwrap().contains("null"));
    }

    #[test]
    fn table_layout_is_checked() {
        let t = FeatureTable::from_vectors(
            0,
            vec![("d1".into(), 0, vector(1.0, None)), ("d2".into(), 1, vector(2.0, Some(3.0)))],
        )
        .unwrap();
        assert_eq!(t.column(0).collect::<Vec<_>>(), vec![Some(1.0), Some(2.0)]);
        assert_eq!(t.group(FeatureGroup::Syntactic).feature_names, vec!["b"]);

        let mut odd = FeatureVector::new();
        odd.push("b", FeatureGroup::Lexical, None);
        let err = FeatureTable::from_vectors(0, vec![("d1".into(), 0, vector(1.0, None)), ("d2".into(), 0, odd)]);
        assert!(matches!(err, Err(TableError::Layout { .. })));
    }
}
