use serde::{Deserialize, Serialize};

use crate::error::{HgnnError, Result};

/// Integer class per vertex, with the number of classes fixed up front.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector {
    labels: Vec<usize>,
    n_classes: usize,
}

impl LabelVector {
    pub fn new(labels: Vec<usize>, n_classes: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l >= n_classes) {
            return Err(HgnnError::InvalidLabel {
                label: bad,
                n_classes,
            });
        }
        Ok(LabelVector { labels, n_classes })
    }

    /// Number of classes taken as one past the largest label.
    pub fn from_labels(labels: Vec<usize>) -> Self {
        let n_classes = labels.iter().max().map_or(0, |m| m + 1);
        LabelVector { labels, n_classes }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn get(&self, i: usize) -> usize {
        self.labels[i]
    }
}

/// Disjoint train / validation / test vertex sets, each ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

impl SplitSpec {
    /// Sorts each set and checks bounds and pairwise disjointness.
    pub fn new(
        mut train: Vec<usize>,
        mut validation: Vec<usize>,
        mut test: Vec<usize>,
        n_vertices: usize,
    ) -> Result<Self> {
        train.sort_unstable();
        validation.sort_unstable();
        test.sort_unstable();
        let split = SplitSpec {
            train,
            validation,
            test,
        };
        split.validate(n_vertices)?;
        Ok(split)
    }

    pub fn validate(&self, n_vertices: usize) -> Result<()> {
        let mut seen = vec![false; n_vertices];
        for set in [&self.train, &self.validation, &self.test] {
            for &v in set {
                if v >= n_vertices {
                    return Err(HgnnError::SplitOutOfRange {
                        index: v,
                        n_vertices,
                    });
                }
                if seen[v] {
                    return Err(HgnnError::DisjointnessViolation { vertex: v });
                }
                seen[v] = true;
            }
        }
        Ok(())
    }

    pub fn by_name(&self, name: &str) -> Option<&[usize]> {
        match name {
            "train" => Some(&self.train),
            "validation" | "val" => Some(&self.validation),
            "test" => Some(&self.test),
            _ => None,
        }
    }
}
