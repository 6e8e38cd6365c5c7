//! Observation sequences over a finite category set, and their histograms.

use crate::error::Error;

/// Ordered sequence of categorical observations.
///
/// Values are 1-based category indices in `1..=num_categories`. The sequence
/// order matters when individual observations are relabeled; the histogram
/// alone does not capture it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationDataset {
    values: Vec<u32>,
    num_categories: u32,
}

impl ObservationDataset {
    pub fn new(values: Vec<u32>, num_categories: u32) -> Result<Self, Error> {
        if values.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if num_categories < 2 {
            return Err(Error::TooFewCategories {
                found: num_categories,
            });
        }
        for &value in &values {
            if value < 1 || value > num_categories {
                return Err(Error::ValueOutOfRange {
                    value,
                    num_categories,
                });
            }
        }
        Ok(Self {
            values,
            num_categories,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn num_categories(&self) -> u32 {
        self.num_categories
    }
}

/// Histogram of category counts. Entry `i` (0-based) counts category `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountVector {
    counts: Vec<u64>,
}

impl CountVector {
    pub fn new(counts: Vec<u64>) -> Result<Self, Error> {
        if counts.is_empty() {
            return Err(Error::EmptyHistogram);
        }
        Ok(Self { counts })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn get(&self, index: usize) -> u64 {
        self.counts[index]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.counts
    }
}

/// Tallies a dataset into its category histogram.
pub fn counts_from_dataset(dataset: &ObservationDataset) -> CountVector {
    let mut counts = vec![0u64; dataset.num_categories() as usize];
    for &value in dataset.values() {
        counts[(value - 1) as usize] += 1;
    }
    CountVector { counts }
}
