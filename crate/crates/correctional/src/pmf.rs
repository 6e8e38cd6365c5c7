//! Probability mass functions and discrepancy measures between them.

use crate::dataset::CountVector;
use crate::error::Error;

/// Tolerance on the sum of a probability vector.
pub const PMF_SUM_TOLERANCE: f64 = 1e-12;

/// Tolerance used when checking that a pmf lies on a `1/N` grid.
pub const GRID_TOLERANCE: f64 = 1e-9;

/// Probability mass function over a finite category set.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    /// Validates that entries are probabilities summing to one within
    /// [`PMF_SUM_TOLERANCE`].
    pub fn new(probs: Vec<f64>) -> Result<Self, Error> {
        if probs.is_empty() {
            return Err(Error::EmptyPmf);
        }
        for &value in &probs {
            if !value.is_finite() || !(0.0..=1.0 + PMF_SUM_TOLERANCE).contains(&value) {
                return Err(Error::InvalidProbability { value });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PMF_SUM_TOLERANCE {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self { probs })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.probs[index]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    /// Returns the integer counts `c` with `c_i = p_i * n` when this pmf lies
    /// on the `1/n` grid within [`GRID_TOLERANCE`], or `None` otherwise.
    pub fn grid_counts(&self, n: u64) -> Option<Vec<u64>> {
        let n_f = n as f64;
        let mut counts = Vec::with_capacity(self.probs.len());
        for &p in &self.probs {
            let scaled = p * n_f;
            let rounded = scaled.round();
            if (scaled - rounded).abs() > GRID_TOLERANCE || rounded < 0.0 {
                return None;
            }
            counts.push(rounded as u64);
        }
        if counts.iter().sum::<u64>() != n {
            return None;
        }
        Some(counts)
    }
}

/// Discrepancy between two probability vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscrepancyMeasure {
    /// Sum of absolute differences.
    L1,
    /// Euclidean distance.
    L2,
    /// Kullback-Leibler divergence of the second argument from the first
    /// (the first argument is the reference distribution).
    Kl,
}

/// Normalizes a histogram into its empirical pmf.
pub fn empirical_pmf(counts: &CountVector) -> Result<Pmf, Error> {
    let total = counts.total();
    if total == 0 {
        return Err(Error::ZeroTotal);
    }
    let n = total as f64;
    let probs = counts.as_slice().iter().map(|&c| c as f64 / n).collect();
    Pmf::new(probs)
}

/// Evaluates the discrepancy between `p` and `q` under `measure`.
///
/// For [`DiscrepancyMeasure::Kl`] this is `KL(q || p) = sum q_i ln(q_i / p_i)`
/// with `0 ln 0 = 0`; the result is infinite when `q` puts mass where `p`
/// has none.
pub fn discrepancy(p: &Pmf, q: &Pmf, measure: DiscrepancyMeasure) -> Result<f64, Error> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let mut acc = 0.0;
    for (&pi, &qi) in p.as_slice().iter().zip(q.as_slice()) {
        acc += discrepancy_term(pi, qi, measure);
    }
    Ok(match measure {
        DiscrepancyMeasure::L2 => acc.sqrt(),
        _ => acc,
    })
}

/// Per-category contribution to the discrepancy, before the final square root
/// in the L2 case. Exposed within the crate so the solver optimizes exactly
/// the same terms it reports.
pub(crate) fn discrepancy_term(pi: f64, qi: f64, measure: DiscrepancyMeasure) -> f64 {
    match measure {
        DiscrepancyMeasure::L1 => (pi - qi).abs(),
        DiscrepancyMeasure::L2 => {
            let d = pi - qi;
            d * d
        }
        DiscrepancyMeasure::Kl => {
            if qi == 0.0 {
                0.0
            } else if pi == 0.0 {
                f64::INFINITY
            } else {
                qi * (qi / pi).ln()
            }
        }
    }
}
