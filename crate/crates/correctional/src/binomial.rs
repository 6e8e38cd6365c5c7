//! Closed-form finite-sample behavior of correction for two-category data.
//!
//! With observations in `{0, 1}`, the success count `X` is binomial. A
//! teacher with budget `b` moves the realized count toward its expectation
//! `N * theta0` by at most `b`, which pushes the estimator `X / N` toward
//! `theta0` and reduces its variance. The distribution of the corrected
//! count, its moments, and the resulting variance reduction all have closed
//! forms when `N * theta0` is an integer; an enumeration oracle provides an
//! independent check.

use crate::error::Error;

/// Tolerance for deciding that `N * theta0` is an integer.
pub const MEAN_INTEGRALITY_TOLERANCE: f64 = 1e-9;

/// Largest trial count the enumeration oracle accepts (2^N outcome sequences).
const ORACLE_MAX_TRIALS: u64 = 22;

/// A binomial correction scenario: `n` trials with success probability
/// `theta0`, corrected by a teacher with budget `budget <= n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinomialTheory {
    n: u64,
    theta0: f64,
    budget: u64,
}

/// Distribution of the corrected success count, indexed by `0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectedPmf {
    probs: Vec<f64>,
}

/// First two moments of the estimator `corrected count / n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorMoments {
    pub mean: f64,
    pub variance: f64,
}

impl BinomialTheory {
    pub fn new(n: u64, theta0: f64, budget: u64) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::ZeroTrials);
        }
        if !(0.0..=1.0).contains(&theta0) {
            return Err(Error::InvalidProbability { value: theta0 });
        }
        if budget > n {
            return Err(Error::BudgetTooLarge { budget, trials: n });
        }
        Ok(Self { n, theta0, budget })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    fn integral_mean(&self) -> Result<u64, Error> {
        let mean = self.n as f64 * self.theta0;
        let rounded = mean.round();
        if (mean - rounded).abs() > MEAN_INTEGRALITY_TOLERANCE {
            return Err(Error::NonIntegerMean { mean });
        }
        Ok(rounded as u64)
    }

    /// Distribution of the corrected success count.
    ///
    /// Mass from counts within `budget` of the expectation collapses onto the
    /// expectation; counts further away move `budget` steps toward it. The
    /// center entry takes all remaining mass, so a full budget yields an
    /// exact point mass. Requires `n * theta0` to be an integer.
    pub fn corrected_pmf(&self) -> Result<CorrectedPmf, Error> {
        let center = self.integral_mean()?;
        let weights = binomial_pmf(self.n, self.theta0);
        let n = self.n;
        let b = self.budget;
        let mut probs = vec![0.0f64; (n + 1) as usize];
        let mut flank_mass = 0.0f64;
        for x_new in 0..=n {
            if x_new == center {
                continue;
            }
            let source = if x_new < center {
                // Moved up by the full budget: only reachable from x_new - b.
                x_new.checked_sub(b)
            } else {
                // Moved down by the full budget: only reachable from x_new + b.
                let s = x_new + b;
                (s <= n).then_some(s)
            };
            if let Some(x_old) = source {
                let w = weights[x_old as usize];
                probs[x_new as usize] = w;
                flank_mass += w;
            }
        }
        probs[center as usize] = 1.0 - flank_mass;
        let pmf = CorrectedPmf { probs };
        debug_assert!((pmf.total_mass() - 1.0).abs() <= 1e-12);
        Ok(pmf)
    }

    /// Independent check of [`Self::corrected_pmf`] by direct enumeration.
    ///
    /// Walks every possible success count with its binomial weight and
    /// applies the greedy correction rule. Unlike the closed form, this
    /// accepts any `theta0`, rounding the target count to the nearest
    /// integer (ties away from zero). Limited to `n <= 22`.
    pub fn corrected_pmf_oracle(&self) -> Result<CorrectedPmf, Error> {
        if self.n > ORACLE_MAX_TRIALS {
            return Err(Error::EnumerationTooLarge {
                size: 1u128 << self.n.min(127),
                limit: 1u128 << ORACLE_MAX_TRIALS,
            });
        }
        let weights = binomial_pmf(self.n, self.theta0);
        let mut probs = vec![0.0f64; (self.n + 1) as usize];
        for x in 0..=self.n {
            let corrected = greedy_corrected_successes(x, self.n, self.theta0, self.budget);
            probs[corrected as usize] += weights[x as usize];
        }
        Ok(CorrectedPmf { probs })
    }

    /// Reduction in estimator variance achieved by the correction:
    /// uncorrected variance minus corrected variance. Zero when the budget
    /// is zero, and equal to the full uncorrected variance at `budget = n`.
    pub fn delta_reduction(&self) -> Result<f64, Error> {
        let corrected = self.corrected_pmf()?.estimator_moments(self.n).variance;
        Ok(variance_uncorrected(self.n, self.theta0) - corrected)
    }

    /// Ratio of corrected to uncorrected estimator variance, in `[0, 1]`.
    ///
    /// Both variances come from the same moment evaluation over corrected
    /// distributions (the denominator is the zero-budget case), so the ratio
    /// is exactly 1 with no budget and exactly 0 with a full budget.
    /// Undefined for `theta0` in `{0, 1}`.
    pub fn variance_ratio(&self) -> Result<f64, Error> {
        if self.theta0 <= 0.0 || self.theta0 >= 1.0 {
            return Err(Error::DegenerateTheta {
                theta0: self.theta0,
            });
        }
        let corrected = self.corrected_pmf()?.estimator_moments(self.n).variance;
        let baseline = BinomialTheory::new(self.n, self.theta0, 0)?
            .corrected_pmf()?
            .estimator_moments(self.n)
            .variance;
        Ok(corrected / baseline)
    }
}

impl CorrectedPmf {
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, count: u64) -> f64 {
        self.probs[count as usize]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Mean and variance of the estimator `count / n` under this pmf.
    pub fn estimator_moments(&self, n: u64) -> EstimatorMoments {
        let mut first = 0.0f64;
        let mut second = 0.0f64;
        for (x, &p) in self.probs.iter().enumerate() {
            let x = x as f64;
            first += x * p;
            second += x * x * p;
        }
        let n = n as f64;
        EstimatorMoments {
            mean: first / n,
            variance: (second - first * first) / (n * n),
        }
    }
}

/// Variance of the unmodified estimator: `theta0 (1 - theta0) / n`.
pub fn variance_uncorrected(n: u64, theta0: f64) -> f64 {
    theta0 * (1.0 - theta0) / n as f64
}

/// Probability mass function of a binomial count, indexed by `0..=n`.
///
/// Coefficients come from a Pascal-row accumulation, which is exact in
/// double precision for every `n` used here.
pub fn binomial_pmf(n: u64, theta0: f64) -> Vec<f64> {
    let len = (n + 1) as usize;
    let mut coeff = vec![0.0f64; len];
    coeff[0] = 1.0;
    for row in 1..len {
        for k in (1..=row).rev() {
            coeff[k] += coeff[k - 1];
        }
    }
    (0..len)
        .map(|x| coeff[x] * theta0.powi(x as i32) * (1.0 - theta0).powi((len - 1 - x) as i32))
        .collect()
}

/// Greedy correction of an observed success count: move `x` toward the
/// target `round(n * theta0)` by at most `budget`.
pub fn greedy_corrected_successes(x: u64, n: u64, theta0: f64, budget: u64) -> u64 {
    let target = (n as f64 * theta0).round() as u64;
    if x < target {
        x + budget.min(target - x)
    } else {
        x - budget.min(x - target)
    }
}
