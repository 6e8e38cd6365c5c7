//! Deterministic Monte Carlo harness.
//!
//! Two experiments with machine-readable CSV output and theoretical columns
//! recomputed from the closed forms on every run:
//!
//! * variance: estimator variance across seeded replicates versus trial
//!   count, for several budgets, against the corrected-pmf prediction;
//! * budget: exact correction error versus budget for a fixed instance,
//!   against the closed-form error curve.
//!
//! Replicate `r` is seeded by `mix_seed(master_seed, r)`, so results are
//! byte-identical regardless of how many workers execute the replicates.

use crate::binomial::{greedy_corrected_successes, variance_uncorrected, BinomialTheory};
use crate::dataset::{counts_from_dataset, CountVector, ObservationDataset};
use crate::error::Error;
use crate::pmf::{discrepancy, empirical_pmf, DiscrepancyMeasure, Pmf};
use crate::rng::{mix_seed, SplitMix64};
use crate::solver::{
    min_budget, min_error, predicted_error, solve_exact, CorrectionProblem, Direction,
};
use crate::transport::CostModel;

/// Configuration of the variance experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceExperimentConfig {
    pub theta0: f64,
    pub n_values: Vec<u64>,
    pub budgets: Vec<u64>,
    pub replicates: u64,
    pub master_seed: u64,
}

impl Default for VarianceExperimentConfig {
    /// Desk-scale defaults: success probability 0.4 over a trial grid where
    /// the expected count is integral, budgets 0..2, 200 replicates.
    fn default() -> Self {
        Self {
            theta0: 0.4,
            n_values: vec![5, 10, 15, 20, 25, 30],
            budgets: vec![0, 1, 2],
            replicates: 200,
            master_seed: 1,
        }
    }
}

impl VarianceExperimentConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if !(0.0..=1.0).contains(&self.theta0) {
            return Err(Error::InvalidProbability { value: self.theta0 });
        }
        if self.n_values.is_empty() {
            return Err(Error::InvalidConfig {
                message: "n_values must not be empty".into(),
            });
        }
        if self.n_values.contains(&0) {
            return Err(Error::InvalidConfig {
                message: "n_values must be positive".into(),
            });
        }
        if self.budgets.is_empty() {
            return Err(Error::InvalidConfig {
                message: "budgets must not be empty".into(),
            });
        }
        if self.replicates == 0 {
            return Err(Error::InvalidConfig {
                message: "replicates must be at least 1".into(),
            });
        }
        Ok(())
    }
}

/// Configuration of the budget experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetExperimentConfig {
    pub p0: Pmf,
    pub initial_counts: CountVector,
    pub budgets: Vec<u64>,
    pub cost_model: CostModel,
    pub discrepancy: DiscrepancyMeasure,
}

impl Default for BudgetExperimentConfig {
    /// A three-category instance with 17 observations whose true
    /// distribution sits off the count grid, so the error plateaus at a
    /// small positive value.
    fn default() -> Self {
        Self {
            p0: Pmf::new(vec![0.12, 0.63, 0.25]).expect("static default"),
            initial_counts: CountVector::new(vec![3, 9, 5]).expect("static default"),
            budgets: (0..=6).collect(),
            cost_model: CostModel::ChangeCount,
            discrepancy: DiscrepancyMeasure::L1,
        }
    }
}

impl BudgetExperimentConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.p0.len() != self.initial_counts.len() {
            return Err(Error::DimensionMismatch {
                left: self.p0.len(),
                right: self.initial_counts.len(),
            });
        }
        if self.initial_counts.total() == 0 {
            return Err(Error::ZeroTotal);
        }
        if self.budgets.is_empty() {
            return Err(Error::InvalidConfig {
                message: "budgets must not be empty".into(),
            });
        }
        Ok(())
    }
}

/// One table cell; `Empty` renders as an empty CSV field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Empty,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Int(v) => Some(v as f64),
            Cell::Float(v) => Some(v),
            Cell::Empty => None,
        }
    }

    fn render(&self) -> String {
        match *self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v}"),
            Cell::Empty => String::new(),
        }
    }
}

/// Result table of an experiment: a config echo, a header row and data rows.
///
/// Theoretical columns are recomputed from the closed forms at table-build
/// time, never cached. `to_csv` is deterministic: the same table always
/// renders the same bytes.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentTable {
    pub metadata: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl ExperimentTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.metadata {
            out.push_str(&format!("# {key} = {value}\n"));
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &std::path::Path) -> Result<(), Error> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::Io {
            message: format!("{}: {e}", path.display()),
        })
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Numeric view of a column; `None` entries are skipped.
    pub fn column_f64(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let idx = self.column_index(name)?;
        Some(self.rows.iter().map(|row| row[idx].as_f64()).collect())
    }
}

/// Draws `n >= 1` observations i.i.d. from `p` by inverse-CDF sampling over
/// a SplitMix64 stream. Identical `(p, n, seed)` give identical output on
/// every platform. `p` must cover at least two categories.
pub fn sample_dataset(p: &Pmf, n: u64, seed: u64) -> ObservationDataset {
    let mut rng = SplitMix64::new(seed);
    let mut cdf = Vec::with_capacity(p.len());
    let mut acc = 0.0;
    for &prob in p.as_slice() {
        acc += prob;
        cdf.push(acc);
    }
    let last = p.len() as u32;
    let values = (0..n)
        .map(|_| {
            let u = rng.next_f64();
            cdf.iter()
                .position(|&c| u < c)
                .map(|i| (i + 1) as u32)
                .unwrap_or(last)
        })
        .collect();
    ObservationDataset::new(values, p.len() as u32).expect("pmf has at least two categories")
}

fn bernoulli_pmf(theta0: f64) -> Pmf {
    Pmf::new(vec![1.0 - theta0, theta0]).expect("two-point pmf")
}

/// Corrected estimate for one replicate: sample, count successes
/// (category 2), correct greedily toward the expectation.
fn replicate_estimate(theta0: f64, n: u64, budget: u64, seed: u64) -> f64 {
    let dataset = sample_dataset(&bernoulli_pmf(theta0), n, seed);
    let counts = counts_from_dataset(&dataset);
    let successes = counts.get(1);
    let corrected = greedy_corrected_successes(successes, n, theta0, budget.min(n));
    corrected as f64 / n as f64
}

/// Computes the per-replicate estimates in replicate order, optionally
/// spreading the work over several threads. The output is identical for any
/// worker count because each replicate depends only on its own seed.
fn replicate_estimates(
    theta0: f64,
    n: u64,
    budget: u64,
    replicates: u64,
    master_seed: u64,
    workers: usize,
) -> Vec<f64> {
    let count = replicates as usize;
    let mut estimates = vec![0.0f64; count];
    let workers = workers.max(1).min(count.max(1));
    if workers == 1 {
        for (r, slot) in estimates.iter_mut().enumerate() {
            *slot = replicate_estimate(theta0, n, budget, mix_seed(master_seed, r as u64));
        }
        return estimates;
    }
    let chunk = count.div_ceil(workers);
    std::thread::scope(|scope| {
        for (chunk_index, slots) in estimates.chunks_mut(chunk).enumerate() {
            let base = chunk_index * chunk;
            scope.spawn(move || {
                for (offset, slot) in slots.iter_mut().enumerate() {
                    let r = (base + offset) as u64;
                    *slot = replicate_estimate(theta0, n, budget, mix_seed(master_seed, r));
                }
            });
        }
    });
    estimates
}

/// Unbiased sample variance plus the standard error of that variance
/// estimate, from the sample fourth moment.
pub fn variance_with_stderr(samples: &[f64]) -> (f64, f64) {
    let count = samples.len();
    if count < 2 {
        return (0.0, 0.0);
    }
    let r = count as f64;
    // Mean via deviations from the first sample, so a constant sequence has
    // an exactly zero variance.
    let shift = samples[0];
    let mean = shift + samples.iter().map(|&x| x - shift).sum::<f64>() / r;
    let mut sum_sq = 0.0;
    let mut sum_quad = 0.0;
    for &x in samples {
        let d = x - mean;
        sum_sq += d * d;
        sum_quad += d * d * d * d;
    }
    let variance = sum_sq / (r - 1.0);
    let fourth = sum_quad / r;
    let var_of_var = (fourth - variance * variance * (r - 3.0) / (r - 1.0)) / r;
    (variance, var_of_var.max(0.0).sqrt())
}

/// Runs the variance experiment.
///
/// For every `(n, budget)` grid point: draw `replicates` datasets, correct
/// each greedily, and record the spread of the corrected estimate next to
/// the closed-form prediction (present when `n * theta0` is integral) and
/// the unmodified-estimator variance.
pub fn run_variance_experiment(
    cfg: &VarianceExperimentConfig,
    workers: usize,
) -> Result<ExperimentTable, Error> {
    cfg.validate()?;
    let metadata = vec![
        ("experiment".into(), "variance".into()),
        ("theta0".into(), format!("{}", cfg.theta0)),
        ("n_values".into(), join_u64(&cfg.n_values)),
        ("budgets".into(), join_u64(&cfg.budgets)),
        ("replicates".into(), cfg.replicates.to_string()),
        ("master_seed".into(), cfg.master_seed.to_string()),
    ];
    let header = [
        "N",
        "b",
        "var_empirical",
        "var_theoretical",
        "var_uncorrected_theoretical",
        "stderr",
        "replicates",
        "seed",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();

    let mut rows = Vec::new();
    for &n in &cfg.n_values {
        for &budget in &cfg.budgets {
            let estimates = replicate_estimates(
                cfg.theta0,
                n,
                budget,
                cfg.replicates,
                cfg.master_seed,
                workers,
            );
            let (var_empirical, stderr) = variance_with_stderr(&estimates);
            let theoretical = BinomialTheory::new(n, cfg.theta0, budget.min(n))
                .and_then(|t| t.corrected_pmf())
                .map(|pmf| pmf.estimator_moments(n).variance);
            let theoretical_cell = match theoretical {
                Ok(v) => Cell::Float(v),
                Err(Error::NonIntegerMean { .. }) => Cell::Empty,
                Err(e) => return Err(e),
            };
            rows.push(vec![
                Cell::Int(n),
                Cell::Int(budget),
                Cell::Float(var_empirical),
                theoretical_cell,
                Cell::Float(variance_uncorrected(n, cfg.theta0)),
                Cell::Float(stderr),
                Cell::Int(cfg.replicates),
                Cell::Int(cfg.master_seed),
            ]);
        }
    }
    Ok(ExperimentTable {
        metadata,
        header,
        rows,
    })
}

/// Runs the budget experiment: solves the correction problem exactly for
/// each budget and records the achieved error next to the closed-form
/// prediction, the minimum error and the minimum budget.
pub fn run_budget_experiment(cfg: &BudgetExperimentConfig) -> Result<ExperimentTable, Error> {
    cfg.validate()?;
    let n = cfg.initial_counts.total();
    let observed = empirical_pmf(&cfg.initial_counts)?;
    let err_uncorrected = discrepancy(&cfg.p0, &observed, cfg.discrepancy)?;
    let (e_min, _) = min_error(n, &cfg.p0);
    let b_min = min_budget(n, &cfg.p0, &observed)?;

    let metadata = vec![
        ("experiment".into(), "budget".into()),
        ("p0".into(), join_f64(cfg.p0.as_slice())),
        ("counts".into(), join_u64(cfg.initial_counts.as_slice())),
        ("n".into(), n.to_string()),
        ("budgets".into(), join_u64(&cfg.budgets)),
        ("cost_model".into(), cost_model_name(cfg.cost_model).into()),
        (
            "discrepancy".into(),
            discrepancy_name(cfg.discrepancy).into(),
        ),
    ];
    let header = [
        "b",
        "err_uncorrected",
        "err_corrected",
        "err_predicted",
        "e_min",
        "b_min",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();

    let mut rows = Vec::new();
    for &budget in &cfg.budgets {
        let problem = CorrectionProblem {
            p0: cfg.p0.clone(),
            counts: cfg.initial_counts.clone(),
            budget,
            cost_model: cfg.cost_model,
            discrepancy: cfg.discrepancy,
            direction: Direction::Cooperative,
        };
        let solution = solve_exact(&problem)?;
        let predicted = predicted_error(n, &cfg.p0, budget, &observed)?;
        rows.push(vec![
            Cell::Int(budget),
            Cell::Float(err_uncorrected),
            Cell::Float(solution.objective),
            Cell::Float(predicted),
            Cell::Float(e_min),
            Cell::Int(b_min),
        ]);
    }
    Ok(ExperimentTable {
        metadata,
        header,
        rows,
    })
}

pub(crate) fn cost_model_name(model: CostModel) -> &'static str {
    match model {
        CostModel::ValueDistance => "value",
        CostModel::ChangeCount => "count",
    }
}

pub(crate) fn discrepancy_name(measure: DiscrepancyMeasure) -> &'static str {
    match measure {
        DiscrepancyMeasure::L1 => "l1",
        DiscrepancyMeasure::L2 => "l2",
        DiscrepancyMeasure::Kl => "kl",
    }
}

fn join_u64(values: &[u64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn join_f64(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v}"))
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_pmf_samples_one_category() {
        let p = Pmf::new(vec![1.0, 0.0]).unwrap();
        let d = sample_dataset(&p, 50, 3);
        assert!(d.values().iter().all(|&v| v == 1));
    }

    #[test]
    fn sampling_is_reproducible() {
        let p = Pmf::new(vec![0.5, 0.5]).unwrap();
        let a = sample_dataset(&p, 100, 11);
        let b = sample_dataset(&p, 100, 11);
        assert_eq!(a, b);
        let c = sample_dataset(&p, 100, 12);
        assert_ne!(a, c);
    }

    #[test]
    fn large_samples_track_the_distribution() {
        let p = Pmf::new(vec![0.5, 0.5]).unwrap();
        let d = sample_dataset(&p, 10_000, 17);
        let pmf = empirical_pmf(&counts_from_dataset(&d)).unwrap();
        assert!((pmf.get(0) - 0.5).abs() < 0.02);
        assert!((pmf.get(1) - 0.5).abs() < 0.02);
    }

    #[test]
    fn variance_experiment_agrees_with_theory_at_zero_budget() {
        let cfg = VarianceExperimentConfig {
            n_values: vec![10, 20],
            ..Default::default()
        };
        let table = run_variance_experiment(&cfg, 1).unwrap();
        let b = table.column_f64("b").unwrap();
        let emp = table.column_f64("var_empirical").unwrap();
        let unc = table.column_f64("var_uncorrected_theoretical").unwrap();
        let se = table.column_f64("stderr").unwrap();
        for i in 0..b.len() {
            if b[i] == Some(0.0) {
                let diff = (emp[i].unwrap() - unc[i].unwrap()).abs();
                assert!(diff <= 3.0 * se[i].unwrap(), "row {i}");
            }
        }
    }

    #[test]
    fn full_budget_rows_have_zero_empirical_variance() {
        let cfg = VarianceExperimentConfig {
            n_values: vec![5, 10],
            budgets: vec![5, 10],
            replicates: 50,
            ..Default::default()
        };
        let table = run_variance_experiment(&cfg, 1).unwrap();
        let n = table.column_f64("N").unwrap();
        let b = table.column_f64("b").unwrap();
        let emp = table.column_f64("var_empirical").unwrap();
        for i in 0..n.len() {
            if n[i] == b[i] {
                assert_eq!(emp[i], Some(0.0));
            }
        }
    }

    #[test]
    fn worker_count_does_not_change_the_bytes() {
        let cfg = VarianceExperimentConfig {
            n_values: vec![5, 10],
            replicates: 64,
            master_seed: 9,
            ..Default::default()
        };
        let one = run_variance_experiment(&cfg, 1).unwrap().to_csv();
        let eight = run_variance_experiment(&cfg, 8).unwrap().to_csv();
        assert_eq!(one, eight);
    }

    #[test]
    fn budget_experiment_matches_its_invariants() {
        let cfg = BudgetExperimentConfig::default();
        let table = run_budget_experiment(&cfg).unwrap();
        let corrected = table.column_f64("err_corrected").unwrap();
        let uncorrected = table.column_f64("err_uncorrected").unwrap();
        let e_min = table.column_f64("e_min").unwrap()[0].unwrap();
        let b_min = table.column_f64("b_min").unwrap()[0].unwrap();

        // Budget zero leaves the error unchanged.
        assert_eq!(corrected[0], uncorrected[0]);
        // The curve is non-increasing and floored at the minimum error.
        let mut previous = f64::INFINITY;
        for value in corrected.iter().map(|v| v.unwrap()) {
            assert!(value <= previous + 1e-12);
            assert!(value >= e_min - 1e-12);
            previous = value;
        }
        // From the minimum budget onward the floor is reached.
        let budgets = table.column_f64("b").unwrap();
        for i in 0..budgets.len() {
            if budgets[i].unwrap() >= b_min {
                assert!((corrected[i].unwrap() - e_min).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn budget_experiment_is_deterministic() {
        let cfg = BudgetExperimentConfig::default();
        let a = run_budget_experiment(&cfg).unwrap().to_csv();
        let b = run_budget_experiment(&cfg).unwrap().to_csv();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let cfg = VarianceExperimentConfig {
            replicates: 0,
            ..Default::default()
        };
        assert!(matches!(
            run_variance_experiment(&cfg, 1),
            Err(Error::InvalidConfig { .. })
        ));
        let cfg = VarianceExperimentConfig {
            n_values: vec![],
            ..Default::default()
        };
        assert!(matches!(
            run_variance_experiment(&cfg, 1),
            Err(Error::InvalidConfig { .. })
        ));

        let cfg = BudgetExperimentConfig {
            initial_counts: CountVector::new(vec![1, 1]).unwrap(),
            ..Default::default()
        };
        assert!(matches!(
            run_budget_experiment(&cfg),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
