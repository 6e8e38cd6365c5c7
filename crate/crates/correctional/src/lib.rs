//! Correctional learning for categorical data.
//!
//! A teacher who knows the true observation distribution intercepts a
//! student's dataset and changes a budget-limited number of observations so
//! that the student's empirical estimate moves toward the truth (or away
//! from it, in the adversarial setting). This crate implements the pieces
//! needed to study that interaction exactly at desk scale:
//!
//! * datasets, histograms and pmfs with L1/L2/KL discrepancies
//!   ([`dataset`], [`pmf`]);
//! * the two correction-cost models and exact 1-D transport between
//!   histograms, including plans that relabel concrete sequences
//!   ([`transport`]);
//! * closed-form distribution, moments and variance reduction of the
//!   corrected estimator for two-category data, with an enumeration oracle
//!   ([`binomial`]);
//! * an exact dynamic-programming solver for the general correction problem
//!   plus a brute-force optimality oracle and the closed-form error/budget
//!   formulas ([`solver`]);
//! * a seeded, reproducible experiment harness emitting CSV ([`experiments`]);
//! * plain-text file formats for datasets, pmfs, problems and configs
//!   ([`io`]).
//!
//! All operations are pure functions of their inputs and every type is
//! immutable after construction, so values can be shared freely across
//! threads.

pub mod binomial;
pub mod dataset;
mod error;
pub mod experiments;
pub mod io;
pub mod pmf;
pub mod rng;
pub mod solver;
pub mod transport;

pub use binomial::{
    binomial_pmf, greedy_corrected_successes, variance_uncorrected, BinomialTheory, CorrectedPmf,
    EstimatorMoments,
};
pub use dataset::{counts_from_dataset, CountVector, ObservationDataset};
pub use error::Error;
pub use experiments::{
    run_budget_experiment, run_variance_experiment, sample_dataset, BudgetExperimentConfig, Cell,
    ExperimentTable, VarianceExperimentConfig,
};
pub use pmf::{discrepancy, empirical_pmf, DiscrepancyMeasure, Pmf};
pub use solver::{
    min_budget, min_error, predicted_error, solve_bruteforce, solve_exact, CorrectionProblem,
    CorrectionSolution, Direction,
};
pub use transport::{
    apply_plan_to_sequence, build_min_cost_plan, transport_cost_count, transport_cost_value,
    CostModel, TransportPlan,
};
