//! Plain-text file formats.
//!
//! Dataset files hold one 1-based category index per line, with an optional
//! `# Y=<int>` header; without the header the number of categories is the
//! largest value seen. Pmf files hold one probability per line and must sum
//! to one within `1e-9`; they are normalized on read. Problem and experiment
//! config files are `key = value` text with `#` comments.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::dataset::{counts_from_dataset, CountVector, ObservationDataset};
use crate::error::Error;
use crate::experiments::{BudgetExperimentConfig, VarianceExperimentConfig};
use crate::pmf::{DiscrepancyMeasure, Pmf};
use crate::solver::{CorrectionProblem, Direction};
use crate::transport::CostModel;

/// Tolerance applied to probability sums read from files, looser than the
/// in-memory pmf invariant; vectors inside it are normalized exactly.
pub const FILE_PMF_TOLERANCE: f64 = 1e-9;

/// A parsed correction problem, plus the observation sequence when the
/// problem was specified through a dataset file.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub problem: CorrectionProblem,
    pub dataset: Option<ObservationDataset>,
}

pub fn read_to_string(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        message: format!("{}: {e}", path.display()),
    })
}

pub fn parse_dataset(text: &str) -> Result<ObservationDataset, Error> {
    let mut declared_y: Option<u32> = None;
    let mut values: Vec<u32> = Vec::new();
    for (number, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(y_text) = comment.strip_prefix("Y=") {
                let y = y_text.trim().parse::<u32>().map_err(|_| Error::Parse {
                    line: number + 1,
                    message: format!("invalid category count {y_text:?}"),
                })?;
                declared_y = Some(y);
            }
            continue;
        }
        let value = line.parse::<u32>().map_err(|_| Error::Parse {
            line: number + 1,
            message: format!("expected a category index, found {line:?}"),
        })?;
        values.push(value);
    }
    let num_categories = match declared_y {
        Some(y) => y,
        None => values.iter().copied().max().unwrap_or(0),
    };
    ObservationDataset::new(values, num_categories)
}

pub fn read_dataset(path: &Path) -> Result<ObservationDataset, Error> {
    parse_dataset(&read_to_string(path)?)
}

/// Renders a dataset in the same format `parse_dataset` accepts.
pub fn format_dataset(dataset: &ObservationDataset) -> String {
    let mut out = format!("# Y={}\n", dataset.num_categories());
    for &value in dataset.values() {
        out.push_str(&value.to_string());
        out.push('\n');
    }
    out
}

pub fn parse_pmf(text: &str) -> Result<Pmf, Error> {
    let mut entries: Vec<f64> = Vec::new();
    for (number, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let value = line.parse::<f64>().map_err(|_| Error::Parse {
            line: number + 1,
            message: format!("expected a probability, found {line:?}"),
        })?;
        entries.push(value);
    }
    normalize_pmf(entries)
}

pub fn read_pmf(path: &Path) -> Result<Pmf, Error> {
    parse_pmf(&read_to_string(path)?)
}

/// Validates entries against [`FILE_PMF_TOLERANCE`] and normalizes them so
/// the result meets the stricter in-memory pmf invariant.
fn normalize_pmf(entries: Vec<f64>) -> Result<Pmf, Error> {
    if entries.is_empty() {
        return Err(Error::EmptyPmf);
    }
    for &value in &entries {
        if !value.is_finite() || !(0.0..=1.0 + FILE_PMF_TOLERANCE).contains(&value) {
            return Err(Error::InvalidProbability { value });
        }
    }
    let sum: f64 = entries.iter().sum();
    if (sum - 1.0).abs() > FILE_PMF_TOLERANCE {
        return Err(Error::NotNormalized { sum });
    }
    Pmf::new(entries.into_iter().map(|v| v / sum).collect())
}

/// Parses `key = value` lines. Keys are lowercased; duplicates are errors.
fn parse_key_values(text: &str) -> Result<BTreeMap<String, (usize, String)>, Error> {
    let mut map = BTreeMap::new();
    for (number, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: number + 1,
            message: format!("expected `key = value`, found {line:?}"),
        })?;
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim().to_string();
        if map.insert(key.clone(), (number + 1, value)).is_some() {
            return Err(Error::Parse {
                line: number + 1,
                message: format!("duplicate key {key:?}"),
            });
        }
    }
    Ok(map)
}

fn parse_f64_list(line: usize, text: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|piece| {
            piece.trim().parse::<f64>().map_err(|_| Error::Parse {
                line,
                message: format!("expected a number, found {piece:?}"),
            })
        })
        .collect()
}

fn parse_u64_list(line: usize, text: &str) -> Result<Vec<u64>, Error> {
    text.split(',')
        .map(|piece| {
            piece.trim().parse::<u64>().map_err(|_| Error::Parse {
                line,
                message: format!("expected a nonnegative integer, found {piece:?}"),
            })
        })
        .collect()
}

pub fn parse_cost_model(line: usize, text: &str) -> Result<CostModel, Error> {
    match text.to_ascii_lowercase().as_str() {
        "value" => Ok(CostModel::ValueDistance),
        "count" => Ok(CostModel::ChangeCount),
        other => Err(Error::Parse {
            line,
            message: format!("cost_model must be `value` or `count`, found {other:?}"),
        }),
    }
}

pub fn parse_discrepancy(line: usize, text: &str) -> Result<DiscrepancyMeasure, Error> {
    match text.to_ascii_lowercase().as_str() {
        "l1" => Ok(DiscrepancyMeasure::L1),
        "l2" => Ok(DiscrepancyMeasure::L2),
        "kl" => Ok(DiscrepancyMeasure::Kl),
        other => Err(Error::Parse {
            line,
            message: format!("discrepancy must be `l1`, `l2` or `kl`, found {other:?}"),
        }),
    }
}

pub fn parse_direction(line: usize, text: &str) -> Result<Direction, Error> {
    match text.to_ascii_lowercase().as_str() {
        "coop" | "cooperative" => Ok(Direction::Cooperative),
        "adv" | "adversarial" => Ok(Direction::Adversarial),
        other => Err(Error::Parse {
            line,
            message: format!("direction must be `coop` or `adv`, found {other:?}"),
        }),
    }
}

fn resolve(base_dir: Option<&Path>, value: &str) -> PathBuf {
    let path = PathBuf::from(value);
    match base_dir {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path,
    }
}

/// Parses a correction problem description.
///
/// Keys: `p0` (comma-separated probabilities, required), `budget` (required),
/// exactly one of `counts` (comma-separated integers) or `dataset` (path,
/// resolved against `base_dir` when relative), `cost_model` (`value` |
/// `count`, default `count`), `discrepancy` (`l1` | `l2` | `kl`, default
/// `l1`), `direction` (`coop` | `adv`, default `coop`).
pub fn parse_problem(text: &str, base_dir: Option<&Path>) -> Result<ProblemSpec, Error> {
    let map = parse_key_values(text)?;
    for key in map.keys() {
        match key.as_str() {
            "p0" | "budget" | "counts" | "dataset" | "cost_model" | "discrepancy" | "direction" => {
            }
            other => {
                return Err(Error::Parse {
                    line: map[other].0,
                    message: format!("unknown key {other:?}"),
                })
            }
        }
    }
    let require = |key: &str| {
        map.get(key).ok_or_else(|| Error::InvalidConfig {
            message: format!("missing required key `{key}`"),
        })
    };

    let (line, p0_text) = require("p0")?;
    let p0 = normalize_pmf(parse_f64_list(*line, p0_text)?)?;

    let (line, budget_text) = require("budget")?;
    let budget = budget_text.parse::<u64>().map_err(|_| Error::Parse {
        line: *line,
        message: format!("budget must be a nonnegative integer, found {budget_text:?}"),
    })?;

    let (counts, dataset) = match (map.get("counts"), map.get("dataset")) {
        (Some(_), Some(_)) => {
            return Err(Error::InvalidConfig {
                message: "give either `counts` or `dataset`, not both".into(),
            })
        }
        (Some((line, text)), None) => {
            let counts = CountVector::new(parse_u64_list(*line, text)?)?;
            (counts, None)
        }
        (None, Some((_, text))) => {
            let dataset = read_dataset(&resolve(base_dir, text))?;
            (counts_from_dataset(&dataset), Some(dataset))
        }
        (None, None) => {
            return Err(Error::InvalidConfig {
                message: "missing required key `counts` or `dataset`".into(),
            })
        }
    };

    let cost_model = match map.get("cost_model") {
        Some((line, text)) => parse_cost_model(*line, text)?,
        None => CostModel::ChangeCount,
    };
    let discrepancy = match map.get("discrepancy") {
        Some((line, text)) => parse_discrepancy(*line, text)?,
        None => DiscrepancyMeasure::L1,
    };
    let direction = match map.get("direction") {
        Some((line, text)) => parse_direction(*line, text)?,
        None => Direction::Cooperative,
    };

    Ok(ProblemSpec {
        problem: CorrectionProblem {
            p0,
            counts,
            budget,
            cost_model,
            discrepancy,
            direction,
        },
        dataset,
    })
}

pub fn read_problem(path: &Path) -> Result<ProblemSpec, Error> {
    parse_problem(&read_to_string(path)?, path.parent())
}

/// Parses a variance experiment config. Keys (all optional, defaults apply):
/// `theta0`, `n_values`, `budgets`, `replicates`, `seed`.
pub fn parse_variance_config(text: &str) -> Result<VarianceExperimentConfig, Error> {
    let map = parse_key_values(text)?;
    let mut cfg = VarianceExperimentConfig::default();
    for (key, (line, value)) in &map {
        match key.as_str() {
            "theta0" => {
                cfg.theta0 = value.parse::<f64>().map_err(|_| Error::Parse {
                    line: *line,
                    message: format!("theta0 must be a number, found {value:?}"),
                })?;
            }
            "n_values" => cfg.n_values = parse_u64_list(*line, value)?,
            "budgets" => cfg.budgets = parse_u64_list(*line, value)?,
            "replicates" => {
                cfg.replicates = value.parse::<u64>().map_err(|_| Error::Parse {
                    line: *line,
                    message: format!("replicates must be an integer, found {value:?}"),
                })?;
            }
            "seed" => {
                cfg.master_seed = value.parse::<u64>().map_err(|_| Error::Parse {
                    line: *line,
                    message: format!("seed must be a u64, found {value:?}"),
                })?;
            }
            other => {
                return Err(Error::Parse {
                    line: *line,
                    message: format!("unknown key {other:?}"),
                })
            }
        }
    }
    Ok(cfg)
}

/// Parses a budget experiment config. Keys (all optional, defaults apply):
/// `p0`, `counts` or `dataset`, `budgets`, `cost_model`, `discrepancy`.
pub fn parse_budget_config(
    text: &str,
    base_dir: Option<&Path>,
) -> Result<BudgetExperimentConfig, Error> {
    let map = parse_key_values(text)?;
    let mut cfg = BudgetExperimentConfig::default();
    if map.contains_key("counts") && map.contains_key("dataset") {
        return Err(Error::InvalidConfig {
            message: "give either `counts` or `dataset`, not both".into(),
        });
    }
    for (key, (line, value)) in &map {
        match key.as_str() {
            "p0" => cfg.p0 = normalize_pmf(parse_f64_list(*line, value)?)?,
            "counts" => cfg.initial_counts = CountVector::new(parse_u64_list(*line, value)?)?,
            "dataset" => {
                let dataset = read_dataset(&resolve(base_dir, value))?;
                cfg.initial_counts = counts_from_dataset(&dataset);
            }
            "budgets" => cfg.budgets = parse_u64_list(*line, value)?,
            "cost_model" => cfg.cost_model = parse_cost_model(*line, value)?,
            "discrepancy" => cfg.discrepancy = parse_discrepancy(*line, value)?,
            other => {
                return Err(Error::Parse {
                    line: *line,
                    message: format!("unknown key {other:?}"),
                })
            }
        }
    }
    Ok(cfg)
}
