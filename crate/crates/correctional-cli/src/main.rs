//! Command-line interface: exact correction solving, closed-form binomial
//! reports, and reproducible experiments with CSV output.
//!
//! Exit codes: 0 success, 1 embedded acceptance-check failure, 2 malformed
//! input, 3 violated precondition or infeasible configuration.

use std::path::PathBuf;
use std::process::ExitCode;

use correctional::io;
use correctional::{
    apply_plan_to_sequence, counts_from_dataset, run_budget_experiment, run_variance_experiment,
    BinomialTheory, Direction, Error, ExperimentTable,
};

const USAGE: &str = "\
correctional: budget-constrained correction of categorical datasets

USAGE:
  correctional solve <PROBLEM> [--dataset PATH] [--adversarial] [--out PATH] [--quiet]
  correctional binomial --n N --theta0 T --budget B [--pmf] [--variance] [--delta] [--ratio] [--oracle] [--quiet]
  correctional experiment variance [--config PATH] [--out PATH] [--seed U64] [--workers K]
                                   [--theta0 F] [--n-values LIST] [--budgets LIST] [--replicates K] [--quiet]
  correctional experiment budget   [--config PATH] [--out PATH] [--p0 LIST] [--counts LIST]
                                   [--dataset PATH] [--budgets LIST] [--cost-model value|count]
                                   [--discrepancy l1|l2|kl] [--quiet]

Problem files, dataset files, pmf files and experiment configs are plain
`key = value` / line-oriented text; see the project README for the formats.
Flags override config-file values. LIST arguments are comma-separated.

EXIT CODES:
  0  success
  1  an embedded acceptance check failed
  2  malformed input
  3  violated precondition or infeasible configuration
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    ExitCode::from(run(&args))
}

fn run(args: &[String]) -> u8 {
    if args.is_empty() || args[0] == "--help" || args[0] == "-h" {
        print!("{USAGE}");
        return if args.is_empty() { 2 } else { 0 };
    }
    let result = match args[0].as_str() {
        "solve" => cmd_solve(&args[1..]),
        "binomial" => cmd_binomial(&args[1..]),
        "experiment" => cmd_experiment(&args[1..]),
        other => Err(CliError::Usage(format!("unknown subcommand {other:?}"))),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            eprintln!("run `correctional --help` for usage");
            2
        }
        Err(CliError::Lib(error)) => {
            eprintln!("error: {error}");
            exit_code_for(&error)
        }
    }
}

enum CliError {
    Usage(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

fn exit_code_for(error: &Error) -> u8 {
    match error {
        Error::Parse { .. }
        | Error::Io { .. }
        | Error::NotNormalized { .. }
        | Error::InvalidProbability { .. }
        | Error::ValueOutOfRange { .. }
        | Error::EmptyDataset
        | Error::EmptyHistogram
        | Error::EmptyPmf
        | Error::TooFewCategories { .. }
        | Error::InvalidConfig { .. }
        | Error::ZeroTrials => 2,
        Error::DimensionMismatch { .. }
        | Error::TotalMismatch { .. }
        | Error::ZeroTotal
        | Error::NonIntegerMean { .. }
        | Error::DegenerateTheta { .. }
        | Error::EnumerationTooLarge { .. }
        | Error::InfeasiblePlan { .. }
        | Error::OffGridPmf { .. }
        | Error::BudgetTooLarge { .. } => 3,
    }
}

/// Decimal rendering with six significant digits, trailing zeros trimmed.
fn fmt6(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{value:.5e}").parse().unwrap_or(value);
    format!("{rounded}")
}

fn take_value<'a>(
    flag: &str,
    iter: &mut std::slice::Iter<'a, String>,
) -> Result<&'a String, CliError> {
    iter.next()
        .ok_or_else(|| CliError::Usage(format!("missing value for {flag}")))
}

fn parse_flag_u64(flag: &str, text: &str) -> Result<u64, CliError> {
    text.parse::<u64>().map_err(|_| {
        CliError::Usage(format!(
            "{flag} expects a nonnegative integer, found {text:?}"
        ))
    })
}

fn parse_flag_f64(flag: &str, text: &str) -> Result<f64, CliError> {
    text.parse::<f64>()
        .map_err(|_| CliError::Usage(format!("{flag} expects a number, found {text:?}")))
}

fn parse_flag_u64_list(flag: &str, text: &str) -> Result<Vec<u64>, CliError> {
    text.split(',')
        .map(|piece| {
            piece
                .trim()
                .parse::<u64>()
                .map_err(|_| CliError::Usage(format!("{flag} expects integers, found {piece:?}")))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

fn cmd_solve(args: &[String]) -> Result<u8, CliError> {
    let mut problem_path: Option<PathBuf> = None;
    let mut dataset_path: Option<PathBuf> = None;
    let mut out_path: Option<PathBuf> = None;
    let mut adversarial = false;
    let mut quiet = false;

    let mut iter = args.iter();
    while let Some(arg) = iter.next() {
        match arg.as_str() {
            "--dataset" => dataset_path = Some(PathBuf::from(take_value("--dataset", &mut iter)?)),
            "--out" => out_path = Some(PathBuf::from(take_value("--out", &mut iter)?)),
            "--adversarial" => adversarial = true,
            "--quiet" => quiet = true,
            other if other.starts_with("--") => {
                return Err(CliError::Usage(format!("unknown flag {other:?}")))
            }
            other => {
                if problem_path.replace(PathBuf::from(other)).is_some() {
                    return Err(CliError::Usage("expected exactly one problem file".into()));
                }
            }
        }
    }
    let problem_path =
        problem_path.ok_or_else(|| CliError::Usage("missing problem file".into()))?;

    let mut spec = io::read_problem(&problem_path)?;
    if let Some(path) = &dataset_path {
        let dataset = io::read_dataset(path)?;
        spec.problem.counts = counts_from_dataset(&dataset);
        spec.dataset = Some(dataset);
    }
    if adversarial {
        spec.problem.direction = Direction::Adversarial;
    }

    let solution = correctional::solve_exact(&spec.problem)?;

    if !quiet {
        let counts: Vec<String> = solution
            .corrected_counts
            .as_slice()
            .iter()
            .map(|c| c.to_string())
            .collect();
        println!("counts: {}", counts.join(" "));
        println!("objective: {}", fmt6(solution.objective));
        println!("cost: {}", solution.cost_used);
    }

    if let Some(dataset) = &spec.dataset {
        let corrected = apply_plan_to_sequence(dataset, &solution.plan)?;
        let text = io::format_dataset(&corrected);
        match &out_path {
            Some(path) => {
                std::fs::write(path, text).map_err(|e| Error::Io {
                    message: format!("{}: {e}", path.display()),
                })?;
                if !quiet {
                    eprintln!("corrected sequence written to {}", path.display());
                }
            }
            None => {
                let values: Vec<String> =
                    corrected.values().iter().map(|v| v.to_string()).collect();
                println!("sequence: {}", values.join(" "));
            }
        }
    } else if out_path.is_some() {
        return Err(CliError::Usage(
            "--out for a corrected sequence needs a dataset (problem `dataset =` key or --dataset)"
                .into(),
        ));
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// binomial
// ---------------------------------------------------------------------------

fn cmd_binomial(args: &[String]) -> Result<u8, CliError> {
    let mut n: Option<u64> = None;
    let mut theta0: Option<f64> = None;
    let mut budget: Option<u64> = None;
    let (mut show_pmf, mut show_variance, mut show_delta, mut show_ratio) =
        (false, false, false, false);
    let mut check_oracle = false;
    let mut quiet = false;

    let mut iter = args.iter();
    while let Some(arg) = iter.next() {
        match arg.as_str() {
            "--n" => n = Some(parse_flag_u64("--n", take_value("--n", &mut iter)?)?),
            "--theta0" => {
                theta0 = Some(parse_flag_f64(
                    "--theta0",
                    take_value("--theta0", &mut iter)?,
                )?)
            }
            "--budget" => {
                budget = Some(parse_flag_u64(
                    "--budget",
                    take_value("--budget", &mut iter)?,
                )?)
            }
            "--pmf" => show_pmf = true,
            "--variance" => show_variance = true,
            "--delta" => show_delta = true,
            "--ratio" => show_ratio = true,
            "--oracle" => check_oracle = true,
            "--quiet" => quiet = true,
            other => return Err(CliError::Usage(format!("unknown flag {other:?}"))),
        }
    }
    let n = n.ok_or_else(|| CliError::Usage("missing --n".into()))?;
    let theta0 = theta0.ok_or_else(|| CliError::Usage("missing --theta0".into()))?;
    let budget = budget.ok_or_else(|| CliError::Usage("missing --budget".into()))?;
    if !(show_pmf || show_variance || show_delta || show_ratio || check_oracle) {
        return Err(CliError::Usage(
            "select at least one of --pmf --variance --delta --ratio --oracle".into(),
        ));
    }

    let theory = BinomialTheory::new(n, theta0, budget)?;

    if show_pmf {
        let pmf = theory.corrected_pmf()?;
        let line: Vec<String> = pmf.probs().iter().map(|&p| fmt6(p)).collect();
        println!("{}", line.join(" "));
    }
    if show_variance {
        let moments = theory.corrected_pmf()?.estimator_moments(n);
        println!("{}", fmt6(moments.variance));
    }
    if show_delta {
        println!("{}", fmt6(theory.delta_reduction()?));
    }
    if show_ratio {
        println!("{}", fmt6(theory.variance_ratio()?));
    }
    if check_oracle {
        let closed = theory.corrected_pmf()?;
        let oracle = theory.corrected_pmf_oracle()?;
        let max_deviation = closed
            .probs()
            .iter()
            .zip(oracle.probs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if max_deviation > 1e-12 {
            eprintln!("oracle check failed: max deviation {max_deviation:e} exceeds 1e-12");
            return Ok(1);
        }
        if !quiet {
            eprintln!("oracle check passed: max deviation {max_deviation:e}");
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// experiment
// ---------------------------------------------------------------------------

fn cmd_experiment(args: &[String]) -> Result<u8, CliError> {
    let kind = args.first().ok_or_else(|| {
        CliError::Usage("expected `experiment variance` or `experiment budget`".into())
    })?;
    match kind.as_str() {
        "variance" => cmd_experiment_variance(&args[1..]),
        "budget" => cmd_experiment_budget(&args[1..]),
        other => Err(CliError::Usage(format!(
            "unknown experiment {other:?}, expected `variance` or `budget`"
        ))),
    }
}

fn cmd_experiment_variance(args: &[String]) -> Result<u8, CliError> {
    let mut config_path: Option<PathBuf> = None;
    let mut out_path = PathBuf::from("variance.csv");
    let mut workers = 1usize;
    let mut quiet = false;
    let mut seed: Option<u64> = None;
    let mut theta0: Option<f64> = None;
    let mut n_values: Option<Vec<u64>> = None;
    let mut budgets: Option<Vec<u64>> = None;
    let mut replicates: Option<u64> = None;

    let mut iter = args.iter();
    while let Some(arg) = iter.next() {
        match arg.as_str() {
            "--config" => config_path = Some(PathBuf::from(take_value("--config", &mut iter)?)),
            "--out" => out_path = PathBuf::from(take_value("--out", &mut iter)?),
            "--seed" => seed = Some(parse_flag_u64("--seed", take_value("--seed", &mut iter)?)?),
            "--workers" => {
                workers = parse_flag_u64("--workers", take_value("--workers", &mut iter)?)?.max(1)
                    as usize
            }
            "--theta0" => {
                theta0 = Some(parse_flag_f64(
                    "--theta0",
                    take_value("--theta0", &mut iter)?,
                )?)
            }
            "--n-values" => {
                n_values = Some(parse_flag_u64_list(
                    "--n-values",
                    take_value("--n-values", &mut iter)?,
                )?)
            }
            "--budgets" => {
                budgets = Some(parse_flag_u64_list(
                    "--budgets",
                    take_value("--budgets", &mut iter)?,
                )?)
            }
            "--replicates" => {
                replicates = Some(parse_flag_u64(
                    "--replicates",
                    take_value("--replicates", &mut iter)?,
                )?)
            }
            "--quiet" => quiet = true,
            other => return Err(CliError::Usage(format!("unknown flag {other:?}"))),
        }
    }

    let mut cfg = match &config_path {
        Some(path) => io::parse_variance_config(&io::read_to_string(path)?)?,
        None => Default::default(),
    };
    if let Some(v) = theta0 {
        cfg.theta0 = v;
    }
    if let Some(v) = n_values {
        cfg.n_values = v;
    }
    if let Some(v) = budgets {
        cfg.budgets = v;
    }
    if let Some(v) = replicates {
        cfg.replicates = v;
    }
    if let Some(v) = seed {
        cfg.master_seed = v;
    }

    let table = run_variance_experiment(&cfg, workers)?;
    table.write_csv(&out_path)?;

    let (max_sigma, points) = max_sigma_deviation(&table);
    if !quiet {
        println!(
            "max deviation from theory: {} sigma across {points} grid points; wrote {}",
            fmt6(max_sigma),
            out_path.display()
        );
    }
    Ok(if max_sigma > 3.0 { 1 } else { 0 })
}

/// Largest `|empirical - theoretical| / stderr` over rows that carry a
/// theoretical value. Rows where both the deviation and the standard error
/// vanish count as zero deviation.
fn max_sigma_deviation(table: &ExperimentTable) -> (f64, usize) {
    let empirical = table.column_f64("var_empirical").unwrap_or_default();
    let theoretical = table.column_f64("var_theoretical").unwrap_or_default();
    let stderr = table.column_f64("stderr").unwrap_or_default();
    let mut max_sigma = 0.0f64;
    let mut points = 0usize;
    for i in 0..empirical.len() {
        let (Some(emp), Some(theo), Some(se)) = (empirical[i], theoretical[i], stderr[i]) else {
            continue;
        };
        points += 1;
        let deviation = (emp - theo).abs();
        let sigma = if deviation == 0.0 {
            0.0
        } else if se == 0.0 {
            f64::INFINITY
        } else {
            deviation / se
        };
        max_sigma = max_sigma.max(sigma);
    }
    (max_sigma, points)
}

fn cmd_experiment_budget(args: &[String]) -> Result<u8, CliError> {
    let mut config_path: Option<PathBuf> = None;
    let mut out_path = PathBuf::from("budget.csv");
    let mut quiet = false;
    let mut p0: Option<String> = None;
    let mut counts: Option<String> = None;
    let mut dataset: Option<PathBuf> = None;
    let mut budgets: Option<Vec<u64>> = None;
    let mut cost_model: Option<String> = None;
    let mut measure: Option<String> = None;

    let mut iter = args.iter();
    while let Some(arg) = iter.next() {
        match arg.as_str() {
            "--config" => config_path = Some(PathBuf::from(take_value("--config", &mut iter)?)),
            "--out" => out_path = PathBuf::from(take_value("--out", &mut iter)?),
            "--p0" => p0 = Some(take_value("--p0", &mut iter)?.clone()),
            "--counts" => counts = Some(take_value("--counts", &mut iter)?.clone()),
            "--dataset" => dataset = Some(PathBuf::from(take_value("--dataset", &mut iter)?)),
            "--budgets" => {
                budgets = Some(parse_flag_u64_list(
                    "--budgets",
                    take_value("--budgets", &mut iter)?,
                )?)
            }
            "--cost-model" => cost_model = Some(take_value("--cost-model", &mut iter)?.clone()),
            "--discrepancy" => measure = Some(take_value("--discrepancy", &mut iter)?.clone()),
            "--quiet" => quiet = true,
            other => return Err(CliError::Usage(format!("unknown flag {other:?}"))),
        }
    }
    if counts.is_some() && dataset.is_some() {
        return Err(CliError::Usage(
            "give either --counts or --dataset, not both".into(),
        ));
    }

    let mut cfg = match &config_path {
        Some(path) => io::parse_budget_config(&io::read_to_string(path)?, path.parent())?,
        None => Default::default(),
    };
    if let Some(text) = p0 {
        cfg.p0 = io::parse_pmf(&text.replace(',', "\n"))?;
    }
    if let Some(text) = counts {
        let list: Result<Vec<u64>, CliError> = text
            .split(',')
            .map(|piece| parse_flag_u64("--counts", piece.trim()))
            .collect();
        cfg.initial_counts = correctional::CountVector::new(list?)?;
    }
    if let Some(path) = dataset {
        cfg.initial_counts = counts_from_dataset(&io::read_dataset(&path)?);
    }
    if let Some(v) = budgets {
        cfg.budgets = v;
    }
    if let Some(text) = cost_model {
        cfg.cost_model = io::parse_cost_model(0, &text)?;
    }
    if let Some(text) = measure {
        cfg.discrepancy = io::parse_discrepancy(0, &text)?;
    }

    let table = run_budget_experiment(&cfg)?;
    table.write_csv(&out_path)?;

    let check = budget_curve_check(&table);
    if !quiet {
        match check.plateau_budget {
            Some(b) => println!(
                "plateau budget: {b} (e_min {}); wrote {}",
                fmt6(check.e_min),
                out_path.display()
            ),
            None => println!(
                "plateau not reached within the budget grid (e_min {}); wrote {}",
                fmt6(check.e_min),
                out_path.display()
            ),
        }
    }
    match check.violation {
        Some(message) => {
            eprintln!("acceptance check failed: {message}");
            Ok(1)
        }
        None => Ok(0),
    }
}

struct BudgetCurveCheck {
    plateau_budget: Option<u64>,
    e_min: f64,
    violation: Option<String>,
}

/// Structural checks on the solved error curve: budget zero changes nothing,
/// the curve never increases, never drops below the minimum error, and
/// reaches it exactly at the predicted minimum budget when the grid extends
/// that far.
fn budget_curve_check(table: &ExperimentTable) -> BudgetCurveCheck {
    let budgets = table.column_f64("b").unwrap_or_default();
    let corrected = table.column_f64("err_corrected").unwrap_or_default();
    let uncorrected = table.column_f64("err_uncorrected").unwrap_or_default();
    let e_min = table
        .column_f64("e_min")
        .and_then(|c| c.first().copied().flatten())
        .unwrap_or(f64::NAN);
    let b_min = table
        .column_f64("b_min")
        .and_then(|c| c.first().copied().flatten())
        .unwrap_or(f64::NAN);

    let mut plateau_budget: Option<u64> = None;
    let mut violation: Option<String> = None;
    let mut previous = f64::INFINITY;
    for i in 0..budgets.len() {
        let (Some(b), Some(err)) = (budgets[i], corrected[i]) else {
            continue;
        };
        if plateau_budget.is_none() && err <= e_min + 1e-12 {
            plateau_budget = Some(b as u64);
        }
        if violation.is_none() {
            if b == 0.0 && Some(err) != uncorrected[i] {
                violation = Some("zero budget changed the error".into());
            } else if err > previous + 1e-12 {
                violation = Some(format!("error increased at budget {b}"));
            } else if err < e_min - 1e-12 {
                violation = Some(format!("error fell below the minimum at budget {b}"));
            }
        }
        previous = err;
    }
    if violation.is_none() && budgets.iter().flatten().any(|&b| b >= b_min) {
        match plateau_budget {
            Some(b) if (b as f64) == b_min => {}
            _ => {
                violation = Some(format!(
                    "plateau budget {plateau_budget:?} does not match predicted minimum {b_min}"
                ))
            }
        }
    }
    BudgetCurveCheck {
        plateau_budget,
        e_min,
        violation,
    }
}
