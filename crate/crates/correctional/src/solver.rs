//! Exact solution of the teacher's correction problem for categorical data.
//!
//! Given the true distribution `p0`, an observed histogram, a budget and a
//! cost model, the solver finds the corrected histogram that minimizes (or,
//! adversarially, maximizes) the discrepancy to `p0` over every integer
//! histogram reachable within the budget.
//!
//! The search is a dynamic program over categories with state
//! `(category, prefix sum of corrected counts, remaining budget)`. Value
//! distance is charged at the boundary between consecutive categories as the
//! absolute difference of original and corrected prefix sums, which is the
//! exact 1-D transport cost; change count is charged per category. All three
//! objectives decompose per category, so the program is exact, not a
//! heuristic. A brute-force enumeration over all corrected histograms serves
//! as the optimality oracle, and both sides accumulate identical per-category
//! terms in identical order so ties resolve identically.

use crate::dataset::CountVector;
use crate::error::Error;
use crate::pmf::{discrepancy, discrepancy_term, empirical_pmf, DiscrepancyMeasure, Pmf};
use crate::transport::{
    build_min_cost_plan, count_cost_slices, transport_cost_count, transport_cost_value,
    value_cost_slices, CostModel, TransportPlan,
};

/// Upper bound on the number of corrected histograms the brute-force oracle
/// will enumerate.
const BRUTEFORCE_LIMIT: u128 = 1_000_000;

/// Whether the teacher helps or hinders the student.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Minimize the discrepancy between `p0` and the corrected empirical pmf.
    Cooperative,
    /// Maximize it.
    Adversarial,
}

/// A correction instance: true distribution, observed histogram, budget,
/// cost model, objective and direction.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionProblem {
    pub p0: Pmf,
    pub counts: CountVector,
    pub budget: u64,
    pub cost_model: CostModel,
    pub discrepancy: DiscrepancyMeasure,
    pub direction: Direction,
}

/// An optimal corrected histogram together with a realizing plan.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionSolution {
    pub corrected_counts: CountVector,
    pub plan: TransportPlan,
    /// Discrepancy between `p0` and the corrected empirical pmf, recomputed
    /// through [`discrepancy`] on the returned counts.
    pub objective: f64,
    /// Minimum transport cost of the returned counts under the problem's
    /// cost model; never exceeds the budget.
    pub cost_used: u64,
}

impl CorrectionProblem {
    fn validate(&self) -> Result<(), Error> {
        if self.p0.len() != self.counts.len() {
            return Err(Error::DimensionMismatch {
                left: self.p0.len(),
                right: self.counts.len(),
            });
        }
        if self.counts.len() < 2 {
            return Err(Error::TooFewCategories {
                found: self.counts.len() as u32,
            });
        }
        if self.counts.total() == 0 {
            return Err(Error::ZeroTotal);
        }
        Ok(())
    }

    /// Budget capped at the largest cost any correction can incur.
    fn effective_budget(&self) -> u64 {
        let n = self.counts.total();
        let max_cost = match self.cost_model {
            CostModel::ChangeCount => n,
            CostModel::ValueDistance => n * (self.counts.len() as u64 - 1),
        };
        self.budget.min(max_cost)
    }
}

/// Per-category objective contribution for a corrected count of `t`.
fn objective_term(p0_i: f64, t: u64, n: f64, measure: DiscrepancyMeasure) -> f64 {
    discrepancy_term(p0_i, t as f64 / n, measure)
}

/// Budget charged when category `k` (0-based, of `y`) receives corrected
/// count `t`, given the corrected prefix sum `s2` through `k`.
fn cost_increment(
    model: CostModel,
    counts: &[u64],
    prefix: &[u64],
    k: usize,
    y: usize,
    s2: u64,
    t: u64,
) -> u64 {
    match model {
        CostModel::ChangeCount => counts[k].saturating_sub(t),
        CostModel::ValueDistance => {
            if k + 1 < y {
                prefix[k].abs_diff(s2)
            } else {
                0
            }
        }
    }
}

fn prefer(direction: Direction, candidate: f64, incumbent: f64) -> bool {
    match direction {
        Direction::Cooperative => candidate < incumbent,
        Direction::Adversarial => candidate > incumbent,
    }
}

/// Solves the correction problem exactly by dynamic programming.
///
/// Optimality is global over all integer histograms with the original total
/// and transport cost within the budget. Ties between optimal histograms go
/// to the lexicographically smallest count vector.
pub fn solve_exact(problem: &CorrectionProblem) -> Result<CorrectionSolution, Error> {
    problem.validate()?;
    let y = problem.counts.len();
    let n = problem.counts.total();
    let n_f = n as f64;
    let counts = problem.counts.as_slice();
    let p0 = problem.p0.as_slice();
    let measure = problem.discrepancy;
    let model = problem.cost_model;
    let direction = problem.direction;

    let mut prefix = Vec::with_capacity(y);
    let mut acc = 0u64;
    for &c in counts {
        acc += c;
        prefix.push(acc);
    }

    let cap = problem.effective_budget() as usize;
    let nn = n as usize;
    let states_per_layer = (nn + 1) * (cap + 1);
    let index = |k: usize, s: usize, r: usize| k * states_per_layer + s * (cap + 1) + r;

    // value[k][s][r]: best objective over categories k.. given corrected
    // prefix sum s and remaining budget r; None when no completion exists.
    let mut value: Vec<Option<f64>> = vec![None; (y + 1) * states_per_layer];
    for r in 0..=cap {
        value[index(y, nn, r)] = Some(0.0);
    }
    for k in (0..y).rev() {
        for s in 0..=nn {
            for r in 0..=cap {
                let mut best: Option<f64> = None;
                for t in 0..=(nn - s) {
                    let s2 = s + t;
                    let inc = cost_increment(model, counts, &prefix, k, y, s2 as u64, t as u64);
                    let inc = inc as usize;
                    if inc > r {
                        continue;
                    }
                    if let Some(tail) = value[index(k + 1, s2, r - inc)] {
                        let candidate = objective_term(p0[k], t as u64, n_f, measure) + tail;
                        match best {
                            Some(current) if !prefer(direction, candidate, current) => {}
                            _ => best = Some(candidate),
                        }
                    }
                }
                value[index(k, s, r)] = best;
            }
        }
    }

    // Greedy reconstruction: at each category take the smallest corrected
    // count from which the stored optimum stays reachable. The test folds
    // the full chain (chosen terms, candidate term, best completion) in the
    // same right-to-left order the table was built with, so it is an exact
    // floating-point equality. Two suffixes whose values differ by an ulp
    // can still round to the same total once the earlier terms are added;
    // comparing totals rather than suffixes keeps ties identical to the
    // enumeration oracle, and the result is the lexicographically smallest
    // optimal histogram. Addition is weakly monotone, so testing the best
    // completion decides reachability for every completion at once.
    let optimum =
        value[index(0, 0, cap)].expect("keeping the data unchanged always fits the budget");
    let mut chosen = Vec::with_capacity(y);
    let mut picked_terms: Vec<f64> = Vec::with_capacity(y);
    let mut s = 0usize;
    let mut r = cap;
    for k in 0..y {
        let mut advanced = false;
        for t in 0..=(nn - s) {
            let s2 = s + t;
            let inc = cost_increment(model, counts, &prefix, k, y, s2 as u64, t as u64) as usize;
            if inc > r {
                continue;
            }
            if let Some(tail) = value[index(k + 1, s2, r - inc)] {
                let term = objective_term(p0[k], t as u64, n_f, measure);
                let mut total = term + tail;
                for &earlier in picked_terms.iter().rev() {
                    total += earlier;
                }
                if total == optimum {
                    chosen.push(t as u64);
                    picked_terms.push(term);
                    s = s2;
                    r -= inc;
                    advanced = true;
                    break;
                }
            }
        }
        assert!(advanced, "stored optimum must be reachable");
    }

    finalize_solution(problem, chosen)
}

/// Optimality oracle: enumerates every corrected histogram, filters by
/// budget feasibility and keeps the optimum under the same tie rule as
/// [`solve_exact`]. Rejects instances with more than `10^6` histograms.
pub fn solve_bruteforce(problem: &CorrectionProblem) -> Result<CorrectionSolution, Error> {
    problem.validate()?;
    let y = problem.counts.len();
    let n = problem.counts.total();

    let combinations = compositions_count(n, y);
    if combinations > BRUTEFORCE_LIMIT {
        return Err(Error::EnumerationTooLarge {
            size: combinations,
            limit: BRUTEFORCE_LIMIT,
        });
    }

    let n_f = n as f64;
    let counts = problem.counts.as_slice();
    let p0 = problem.p0.as_slice();
    let measure = problem.discrepancy;
    let budget = problem.effective_budget();
    let direction = problem.direction;

    let mut best: Option<(f64, Vec<u64>)> = None;
    let mut candidate = vec![0u64; y];
    // Recursive lexicographic enumeration of all histograms summing to n.
    fn walk(
        position: usize,
        remaining: u64,
        candidate: &mut Vec<u64>,
        visit: &mut impl FnMut(&[u64]),
    ) {
        if position + 1 == candidate.len() {
            candidate[position] = remaining;
            visit(candidate);
            return;
        }
        for t in 0..=remaining {
            candidate[position] = t;
            walk(position + 1, remaining - t, candidate, visit);
        }
    }
    walk(0, n, &mut candidate, &mut |cand: &[u64]| {
        let cost = match problem.cost_model {
            CostModel::ValueDistance => value_cost_slices(counts, cand),
            CostModel::ChangeCount => count_cost_slices(counts, cand),
        };
        if cost > budget {
            return;
        }
        // Right-to-left accumulation, matching the dynamic program exactly.
        let mut objective = 0.0f64;
        for (k, &t) in cand.iter().enumerate().rev() {
            objective += objective_term(p0[k], t, n_f, measure);
        }
        let replace = match &best {
            None => true,
            Some((incumbent, _)) => prefer(direction, objective, *incumbent),
        };
        if replace {
            best = Some((objective, cand.to_vec()));
        }
    });

    let (_, chosen) = best.expect("keeping the data unchanged always fits the budget");
    finalize_solution(problem, chosen)
}

fn finalize_solution(
    problem: &CorrectionProblem,
    chosen: Vec<u64>,
) -> Result<CorrectionSolution, Error> {
    let corrected_counts = CountVector::new(chosen)?;
    let plan = build_min_cost_plan(&problem.counts, &corrected_counts, problem.cost_model)?;
    let cost_used = match problem.cost_model {
        CostModel::ValueDistance => transport_cost_value(&problem.counts, &corrected_counts)?,
        CostModel::ChangeCount => transport_cost_count(&problem.counts, &corrected_counts)?,
    };
    debug_assert!(cost_used <= problem.effective_budget());
    let objective = discrepancy(
        &problem.p0,
        &empirical_pmf(&corrected_counts)?,
        problem.discrepancy,
    )?;
    Ok(CorrectionSolution {
        corrected_counts,
        plan,
        objective,
        cost_used,
    })
}

/// Number of histograms over `y` categories summing to `n`:
/// `C(n + y - 1, y - 1)`, saturating far above the enumeration limit.
fn compositions_count(n: u64, y: usize) -> u128 {
    let mut result: u128 = 1;
    for i in 1..y as u128 {
        result = match result.checked_mul(n as u128 + i) {
            Some(v) => v / i,
            None => return u128::MAX,
        };
        if result > BRUTEFORCE_LIMIT * 1000 {
            return u128::MAX;
        }
    }
    result
}

/// Smallest L1 error any histogram on the `1/n` grid can achieve against
/// `p0`, together with the histogram attaining it.
///
/// Entries are rounded to the nearest count; the rounding residuals then
/// repair the total, adjusting entries with the largest residuals first
/// (ties to the lower index).
pub fn min_error(n: u64, p0: &Pmf) -> (f64, CountVector) {
    debug_assert!(n >= 1);
    let n_f = n as f64;
    let scaled: Vec<f64> = p0.as_slice().iter().map(|&p| p * n_f).collect();
    let mut rounded: Vec<u64> = scaled.iter().map(|&s| s.round() as u64).collect();
    let total: u64 = rounded.iter().sum();

    if total != n {
        // Residual of each entry: positive means the count sits below the
        // real value and is the best candidate for an extra unit.
        let mut order: Vec<usize> = (0..rounded.len()).collect();
        if total < n {
            order.sort_by(|&a, &b| {
                let ra = scaled[a] - rounded[a] as f64;
                let rb = scaled[b] - rounded[b] as f64;
                rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
            });
            let mut missing = n - total;
            for &i in &order {
                if missing == 0 {
                    break;
                }
                rounded[i] += 1;
                missing -= 1;
            }
        } else {
            order.sort_by(|&a, &b| {
                let ra = scaled[a] - rounded[a] as f64;
                let rb = scaled[b] - rounded[b] as f64;
                ra.partial_cmp(&rb).unwrap().then(a.cmp(&b))
            });
            let mut excess = total - n;
            for &i in &order {
                if excess == 0 {
                    break;
                }
                if rounded[i] > 0 {
                    rounded[i] -= 1;
                    excess -= 1;
                }
            }
        }
    }

    let counts = CountVector::new(rounded).expect("p0 is nonempty");
    let best_pmf = empirical_pmf(&counts).expect("total n >= 1");
    let e_min = discrepancy(p0, &best_pmf, DiscrepancyMeasure::L1)
        .expect("dimensions match by construction");
    (e_min, counts)
}

/// Smallest change-count budget that reaches [`min_error`] from the observed
/// distribution `p_hat`: `ceil((n / 2) (||p0 - p_hat||_1 - e_min))`.
///
/// `p_hat` must lie on the `1/n` grid.
pub fn min_budget(n: u64, p0: &Pmf, p_hat: &Pmf) -> Result<u64, Error> {
    require_on_grid(n, p_hat)?;
    if p0.len() != p_hat.len() {
        return Err(Error::DimensionMismatch {
            left: p0.len(),
            right: p_hat.len(),
        });
    }
    let initial = discrepancy(p0, p_hat, DiscrepancyMeasure::L1)?;
    let (e_min, _) = min_error(n, p0);
    let raw = 0.5 * n as f64 * (initial - e_min);
    // Guard the ceiling against values that are integers up to rounding noise.
    let b = (raw - 1e-9).ceil();
    Ok(if b <= 0.0 { 0 } else { b as u64 })
}

/// L1 error the corrected distribution reaches with budget `b` under the
/// change-count cost model, per the closed form
/// `max(||p0 - p_hat||_1 - 2 b / n, e_min)`.
///
/// `p_hat` must lie on the `1/n` grid.
pub fn predicted_error(n: u64, p0: &Pmf, b: u64, p_hat: &Pmf) -> Result<f64, Error> {
    require_on_grid(n, p_hat)?;
    if p0.len() != p_hat.len() {
        return Err(Error::DimensionMismatch {
            left: p0.len(),
            right: p_hat.len(),
        });
    }
    let initial = discrepancy(p0, p_hat, DiscrepancyMeasure::L1)?;
    let (e_min, _) = min_error(n, p0);
    let declined = initial - 2.0 * b as f64 / n as f64;
    Ok(declined.max(e_min))
}

fn require_on_grid(n: u64, p_hat: &Pmf) -> Result<(), Error> {
    if p_hat.grid_counts(n).is_some() {
        return Ok(());
    }
    let n_f = n as f64;
    for (index, &value) in p_hat.as_slice().iter().enumerate() {
        let scaled = value * n_f;
        if (scaled - scaled.round()).abs() > crate::pmf::GRID_TOLERANCE {
            return Err(Error::OffGridPmf { index, value });
        }
    }
    // Entries each sit on the grid but the rounded counts do not sum to n.
    Err(Error::OffGridPmf {
        index: 0,
        value: p_hat.get(0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pmf(v: &[f64]) -> Pmf {
        Pmf::new(v.to_vec()).unwrap()
    }

    fn cv(v: &[u64]) -> CountVector {
        CountVector::new(v.to_vec()).unwrap()
    }

    fn problem(
        p0: &[f64],
        counts: &[u64],
        budget: u64,
        cost_model: CostModel,
        measure: DiscrepancyMeasure,
        direction: Direction,
    ) -> CorrectionProblem {
        CorrectionProblem {
            p0: pmf(p0),
            counts: cv(counts),
            budget,
            cost_model,
            discrepancy: measure,
            direction,
        }
    }

    const P0_REFERENCE: [f64; 3] = [0.12, 0.63, 0.25];

    #[test]
    fn zero_budget_returns_the_original_histogram() {
        let p = problem(
            &P0_REFERENCE,
            &[3, 9, 5],
            0,
            CostModel::ChangeCount,
            DiscrepancyMeasure::L1,
            Direction::Cooperative,
        );
        let sol = solve_exact(&p).unwrap();
        assert_eq!(sol.corrected_counts.as_slice(), &[3, 9, 5]);
        assert_eq!(sol.cost_used, 0);
        let baseline = discrepancy(
            &p.p0,
            &empirical_pmf(&p.counts).unwrap(),
            DiscrepancyMeasure::L1,
        )
        .unwrap();
        assert_eq!(sol.objective, baseline);

        let brute = solve_bruteforce(&p).unwrap();
        assert_eq!(brute.corrected_counts, sol.corrected_counts);
    }

    #[test]
    fn ample_budget_reaches_the_minimum_error_histogram() {
        let (e_min, rounded) = min_error(17, &pmf(&P0_REFERENCE));
        assert_eq!(rounded.as_slice(), &[2, 11, 4]);
        for budget in [2u64, 3, 6, 17] {
            let p = problem(
                &P0_REFERENCE,
                &[3, 9, 5],
                budget,
                CostModel::ChangeCount,
                DiscrepancyMeasure::L1,
                Direction::Cooperative,
            );
            let sol = solve_exact(&p).unwrap();
            assert_eq!(sol.corrected_counts.as_slice(), &[2, 11, 4]);
            assert_eq!(sol.objective, e_min);
            assert_eq!(sol.cost_used, 2);
        }
    }

    #[test]
    fn value_distance_with_saturated_budget_never_binds() {
        let n = 17u64;
        let y = 3u64;
        let p = problem(
            &P0_REFERENCE,
            &[3, 9, 5],
            n * (y - 1),
            CostModel::ValueDistance,
            DiscrepancyMeasure::L1,
            Direction::Cooperative,
        );
        let sol = solve_exact(&p).unwrap();
        let (e_min, _) = min_error(n, &p.p0);
        assert_eq!(sol.objective, e_min);
    }

    #[test]
    fn adversarial_unlimited_budget_piles_on_the_rarest_category() {
        let p = problem(
            &[0.5, 0.2, 0.3],
            &[2, 2, 2],
            12,
            CostModel::ValueDistance,
            DiscrepancyMeasure::L1,
            Direction::Adversarial,
        );
        let exact = solve_exact(&p).unwrap();
        let brute = solve_bruteforce(&p).unwrap();
        assert_eq!(exact.corrected_counts.as_slice(), &[0, 6, 0]);
        assert_eq!(brute.corrected_counts, exact.corrected_counts);
    }

    #[test]
    fn infinite_kl_objective_still_returns_a_solution() {
        // All data sits on a category with no true mass and the budget is
        // zero, so the optimum is unavoidably infinite.
        let p = problem(
            &[0.5, 0.5, 0.0],
            &[0, 0, 4],
            0,
            CostModel::ChangeCount,
            DiscrepancyMeasure::Kl,
            Direction::Cooperative,
        );
        let sol = solve_exact(&p).unwrap();
        assert_eq!(sol.corrected_counts.as_slice(), &[0, 0, 4]);
        assert_eq!(sol.objective, f64::INFINITY);
        let brute = solve_bruteforce(&p).unwrap();
        assert_eq!(brute.corrected_counts, sol.corrected_counts);
        assert_eq!(brute.objective, f64::INFINITY);
    }

    #[test]
    fn enough_budget_escapes_the_zero_support_category() {
        // With four changes available, all mass can leave the category the
        // true distribution never produces, and the objective turns finite.
        let p = problem(
            &[0.5, 0.5, 0.0],
            &[0, 0, 4],
            4,
            CostModel::ChangeCount,
            DiscrepancyMeasure::Kl,
            Direction::Cooperative,
        );
        let sol = solve_exact(&p).unwrap();
        assert_eq!(sol.corrected_counts.get(2), 0);
        assert_eq!(sol.corrected_counts.as_slice(), &[2, 2, 0]);
        assert!(sol.objective.is_finite());
        assert_eq!(sol.cost_used, 4);
        let brute = solve_bruteforce(&p).unwrap();
        assert_eq!(brute.corrected_counts, sol.corrected_counts);
    }

    #[test]
    fn rejects_inconsistent_instances() {
        let p = problem(
            &[0.5, 0.5],
            &[1, 1, 1],
            1,
            CostModel::ChangeCount,
            DiscrepancyMeasure::L1,
            Direction::Cooperative,
        );
        assert!(matches!(
            solve_exact(&p),
            Err(Error::DimensionMismatch { .. })
        ));

        let p = problem(
            &[0.5, 0.5],
            &[0, 0],
            1,
            CostModel::ChangeCount,
            DiscrepancyMeasure::L1,
            Direction::Cooperative,
        );
        assert!(matches!(solve_exact(&p), Err(Error::ZeroTotal)));
    }

    #[test]
    fn bruteforce_rejects_oversized_instances() {
        let p = problem(
            &[0.25; 4],
            &[250, 250, 250, 250],
            1,
            CostModel::ChangeCount,
            DiscrepancyMeasure::L1,
            Direction::Cooperative,
        );
        assert!(matches!(
            solve_bruteforce(&p),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn min_error_examples() {
        // Exactly on the grid: no rounding error.
        let p0 = pmf(&[0.25, 0.5, 0.25]);
        let (e, counts) = min_error(4, &p0);
        assert_eq!(e, 0.0);
        assert_eq!(counts.as_slice(), &[1, 2, 1]);

        let (e, counts) = min_error(17, &pmf(&P0_REFERENCE));
        assert_eq!(counts.as_slice(), &[2, 11, 4]);
        assert!((e - 0.034118).abs() < 1e-6);

        let (e, counts) = min_error(1, &pmf(&[0.4, 0.6]));
        assert_eq!(counts.as_slice(), &[0, 1]);
        assert!((e - 0.8).abs() < 1e-12);
    }

    #[test]
    fn min_error_repairs_the_total() {
        // 0.3 * 10 rounds to 3 entrywise giving total 9; the largest residual
        // takes the missing unit.
        let p0 = pmf(&[0.26, 0.26, 0.48]);
        let (_, counts) = min_error(50, &p0);
        assert_eq!(counts.total(), 50);
        assert_eq!(counts.as_slice(), &[13, 13, 24]);

        // A half-way entry rounds up, overshooting the total; the smallest
        // residual gives a unit back, ties to the lower index.
        let p0 = pmf(&[0.25, 0.25, 0.5]);
        let (e, counts) = min_error(2, &p0);
        assert_eq!(counts.total(), 2);
        assert_eq!(counts.as_slice(), &[0, 1, 1]);
        assert!((e - 0.5).abs() < 1e-12);
    }

    #[test]
    fn min_budget_examples() {
        let p0 = pmf(&P0_REFERENCE);
        let (_, rounded) = min_error(17, &p0);
        let best = empirical_pmf(&rounded).unwrap();
        assert_eq!(min_budget(17, &p0, &best).unwrap(), 0);

        let observed = empirical_pmf(&cv(&[3, 9, 5])).unwrap();
        assert_eq!(min_budget(17, &p0, &observed).unwrap(), 2);
    }

    #[test]
    fn min_budget_matches_the_solver_plateau() {
        let p0 = pmf(&P0_REFERENCE);
        let observed = empirical_pmf(&cv(&[3, 9, 5])).unwrap();
        let (e_min, _) = min_error(17, &p0);
        let b_min = min_budget(17, &p0, &observed).unwrap();
        let mut first_plateau = None;
        for budget in 0..=17u64 {
            let p = problem(
                &P0_REFERENCE,
                &[3, 9, 5],
                budget,
                CostModel::ChangeCount,
                DiscrepancyMeasure::L1,
                Direction::Cooperative,
            );
            let sol = solve_exact(&p).unwrap();
            if first_plateau.is_none() && sol.objective <= e_min + 1e-12 {
                first_plateau = Some(budget);
            }
        }
        assert_eq!(first_plateau, Some(b_min));
    }

    #[test]
    fn off_grid_distributions_are_rejected() {
        let p0 = pmf(&P0_REFERENCE);
        let off = pmf(&[0.2, 0.5, 0.3]);
        assert!(matches!(
            min_budget(17, &p0, &off),
            Err(Error::OffGridPmf { .. })
        ));
        assert!(matches!(
            predicted_error(17, &p0, 1, &off),
            Err(Error::OffGridPmf { .. })
        ));
    }

    #[test]
    fn predicted_error_examples() {
        let p0 = pmf(&P0_REFERENCE);
        let observed = empirical_pmf(&cv(&[3, 9, 5])).unwrap();
        let initial = discrepancy(&p0, &observed, DiscrepancyMeasure::L1).unwrap();
        let (e_min, _) = min_error(17, &p0);

        assert_eq!(predicted_error(17, &p0, 0, &observed).unwrap(), initial);
        let at_one = predicted_error(17, &p0, 1, &observed).unwrap();
        assert!((at_one - (initial - 2.0 / 17.0)).abs() < 1e-15);
        for b in 2..=17u64 {
            assert_eq!(predicted_error(17, &p0, b, &observed).unwrap(), e_min);
        }
    }

    #[test]
    fn cooperative_objective_is_monotone_in_budget() {
        for model in [CostModel::ChangeCount, CostModel::ValueDistance] {
            for measure in [
                DiscrepancyMeasure::L1,
                DiscrepancyMeasure::L2,
                DiscrepancyMeasure::Kl,
            ] {
                let mut previous = f64::INFINITY;
                for budget in 0..=10u64 {
                    let p = problem(
                        &[0.1, 0.6, 0.3],
                        &[4, 1, 2],
                        budget,
                        model,
                        measure,
                        Direction::Cooperative,
                    );
                    let sol = solve_exact(&p).unwrap();
                    assert!(sol.objective <= previous + 1e-12);
                    assert!(sol.cost_used <= budget);
                    previous = sol.objective;
                }
            }
        }
    }

    #[test]
    fn change_count_is_never_more_restrictive_than_value_distance() {
        for budget in 0..=8u64 {
            let mut objectives = Vec::new();
            for model in [CostModel::ChangeCount, CostModel::ValueDistance] {
                let p = problem(
                    &[0.7, 0.1, 0.2],
                    &[1, 5, 2],
                    budget,
                    model,
                    DiscrepancyMeasure::L1,
                    Direction::Cooperative,
                );
                objectives.push(solve_exact(&p).unwrap().objective);
            }
            assert!(objectives[0] <= objectives[1] + 1e-15);
        }
    }

    #[test]
    fn solution_plan_certifies_the_reported_cost() {
        let p = problem(
            &P0_REFERENCE,
            &[3, 9, 5],
            4,
            CostModel::ValueDistance,
            DiscrepancyMeasure::L2,
            Direction::Cooperative,
        );
        let sol = solve_exact(&p).unwrap();
        assert_eq!(sol.plan.row_sums(), p.counts.as_slice());
        assert_eq!(sol.plan.column_sums(), sol.corrected_counts.as_slice());
        assert_eq!(sol.plan.cost(CostModel::ValueDistance), sol.cost_used);
        assert!(sol.cost_used <= 4);
    }

    #[test]
    fn objective_is_bounded_below_by_the_minimum_error() {
        let p0 = pmf(&P0_REFERENCE);
        let (e_min, _) = min_error(17, &p0);
        for budget in 0..=17u64 {
            let p = problem(
                &P0_REFERENCE,
                &[3, 9, 5],
                budget,
                CostModel::ChangeCount,
                DiscrepancyMeasure::L1,
                Direction::Cooperative,
            );
            let sol = solve_exact(&p).unwrap();
            assert!(sol.objective >= e_min - 1e-12);
        }
    }
}
