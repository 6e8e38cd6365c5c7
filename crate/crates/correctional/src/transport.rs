//! Correction costs between histograms, realized as 1-D transport.
//!
//! Moving an observation from category `i` to category `j` costs `|i - j|`
//! under [`CostModel::ValueDistance`] and `1` under [`CostModel::ChangeCount`].
//! For histograms on the line, the minimum total value-distance over all
//! relabelings has a closed form: the sum of absolute differences of prefix
//! sums. The minimum change count is half the L1 distance between the
//! histograms. Both minima are attained by the same monotone plan that
//! matches surpluses to deficits from left to right.

use crate::dataset::{CountVector, ObservationDataset};
use crate::error::Error;

/// How the teacher's corrections are charged against the budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostModel {
    /// Each moved observation costs the distance `|i - j|` between its old
    /// and new category.
    ValueDistance,
    /// Each changed observation costs 1, regardless of distance.
    ChangeCount,
}

/// Integer flow between two histograms with equal totals.
///
/// `flow(i, j)` observations move from category `i` to category `j`
/// (0-based); diagonal entries stay unchanged. Row sums equal the source
/// histogram, column sums the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportPlan {
    flows: Vec<Vec<u64>>,
}

impl TransportPlan {
    pub fn new(flows: Vec<Vec<u64>>) -> Result<Self, Error> {
        if flows.is_empty() {
            return Err(Error::EmptyHistogram);
        }
        let dim = flows.len();
        for row in &flows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: row.len(),
                });
            }
        }
        Ok(Self { flows })
    }

    pub fn dim(&self) -> usize {
        self.flows.len()
    }

    pub fn flow(&self, from: usize, to: usize) -> u64 {
        self.flows[from][to]
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.flows.iter().map(|row| row.iter().sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<u64> {
        let dim = self.dim();
        let mut sums = vec![0u64; dim];
        for row in &self.flows {
            for (j, &f) in row.iter().enumerate() {
                sums[j] += f;
            }
        }
        sums
    }

    /// Total cost of the plan under the given model.
    pub fn cost(&self, model: CostModel) -> u64 {
        let mut total = 0u64;
        for (i, row) in self.flows.iter().enumerate() {
            for (j, &f) in row.iter().enumerate() {
                if i == j {
                    continue;
                }
                total += match model {
                    CostModel::ValueDistance => f * (i.abs_diff(j) as u64),
                    CostModel::ChangeCount => f,
                };
            }
        }
        total
    }
}

fn check_equal_totals(c: &CountVector, c_tilde: &CountVector) -> Result<(), Error> {
    if c.len() != c_tilde.len() {
        return Err(Error::DimensionMismatch {
            left: c.len(),
            right: c_tilde.len(),
        });
    }
    let (a, b) = (c.total(), c_tilde.total());
    if a != b {
        return Err(Error::TotalMismatch { left: a, right: b });
    }
    Ok(())
}

pub(crate) fn value_cost_slices(c: &[u64], c_tilde: &[u64]) -> u64 {
    let mut prefix_a = 0u64;
    let mut prefix_b = 0u64;
    let mut cost = 0u64;
    // The final prefixes are equal, so the last boundary contributes nothing.
    for k in 0..c.len().saturating_sub(1) {
        prefix_a += c[k];
        prefix_b += c_tilde[k];
        cost += prefix_a.abs_diff(prefix_b);
    }
    cost
}

pub(crate) fn count_cost_slices(c: &[u64], c_tilde: &[u64]) -> u64 {
    c.iter()
        .zip(c_tilde)
        .map(|(&a, &b)| a.saturating_sub(b))
        .sum()
}

/// Minimum total value distance needed to turn histogram `c` into `c_tilde`.
pub fn transport_cost_value(c: &CountVector, c_tilde: &CountVector) -> Result<u64, Error> {
    check_equal_totals(c, c_tilde)?;
    Ok(value_cost_slices(c.as_slice(), c_tilde.as_slice()))
}

/// Number of observations that must change to turn `c` into `c_tilde`.
pub fn transport_cost_count(c: &CountVector, c_tilde: &CountVector) -> Result<u64, Error> {
    check_equal_totals(c, c_tilde)?;
    Ok(count_cost_slices(c.as_slice(), c_tilde.as_slice()))
}

/// Builds the monotone flow from `c` to `c_tilde`: surpluses are matched to
/// deficits from left to right. The resulting plan attains the
/// [`transport_cost_value`] minimum and the [`transport_cost_count`] minimum
/// simultaneously, so `cost_model` only selects which guarantee the caller
/// relies on.
pub fn build_min_cost_plan(
    c: &CountVector,
    c_tilde: &CountVector,
    cost_model: CostModel,
) -> Result<TransportPlan, Error> {
    check_equal_totals(c, c_tilde)?;
    let dim = c.len();
    let mut flows = vec![vec![0u64; dim]; dim];
    let mut surpluses: Vec<(usize, u64)> = Vec::new();
    let mut deficits: Vec<(usize, u64)> = Vec::new();
    for (i, row) in flows.iter_mut().enumerate() {
        let (a, b) = (c.get(i), c_tilde.get(i));
        row[i] = a.min(b);
        if a > b {
            surpluses.push((i, a - b));
        } else if b > a {
            deficits.push((i, b - a));
        }
    }
    let (mut si, mut di) = (0, 0);
    while si < surpluses.len() {
        let (from, ref mut avail) = surpluses[si];
        let (to, ref mut need) = deficits[di];
        let moved = (*avail).min(*need);
        flows[from][to] += moved;
        *avail -= moved;
        *need -= moved;
        if surpluses[si].1 == 0 {
            si += 1;
        }
        if deficits[di].1 == 0 {
            di += 1;
        }
    }
    let plan = TransportPlan { flows };
    debug_assert_eq!(
        plan.cost(cost_model),
        match cost_model {
            CostModel::ValueDistance => value_cost_slices(c.as_slice(), c_tilde.as_slice()),
            CostModel::ChangeCount => count_cost_slices(c.as_slice(), c_tilde.as_slice()),
        }
    );
    Ok(plan)
}

/// Applies a transport plan to a concrete observation sequence.
///
/// For each off-diagonal flow `(i, j)`, visited in ascending `(i, j)` order,
/// the earliest not-yet-reassigned occurrences of category `i` are relabeled
/// to `j`. The remaining occurrences keep their value, so the output has the
/// plan's column sums as its histogram and the same length as the input.
pub fn apply_plan_to_sequence(
    dataset: &ObservationDataset,
    plan: &TransportPlan,
) -> Result<ObservationDataset, Error> {
    let dim = dataset.num_categories() as usize;
    if plan.dim() != dim {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: plan.dim(),
        });
    }
    let counts = crate::dataset::counts_from_dataset(dataset);
    let row_sums = plan.row_sums();
    if row_sums != counts.as_slice() {
        return Err(Error::InfeasiblePlan {
            detail: format!(
                "plan row sums {:?} do not match dataset counts {:?}",
                row_sums,
                counts.as_slice()
            ),
        });
    }

    // Occurrence positions per category, in time order, with a consumption
    // cursor each.
    let mut occurrences: Vec<Vec<usize>> = vec![Vec::new(); dim];
    for (pos, &value) in dataset.values().iter().enumerate() {
        occurrences[(value - 1) as usize].push(pos);
    }
    let mut cursor = vec![0usize; dim];

    let mut corrected = dataset.values().to_vec();
    for i in 0..dim {
        for j in 0..dim {
            if i == j {
                continue;
            }
            for _ in 0..plan.flow(i, j) {
                let pos = occurrences[i][cursor[i]];
                cursor[i] += 1;
                corrected[pos] = (j + 1) as u32;
            }
        }
    }
    ObservationDataset::new(corrected, dataset.num_categories())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::counts_from_dataset;
    use crate::rng::SplitMix64;

    fn cv(v: &[u64]) -> CountVector {
        CountVector::new(v.to_vec()).unwrap()
    }

    /// Minimum of `sum f[i][j] * |i - j|` over all nonnegative integer flows
    /// with the given marginals, by exhaustive recursion. Test oracle only.
    fn min_flow_cost_bruteforce(rows: &[u64], cols: &[u64]) -> u64 {
        fn recurse(row: usize, rows: &[u64], remaining: &mut Vec<u64>, acc: u64, best: &mut u64) {
            if row == rows.len() {
                if remaining.iter().all(|&r| r == 0) {
                    *best = (*best).min(acc);
                }
                return;
            }
            fn distribute(
                row: usize,
                col: usize,
                left: u64,
                rows: &[u64],
                remaining: &mut Vec<u64>,
                acc: u64,
                best: &mut u64,
            ) {
                if col == remaining.len() {
                    if left == 0 {
                        recurse(row + 1, rows, remaining, acc, best);
                    }
                    return;
                }
                let max_here = left.min(remaining[col]);
                for f in 0..=max_here {
                    remaining[col] -= f;
                    let cost = f * (row.abs_diff(col) as u64);
                    distribute(row, col + 1, left - f, rows, remaining, acc + cost, best);
                    remaining[col] += f;
                }
            }
            distribute(row, 0, rows[row], rows, remaining, acc, best);
        }
        let mut best = u64::MAX;
        let mut remaining = cols.to_vec();
        recurse(0, rows, &mut remaining, 0, &mut best);
        best
    }

    #[test]
    fn value_cost_examples() {
        assert_eq!(
            transport_cost_value(&cv(&[2, 0, 1]), &cv(&[2, 0, 1])).unwrap(),
            0
        );
        assert_eq!(
            transport_cost_value(&cv(&[2, 0, 1]), &cv(&[1, 1, 1])).unwrap(),
            1
        );
        assert_eq!(
            transport_cost_value(&cv(&[3, 0, 0]), &cv(&[0, 0, 3])).unwrap(),
            6
        );
    }

    #[test]
    fn count_cost_examples() {
        assert_eq!(
            transport_cost_count(&cv(&[2, 0, 1]), &cv(&[2, 0, 1])).unwrap(),
            0
        );
        assert_eq!(
            transport_cost_count(&cv(&[2, 0, 1]), &cv(&[1, 1, 1])).unwrap(),
            1
        );
        assert_eq!(
            transport_cost_count(&cv(&[3, 0, 0]), &cv(&[0, 0, 3])).unwrap(),
            3
        );
    }

    #[test]
    fn unequal_totals_are_rejected() {
        let e = transport_cost_value(&cv(&[1, 0]), &cv(&[1, 1]));
        assert!(matches!(e, Err(Error::TotalMismatch { left: 1, right: 2 })));
        assert!(transport_cost_count(&cv(&[1, 0]), &cv(&[1, 1])).is_err());
        assert!(build_min_cost_plan(&cv(&[1, 0]), &cv(&[1, 1]), CostModel::ChangeCount).is_err());
    }

    #[test]
    fn value_cost_matches_flow_enumeration_on_small_histograms() {
        // Spot check; the acceptance suite runs the full grid.
        let mut rng = SplitMix64::new(5);
        for _ in 0..200 {
            let y = 2 + rng.next_below(2) as usize;
            let total = 1 + rng.next_below(4);
            let mut a = vec![0u64; y];
            let mut b = vec![0u64; y];
            for _ in 0..total {
                a[rng.next_below(y as u64) as usize] += 1;
                b[rng.next_below(y as u64) as usize] += 1;
            }
            let closed = transport_cost_value(&cv(&a), &cv(&b)).unwrap();
            assert_eq!(closed, min_flow_cost_bruteforce(&a, &b), "{a:?} -> {b:?}");
        }
    }

    #[test]
    fn change_count_never_exceeds_value_distance() {
        let mut rng = SplitMix64::new(6);
        for _ in 0..300 {
            let y = 2 + rng.next_below(3) as usize;
            let total = 1 + rng.next_below(10);
            let mut a = vec![0u64; y];
            let mut b = vec![0u64; y];
            for _ in 0..total {
                a[rng.next_below(y as u64) as usize] += 1;
                b[rng.next_below(y as u64) as usize] += 1;
            }
            let value = transport_cost_value(&cv(&a), &cv(&b)).unwrap();
            let count = transport_cost_count(&cv(&a), &cv(&b)).unwrap();
            assert!(count <= value);
        }
    }

    #[test]
    fn plan_examples_and_marginals() {
        let plan =
            build_min_cost_plan(&cv(&[1, 1]), &cv(&[1, 1]), CostModel::ValueDistance).unwrap();
        assert_eq!(plan.flow(0, 0), 1);
        assert_eq!(plan.flow(1, 1), 1);
        assert_eq!(plan.cost(CostModel::ValueDistance), 0);

        let plan = build_min_cost_plan(&cv(&[2, 0, 1]), &cv(&[1, 1, 1]), CostModel::ValueDistance)
            .unwrap();
        assert_eq!(plan.flow(0, 1), 1);
        assert_eq!(plan.cost(CostModel::ValueDistance), 1);
        assert_eq!(plan.row_sums(), vec![2, 0, 1]);
        assert_eq!(plan.column_sums(), vec![1, 1, 1]);

        let plan = build_min_cost_plan(&cv(&[3, 0, 0]), &cv(&[0, 0, 3]), CostModel::ValueDistance)
            .unwrap();
        assert_eq!(plan.flow(0, 2), 3);
        assert_eq!(plan.cost(CostModel::ValueDistance), 6);
    }

    #[test]
    fn plan_cost_equals_closed_form_for_both_models() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..300 {
            let y = 2 + rng.next_below(3) as usize;
            let total = 1 + rng.next_below(12);
            let mut a = vec![0u64; y];
            let mut b = vec![0u64; y];
            for _ in 0..total {
                a[rng.next_below(y as u64) as usize] += 1;
                b[rng.next_below(y as u64) as usize] += 1;
            }
            let (a, b) = (cv(&a), cv(&b));
            let plan = build_min_cost_plan(&a, &b, CostModel::ValueDistance).unwrap();
            assert_eq!(
                plan.cost(CostModel::ValueDistance),
                transport_cost_value(&a, &b).unwrap()
            );
            assert_eq!(
                plan.cost(CostModel::ChangeCount),
                transport_cost_count(&a, &b).unwrap()
            );
            assert_eq!(plan.row_sums(), a.as_slice());
            assert_eq!(plan.column_sums(), b.as_slice());
        }
    }

    #[test]
    fn identity_plan_leaves_sequence_unchanged() {
        let d = ObservationDataset::new(vec![1, 2, 1], 2).unwrap();
        let counts = counts_from_dataset(&d);
        let plan = build_min_cost_plan(&counts, &counts, CostModel::ChangeCount).unwrap();
        assert_eq!(apply_plan_to_sequence(&d, &plan).unwrap(), d);
    }

    #[test]
    fn earliest_occurrences_are_relabeled_first() {
        let plan = TransportPlan::new(vec![vec![1, 1], vec![0, 1]]).unwrap();

        let d = ObservationDataset::new(vec![1, 1, 2], 2).unwrap();
        let out = apply_plan_to_sequence(&d, &plan).unwrap();
        assert_eq!(out.values(), &[2, 1, 2]);
        assert_eq!(
            counts_from_dataset(&out).as_slice(),
            plan.column_sums().as_slice()
        );

        let d = ObservationDataset::new(vec![2, 1, 1], 2).unwrap();
        let out = apply_plan_to_sequence(&d, &plan).unwrap();
        assert_eq!(out.values(), &[2, 2, 1]);
    }

    #[test]
    fn infeasible_plan_is_rejected() {
        let d = ObservationDataset::new(vec![1, 1, 2], 2).unwrap();
        let plan = TransportPlan::new(vec![vec![0, 1], vec![0, 2]]).unwrap();
        assert!(matches!(
            apply_plan_to_sequence(&d, &plan),
            Err(Error::InfeasiblePlan { .. })
        ));
    }

    #[test]
    fn applied_plans_reproduce_column_sums() {
        let mut rng = SplitMix64::new(8);
        for _ in 0..200 {
            let y = 2 + rng.next_below(3) as u32;
            let n = 1 + rng.next_below(15);
            let values: Vec<u32> = (0..n)
                .map(|_| 1 + rng.next_below(y as u64) as u32)
                .collect();
            let d = ObservationDataset::new(values, y).unwrap();
            let counts = counts_from_dataset(&d);
            let mut target = vec![0u64; y as usize];
            for _ in 0..counts.total() {
                target[rng.next_below(y as u64) as usize] += 1;
            }
            let target = cv(&target);
            let plan = build_min_cost_plan(&counts, &target, CostModel::ValueDistance).unwrap();
            let out = apply_plan_to_sequence(&d, &plan).unwrap();
            assert_eq!(counts_from_dataset(&out).as_slice(), target.as_slice());
            assert_eq!(out.len(), d.len());
        }
    }
}
