//! Entering-column policies and the two pivot-row selection rules.
//!
//! BR walks the positive-entry ratios in non-decreasing order, bypassing a
//! candidate while the entering column's marginal cost stays positive (each
//! bypass costs twice the weighted element); the stop row maximizes the
//! one-step SAR decrease. WM instead takes the weighted median of all finite
//! signed ratios, weighted by `w * |entry|` -- cheaper per pivot, but it may
//! raise SAR or cycle, which the solver's safeguard handles.

use crate::error::{Error, Result};
use crate::tableau::{CondensedTableau, EnteringCandidate, Label};

/// How the entering column is picked during the first two iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ColumnPolicy {
    /// Largest positive marginal cost; ties go to the first column.
    #[default]
    MaxMarginalCost,
    /// Intercept pair first, then the slope pair.
    InterceptFirst,
    /// Slope pair first, then the intercept pair.
    SlopeFirst,
}

/// Pivot-row selection rule used for one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotRule {
    Br,
    Wm,
}

/// Choose the entering move. While a parameter pair is still outside the
/// basis and eligible, entry is restricted to parameter columns (the first
/// two iterations); afterwards the eligible move with the largest marginal
/// cost wins, ties to the first column. A parameter whose marginal cost is
/// within tolerance of zero is skipped, which is how one-parameter solutions
/// arise.
pub fn select_entering(
    tab: &CondensedTableau,
    policy: ColumnPolicy,
) -> Result<EnteringCandidate> {
    let candidates = tab.entering_candidates();
    if candidates.is_empty() {
        return Err(Error::NotConverged);
    }
    let toler = tab.toler();
    let params: Vec<&EnteringCandidate> = candidates
        .iter()
        .filter(|c| c.label.is_param())
        .collect();
    if !params.is_empty() {
        let preferred = match policy {
            ColumnPolicy::MaxMarginalCost => best_of(params.iter().copied(), toler),
            ColumnPolicy::InterceptFirst => params
                .iter()
                .copied()
                .find(|c| c.label.param_index() == Some(0))
                .unwrap_or(params[0]),
            ColumnPolicy::SlopeFirst => params
                .iter()
                .copied()
                .find(|c| c.label.param_index() == Some(1))
                .unwrap_or(params[0]),
        };
        return Ok(*preferred);
    }
    Ok(*best_of(candidates.iter(), toler))
}

/// First encountered among marginal costs tied within the tolerance.
fn best_of<'a>(
    iter: impl Iterator<Item = &'a EnteringCandidate>,
    toler: f64,
) -> &'a EnteringCandidate {
    let mut best: Option<&EnteringCandidate> = None;
    for c in iter {
        match best {
            Some(b) if c.effective_mc <= b.effective_mc + toler => {}
            _ => best = Some(c),
        }
    }
    best.expect("non-empty")
}

/// Outcome of a pivot-row selection.
#[derive(Debug, Clone, Copy)]
pub struct RowChoice {
    pub row: usize,
    /// candidates skipped by the BR walk
    pub bypasses: u64,
    /// value comparisons spent by the WM selection
    pub comparisons: u64,
}

/// BR rule: sort candidate rows (positive entries, data labels only) by
/// ratio, then bypass while the running marginal cost stays positive.
pub fn br_pivot_row(tab: &CondensedTableau, col: usize, flipped: bool) -> Result<RowChoice> {
    let toler = tab.toler();
    let mut candidates: Vec<(f64, usize, f64)> = Vec::new();
    for (i, r) in tab.rows().iter().enumerate() {
        if r.label.is_param() {
            continue;
        }
        let e = tab.entry(i, col, flipped);
        if e > toler {
            candidates.push((r.rhs / e, i, e));
        }
    }
    if candidates.is_empty() {
        return Err(Error::NonPositivePivot);
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut mc = tab.effective_mc(col, flipped);
    let mut bypasses = 0u64;
    let last = candidates.len() - 1;
    for (k, &(_, row, e)) in candidates.iter().enumerate() {
        // bypass while the reduced cost stays non-negative; stop at the
        // first candidate that would drive it negative
        let next = mc - 2.0 * tab.weight_of_row(row) * e;
        if next >= -toler && k < last {
            mc = next;
            bypasses += 1;
            continue;
        }
        return Ok(RowChoice {
            row,
            bypasses,
            comparisons: 0,
        });
    }
    unreachable!("loop returns on the last candidate");
}

/// WM rule: the row whose ratio is the weighted median of all finite signed
/// ratios (data rows only), weighted by `w * |entry|`. If the median lands
/// on a negative entry the nearest pivotable candidate in ratio order is
/// taken instead.
pub fn wm_pivot_row(tab: &CondensedTableau, col: usize, flipped: bool) -> Result<RowChoice> {
    let toler = tab.toler();
    let mut rows: Vec<usize> = Vec::new();
    let mut ratios: Vec<f64> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let mut entries: Vec<f64> = Vec::new();
    for (i, r) in tab.rows().iter().enumerate() {
        if r.label.is_param() {
            continue;
        }
        let e = tab.entry(i, col, flipped);
        if e.abs() > toler {
            rows.push(i);
            ratios.push(r.rhs / e);
            weights.push(tab.weight_of_row(i) * e.abs());
            entries.push(e);
        }
    }
    if rows.is_empty() || !entries.iter().any(|&e| e > toler) {
        return Err(Error::NonPositivePivot);
    }

    let mut comparisons = 0u64;
    let select = weighted_median_select(&ratios, &weights, &mut comparisons);
    // Walk any equal-ratio class in row order and take the candidate where
    // the cumulative weight first reaches half the total, matching the
    // bypass walk's crossing semantics.
    let half: f64 = weights.iter().sum::<f64>() / 2.0;
    let mut acc = select.weight_below;
    let mut median = select.lowest_index;
    for k in 0..ratios.len() {
        if ratios[k] == select.value {
            comparisons += 1;
            acc += weights[k];
            median = k;
            if acc >= half {
                break;
            }
        }
    }
    if entries[median] > toler {
        return Ok(RowChoice {
            row: rows[median],
            bypasses: 0,
            comparisons,
        });
    }

    // Median ratio sits on a negative entry: scan outward in ratio order for
    // the nearest candidate that can actually serve as a pivot.
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| {
        comparisons += 1;
        ratios[a].total_cmp(&ratios[b]).then(rows[a].cmp(&rows[b]))
    });
    let pos = order.iter().position(|&k| k == median).expect("present");
    for step in 1..order.len() {
        for cand in [pos.checked_add(step), pos.checked_sub(step)]
            .into_iter()
            .flatten()
        {
            if cand < order.len() && entries[order[cand]] > toler {
                return Ok(RowChoice {
                    row: rows[order[cand]],
                    bypasses: 0,
                    comparisons,
                });
            }
        }
    }
    Err(Error::NonPositivePivot)
}

/// A sample of values with positive weights.
#[derive(Debug, Clone)]
pub struct WeightedSample {
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl WeightedSample {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.len() != weights.len() {
            return Err(Error::EmptySample);
        }
        if weights.iter().any(|&w| !(w.is_finite() && w > 0.0)) {
            return Err(Error::EmptySample);
        }
        Ok(Self { values, weights })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Lower weighted median of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedMedian {
    pub value: f64,
    /// position of the median element in the input sample (lowest index
    /// among equal values)
    pub index: usize,
}

/// Lower weighted median: the smallest value `x` such that the weight
/// strictly below `x` is `< W/2` and the weight at or below `x` is `>= W/2`.
/// Expected linear time by three-way partition selection; the input is
/// never fully sorted.
pub fn weighted_median(sample: &WeightedSample) -> WeightedMedian {
    let mut comparisons = 0u64;
    let index = weighted_median_index(&sample.values, &sample.weights, &mut comparisons);
    WeightedMedian {
        value: sample.values[index],
        index,
    }
}

/// Result of the selection: the median value, the lowest sample index
/// holding it, and the total weight strictly below it.
#[derive(Debug, Clone, Copy)]
pub(crate) struct MedianSelect {
    pub value: f64,
    pub lowest_index: usize,
    pub weight_below: f64,
}

/// Index of the lower weighted median of `values`; `comparisons` counts the
/// value comparisons spent (used to bound the per-pivot cost).
pub(crate) fn weighted_median_index(
    values: &[f64],
    weights: &[f64],
    comparisons: &mut u64,
) -> usize {
    weighted_median_select(values, weights, comparisons).lowest_index
}

pub(crate) fn weighted_median_select(
    values: &[f64],
    weights: &[f64],
    comparisons: &mut u64,
) -> MedianSelect {
    debug_assert_eq!(values.len(), weights.len());
    debug_assert!(!values.is_empty());
    let total: f64 = weights.iter().sum();
    let half = total / 2.0;

    let mut idx: Vec<usize> = (0..values.len()).collect();
    let mut lo = 0usize;
    let mut hi = values.len();
    let mut below = 0.0f64;

    loop {
        if hi - lo == 1 {
            return MedianSelect {
                value: values[idx[lo]],
                lowest_index: idx[lo],
                weight_below: below,
            };
        }
        let pivot = pick_pivot(values, &idx[lo..hi], comparisons);

        // three-way partition of idx[lo..hi] by values against pivot
        let mut less: Vec<usize> = Vec::new();
        let mut equal: Vec<usize> = Vec::new();
        let mut greater: Vec<usize> = Vec::new();
        let mut w_less = 0.0f64;
        let mut w_equal = 0.0f64;
        for &k in &idx[lo..hi] {
            *comparisons += 1;
            if values[k] < pivot {
                less.push(k);
                w_less += weights[k];
            } else if values[k] > pivot {
                *comparisons += 1;
                greater.push(k);
            } else {
                *comparisons += 1;
                equal.push(k);
                w_equal += weights[k];
            }
        }

        // The empty-block guards absorb float drift at exact-half
        // boundaries: with exact sums neither degenerate branch is taken.
        if below + w_less >= half && !less.is_empty() {
            // median lies strictly below the pivot value
            let n = less.len();
            idx.splice(lo..hi, less.into_iter().chain(equal).chain(greater));
            hi = lo + n;
        } else if below + w_less + w_equal >= half || greater.is_empty() {
            return MedianSelect {
                value: pivot,
                lowest_index: equal.into_iter().min().expect("equal block non-empty"),
                weight_below: below + w_less,
            };
        } else {
            below += w_less + w_equal;
            let n_less = less.len();
            let n_equal = equal.len();
            idx.splice(lo..hi, less.into_iter().chain(equal).chain(greater));
            lo += n_less + n_equal;
        }
    }
}

/// Median-of-three pivot (ninther for larger ranges) over the index window.
fn pick_pivot(values: &[f64], window: &[usize], comparisons: &mut u64) -> f64 {
    let n = window.len();
    let v = |k: usize| values[window[k]];
    if n < 8 {
        return v(n / 2);
    }
    let med3 = |a: f64, b: f64, c: f64, comparisons: &mut u64| -> f64 {
        *comparisons += 3;
        a.max(b).min(c.max(a.min(b)))
    };
    if n < 128 {
        med3(v(0), v(n / 2), v(n - 1), comparisons)
    } else {
        let s = n / 8;
        let a = med3(v(0), v(s), v(2 * s), comparisons);
        let b = med3(v(n / 2 - s), v(n / 2), v(n / 2 + s), comparisons);
        let c = med3(v(n - 1 - 2 * s), v(n - 1 - s), v(n - 1), comparisons);
        med3(a, b, c, comparisons)
    }
}

/// Convenience: the entering label realized by a candidate column/flip pair.
pub fn entering_label(tab: &CondensedTableau, col: usize, flipped: bool) -> Label {
    if flipped {
        tab.col_labels()[col].negated()
    } else {
        tab.col_labels()[col]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{DataSet, Tolerance};

    fn five_point_tab() -> CondensedTableau {
        let ds =
            DataSet::from_pairs(&[(1.0, 1.0), (2.0, 1.0), (3.0, 2.0), (4.0, 3.0), (5.0, 2.0)])
                .unwrap();
        CondensedTableau::new(&ds, Tolerance::default())
    }

    #[test]
    fn entering_prefers_largest_marginal_cost() {
        let tab = five_point_tab();
        let c = select_entering(&tab, ColumnPolicy::MaxMarginalCost).unwrap();
        assert_eq!(c.col, 1);
        assert_eq!(c.effective_mc, 15.0);
        assert!(!c.flipped);
    }

    #[test]
    fn intercept_first_overrides_magnitude() {
        let ds = crate::datasets::cpi_window(11, 3).unwrap();
        let tab = CondensedTableau::new(&ds, Tolerance::default());
        assert_eq!(tab.marginal_costs(), [11.0, 88.0]);
        let c = select_entering(&tab, ColumnPolicy::InterceptFirst).unwrap();
        assert_eq!(c.col, 0);
        let c = select_entering(&tab, ColumnPolicy::SlopeFirst).unwrap();
        assert_eq!(c.col, 1);
    }

    #[test]
    fn entering_tie_takes_first_column() {
        use crate::tableau::{Label, TableauRow};
        let rows = vec![
            TableauRow {
                label: Label::new(3),
                cols: [1.0, 2.0],
                rhs: 3.0,
            },
            TableauRow {
                label: Label::new(4),
                cols: [1.0, 5.0],
                rhs: 4.0,
            },
        ];
        let tab = CondensedTableau::from_raw(
            rows,
            [Label::new(1), Label::new(2)],
            [7.0, 7.0],
            7.0,
            vec![1.0, 1.0],
            1e-11,
        );
        let c = select_entering(&tab, ColumnPolicy::MaxMarginalCost).unwrap();
        assert_eq!(c.col, 0);
    }

    #[test]
    fn br_walk_bypasses_two_candidates_on_five_point() {
        let tab = five_point_tab();
        // slope column: sorted ratios 0.4, 0.5, 2/3, 0.75, 1.0; the walk
        // bypasses the first two and stops at the t = 3 row.
        let choice = br_pivot_row(&tab, 1, false).unwrap();
        assert_eq!(choice.row, 2);
        assert_eq!(choice.bypasses, 2);
    }

    #[test]
    fn br_stops_at_first_candidate_in_second_iteration() {
        let mut tab = five_point_tab();
        tab.apply_pivot(2, 1, false).unwrap();
        let choice = br_pivot_row(&tab, 0, false).unwrap();
        assert_eq!(choice.row, 0);
        assert_eq!(choice.bypasses, 0);
    }

    #[test]
    fn br_single_candidate() {
        use crate::tableau::{Label, TableauRow};
        let rows = vec![
            TableauRow {
                label: Label::new(3),
                cols: [-1.0, 0.5],
                rhs: 1.0,
            },
            TableauRow {
                label: Label::new(4),
                cols: [2.0, 0.5],
                rhs: 1.0,
            },
        ];
        let tab = CondensedTableau::from_raw(
            rows,
            [Label::new(1), Label::new(2)],
            [5.0, 1.0],
            2.0,
            vec![1.0, 1.0],
            1e-11,
        );
        let choice = br_pivot_row(&tab, 0, false).unwrap();
        assert_eq!(choice.row, 1);
        // no positive entry in a flipped column that is all-positive
        assert!(br_pivot_row(&tab, 1, true).is_err());
    }

    #[test]
    fn wm_matches_br_on_first_five_point_iteration() {
        let tab = five_point_tab();
        let wm = wm_pivot_row(&tab, 1, false).unwrap();
        let br = br_pivot_row(&tab, 1, false).unwrap();
        assert_eq!(wm.row, br.row);
    }

    #[test]
    fn wm_single_positive_candidate() {
        use crate::tableau::{Label, TableauRow};
        let rows = vec![TableauRow {
            label: Label::new(3),
            cols: [2.0, 1.0],
            rhs: 1.0,
        }, TableauRow {
            label: Label::new(1),
            cols: [1.0, 0.0],
            rhs: 5.0,
        }];
        let tab = CondensedTableau::from_raw(
            rows,
            [Label::new(4), Label::new(2)],
            [1.0, 1.0],
            1.0,
            vec![1.0, 1.0],
            1e-11,
        );
        let choice = wm_pivot_row(&tab, 0, false).unwrap();
        assert_eq!(choice.row, 0);
    }

    #[test]
    fn weighted_median_basics() {
        let s = WeightedSample::new(vec![1.0, 2.0, 3.0], vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(weighted_median(&s).value, 2.0);

        let s = WeightedSample::new(vec![42.0], vec![3.0]).unwrap();
        let m = weighted_median(&s);
        assert_eq!(m.value, 42.0);
        assert_eq!(m.index, 0);
    }

    #[test]
    fn weighted_median_of_five_point_ratios() {
        // ratios d/t with weights |t|: the one-parameter slope problem
        let values = vec![1.0, 0.5, 2.0 / 3.0, 0.75, 0.4];
        let weights = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let s = WeightedSample::new(values, weights).unwrap();
        let m = weighted_median(&s);
        assert!((m.value - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.index, 2);
    }

    #[test]
    fn weighted_median_exact_half_resolves_downward() {
        let s = WeightedSample::new(vec![1.0, 3.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(weighted_median(&s).value, 1.0);
    }

    #[test]
    fn weighted_median_ties_take_lowest_index() {
        let s = WeightedSample::new(vec![2.0, 1.0, 2.0, 3.0], vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        let m = weighted_median(&s);
        assert_eq!(m.value, 2.0);
        assert_eq!(m.index, 0);
    }

    #[test]
    fn weighted_median_matches_sorted_reference() {
        // deterministic pseudo-random cross-check against a sort-based rule
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for n in [1usize, 2, 3, 7, 20, 101, 500] {
            let values: Vec<f64> = (0..n).map(|_| (next() * 20.0).floor() - 10.0).collect();
            let weights: Vec<f64> = (0..n).map(|_| next() + 0.01).collect();
            let fast = {
                let s = WeightedSample::new(values.clone(), weights.clone()).unwrap();
                weighted_median(&s)
            };
            let slow = reference_median(&values, &weights);
            assert_eq!(fast.value, slow.0, "n={n}");
            assert_eq!(fast.index, slow.1, "n={n}");
        }
    }

    fn reference_median(values: &[f64], weights: &[f64]) -> (f64, usize) {
        let total: f64 = weights.iter().sum();
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        let mut acc = 0.0;
        for &k in &order {
            acc += weights[k];
            if acc >= total / 2.0 {
                let first = (0..values.len())
                    .find(|&j| values[j] == values[k])
                    .unwrap();
                return (values[k], first);
            }
        }
        unreachable!()
    }

    #[test]
    fn weighted_median_is_linear_not_sorting() {
        let n = 200_000usize;
        let values: Vec<f64> = (0..n).map(|i| ((i * 2654435761) % n) as f64).collect();
        let weights = vec![1.0f64; n];
        let mut comparisons = 0u64;
        let idx = weighted_median_index(&values, &weights, &mut comparisons);
        // lower median of a permutation of 0..n
        assert_eq!(values[idx], (n / 2 - 1) as f64);
        assert!(
            comparisons <= 12 * n as u64,
            "comparisons {comparisons} exceed 12n"
        );
    }

    #[test]
    fn rejects_bad_samples() {
        assert!(WeightedSample::new(vec![], vec![]).is_err());
        assert!(WeightedSample::new(vec![1.0], vec![0.0]).is_err());
        assert!(WeightedSample::new(vec![1.0], vec![-1.0]).is_err());
        assert!(WeightedSample::new(vec![1.0, 2.0], vec![1.0]).is_err());
    }
}
