//! Condensed simplex tableau for the least-absolute-residuals line LP.
//!
//! The LP introduces nonnegative splits `a_j = b_j - c_j` for the two line
//! parameters and `r_i = u_i - v_i` for each residual, then minimizes
//! `sum w_i (u_i + v_i)`. Only two nonbasic columns plus the right-hand side
//! are stored; every hidden partner vector is the negation of an exhibited
//! one, so it is realized by a sign flip at entry time and never stored.

use std::collections::BTreeSet;

use crate::data::{DataSet, LineParams, Residuals, Tolerance};
use crate::error::{Error, Result};

/// Signed basis/column identifier.
///
/// `+1/-1` are the intercept pair `b1/c1`, `+2/-2` the slope pair `b2/c2`,
/// and `+(i+2)/-(i+2)` the residual pair `u_i/v_i` of data row `i` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Label(i32);

impl Label {
    pub fn new(value: i32) -> Self {
        assert!(value != 0, "labels are nonzero");
        Self(value)
    }

    pub fn for_data_row(index: usize) -> Self {
        Self(index as i32 + 3)
    }

    pub fn value(&self) -> i32 {
        self.0
    }

    /// 0 for the intercept pair, 1 for the slope pair, None for data labels.
    pub fn param_index(&self) -> Option<usize> {
        match self.0.abs() {
            1 => Some(0),
            2 => Some(1),
            _ => None,
        }
    }

    /// 0-based data row index for `u/v` labels.
    pub fn data_index(&self) -> Option<usize> {
        let a = self.0.abs();
        if a >= 3 {
            Some(a as usize - 3)
        } else {
            None
        }
    }

    pub fn is_param(&self) -> bool {
        self.0.abs() <= 2
    }

    pub fn is_positive(&self) -> bool {
        self.0 > 0
    }

    pub fn negated(self) -> Self {
        Self(-self.0)
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One tableau row: the basic variable it carries, its entries under the two
/// exhibited columns, and its right-hand side value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableauRow {
    pub label: Label,
    pub cols: [f64; 2],
    pub rhs: f64,
}

/// An entering move: exhibited column `col`, taken as-is or sign-flipped to
/// its hidden partner, with the marginal cost that entry would realize.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnteringCandidate {
    pub col: usize,
    pub flipped: bool,
    pub effective_mc: f64,
    /// label of the vector that would actually enter
    pub label: Label,
}

/// Extracted state of a tableau: the line, its residuals, the interpolated
/// data indices, and the current objective value.
#[derive(Debug, Clone)]
pub struct TableauSolution {
    pub line: LineParams,
    pub residuals: Residuals,
    pub interpolated: BTreeSet<usize>,
    pub sar: f64,
}

/// The two-nonbasic-column simplex state.
#[derive(Debug, Clone)]
pub struct CondensedTableau {
    rows: Vec<TableauRow>,
    col_labels: [Label; 2],
    mc: [f64; 2],
    sar: f64,
    weights: Vec<f64>,
    toler: f64,
}

impl CondensedTableau {
    /// Build the initial basic feasible tableau: row `i` is `(1, t_i, d_i)`
    /// with `u_i` basic, negated to `v_i` when `d_i` is negative.
    pub fn new(ds: &DataSet, tol: Tolerance) -> Self {
        assert!(ds.len() >= 2, "two-parameter fitting needs m >= 2");
        let toler = tol.value();
        let mut rows = Vec::with_capacity(ds.len());
        let mut weights = Vec::with_capacity(ds.len());
        let mut mc = [0.0f64; 2];
        let mut sar = 0.0;
        for (i, p) in ds.iter().enumerate() {
            let mut row = TableauRow {
                label: Label::for_data_row(i),
                cols: [1.0, p.t],
                rhs: p.d,
            };
            if p.d < -toler {
                row.cols[0] = -row.cols[0];
                row.cols[1] = -row.cols[1];
                row.rhs = -row.rhs;
                row.label = row.label.negated();
            }
            mc[0] += p.w * row.cols[0];
            mc[1] += p.w * row.cols[1];
            sar += p.w * row.rhs;
            rows.push(row);
            weights.push(p.w);
        }
        Self {
            rows,
            col_labels: [Label::new(1), Label::new(2)],
            mc,
            sar,
            weights,
            toler,
        }
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[TableauRow] {
        &self.rows
    }

    pub fn col_labels(&self) -> [Label; 2] {
        self.col_labels
    }

    pub fn marginal_costs(&self) -> [f64; 2] {
        self.mc
    }

    pub fn sar(&self) -> f64 {
        self.sar
    }

    pub fn toler(&self) -> f64 {
        self.toler
    }

    /// Data weight of the basic variable carried by `row` (its label's
    /// data index, which moves around as pivots exchange labels); zero for
    /// a parameter row.
    pub fn weight_of_row(&self, row: usize) -> f64 {
        match self.rows[row].label.data_index() {
            Some(k) => self.weights[k],
            None => 0.0,
        }
    }

    /// Sum of the marginal costs of an exhibited column and its hidden
    /// partner: `-2w_i` for a data pair, 0 for a parameter pair.
    pub fn pair_sum(&self, col: usize) -> f64 {
        match self.col_labels[col].data_index() {
            Some(i) => -2.0 * self.weights[i],
            None => 0.0,
        }
    }

    /// Column entry of `row` as seen by an entering move (sign-flipped when
    /// the hidden partner enters).
    pub fn entry(&self, row: usize, col: usize, flipped: bool) -> f64 {
        let e = self.rows[row].cols[col];
        if flipped {
            -e
        } else {
            e
        }
    }

    /// Marginal cost realized by entering `col`, optionally flipped.
    pub fn effective_mc(&self, col: usize, flipped: bool) -> f64 {
        if flipped {
            self.pair_sum(col) - self.mc[col]
        } else {
            self.mc[col]
        }
    }

    /// True once the parameter pair `j` (0 = intercept, 1 = slope) has
    /// entered the basis. Parameters never leave.
    pub fn param_in_basis(&self, j: usize) -> bool {
        !self
            .col_labels
            .iter()
            .any(|l| l.param_index() == Some(j))
    }

    /// Entering-eligible moves: for each exhibited column the better of the
    /// column itself and its hidden partner, kept only when the marginal
    /// cost exceeds the tolerance.
    pub fn entering_candidates(&self) -> Vec<EnteringCandidate> {
        let mut out = Vec::with_capacity(2);
        for col in 0..2 {
            let mc = self.mc[col];
            let partner = self.pair_sum(col) - mc;
            let (effective_mc, flipped) = if partner > mc {
                (partner, true)
            } else {
                (mc, false)
            };
            if effective_mc > self.toler {
                let label = if flipped {
                    self.col_labels[col].negated()
                } else {
                    self.col_labels[col]
                };
                out.push(EnteringCandidate {
                    col,
                    flipped,
                    effective_mc,
                    label,
                });
            }
        }
        out
    }

    /// Optimal when no entering move has positive marginal cost.
    pub fn is_converged(&self) -> bool {
        self.entering_candidates().is_empty()
    }

    /// Exchange the entering column (optionally sign-flipped first) with the
    /// basic variable of `row`. Rows whose right-hand side goes below
    /// `-toler` are negated afterwards to restore feasibility, with the
    /// marginal-cost row adjusted accordingly. Returns the pivot value.
    pub fn apply_pivot(&mut self, row: usize, col: usize, flipped: bool) -> Result<f64> {
        if flipped {
            self.flip_column(col);
        }
        let pivot = self.rows[row].cols[col];
        if pivot <= self.toler {
            return Err(Error::NonPositivePivot);
        }

        let other = 1 - col;
        let pivot_other = self.rows[row].cols[other];
        let pivot_rhs = self.rows[row].rhs;
        let mc_col = self.mc[col];

        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let e = r.cols[col];
            r.cols[col] = -e / pivot;
            r.cols[other] -= e * pivot_other / pivot;
            r.rhs -= e * pivot_rhs / pivot;
        }
        self.rows[row].cols[col] = 1.0 / pivot;
        self.rows[row].cols[other] = pivot_other / pivot;
        self.rows[row].rhs = pivot_rhs / pivot;

        self.mc[col] = -mc_col / pivot;
        self.mc[other] -= mc_col * pivot_other / pivot;
        self.sar -= mc_col * pivot_rhs / pivot;

        std::mem::swap(&mut self.rows[row].label, &mut self.col_labels[col]);

        self.restore_feasibility();
        Ok(pivot)
    }

    fn flip_column(&mut self, col: usize) {
        for r in self.rows.iter_mut() {
            r.cols[col] = -r.cols[col];
        }
        self.mc[col] = self.pair_sum(col) - self.mc[col];
        self.col_labels[col] = self.col_labels[col].negated();
    }

    /// Negate every row whose rhs fell strictly below `-toler`, swapping its
    /// basic `u_i` for `v_i` (or vice versa). Each negation shifts the
    /// marginal costs by twice the weighted post-negation entries.
    fn restore_feasibility(&mut self) {
        for i in 0..self.rows.len() {
            if self.rows[i].rhs < -self.toler {
                let w = self.weight_of_row(i);
                let r = &mut self.rows[i];
                r.cols[0] = -r.cols[0];
                r.cols[1] = -r.cols[1];
                r.rhs = -r.rhs;
                r.label = r.label.negated();
                self.mc[0] += 2.0 * w * r.cols[0];
                self.mc[1] += 2.0 * w * r.cols[1];
                self.sar += 2.0 * w * r.rhs;
            }
        }
    }


    /// Degenerate-row sign flip: a zero-rhs `u/v` row may be negated without
    /// changing SAR. The flip is applied only when the shifted marginal
    /// costs land inside the convergence box `[pair_sum, 0]` of each
    /// exhibited column. Returns how many rows were flipped.
    pub fn flip_degenerate_rows(&mut self) -> usize {
        let mut flipped = 0;
        for i in 0..self.rows.len() {
            let label = self.rows[i].label;
            let Some(data_idx) = label.data_index() else {
                continue;
            };
            if self.rows[i].rhs.abs() > self.toler {
                continue;
            }
            let w = self.weights[data_idx];
            let shifted = [
                self.mc[0] - 2.0 * w * self.rows[i].cols[0],
                self.mc[1] - 2.0 * w * self.rows[i].cols[1],
            ];
            let ok = (0..2).all(|j| {
                let floor = self.pair_sum(j);
                shifted[j] <= self.toler && shifted[j] >= floor - self.toler
            });
            if !ok {
                continue;
            }
            let r = &mut self.rows[i];
            r.cols[0] = -r.cols[0];
            r.cols[1] = -r.cols[1];
            r.rhs = -r.rhs;
            r.label = r.label.negated();
            self.mc = shifted;
            flipped += 1;
        }
        flipped
    }

    /// Current line, residuals, interpolated indices, and objective, read
    /// straight off the labels. Valid at any iteration.
    pub(crate) fn current_solution(&self) -> TableauSolution {
        let mut a1 = 0.0;
        let mut a2 = 0.0;
        let mut residuals = vec![0.0; self.m()];
        let mut interpolated = BTreeSet::new();
        for r in &self.rows {
            let signed = if r.label.is_positive() { r.rhs } else { -r.rhs };
            match (r.label.param_index(), r.label.data_index()) {
                (Some(0), _) => a1 = signed,
                (Some(1), _) => a2 = signed,
                (_, Some(i)) => {
                    residuals[i] = signed;
                    if r.rhs.abs() <= self.toler {
                        interpolated.insert(i);
                    }
                }
                _ => unreachable!(),
            }
        }
        for l in self.col_labels {
            if let Some(i) = l.data_index() {
                interpolated.insert(i);
            }
        }
        TableauSolution {
            line: LineParams::new(a1, a2),
            residuals: Residuals(residuals),
            interpolated,
            sar: self.sar,
        }
    }

    /// As [`current_solution`], but only for a converged tableau.
    pub fn extract_report(&self) -> Result<TableauSolution> {
        if !self.is_converged() {
            return Err(Error::NotConverged);
        }
        Ok(self.current_solution())
    }

    /// `t` values interpolated by the current basis (data labels sitting on
    /// the exhibited columns), in column order.
    pub fn interpolation_points(&self, ds: &DataSet) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .col_labels
            .iter()
            .filter_map(|l| l.data_index())
            .map(|i| ds.points()[i].t)
            .collect();
        pts.sort_by(f64::total_cmp);
        pts
    }
}

/// Scale factors from normalizing a data set by its largest magnitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleFactors {
    pub t_scale: f64,
    pub d_scale: f64,
}

/// Divide every `t` by `max |t|` and every `d` by `max |d|`.
pub fn scale_dataset(ds: &DataSet) -> Result<(DataSet, ScaleFactors)> {
    let t_scale = ds.iter().map(|p| p.t.abs()).fold(0.0, f64::max);
    let d_scale = ds.iter().map(|p| p.d.abs()).fold(0.0, f64::max);
    if t_scale == 0.0 || d_scale == 0.0 {
        return Err(Error::DegenerateScale);
    }
    let scaled = DataSet::from_triples(
        &ds.iter()
            .map(|p| (p.t / t_scale, p.d / d_scale, p.w))
            .collect::<Vec<_>>(),
    )?;
    Ok((scaled, ScaleFactors { t_scale, d_scale }))
}

/// Map a line fitted in scaled coordinates back to the original ones.
pub fn unscale_params(line: &LineParams, factors: &ScaleFactors) -> LineParams {
    LineParams::new(
        line.a1 * factors.d_scale,
        line.a2 * factors.d_scale / factors.t_scale,
    )
}

#[cfg(test)]
impl CondensedTableau {
    /// Assemble an arbitrary intermediate state for edge-case tests.
    pub(crate) fn from_raw(
        rows: Vec<TableauRow>,
        col_labels: [Label; 2],
        mc: [f64; 2],
        sar: f64,
        weights: Vec<f64>,
        toler: f64,
    ) -> Self {
        Self {
            rows,
            col_labels,
            mc,
            sar,
            weights,
            toler,
        }
    }
}
