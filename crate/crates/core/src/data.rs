//! Problem data model: observations, candidate lines, residuals, and the
//! three-way sign classification used throughout the solver.

use crate::error::{Error, Result};

/// One observation: abscissa `t`, ordinate `d`, and a positive weight `w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataPoint {
    pub t: f64,
    pub d: f64,
    pub w: f64,
}

impl DataPoint {
    pub fn new(t: f64, d: f64) -> Self {
        Self { t, d, w: 1.0 }
    }

    pub fn weighted(t: f64, d: f64, w: f64) -> Self {
        Self { t, d, w }
    }
}

/// An ordered sequence of observations. Index order is significant: row `i`
/// of the simplex tableau is `points[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    points: Vec<DataPoint>,
}

impl DataSet {
    /// Validates and wraps a point list. Non-finite coordinates and
    /// non-positive weights are rejected here, not at evaluation time.
    pub fn new(points: Vec<DataPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InsufficientData { m: 0, required: 1 });
        }
        for (index, p) in points.iter().enumerate() {
            if !p.t.is_finite() || !p.d.is_finite() {
                return Err(Error::InvalidData {
                    index,
                    reason: format!("non-finite coordinate (t={}, d={})", p.t, p.d),
                });
            }
            if !p.w.is_finite() || p.w <= 0.0 {
                return Err(Error::InvalidData {
                    index,
                    reason: format!("weight must be positive and finite, got {}", p.w),
                });
            }
        }
        Ok(Self { points })
    }

    /// Unweighted construction from `(t, d)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(t, d)| DataPoint::new(t, d)).collect())
    }

    /// Weighted construction from `(t, d, w)` triples.
    pub fn from_triples(triples: &[(f64, f64, f64)]) -> Result<Self> {
        Self::new(
            triples
                .iter()
                .map(|&(t, d, w)| DataPoint::weighted(t, d, w))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[DataPoint] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, DataPoint> {
        self.points.iter()
    }

    /// Copy of this set with every weight forced to 1.
    pub fn with_uniform_weights(&self) -> DataSet {
        DataSet {
            points: self
                .points
                .iter()
                .map(|p| DataPoint::new(p.t, p.d))
                .collect(),
        }
    }

    /// Number of distinct abscissa values (exact comparison).
    pub fn distinct_t_count(&self) -> usize {
        let mut ts: Vec<f64> = self.points.iter().map(|p| p.t).collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        ts.len()
    }
}

/// A straight line `d = a1 + a2 * t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineParams {
    pub a1: f64,
    pub a2: f64,
}

impl LineParams {
    pub fn new(a1: f64, a2: f64) -> Self {
        Self { a1, a2 }
    }

    /// Value of the line at `t`.
    pub fn predict(&self, t: f64) -> f64 {
        self.a1 + self.a2 * t
    }
}

/// Residual vector `r_i = d_i - (a1 + a2 t_i)`, stored in data order.
#[derive(Debug, Clone, PartialEq)]
pub struct Residuals(pub Vec<f64>);

impl Residuals {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Residual counts after the three-way TOLER comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignCounts {
    /// residuals > toler
    pub positive: usize,
    /// residuals < -toler
    pub negative: usize,
    /// |residual| <= toler
    pub zero: usize,
}

impl SignCounts {
    /// Sign-balance test for an optimal fit: `|P - N| <= Z`, and
    /// `|P - N| <= Z - 1` when the number of residuals is odd.
    pub fn is_balanced(&self, m: usize) -> bool {
        let diff = self.positive.abs_diff(self.negative);
        if m % 2 == 1 {
            diff < self.zero
        } else {
            diff <= self.zero
        }
    }
}

/// Decision threshold: `|z| <= toler` is treated as zero, `z > toler` as
/// positive, `z < -toler` as negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance(f64);

impl Tolerance {
    pub const DEFAULT: f64 = 1e-11;

    pub fn new(toler: f64) -> Result<Self> {
        if !(toler.is_finite() && toler > 0.0) {
            return Err(Error::InvalidData {
                index: 0,
                reason: format!("tolerance must be positive and finite, got {toler}"),
            });
        }
        Ok(Self(toler))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self(Self::DEFAULT)
    }
}

/// Weighted sum of absolute residuals of `line` over `ds`.
pub fn evaluate_sar(ds: &DataSet, line: &LineParams) -> f64 {
    ds.iter()
        .map(|p| p.w * (p.d - line.predict(p.t)).abs())
        .sum()
}

/// Residuals of `line` over `ds`, in data order.
pub fn compute_residuals(ds: &DataSet, line: &LineParams) -> Residuals {
    Residuals(ds.iter().map(|p| p.d - line.predict(p.t)).collect())
}

/// Partition residuals into positive / negative / zero by `tol`.
pub fn classify_signs(r: &Residuals, tol: Tolerance) -> SignCounts {
    let toler = tol.value();
    let mut counts = SignCounts {
        positive: 0,
        negative: 0,
        zero: 0,
    };
    for &v in r.values() {
        if v > toler {
            counts.positive += 1;
        } else if v < -toler {
            counts.negative += 1;
        } else {
            counts.zero += 1;
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn five_point() -> DataSet {
        DataSet::from_pairs(&[(1.0, 1.0), (2.0, 1.0), (3.0, 2.0), (4.0, 3.0), (5.0, 2.0)]).unwrap()
    }

    #[test]
    fn sar_of_five_point_at_half_half_is_two() {
        let sar = evaluate_sar(&five_point(), &LineParams::new(0.5, 0.5));
        assert!((sar - 2.0).abs() < 1e-12, "sar = {sar}");
    }

    #[test]
    fn sar_of_interpolating_line_is_zero() {
        let ds = DataSet::from_pairs(&[(1.0, 1.0), (2.0, 2.0)]).unwrap();
        assert_eq!(evaluate_sar(&ds, &LineParams::new(0.0, 1.0)), 0.0);
    }

    #[test]
    fn weighted_sar_matches_row_duplication() {
        // Duplicating a row w times with unit weight must equal weight w.
        let weighted =
            DataSet::from_triples(&[(1.0, 2.0, 3.0), (2.0, 5.0, 1.0), (4.0, 1.0, 2.0)]).unwrap();
        let duplicated = DataSet::from_pairs(&[
            (1.0, 2.0),
            (1.0, 2.0),
            (1.0, 2.0),
            (2.0, 5.0),
            (4.0, 1.0),
            (4.0, 1.0),
        ])
        .unwrap();
        let line = LineParams::new(0.3, 0.7);
        let a = evaluate_sar(&weighted, &line);
        let b = evaluate_sar(&duplicated, &line);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn residuals_match_definition() {
        let ds = five_point();
        let r = compute_residuals(&ds, &LineParams::new(0.5, 0.5));
        let expected = [0.0, -0.5, 0.0, 0.5, -1.0];
        for (got, want) in r.values().iter().zip(expected) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn sign_classification_of_five_point_optimum() {
        let r = Residuals(vec![0.0, -0.5, 0.0, 0.5, -1.0]);
        let counts = classify_signs(&r, Tolerance::default());
        assert_eq!(
            counts,
            SignCounts {
                positive: 1,
                negative: 2,
                zero: 2
            }
        );
        // odd m: |P - N| <= Z - 1
        assert!(counts.is_balanced(5));
    }

    #[test]
    fn sign_classification_all_zero() {
        let r = Residuals(vec![0.0; 4]);
        let counts = classify_signs(&r, Tolerance::default());
        assert_eq!(counts.positive, 0);
        assert_eq!(counts.negative, 0);
        assert_eq!(counts.zero, 4);
    }

    #[test]
    fn rejects_non_finite_input() {
        assert!(DataSet::from_pairs(&[(f64::NAN, 1.0), (2.0, 2.0)]).is_err());
        assert!(DataSet::from_pairs(&[(1.0, f64::INFINITY), (2.0, 2.0)]).is_err());
        assert!(DataSet::from_triples(&[(1.0, 1.0, 0.0), (2.0, 2.0, 1.0)]).is_err());
        assert!(DataSet::from_triples(&[(1.0, 1.0, -2.0), (2.0, 2.0, 1.0)]).is_err());
    }

    #[test]
    fn tolerance_must_be_positive() {
        assert!(Tolerance::new(0.0).is_err());
        assert!(Tolerance::new(-1e-9).is_err());
        assert!(Tolerance::new(1e-9).is_ok());
    }
}
