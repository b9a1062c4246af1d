//! Independent brute-force verifiers. An optimal line through at least two
//! data points always exists, so enumerating all distinct-abscissa pairs
//! yields the exact optimum for small sets; the one-parameter problems
//! reduce to (weighted) medians.

use crate::data::{evaluate_sar, DataSet, LineParams};
use crate::error::{Error, Result};
use crate::pivot::{weighted_median, WeightedSample};

/// Result of the all-pairs interpolation search.
#[derive(Debug, Clone)]
pub struct BruteForceResult {
    pub sar_star: f64,
    /// index pairs whose interpolating line attains the optimum
    pub optimal_pairs: Vec<(usize, usize)>,
    /// the distinct optimal lines those pairs produce
    pub lines: Vec<LineParams>,
}

/// Evaluate the line through every pair of points with distinct abscissas
/// and keep everything within `1e-9` of the best sum of absolute residuals.
/// Cubic in `m`; intended for modest data sets.
pub fn brute_force_best(ds: &DataSet) -> Result<BruteForceResult> {
    if ds.len() < 2 {
        return Err(Error::InsufficientData {
            m: ds.len(),
            required: 2,
        });
    }
    if ds.distinct_t_count() < 2 {
        return Err(Error::DegenerateAbscissas);
    }
    let pts = ds.points();
    let mut best = f64::INFINITY;
    let mut pairs: Vec<(usize, usize, LineParams)> = Vec::new();
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            if pts[i].t == pts[j].t {
                continue;
            }
            let a2 = (pts[j].d - pts[i].d) / (pts[j].t - pts[i].t);
            let a1 = pts[i].d - a2 * pts[i].t;
            let line = LineParams::new(a1, a2);
            let sar = evaluate_sar(ds, &line);
            if sar < best - 1e-9 {
                best = sar;
                pairs.retain(|(_, _, l)| evaluate_sar(ds, l) <= best + 1e-9);
            }
            if sar <= best + 1e-9 {
                best = best.min(sar);
                pairs.push((i, j, line));
            }
        }
    }
    pairs.retain(|(_, _, l)| evaluate_sar(ds, l) <= best + 1e-9);

    let mut lines: Vec<LineParams> = Vec::new();
    for &(_, _, line) in &pairs {
        if !lines
            .iter()
            .any(|l| (l.a1 - line.a1).abs() <= 1e-9 && (l.a2 - line.a2).abs() <= 1e-9)
        {
            lines.push(line);
        }
    }
    Ok(BruteForceResult {
        sar_star: best,
        optimal_pairs: pairs.iter().map(|&(i, j, _)| (i, j)).collect(),
        lines,
    })
}

/// Weighted median of the ordinates: the optimal horizontal-line intercept.
pub fn median_oracle(ds: &DataSet) -> Result<f64> {
    let values: Vec<f64> = ds.iter().map(|p| p.d).collect();
    let weights: Vec<f64> = ds.iter().map(|p| p.w).collect();
    let sample = WeightedSample::new(values, weights)?;
    Ok(weighted_median(&sample).value)
}

/// Weighted median of the finite ratios `d/t` with weights `w |t|`: the
/// optimal through-origin slope. Rows with `t = 0` contribute a constant to
/// the objective and are excluded.
pub fn slope_oracle(ds: &DataSet) -> Result<f64> {
    let mut values = Vec::new();
    let mut weights = Vec::new();
    for p in ds.iter() {
        if p.t != 0.0 {
            values.push(p.d / p.t);
            weights.push(p.w * p.t.abs());
        }
    }
    let sample = WeightedSample::new(values, weights)?;
    Ok(weighted_median(&sample).value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::compute_residuals;
    use crate::datasets::{cpi_window, fixture};

    #[test]
    fn four_point_has_four_optimal_lines() {
        let ds = fixture("four_point").unwrap();
        let res = brute_force_best(&ds).unwrap();
        assert!((res.sar_star - 2.0).abs() < 1e-12, "sar* = {}", res.sar_star);
        assert_eq!(res.lines.len(), 4);
        // every optimal line interpolates two points
        for line in &res.lines {
            let zeros = compute_residuals(&ds, line)
                .values()
                .iter()
                .filter(|r| r.abs() <= 1e-9)
                .count();
            assert!(zeros >= 2);
        }
    }

    #[test]
    fn five_point_optimum_is_two() {
        let ds = fixture("five_point").unwrap();
        let res = brute_force_best(&ds).unwrap();
        assert!((res.sar_star - 2.0).abs() < 1e-12);
        let has = |a1: f64, a2: f64| {
            res.lines
                .iter()
                .any(|l| (l.a1 - a1).abs() < 1e-9 && (l.a2 - a2).abs() < 1e-9)
        };
        assert!(has(0.5, 0.5));
        assert!(has(0.75, 0.25));
    }

    #[test]
    fn l17s3_optimum() {
        let ds = cpi_window(17, 3).unwrap();
        let res = brute_force_best(&ds).unwrap();
        assert!((res.sar_star - 8.870).abs() < 5e-4, "sar* = {}", res.sar_star);
    }

    #[test]
    fn degenerate_abscissas_rejected() {
        let ds = DataSet::from_pairs(&[(1.0, 0.0), (1.0, 5.0), (1.0, 9.0)]).unwrap();
        assert!(matches!(
            brute_force_best(&ds),
            Err(Error::DegenerateAbscissas)
        ));
    }

    #[test]
    fn duplicate_abscissas_are_skipped_not_fatal() {
        let ds = DataSet::from_pairs(&[(1.0, 1.0), (1.0, 2.0), (3.0, 3.0)]).unwrap();
        let res = brute_force_best(&ds).unwrap();
        assert!(res.sar_star.is_finite());
    }

    #[test]
    fn median_oracle_plain() {
        let ds = DataSet::from_pairs(&[(1.0, 3.0), (2.0, 1.0), (3.0, 2.0)]).unwrap();
        assert_eq!(median_oracle(&ds).unwrap(), 2.0);
    }

    #[test]
    fn slope_oracle_matches_grid_minimization() {
        let ds = fixture("five_point").unwrap();
        let slope = slope_oracle(&ds).unwrap();
        assert!((slope - 2.0 / 3.0).abs() < 1e-12);

        // independent check: direct minimization of sum |d - a t| over a grid
        let objective = |a: f64| -> f64 { ds.iter().map(|p| (p.d - a * p.t).abs()).sum() };
        let mut best = (f64::INFINITY, 0.0);
        let mut a = 0.0;
        while a <= 1.5 {
            let v = objective(a);
            if v < best.0 {
                best = (v, a);
            }
            a += 1e-4;
        }
        assert!((best.1 - 2.0 / 3.0).abs() < 1e-3, "grid argmin {}", best.1);
        assert!(objective(slope) <= best.0 + 1e-9);
    }

    #[test]
    fn slope_oracle_ignores_zero_t() {
        let ds = DataSet::from_pairs(&[(0.0, 100.0), (1.0, 2.0), (2.0, 4.0)]).unwrap();
        assert_eq!(slope_oracle(&ds).unwrap(), 2.0);
    }

    #[test]
    fn empty_ratio_sample_is_an_error() {
        let ds = DataSet::from_pairs(&[(0.0, 1.0), (0.0, 2.0)]).unwrap();
        assert!(matches!(slope_oracle(&ds), Err(Error::EmptySample)));
    }
}
