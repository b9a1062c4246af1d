//! Closed-form weighted least-squares line fit, used for warm starts and
//! L1-vs-L2 comparisons.

use crate::data::{DataSet, LineParams};
use crate::error::{Error, Result};

/// The five weighted sums and determinant behind the closed-form L2 fit.
/// When only the ordinates change, just `c2` and `c4` need recomputing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L2Sums {
    /// sum w t
    pub c1: f64,
    /// sum w d
    pub c2: f64,
    /// sum w t^2
    pub c3: f64,
    /// sum w t d
    pub c4: f64,
    /// sum w
    pub c5: f64,
    /// c1*c1 - c3*c5 (zero only when all t coincide)
    pub d: f64,
}

/// Neumaier-compensated accumulator so million-point sums keep their digits.
#[derive(Debug, Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn accumulate(ds: &DataSet) -> L2Sums {
    let mut c1 = Kahan::default();
    let mut c2 = Kahan::default();
    let mut c3 = Kahan::default();
    let mut c4 = Kahan::default();
    let mut c5 = Kahan::default();
    for p in ds.iter() {
        c1.add(p.w * p.t);
        c2.add(p.w * p.d);
        c3.add(p.w * p.t * p.t);
        c4.add(p.w * p.t * p.d);
        c5.add(p.w);
    }
    let (c1, c2, c3, c4, c5) = (c1.value(), c2.value(), c3.value(), c4.value(), c5.value());
    L2Sums {
        c1,
        c2,
        c3,
        c4,
        c5,
        d: c1 * c1 - c3 * c5,
    }
}

fn line_from_sums(s: &L2Sums) -> Result<LineParams> {
    // By Cauchy-Schwarz d <= 0, with equality only for constant t.
    if s.d.abs() <= 1e-12 * s.c3.abs().max(1.0) * s.c5.abs().max(1.0) {
        return Err(Error::SingularL2);
    }
    let a2 = (s.c1 * s.c2 - s.c4 * s.c5) / s.d;
    let a1 = (s.c1 * s.c4 - s.c2 * s.c3) / s.d;
    Ok(LineParams::new(a1, a2))
}

/// Weighted least-squares line through `ds`, together with the sums that
/// produced it.
pub fn l2_fit(ds: &DataSet) -> Result<(LineParams, L2Sums)> {
    if ds.len() < 2 {
        return Err(Error::InsufficientData {
            m: ds.len(),
            required: 2,
        });
    }
    let sums = accumulate(ds);
    let line = line_from_sums(&sums)?;
    Ok((line, sums))
}

/// Refresh `sums` after the ordinates changed while `t` and `w` stayed put.
/// Only `c2` and `c4` are recomputed.
pub fn l2_update_d(sums: &L2Sums, ds_old: &DataSet, ds_new: &DataSet) -> Result<L2Sums> {
    if ds_old.len() != ds_new.len() {
        return Err(Error::ShapeMismatch);
    }
    for (a, b) in ds_old.iter().zip(ds_new.iter()) {
        if a.t != b.t || a.w != b.w {
            return Err(Error::ShapeMismatch);
        }
    }
    let mut c2 = Kahan::default();
    let mut c4 = Kahan::default();
    for p in ds_new.iter() {
        c2.add(p.w * p.d);
        c4.add(p.w * p.t * p.d);
    }
    Ok(L2Sums {
        c2: c2.value(),
        c4: c4.value(),
        ..*sums
    })
}

/// Line implied by an (updated) sum block.
pub fn line_from(sums: &L2Sums) -> Result<LineParams> {
    line_from_sums(sums)
}

/// Value of `line` at `t`.
pub fn predict(line: &LineParams, t: f64) -> f64 {
    line.predict(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::compute_residuals;

    fn cpi_slice(ts: std::ops::RangeInclusive<usize>) -> DataSet {
        crate::datasets::cpi_window(ts.end() - ts.start() + 1, *ts.start()).unwrap()
    }

    #[test]
    fn l2_fit_l9s4() {
        let ds = cpi_slice(4..=12);
        let (line, _) = l2_fit(&ds).unwrap();
        assert!((line.a1 - 81.831111).abs() < 1e-5, "a1 = {}", line.a1);
        assert!((line.a2 - 2.285).abs() < 1e-9, "a2 = {}", line.a2);
        let r = compute_residuals(&ds, &line);
        assert!((r.values()[0] - 0.328889).abs() < 1e-5);
        assert!((r.values()[1] + 0.356111).abs() < 1e-5);
    }

    #[test]
    fn l2_fit_l10s12() {
        let ds = cpi_slice(12..=21);
        let (line, _) = l2_fit(&ds).unwrap();
        assert!((line.a1 - 85.96).abs() < 1e-5, "a1 = {}", line.a1);
        assert!((line.a2 - 1.952727).abs() < 1e-5, "a2 = {}", line.a2);
    }

    #[test]
    fn weighted_l2_fit_l5s3() {
        let mut pts: Vec<(f64, f64, f64)> = cpi_slice(3..=7)
            .iter()
            .map(|p| (p.t, p.d, 1.0))
            .collect();
        pts[4].2 = 2.0;
        let ds = DataSet::from_triples(&pts).unwrap();
        let (line, _) = l2_fit(&ds).unwrap();
        assert!((line.a1 - 83.88).abs() < 1e-3, "a1 = {}", line.a1);
        assert!((line.a2 - 1.9475).abs() < 1e-9, "a2 = {}", line.a2);
        assert!((predict(&line, 8.0) - 99.46).abs() < 0.005);
    }

    #[test]
    fn two_point_interpolation() {
        let ds = DataSet::from_pairs(&[(0.0, 0.0), (1.0, 1.0)]).unwrap();
        let (line, _) = l2_fit(&ds).unwrap();
        assert!((line.a1).abs() < 1e-12);
        assert!((line.a2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singular_when_all_t_equal() {
        let ds = DataSet::from_pairs(&[(3.0, 0.0), (3.0, 1.0), (3.0, 2.0)]).unwrap();
        assert!(matches!(l2_fit(&ds), Err(Error::SingularL2)));
    }

    #[test]
    fn update_d_matches_full_recompute() {
        let old = cpi_slice(4..=12);
        let (_, sums) = l2_fit(&old).unwrap();

        // identical ordinates: identical sums
        let same = l2_update_d(&sums, &old, &old).unwrap();
        assert_eq!(same, sums);

        // shift every d by 1: intercept moves by exactly 1, slope fixed
        let shifted = DataSet::from_pairs(
            &old.iter().map(|p| (p.t, p.d + 1.0)).collect::<Vec<_>>(),
        )
        .unwrap();
        let upd = l2_update_d(&sums, &old, &shifted).unwrap();
        let base = line_from(&sums).unwrap();
        let moved = line_from(&upd).unwrap();
        assert!((moved.a1 - (base.a1 + 1.0)).abs() < 1e-9);
        assert!((moved.a2 - base.a2).abs() < 1e-9);

        // random-ish perturbation: must equal a fresh fit
        let perturbed = DataSet::from_pairs(
            &old.iter()
                .enumerate()
                .map(|(i, p)| (p.t, p.d + ((i * 7 % 5) as f64) * 0.13 - 0.2))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let upd = l2_update_d(&sums, &old, &perturbed).unwrap();
        let (fresh, fresh_sums) = l2_fit(&perturbed).unwrap();
        assert!((upd.c2 - fresh_sums.c2).abs() < 1e-12 * fresh_sums.c2.abs());
        assert!((upd.c4 - fresh_sums.c4).abs() < 1e-12 * fresh_sums.c4.abs());
        let via_update = line_from(&upd).unwrap();
        assert!((via_update.a1 - fresh.a1).abs() < 1e-9);
        assert!((via_update.a2 - fresh.a2).abs() < 1e-9);
    }

    #[test]
    fn update_d_rejects_shape_mismatch() {
        let a = DataSet::from_pairs(&[(1.0, 1.0), (2.0, 2.0)]).unwrap();
        let b = DataSet::from_pairs(&[(1.0, 1.0), (3.0, 2.0)]).unwrap();
        let (_, sums) = l2_fit(&a).unwrap();
        assert!(matches!(
            l2_update_d(&sums, &a, &b),
            Err(Error::ShapeMismatch)
        ));
    }

    #[test]
    fn residuals_are_weight_orthogonal() {
        let ds = cpi_slice(3..=13);
        let (line, _) = l2_fit(&ds).unwrap();
        let r = compute_residuals(&ds, &line);
        let scale: f64 = ds.iter().map(|p| p.w * p.d.abs()).sum();
        let s0: f64 = ds.iter().zip(r.values()).map(|(p, r)| p.w * r).sum();
        let s1: f64 = ds.iter().zip(r.values()).map(|(p, r)| p.w * p.t * r).sum();
        assert!(s0.abs() <= 1e-9 * scale);
        assert!(s1.abs() <= 1e-9 * scale);
    }
}
