//! Built-in fixtures, the CPI window generator, and CSV ingestion.

use crate::data::{DataPoint, DataSet};
use crate::error::{Error, Result};

/// Annual Consumer Price Index for Canada, 1995 (t = 1) through 2015
/// (t = 21), base 100 in 2002.
pub const CPI: [(f64, f64); 21] = [
    (1.0, 87.6),
    (2.0, 88.9),
    (3.0, 90.4),
    (4.0, 91.3),
    (5.0, 92.9),
    (6.0, 95.4),
    (7.0, 97.8),
    (8.0, 100.0),
    (9.0, 102.8),
    (10.0, 104.7),
    (11.0, 107.0),
    (12.0, 109.1),
    (13.0, 111.5),
    (14.0, 114.1),
    (15.0, 114.4),
    (16.0, 116.5),
    (17.0, 119.9),
    (18.0, 121.7),
    (19.0, 122.8),
    (20.0, 125.2),
    (21.0, 126.6),
];

/// Identifier of one contiguous CPI slice: length `L` starting at `t = S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CpiWindow {
    pub length: usize,
    pub start: usize,
}

impl CpiWindow {
    pub fn name(&self) -> String {
        format!("L{}S{}", self.length, self.start)
    }
}

impl std::fmt::Display for CpiWindow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "L{}S{}", self.length, self.start)
    }
}

/// The CPI slice of `length` points starting at `t = start`, unit weights.
pub fn cpi_window(length: usize, start: usize) -> Result<DataSet> {
    if !(4..=21).contains(&length) || start < 1 || start + length - 1 > 21 {
        return Err(Error::OutOfRange { length, start });
    }
    DataSet::from_pairs(&CPI[start - 1..start + length - 1])
}

/// All 171 windows, length-major then start-minor: L4S1, L4S2, ..., L21S1.
pub fn all_cpi_windows() -> Vec<(CpiWindow, DataSet)> {
    let mut out = Vec::with_capacity(171);
    for length in 4..=21 {
        for start in 1..=(22 - length) {
            let id = CpiWindow { length, start };
            out.push((id, cpi_window(length, start).expect("in range")));
        }
    }
    out
}

/// Names accepted by [`fixture`].
pub const FIXTURE_NAMES: [&str; 4] = [
    "four_point",
    "four_point_perturbed",
    "five_point",
    "nine_point_erratic",
];

/// Small contrived sets used in tests and CLI demos, by stable name.
pub fn fixture(name: &str) -> Result<DataSet> {
    let pairs: &[(f64, f64)] = match name {
        "four_point" => &[(1.0, 0.0), (2.0, 1.0), (3.0, 1.0), (4.0, 0.0)],
        "four_point_perturbed" => &[(1.0, 2.0), (2.0, 3.0), (3.0, 6.0), (4.0, 4.0)],
        "five_point" => &[(1.0, 1.0), (2.0, 1.0), (3.0, 2.0), (4.0, 3.0), (5.0, 2.0)],
        "nine_point_erratic" => &[
            (4.0, 291.3),
            (5.0, -107.1),
            (6.0, -104.6),
            (7.0, 97.8),
            (8.0, -100.0),
            (9.0, 302.8),
            (10.0, 104.7),
            (11.0, 307.0),
            (12.0, -90.9),
        ],
        _ => {
            return Err(Error::UnknownFixture {
                name: name.to_string(),
            })
        }
    };
    DataSet::from_pairs(pairs)
}

/// Parse CSV text: rows of `t,d` or `t,d,w`; one optional header line
/// (detected by a non-numeric first field); blank lines ignored.
pub fn load_csv_str(text: &str) -> Result<DataSet> {
    let mut points = Vec::new();
    let mut first_data_line = true;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if first_data_line && fields[0].parse::<f64>().is_err() {
            // header
            first_data_line = false;
            continue;
        }
        first_data_line = false;
        if fields.len() != 2 && fields.len() != 3 {
            return Err(Error::ParseError {
                line_no,
                reason: format!("expected 2 or 3 fields, got {}", fields.len()),
            });
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| Error::ParseError {
                line_no,
                reason: format!("not a number: `{s}`"),
            })
        };
        let t = parse(fields[0])?;
        let d = parse(fields[1])?;
        let w = if fields.len() == 3 {
            let w = parse(fields[2])?;
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::NonPositiveWeight { line_no });
            }
            w
        } else {
            1.0
        };
        if !t.is_finite() || !d.is_finite() {
            return Err(Error::ParseError {
                line_no,
                reason: "non-finite value".to_string(),
            });
        }
        points.push(DataPoint::weighted(t, d, w));
    }
    if points.is_empty() {
        return Err(Error::EmptyFile);
    }
    DataSet::new(points)
}

/// Read and parse a CSV file from disk.
pub fn load_csv_path(path: &std::path::Path) -> Result<DataSet> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::ParseError {
        line_no: 0,
        reason: format!("cannot read {}: {e}", path.display()),
    })?;
    load_csv_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{evaluate_sar, LineParams};

    #[test]
    fn l4s1_is_the_first_four_points() {
        let ds = cpi_window(4, 1).unwrap();
        let expected = [(1.0, 87.6), (2.0, 88.9), (3.0, 90.4), (4.0, 91.3)];
        assert_eq!(ds.len(), 4);
        for (p, (t, d)) in ds.iter().zip(expected) {
            assert_eq!((p.t, p.d, p.w), (t, d, 1.0));
        }
    }

    #[test]
    fn l21s1_is_everything() {
        let ds = cpi_window(21, 1).unwrap();
        assert_eq!(ds.len(), 21);
        assert_eq!(ds.points()[20].d, 126.6);
    }

    #[test]
    fn out_of_range_window_rejected() {
        assert!(matches!(
            cpi_window(19, 4),
            Err(Error::OutOfRange { .. })
        ));
        assert!(cpi_window(3, 1).is_err());
        assert!(cpi_window(4, 0).is_err());
    }

    #[test]
    fn there_are_171_windows_in_order() {
        let all = all_cpi_windows();
        assert_eq!(all.len(), 171);
        assert_eq!(all[0].0.name(), "L4S1");
        assert_eq!(all.last().unwrap().0.name(), "L21S1");
        assert!(all.iter().any(|(w, _)| w.name() == "L17S3"));
        assert!(all.iter().any(|(w, _)| w.name() == "L10S12"));
    }

    #[test]
    fn window_sums_match_known_initial_sar() {
        // Initial tableau SAR equals the plain sum of ordinates.
        for (name, expected) in [("L9S4", 901.0), ("L11S3", 1102.9), ("L17S3", 1812.3), ("L20S2", 2153.0)] {
            let (l, s) = parse_name(name);
            let ds = cpi_window(l, s).unwrap();
            let sum: f64 = ds.iter().map(|p| p.d).sum();
            assert!((sum - expected).abs() < 1e-9, "{name}: {sum}");
        }
    }

    fn parse_name(name: &str) -> (usize, usize) {
        let body = &name[1..];
        let (l, s) = body.split_once('S').unwrap();
        (l.parse().unwrap(), s.parse().unwrap())
    }

    #[test]
    fn fixtures_are_available() {
        let erratic = fixture("nine_point_erratic").unwrap();
        assert_eq!(erratic.len(), 9);
        assert_eq!(erratic.points()[0].t, 4.0);
        assert_eq!(erratic.points()[0].d, 291.3);

        let five = fixture("five_point").unwrap();
        assert!((evaluate_sar(&five, &LineParams::new(0.5, 0.5)) - 2.0).abs() < 1e-12);

        assert!(matches!(
            fixture("nope"),
            Err(Error::UnknownFixture { .. })
        ));
    }

    #[test]
    fn csv_basic_and_header() {
        let ds = load_csv_str("1,87.6\n2,88.9").unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.points()[1].w, 1.0);

        let ds = load_csv_str("t,d,w\n3,90.4,1\n7,97.8,2\n").unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.points()[0].w, 1.0);
        assert_eq!(ds.points()[1].w, 2.0);
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        match load_csv_str("1,87.6\n2,abc") {
            Err(Error::ParseError { line_no, .. }) => assert_eq!(line_no, 2),
            other => panic!("unexpected: {other:?}"),
        }
        match load_csv_str("1,2,0\n") {
            Err(Error::NonPositiveWeight { line_no }) => assert_eq!(line_no, 1),
            other => panic!("unexpected: {other:?}"),
        }
        assert!(matches!(load_csv_str(""), Err(Error::EmptyFile)));
        assert!(matches!(load_csv_str("t,d\n"), Err(Error::EmptyFile)));
    }

    #[test]
    fn csv_allows_exponent_notation() {
        let ds = load_csv_str("1e0,8.76e1\n2,8.89E1").unwrap();
        assert!((ds.points()[0].d - 87.6).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip_preserves_windows() {
        let ds = cpi_window(6, 7).unwrap();
        let text: String = ds
            .iter()
            .map(|p| format!("{:.12},{:.12},{:.12}\n", p.t, p.d, p.w))
            .collect();
        let back = load_csv_str(&text).unwrap();
        for (a, b) in ds.iter().zip(back.iter()) {
            assert!((a.t - b.t).abs() < 1e-10);
            assert!((a.d - b.d).abs() < 1e-10);
            assert!((a.w - b.w).abs() < 1e-10);
        }
    }
}
