//! JSON report shapes. Numbers pass through serde_json's shortest
//! round-trip encoding, so full precision is preserved.

use serde::Serialize;

use l1fit::pivot::PivotRule;
use l1fit::solver::{FitReport, Uniqueness};

use crate::CommonFitArgs;

#[derive(Serialize)]
pub struct JsonLine {
    pub a1: f64,
    pub a2: f64,
}

#[derive(Serialize)]
pub struct JsonOptions {
    pub strategy: String,
    pub start: String,
    pub column: String,
    pub toler: f64,
    pub scale: bool,
    pub weights: String,
}

#[derive(Serialize)]
pub struct JsonIteration {
    pub index: usize,
    pub rule: String,
    pub entering_label: i32,
    pub interp_t: Vec<f64>,
    pub sar: f64,
}

#[derive(Serialize)]
pub struct JsonUniqueness {
    pub kind: String,
    pub alternates: Vec<JsonLine>,
}

#[derive(Serialize)]
pub struct JsonSignCounts {
    #[serde(rename = "P")]
    pub positive: usize,
    #[serde(rename = "N")]
    pub negative: usize,
    #[serde(rename = "Z")]
    pub zero: usize,
}

#[derive(Serialize)]
pub struct JsonFitReport {
    pub input: String,
    pub options: JsonOptions,
    pub line: JsonLine,
    pub sar: f64,
    pub iterations: Vec<JsonIteration>,
    pub uniqueness: JsonUniqueness,
    pub residuals: Vec<f64>,
    pub sign_counts: JsonSignCounts,
    pub warnings: Vec<String>,
}

pub fn fit_report(input: &str, args: &CommonFitArgs, report: &FitReport) -> JsonFitReport {
    let uniqueness = match &report.uniqueness {
        Uniqueness::Unique => JsonUniqueness {
            kind: "unique".to_string(),
            alternates: Vec::new(),
        },
        Uniqueness::NonUnique { alternates } => JsonUniqueness {
            kind: "non-unique".to_string(),
            alternates: alternates
                .iter()
                .map(|l| JsonLine { a1: l.a1, a2: l.a2 })
                .collect(),
        },
        Uniqueness::Undetermined { .. } => JsonUniqueness {
            kind: "undetermined".to_string(),
            alternates: Vec::new(),
        },
    };
    JsonFitReport {
        input: input.to_string(),
        options: JsonOptions {
            strategy: args.strategy.name().to_string(),
            start: args.start.clone(),
            column: args.column.name().to_string(),
            toler: args
                .toler
                .unwrap_or(l1fit::data::Tolerance::DEFAULT),
            scale: args.scale,
            weights: match args.weights {
                crate::WeightsArg::Embedded => "embedded".to_string(),
                crate::WeightsArg::Uniform => "uniform".to_string(),
            },
        },
        line: JsonLine {
            a1: report.line.a1,
            a2: report.line.a2,
        },
        sar: report.sar,
        iterations: report
            .iterations
            .iter()
            .map(|r| JsonIteration {
                index: r.index,
                rule: match r.rule {
                    PivotRule::Br => "br".to_string(),
                    PivotRule::Wm => "wm".to_string(),
                },
                entering_label: r.entering_label.value(),
                interp_t: r.interpolation_points.clone(),
                sar: r.sar,
            })
            .collect(),
        uniqueness,
        residuals: report.residuals.values().to_vec(),
        sign_counts: JsonSignCounts {
            positive: report.sign_counts.positive,
            negative: report.sign_counts.negative,
            zero: report.sign_counts.zero,
        },
        warnings: report.warnings.clone(),
    }
}

#[derive(Serialize)]
pub struct JsonWindow {
    pub name: String,
    pub length: usize,
    pub start: usize,
    pub sar: f64,
    pub uniqueness: String,
    pub line: JsonLine,
}

#[derive(Serialize)]
pub struct JsonSweep {
    pub strategy: String,
    pub windows: Vec<JsonWindow>,
    pub equal_sar_pairs: Vec<[String; 2]>,
}

pub fn sweep_report(
    strategy: &str,
    rows: &[(String, usize, usize, FitReport)],
    pairs: &[(String, String)],
) -> JsonSweep {
    JsonSweep {
        strategy: strategy.to_string(),
        windows: rows
            .iter()
            .map(|(name, length, start, report)| JsonWindow {
                name: name.clone(),
                length: *length,
                start: *start,
                sar: report.sar,
                uniqueness: crate::uniqueness_word(&report.uniqueness).to_string(),
                line: JsonLine {
                    a1: report.line.a1,
                    a2: report.line.a2,
                },
            })
            .collect(),
        equal_sar_pairs: pairs
            .iter()
            .map(|(a, b)| [a.clone(), b.clone()])
            .collect(),
    }
}
