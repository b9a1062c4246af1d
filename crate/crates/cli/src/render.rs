//! Plain-text rendering for fit reports, comparisons, the CPI sweep, and
//! tableau dumps.

use l1fit::data::{evaluate_sar, DataSet, LineParams};
use l1fit::solver::{
    fit, FitReport, Interrupted, IterationRecord, StrategyOptions, Uniqueness,
};
use l1fit::tableau::CondensedTableau;

use crate::{initial_sar, uniqueness_word};

/// Up to six decimals, trailing zeros trimmed.
pub fn fmt_num(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Two decimals, halves rounded away from zero. The nudge keeps values
/// that are exact half-cents (but stored a hair low) rounding upward.
pub fn fmt2(x: f64) -> String {
    format!("{:.2}", (x * 100.0 + 1e-9 * x.signum()).round() / 100.0)
}

pub fn print_fit_report(ds: &DataSet, report: &FitReport) {
    println!(
        "a1={} a2={} SAR={} iters={} {}",
        fmt_num(report.line.a1),
        fmt_num(report.line.a2),
        fmt_num(report.sar),
        report.iterations.len(),
        uniqueness_word(&report.uniqueness)
    );
    if let Some(c) = &report.components {
        println!(
            "start line: a1={} a2={}  delta: a1={} a2={}",
            fmt_num(c.base.a1),
            fmt_num(c.base.a2),
            fmt_num(c.delta.a1),
            fmt_num(c.delta.a2)
        );
    }
    let interp: Vec<String> = report
        .interpolated
        .iter()
        .map(|&i| fmt_num(ds.points()[i].t))
        .collect();
    println!("interpolated t: {}", interp.join(", "));
    println!(
        "sign counts: P={} N={} Z={}",
        report.sign_counts.positive, report.sign_counts.negative, report.sign_counts.zero
    );
    let trail: Vec<String> = std::iter::once(initial_sar(ds, report))
        .chain(report.iterations.iter().map(|r| r.sar))
        .map(fmt_num)
        .collect();
    println!("SAR by iteration: {}", trail.join(" -> "));
    if let Uniqueness::NonUnique { alternates } = &report.uniqueness {
        for alt in alternates {
            println!("alternate optimum: a1={} a2={}", fmt_num(alt.a1), fmt_num(alt.a2));
        }
    }
    for w in &report.warnings {
        println!("note: {w}");
    }
}

pub fn print_cycle_report(partial: &Interrupted) {
    eprintln!(
        "cycling at a1={} a2={} SAR={}",
        fmt_num(partial.line.a1),
        fmt_num(partial.line.a2),
        fmt_num(partial.sar)
    );
    let tail: Vec<String> = partial
        .iterations
        .iter()
        .rev()
        .take(4)
        .map(|r| fmt_num(r.sar))
        .collect();
    let mut cycle: Vec<String> = tail.into_iter().rev().collect();
    cycle.push("Cycles!".to_string());
    eprintln!("recent SAR values: {}", cycle.join(" <-> "));
}

/// One strategy's rows for the side-by-side comparison.
pub struct CompareColumn {
    pub name: String,
    /// (interpolation points, SAR) per iteration, plus a marker row when
    /// the strategy is cut short
    pub rows: Vec<(String, String)>,
    pub footer: String,
}

pub fn compare_column(ds: &DataSet, name: &str, opts: &StrategyOptions) -> CompareColumn {
    let zero = LineParams::new(0.0, 0.0);
    let base_sar = match opts.start {
        l1fit::solver::StartMode::Cold => evaluate_sar(ds, &zero),
        _ => f64::NAN, // replaced below once the report is available
    };
    let iteration_rows = |records: &[IterationRecord]| -> Vec<(String, String)> {
        records
            .iter()
            .map(|r| {
                let pts: Vec<String> =
                    r.interpolation_points.iter().map(|&t| fmt_num(t)).collect();
                let label = if pts.is_empty() {
                    "--".to_string()
                } else {
                    pts.join(",")
                };
                (label, fmt_num(r.sar))
            })
            .collect()
    };
    match fit(ds, opts) {
        Ok(report) => {
            let initial = if base_sar.is_nan() {
                initial_sar(ds, &report)
            } else {
                base_sar
            };
            let mut rows = vec![("--".to_string(), fmt_num(initial))];
            rows.extend(iteration_rows(&report.iterations));
            CompareColumn {
                name: name.to_string(),
                rows,
                footer: format!(
                    "{} iters, a1={} a2={} SAR*={}",
                    report.iterations.len(),
                    fmt_num(report.line.a1),
                    fmt_num(report.line.a2),
                    fmt_num(report.sar)
                ),
            }
        }
        Err(l1fit::error::Error::CyclingDetected { partial }) => {
            let mut rows = vec![("--".to_string(), fmt_num(evaluate_sar(ds, &zero)))];
            rows.extend(iteration_rows(&partial.iterations));
            rows.push(("Cycles!".to_string(), String::new()));
            CompareColumn {
                name: name.to_string(),
                rows,
                footer: "no convergence (cycling)".to_string(),
            }
        }
        Err(l1fit::error::Error::IterationLimitExceeded { limit, partial }) => {
            let mut rows = vec![("--".to_string(), fmt_num(evaluate_sar(ds, &zero)))];
            rows.extend(iteration_rows(&partial.iterations).into_iter().take(20));
            rows.push((format!("stopped at {limit}"), String::new()));
            CompareColumn {
                name: name.to_string(),
                rows,
                footer: "no convergence (iteration limit)".to_string(),
            }
        }
        Err(e) => CompareColumn {
            name: name.to_string(),
            rows: vec![(format!("error: {e}"), String::new())],
            footer: String::new(),
        },
    }
}

pub fn print_compare(input: &str, columns: &[CompareColumn]) {
    println!("input: {input}");
    let height = columns.iter().map(|c| c.rows.len()).max().unwrap_or(0);
    let widths: Vec<usize> = columns
        .iter()
        .map(|c| {
            c.rows
                .iter()
                .map(|(a, b)| a.len() + b.len() + 2)
                .chain(std::iter::once(c.name.len()))
                .max()
                .unwrap_or(8)
                .max(16)
        })
        .collect();
    print!("iter ");
    for (c, w) in columns.iter().zip(&widths) {
        print!("| {:<w$} ", c.name, w = w);
    }
    println!();
    for row in 0..height {
        print!("{row:>4} ");
        for (c, w) in columns.iter().zip(&widths) {
            let cell = c
                .rows
                .get(row)
                .map(|(a, b)| {
                    if b.is_empty() {
                        a.clone()
                    } else {
                        format!("{a}  {b}")
                    }
                })
                .unwrap_or_default();
            print!("| {cell:<w$} ", w = w);
        }
        println!();
    }
    for c in columns {
        if !c.footer.is_empty() {
            println!("{}: {}", c.name, c.footer);
        }
    }
}

pub fn print_sweep(rows: &[(String, usize, usize, FitReport)], pairs: &[(String, String)]) {
    let cell = |length: usize, start: usize| -> Option<&FitReport> {
        rows.iter()
            .find(|(_, l, s, _)| *l == length && *s == start)
            .map(|(_, _, _, r)| r)
    };

    println!("Uniqueness of L1 line fits to the CPI windows (U unique, N non-unique)");
    print!("L\\S ");
    for s in 1..=18 {
        print!("{s:>5}");
    }
    println!();
    for length in 4..=21 {
        print!("{length:>3} ");
        for start in 1..=18 {
            match cell(length, start) {
                Some(r) => print!("{:>5}", uniqueness_letter(&r.uniqueness)),
                None => print!("{:>5}", ""),
            }
        }
        println!();
    }

    println!();
    println!("Optimal SAR values (2 decimals)");
    print!("L\\S ");
    for s in 1..=18 {
        print!("{s:>6}");
    }
    println!();
    for length in 4..=21 {
        print!("{length:>3} ");
        for start in 1..=18 {
            match cell(length, start) {
                Some(r) => print!("{:>6}", fmt2(r.sar)),
                None => print!("{:>6}", ""),
            }
        }
        println!();
    }

    println!();
    println!(
        "{} vertical pairs share an optimal SAR: {}",
        pairs.len(),
        pairs
            .iter()
            .map(|(a, b)| format!("{a}/{b}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
}

fn uniqueness_letter(u: &Uniqueness) -> &'static str {
    match u {
        Uniqueness::Unique => "U",
        Uniqueness::NonUnique { .. } => "N",
        Uniqueness::Undetermined { .. } => "?",
    }
}

pub fn print_tableau_step(tab: &CondensedTableau, rec: Option<&IterationRecord>) {
    match rec {
        None => println!("\ninitial tableau"),
        Some(r) => {
            println!(
                "\nafter iteration {} ({} pivot): entered {}, left {}, pivot value {}",
                r.index,
                match r.rule {
                    l1fit::pivot::PivotRule::Br => "bypass",
                    l1fit::pivot::PivotRule::Wm => "weighted-median",
                },
                r.entering_label,
                r.pivot_row_label,
                fmt_num(r.pivot_value)
            );
        }
    }
    for row in tab.rows() {
        println!(
            "{:>12} {:>12} {:>14}  | {:>4}",
            fmt_num(row.cols[0]),
            fmt_num(row.cols[1]),
            fmt_num(row.rhs),
            row.label.value()
        );
    }
    let mc = tab.marginal_costs();
    println!(
        "{:>12} {:>12} {:>14}  | MC / SAR",
        fmt_num(mc[0]),
        fmt_num(mc[1]),
        fmt_num(tab.sar())
    );
    println!(
        "{:>12} {:>12}                | column labels",
        tab.col_labels()[0].value(),
        tab.col_labels()[1].value()
    );
}
