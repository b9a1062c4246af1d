//! Iteration drivers: plain BR, plain WM, the safeguarded hybrid, the
//! restarted two-iteration WM scheme, and L2/trial warm starts, plus
//! uniqueness analysis over the converged tableau.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::data::{
    classify_signs, compute_residuals, DataSet, LineParams, Residuals, SignCounts, Tolerance,
};
use crate::error::{Error, Result};
use crate::lsq;
use crate::pivot::{br_pivot_row, select_entering, wm_pivot_row, ColumnPolicy, PivotRule};
use crate::tableau::{scale_dataset, unscale_params, CondensedTableau, Label, ScaleFactors};

/// Pivot-selection strategy for a whole fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Bypass rule on every iteration; guaranteed convergence.
    Br,
    /// Weighted-median rule on every iteration; may take extra iterations
    /// and can cycle on rare inputs (then the iteration cap trips).
    Wm,
    /// Weighted-median pivots with a forced BR pivot after any iteration
    /// that fails to decrease SAR. The recommended default.
    #[default]
    Hybrid,
    /// Two WM iterations per pass, restarting from the interim residuals;
    /// a stalled pass is rescued by BR pivots unless the safeguard is off.
    RestartedWm,
    /// Weighted-median rule with cycle detection and no safeguard, kept for
    /// demonstrating the pathology.
    WmPure,
}

/// Where the iterations start from.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum StartMode {
    #[default]
    Cold,
    /// Seed with the closed-form least-squares line, then fit its residuals.
    L2Start,
    /// Seed with a caller-supplied line; residuals are recomputed here.
    Trial(LineParams),
}

/// Knobs for one fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyOptions {
    pub strategy: Strategy,
    pub start: StartMode,
    pub column_policy: ColumnPolicy,
    pub tol: Tolerance,
    /// Pivot cap; defaults to `10 m + 50` when `None`.
    pub max_iterations: Option<usize>,
    /// Normalize by `max |t|` and `max |d|` before solving.
    pub scaling: bool,
    /// Apply the degenerate zero-row sign flip after each pivot.
    pub degenerate_flip: bool,
    /// BR rescue of stalled restarted-WM passes. Ignored by the other
    /// strategies (the hybrid safeguard is what defines `Hybrid`).
    pub safeguard: bool,
}

impl Default for StrategyOptions {
    fn default() -> Self {
        Self {
            strategy: Strategy::default(),
            start: StartMode::default(),
            column_policy: ColumnPolicy::default(),
            tol: Tolerance::default(),
            max_iterations: None,
            scaling: false,
            degenerate_flip: true,
            safeguard: true,
        }
    }
}

/// One simplex iteration as reported back to the caller.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    /// 1-based pivot counter, running across restarted passes.
    pub index: usize,
    pub rule: PivotRule,
    pub entering_label: Label,
    pub pivot_row_label: Label,
    pub pivot_value: f64,
    /// `t` values of the data labels sitting on the nonbasic columns.
    pub interpolation_points: Vec<f64>,
    pub sar: f64,
}

/// Uniqueness verdict for the computed optimum.
#[derive(Debug, Clone)]
pub enum Uniqueness {
    Unique,
    NonUnique { alternates: Vec<LineParams> },
    Undetermined { reason: String },
}

/// Counters accumulated while pivoting.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FitStats {
    /// candidates skipped by BR walks
    pub bypasses: u64,
    /// worst per-pivot comparison count spent selecting weighted medians
    pub wm_comparisons_max: u64,
}

/// Component lines of a seeded fit: the seed and the correction fitted to
/// its residuals.
#[derive(Debug, Clone, Copy)]
pub struct StartComponents {
    pub base: LineParams,
    pub delta: LineParams,
}

/// Everything a fit produces.
#[derive(Debug, Clone)]
pub struct FitReport {
    pub line: LineParams,
    pub sar: f64,
    pub residuals: Residuals,
    pub sign_counts: SignCounts,
    pub iterations: Vec<IterationRecord>,
    pub uniqueness: Uniqueness,
    /// data indices with zero residual under the final basis
    pub interpolated: std::collections::BTreeSet<usize>,
    pub start_mode_used: StartMode,
    pub warnings: Vec<String>,
    /// seed and delta lines when a warm start was used
    pub components: Option<StartComponents>,
    pub stats: FitStats,
}

/// State captured when a solve is interrupted by cycling or the cap.
#[derive(Debug, Clone)]
pub struct Interrupted {
    pub line: LineParams,
    pub sar: f64,
    pub iterations: Vec<IterationRecord>,
}

/// Observer invoked with the initial tableau (`None`) and after every pivot.
pub type Observer<'a> = dyn FnMut(&CondensedTableau, Option<&IterationRecord>) + 'a;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RuleMode {
    BrOnly,
    WmOnly { detect_cycles: bool },
    Hybrid,
}

impl RuleMode {
    fn of(strategy: Strategy) -> Self {
        match strategy {
            Strategy::Br => RuleMode::BrOnly,
            Strategy::Wm => RuleMode::WmOnly {
                detect_cycles: false,
            },
            Strategy::WmPure => RuleMode::WmOnly {
                detect_cycles: true,
            },
            Strategy::Hybrid | Strategy::RestartedWm => RuleMode::Hybrid,
        }
    }
}

struct Engine<'a> {
    opts: &'a StrategyOptions,
    mode: RuleMode,
    cap: usize,
    toler: f64,
    force_br: bool,
    records: Vec<IterationRecord>,
    stats: FitStats,
    seen: HashMap<(i32, i32, i128), f64>,
    best_sar: f64,
}

impl<'a> Engine<'a> {
    fn new(opts: &'a StrategyOptions, mode: RuleMode, m: usize) -> Self {
        Self {
            opts,
            mode,
            cap: opts.max_iterations.unwrap_or(10 * m + 50).max(2),
            toler: opts.tol.value(),
            force_br: false,
            records: Vec::new(),
            stats: FitStats::default(),
            seen: HashMap::new(),
            best_sar: f64::INFINITY,
        }
    }

    fn partial(&self, tab: &CondensedTableau) -> Box<Interrupted> {
        let sol = tab.current_solution();
        Box::new(Interrupted {
            line: sol.line,
            sar: sol.sar,
            iterations: self.records.clone(),
        })
    }

    fn signature(&self, tab: &CondensedTableau) -> (i32, i32, i128) {
        let mut labs = [
            tab.col_labels()[0].value().abs(),
            tab.col_labels()[1].value().abs(),
        ];
        labs.sort_unstable();
        let quantized = (tab.sar() * 1e12).round() as i128;
        (labs[0], labs[1], quantized)
    }

    /// Run pivots until convergence, an interruption, or (when given)
    /// `max_steps` pivots. Returns whether the tableau is now converged.
    fn run(
        &mut self,
        ds: &DataSet,
        tab: &mut CondensedTableau,
        max_steps: Option<usize>,
        observer: &mut Observer<'_>,
    ) -> Result<bool> {
        let mut steps = 0usize;
        self.best_sar = self.best_sar.min(tab.sar());
        loop {
            if tab.is_converged() {
                return Ok(true);
            }
            if let Some(max) = max_steps {
                if steps >= max {
                    return Ok(false);
                }
            }
            if self.records.len() >= self.cap {
                return Err(Error::IterationLimitExceeded {
                    limit: self.cap,
                    partial: self.partial(tab),
                });
            }

            let entering = select_entering(tab, self.opts.column_policy)?;
            let rule = match self.mode {
                RuleMode::BrOnly => PivotRule::Br,
                RuleMode::WmOnly { .. } => PivotRule::Wm,
                RuleMode::Hybrid => {
                    if self.force_br {
                        PivotRule::Br
                    } else {
                        PivotRule::Wm
                    }
                }
            };
            let choice = match rule {
                PivotRule::Br => br_pivot_row(tab, entering.col, entering.flipped)?,
                PivotRule::Wm => wm_pivot_row(tab, entering.col, entering.flipped)?,
            };
            let pivot_row_label = tab.rows()[choice.row].label;
            let pivot_value = tab.apply_pivot(choice.row, entering.col, entering.flipped)?;
            if self.opts.degenerate_flip {
                tab.flip_degenerate_rows();
            }

            let sar = tab.sar();
            self.stats.bypasses += choice.bypasses;
            self.stats.wm_comparisons_max = self.stats.wm_comparisons_max.max(choice.comparisons);
            let record = IterationRecord {
                index: self.records.len() + 1,
                rule,
                entering_label: entering.label,
                pivot_row_label,
                pivot_value,
                interpolation_points: tab.interpolation_points(ds),
                sar,
            };
            observer(tab, Some(&record));
            self.records.push(record);

            let prev_best = self.best_sar;
            self.best_sar = self.best_sar.min(sar);
            if self.mode == RuleMode::Hybrid {
                // Weighted-median pivots resume only once the objective
                // makes a strict new low; comparing against the previous
                // iteration alone admits orbits where each rescue merely
                // wins back what the preceding pivot lost.
                self.force_br = sar >= prev_best - self.toler;
            }
            if let RuleMode::WmOnly {
                detect_cycles: true,
            } = self.mode
            {
                let sig = self.signature(tab);
                match self.seen.get(&sig) {
                    Some(&recorded) if self.best_sar >= recorded - self.toler => {
                        return Err(Error::CyclingDetected {
                            partial: self.partial(tab),
                        });
                    }
                    _ => {
                        self.seen.insert(sig, self.best_sar);
                    }
                }
            }
            steps += 1;
        }
    }
}

struct CoreResult {
    tab: CondensedTableau,
    /// line already accumulated outside the tableau (restarted passes)
    base: LineParams,
    records: Vec<IterationRecord>,
    stats: FitStats,
    warnings: Vec<String>,
}

fn solve_core(
    ds: &DataSet,
    opts: &StrategyOptions,
    observer: &mut Observer<'_>,
) -> Result<CoreResult> {
    match opts.strategy {
        Strategy::RestartedWm => solve_restarted(ds, opts, observer),
        s => {
            let mut engine = Engine::new(opts, RuleMode::of(s), ds.len());
            let mut tab = CondensedTableau::new(ds, opts.tol);
            observer(&tab, None);
            engine.run(ds, &mut tab, None, observer)?;
            Ok(CoreResult {
                tab,
                base: LineParams::new(0.0, 0.0),
                records: engine.records,
                stats: engine.stats,
                warnings: Vec::new(),
            })
        }
    }
}

/// Restarted two-iteration scheme: run two WM pivots, restart from the
/// interim residuals, and repeat. A pass whose SAR fails to improve on the
/// previous pass is a stall: with the safeguard enabled the current tableau
/// is finished with hybrid pivots beginning with a forced BR; otherwise the
/// stall is reported as cycling.
fn solve_restarted(
    ds: &DataSet,
    opts: &StrategyOptions,
    observer: &mut Observer<'_>,
) -> Result<CoreResult> {
    let toler = opts.tol.value();
    let mut engine = Engine::new(
        opts,
        RuleMode::WmOnly {
            detect_cycles: false,
        },
        ds.len(),
    );
    let mut base = LineParams::new(0.0, 0.0);
    let mut current = ds.clone();
    let mut prev_pass_sar = f64::INFINITY;
    let mut warnings = Vec::new();

    loop {
        let mut tab = CondensedTableau::new(&current, opts.tol);
        observer(&tab, None);
        let converged = engine
            .run(&current, &mut tab, Some(2), observer)
            .map_err(|e| map_interrupted(e, |p| offset_interrupted(p, &base)))?;
        if converged {
            return Ok(CoreResult {
                tab,
                base,
                records: engine.records,
                stats: engine.stats,
                warnings,
            });
        }
        let pass_sar = tab.sar();
        if pass_sar < prev_pass_sar - toler {
            prev_pass_sar = pass_sar;
            let sol = tab.current_solution();
            base = LineParams::new(base.a1 + sol.line.a1, base.a2 + sol.line.a2);
            let next: Vec<(f64, f64, f64)> = current
                .iter()
                .zip(sol.residuals.values())
                .map(|(p, &r)| (p.t, r, p.w))
                .collect();
            current = DataSet::from_triples(&next)?;
            continue;
        }

        // stalled pass
        if !opts.safeguard {
            let sol = tab.current_solution();
            let mut partial = engine.partial(&tab);
            partial.line =
                LineParams::new(base.a1 + sol.line.a1, base.a2 + sol.line.a2);
            return Err(Error::CyclingDetected { partial });
        }
        warnings.push("restarted pass stalled; finished with hybrid pivots".to_string());
        engine.mode = RuleMode::Hybrid;
        engine.force_br = true;
        engine
            .run(&current, &mut tab, None, observer)
            .map_err(|e| map_interrupted(e, |p| offset_interrupted(p, &base)))?;
        return Ok(CoreResult {
            tab,
            base,
            records: engine.records,
            stats: engine.stats,
            warnings,
        });
    }
}

struct Outcome {
    line: LineParams,
    sar: f64,
    residuals: Residuals,
    interpolated: std::collections::BTreeSet<usize>,
    iterations: Vec<IterationRecord>,
    uniqueness: Uniqueness,
    stats: FitStats,
    warnings: Vec<String>,
}

fn unscale_interrupted(mut partial: Box<Interrupted>, f: &ScaleFactors) -> Box<Interrupted> {
    partial.line = unscale_params(&partial.line, f);
    partial.sar *= f.d_scale;
    for r in &mut partial.iterations {
        r.sar *= f.d_scale;
        for t in &mut r.interpolation_points {
            *t *= f.t_scale;
        }
    }
    partial
}

fn offset_interrupted(mut partial: Box<Interrupted>, base: &LineParams) -> Box<Interrupted> {
    partial.line = LineParams::new(partial.line.a1 + base.a1, partial.line.a2 + base.a2);
    partial
}

fn map_interrupted(
    err: Error,
    f: impl FnOnce(Box<Interrupted>) -> Box<Interrupted>,
) -> Error {
    match err {
        Error::CyclingDetected { partial } => Error::CyclingDetected {
            partial: f(partial),
        },
        Error::IterationLimitExceeded { limit, partial } => Error::IterationLimitExceeded {
            limit,
            partial: f(partial),
        },
        e => e,
    }
}

/// Cold solve of `ds` (scaling applied here when requested), producing the
/// line, per-iteration history, and uniqueness verdict.
fn solve_scaled(
    ds: &DataSet,
    opts: &StrategyOptions,
    observer: &mut Observer<'_>,
) -> Result<Outcome> {
    if !opts.scaling {
        let core = solve_core(ds, opts, observer)?;
        return outcome_from_core(core, None);
    }
    let (scaled, factors) = scale_dataset(ds)?;
    let core = solve_core(&scaled, opts, observer)
        .map_err(|e| map_interrupted(e, |p| unscale_interrupted(p, &factors)))?;
    outcome_from_core(core, Some(factors))
}

fn outcome_from_core(core: CoreResult, factors: Option<ScaleFactors>) -> Result<Outcome> {
    let sol = core.tab.extract_report()?;
    let uniqueness = uniqueness_verdict(&core.tab, &core.base);
    let mut line = LineParams::new(core.base.a1 + sol.line.a1, core.base.a2 + sol.line.a2);
    let mut sar = sol.sar;
    let mut residuals = sol.residuals;
    let mut iterations = core.records;
    let mut uniqueness = uniqueness;
    if let Some(f) = factors {
        line = unscale_params(&line, &f);
        sar *= f.d_scale;
        for r in residuals.0.iter_mut() {
            *r *= f.d_scale;
        }
        for rec in &mut iterations {
            rec.sar *= f.d_scale;
            for t in &mut rec.interpolation_points {
                *t *= f.t_scale;
            }
        }
        if let Uniqueness::NonUnique { alternates } = &mut uniqueness {
            for alt in alternates.iter_mut() {
                *alt = unscale_params(alt, &f);
            }
        }
    }
    Ok(Outcome {
        line,
        sar,
        residuals,
        interpolated: sol.interpolated,
        iterations,
        uniqueness,
        stats: core.stats,
        warnings: core.warnings,
    })
}

/// Dimension of the probe behind the fit's uniqueness verdict.
const UNIQUENESS_LINE_LIMIT: usize = 16;
const UNIQUENESS_VISIT_CAP: usize = 512;
/// Above this size the one-step test replaces the basis exploration.
const UNIQUENESS_PROBE_MAX_M: usize = 10_000;

fn uniqueness_verdict(tab: &CondensedTableau, base: &LineParams) -> Uniqueness {
    let mut verdict = if tab.m() <= UNIQUENESS_PROBE_MAX_M {
        let (lines, complete) =
            enumerate_from_tableau(tab, UNIQUENESS_LINE_LIMIT, UNIQUENESS_VISIT_CAP);
        match (lines.len(), complete) {
            (0 | 1, true) => Uniqueness::Unique,
            (0 | 1, false) => Uniqueness::Undetermined {
                reason: "basis exploration hit its cap before finding a second line".to_string(),
            },
            (_, _) => {
                let current = tab.current_solution().line;
                let alternates = lines
                    .into_iter()
                    .filter(|l| !same_line(l, &current))
                    .collect();
                Uniqueness::NonUnique { alternates }
            }
        }
    } else {
        analyze_uniqueness(tab)
    };
    if let Uniqueness::NonUnique { alternates } = &mut verdict {
        for alt in alternates.iter_mut() {
            *alt = LineParams::new(alt.a1 + base.a1, alt.a2 + base.a2);
        }
    }
    verdict
}

fn same_line(a: &LineParams, b: &LineParams) -> bool {
    (a.a1 - b.a1).abs() <= 1e-9 && (a.a2 - b.a2).abs() <= 1e-9
}

/// One-step non-uniqueness test on a converged tableau: a nonbasic vector
/// with zero marginal cost whose ratio test is strictly positive yields an
/// alternate optimal line by a single pivot. Zero-ratio columns are
/// degenerate re-bases of the same line and do not count.
pub fn analyze_uniqueness(tab: &CondensedTableau) -> Uniqueness {
    if !tab.is_converged() {
        return Uniqueness::Undetermined {
            reason: "tableau has not converged".to_string(),
        };
    }
    let toler = tab.toler();
    let current = tab.current_solution().line;
    let mut alternates: Vec<LineParams> = Vec::new();
    for col in 0..2 {
        for flipped in [false, true] {
            if tab.effective_mc(col, flipped).abs() > toler {
                continue;
            }
            let mut best: Option<(f64, usize)> = None;
            for (i, r) in tab.rows().iter().enumerate() {
                if r.label.is_param() {
                    continue;
                }
                let e = tab.entry(i, col, flipped);
                if e > toler {
                    let ratio = r.rhs / e;
                    if best.is_none_or(|(b, _)| ratio < b) {
                        best = Some((ratio, i));
                    }
                }
            }
            let Some((ratio, row)) = best else { continue };
            if ratio <= toler {
                continue;
            }
            let mut alt = tab.clone();
            if alt.apply_pivot(row, col, flipped).is_ok() {
                let line = alt.current_solution().line;
                if !same_line(&line, &current) && !alternates.iter().any(|l| same_line(l, &line)) {
                    alternates.push(line);
                }
            }
        }
    }
    if alternates.is_empty() {
        Uniqueness::Unique
    } else {
        Uniqueness::NonUnique { alternates }
    }
}

fn line_key(line: &LineParams) -> (i64, i64) {
    ((line.a1 * 1e9).round() as i64, (line.a2 * 1e9).round() as i64)
}

/// Breadth-first walk over the optimal bases reachable by zero-marginal-cost
/// pivots at minimum ratio. Returns the distinct lines found and whether the
/// walk exhausted every reachable basis.
fn enumerate_from_tableau(
    start: &CondensedTableau,
    line_limit: usize,
    visit_cap: usize,
) -> (Vec<LineParams>, bool) {
    let toler = start.toler();
    let mut queue: VecDeque<CondensedTableau> = VecDeque::new();
    let mut visited: HashSet<Vec<i32>> = HashSet::new();
    let mut lines: Vec<LineParams> = Vec::new();
    let mut keys: HashSet<(i64, i64)> = HashSet::new();

    let sig = |tab: &CondensedTableau| -> Vec<i32> {
        let mut labels: Vec<i32> = tab.rows().iter().map(|r| r.label.value()).collect();
        labels.sort_unstable();
        labels
    };

    visited.insert(sig(start));
    queue.push_back(start.clone());

    while let Some(tab) = queue.pop_front() {
        let line = tab.current_solution().line;
        if keys.insert(line_key(&line)) {
            lines.push(line);
            if lines.len() >= line_limit {
                return (lines, false);
            }
        }
        for col in 0..2 {
            for flipped in [false, true] {
                if tab.effective_mc(col, flipped).abs() > toler {
                    continue;
                }
                let mut ratios: Vec<(f64, usize)> = Vec::new();
                for (i, r) in tab.rows().iter().enumerate() {
                    if r.label.is_param() {
                        continue;
                    }
                    let e = tab.entry(i, col, flipped);
                    if e > toler {
                        ratios.push((r.rhs / e, i));
                    }
                }
                let Some(min) = ratios
                    .iter()
                    .map(|&(r, _)| r)
                    .min_by(f64::total_cmp)
                else {
                    continue;
                };
                let tie = 1e-9 * (1.0 + min.abs());
                for &(ratio, row) in ratios.iter().filter(|&&(r, _)| r <= min + tie) {
                    let _ = ratio;
                    let mut next = tab.clone();
                    if next.apply_pivot(row, col, flipped).is_err() {
                        continue;
                    }
                    let s = sig(&next);
                    if visited.contains(&s) {
                        continue;
                    }
                    if visited.len() >= visit_cap {
                        return (lines, false);
                    }
                    visited.insert(s);
                    queue.push_back(next);
                }
            }
        }
    }
    (lines, true)
}

/// All distinct optimal interpolating lines reachable from one optimum,
/// capped at `limit`.
pub fn enumerate_basic_optima(
    ds: &DataSet,
    opts: &StrategyOptions,
    limit: usize,
) -> Result<Vec<LineParams>> {
    assert!(limit >= 1, "limit must be at least 1");
    let mut noop = |_: &CondensedTableau, _: Option<&IterationRecord>| {};
    let core = solve_core(ds, opts, &mut noop)?;
    let (lines, _) = enumerate_from_tableau(&core.tab, limit, 4096.max(8 * limit));
    Ok(lines
        .into_iter()
        .map(|l| LineParams::new(l.a1 + core.base.a1, l.a2 + core.base.a2))
        .collect())
}

/// Uniqueness classification for equally spaced abscissas, by count alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpacingClass {
    /// m even but not a multiple of 4: the optimum is always unique.
    UniqueGuaranteed,
    /// m odd: one or two basic optimal lines.
    OneOrTwoBasic,
    /// m a multiple of 4: unique or more than two basic lines; carries the
    /// approximate lower bound 2.2 / m^2 on the chance of non-uniqueness.
    OneOrMoreThanTwoBasic { nonuniqueness_lower_bound: f64 },
}

pub fn equal_spacing_class(m: usize) -> Result<SpacingClass> {
    if m < 4 {
        return Err(Error::InvalidM { m });
    }
    Ok(if m % 2 == 1 {
        SpacingClass::OneOrTwoBasic
    } else if m.is_multiple_of(4) {
        SpacingClass::OneOrMoreThanTwoBasic {
            nonuniqueness_lower_bound: 2.2 / (m * m) as f64,
        }
    } else {
        SpacingClass::UniqueGuaranteed
    })
}

fn report_from_outcome(
    ds: &DataSet,
    opts: &StrategyOptions,
    outcome: Outcome,
    start_mode_used: StartMode,
    components: Option<StartComponents>,
) -> FitReport {
    let sign_counts = classify_signs(&outcome.residuals, opts.tol);
    let mut warnings = outcome.warnings;
    if ds.len() >= 2 && matches!(outcome.uniqueness, Uniqueness::Undetermined { .. }) {
        warnings.push("uniqueness could not be settled within the exploration cap".to_string());
    }
    FitReport {
        line: outcome.line,
        sar: outcome.sar,
        residuals: outcome.residuals,
        sign_counts,
        iterations: outcome.iterations,
        uniqueness: outcome.uniqueness,
        interpolated: outcome.interpolated,
        start_mode_used,
        warnings,
        components,
        stats: outcome.stats,
    }
}

/// Fit `ds` according to `opts`, dispatching on the start mode.
pub fn fit(ds: &DataSet, opts: &StrategyOptions) -> Result<FitReport> {
    let mut noop = |_: &CondensedTableau, _: Option<&IterationRecord>| {};
    fit_traced(ds, opts, &mut noop)
}

/// As [`fit`], invoking `observer` with the initial tableau of every solve
/// (`None`) and after each pivot (`Some(record)`).
pub fn fit_traced(
    ds: &DataSet,
    opts: &StrategyOptions,
    observer: &mut Observer<'_>,
) -> Result<FitReport> {
    if ds.len() < 2 {
        return Err(Error::InsufficientData {
            m: ds.len(),
            required: 2,
        });
    }
    match opts.start {
        StartMode::Cold => {
            let outcome = solve_scaled(ds, opts, observer)?;
            Ok(report_from_outcome(ds, opts, outcome, StartMode::Cold, None))
        }
        StartMode::L2Start => fit_with_l2_start_traced(ds, opts, observer),
        StartMode::Trial(line) => fit_with_trial_traced(ds, &line, opts, observer),
    }
}

/// Seed with the least-squares line, then fit an L1 line to its residuals;
/// the returned line is the sum of the two.
pub fn fit_with_l2_start(ds: &DataSet, opts: &StrategyOptions) -> Result<FitReport> {
    let mut noop = |_: &CondensedTableau, _: Option<&IterationRecord>| {};
    fit_with_l2_start_traced(ds, opts, &mut noop)
}

fn fit_with_l2_start_traced(
    ds: &DataSet,
    opts: &StrategyOptions,
    observer: &mut Observer<'_>,
) -> Result<FitReport> {
    let (l2_line, _) = lsq::l2_fit(ds)?;
    fit_seeded(ds, &l2_line, opts, StartMode::L2Start, observer)
}

/// Seed with a caller-supplied trial line; residuals are recomputed here,
/// never taken on trust.
pub fn fit_with_trial(
    ds: &DataSet,
    trial: &LineParams,
    opts: &StrategyOptions,
) -> Result<FitReport> {
    let mut noop = |_: &CondensedTableau, _: Option<&IterationRecord>| {};
    fit_with_trial_traced(ds, trial, opts, &mut noop)
}

fn fit_with_trial_traced(
    ds: &DataSet,
    trial: &LineParams,
    opts: &StrategyOptions,
    observer: &mut Observer<'_>,
) -> Result<FitReport> {
    if !(trial.a1.is_finite() && trial.a2.is_finite()) {
        return Err(Error::InvalidData {
            index: 0,
            reason: "trial line must be finite".to_string(),
        });
    }
    fit_seeded(ds, trial, opts, StartMode::Trial(*trial), observer)
}

/// Restarted two-iteration scheme as a standalone entry point.
pub fn fit_restarted_wm(ds: &DataSet, opts: &StrategyOptions) -> Result<FitReport> {
    let opts = StrategyOptions {
        strategy: Strategy::RestartedWm,
        ..*opts
    };
    fit(ds, &opts)
}

fn fit_seeded(
    ds: &DataSet,
    seed: &LineParams,
    opts: &StrategyOptions,
    mode: StartMode,
    observer: &mut Observer<'_>,
) -> Result<FitReport> {
    if ds.len() < 2 {
        return Err(Error::InsufficientData {
            m: ds.len(),
            required: 2,
        });
    }
    let residuals = compute_residuals(ds, seed);
    let triples: Vec<(f64, f64, f64)> = ds
        .iter()
        .zip(residuals.values())
        .map(|(p, &r)| (p.t, r, p.w))
        .collect();
    let resid_ds = DataSet::from_triples(&triples)?;
    let outcome = solve_scaled(&resid_ds, opts, observer)
        .map_err(|e| map_interrupted(e, |p| offset_interrupted(p, seed)))?;
    let delta = outcome.line;
    let total = LineParams::new(seed.a1 + delta.a1, seed.a2 + delta.a2);
    let mut uniqueness = outcome.uniqueness;
    if let Uniqueness::NonUnique { alternates } = &mut uniqueness {
        for alt in alternates.iter_mut() {
            *alt = LineParams::new(alt.a1 + seed.a1, alt.a2 + seed.a2);
        }
    }
    let shifted = Outcome {
        line: total,
        uniqueness,
        ..outcome
    };
    Ok(report_from_outcome(
        ds,
        opts,
        shifted,
        mode,
        Some(StartComponents {
            base: *seed,
            delta,
        }),
    ))
}
