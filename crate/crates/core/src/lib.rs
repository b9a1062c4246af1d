//! Weighted least-absolute-residuals straight-line fitting.
//!
//! The solver expresses `min sum w_i |d_i - (a1 + a2 t_i)|` as a linear
//! program and runs a condensed simplex over it: only two nonbasic columns
//! plus the right-hand side are stored, and pivot rows are chosen either by
//! the bypass rule (maximum one-step descent) or by a weighted median of
//! ratios (cheaper per pivot). The default `Hybrid` strategy uses weighted
//! medians with a forced bypass pivot after any iteration that fails to
//! decrease the objective, which restores the convergence guarantee.
//!
//! ```
//! use l1fit::datasets::fixture;
//! use l1fit::solver::{fit, StrategyOptions};
//!
//! let ds = fixture("five_point").unwrap();
//! let report = fit(&ds, &StrategyOptions::default()).unwrap();
//! assert!((report.sar - 2.0).abs() < 1e-9);
//! ```

pub mod data;
pub mod datasets;
pub mod error;
pub mod lsq;
pub mod oracle;
pub mod pivot;
pub mod solver;
pub mod tableau;

pub use data::{
    classify_signs, compute_residuals, evaluate_sar, DataPoint, DataSet, LineParams, Residuals,
    SignCounts, Tolerance,
};
pub use error::{Error, Result};
pub use solver::{
    equal_spacing_class, fit, FitReport, StartMode, Strategy, StrategyOptions, Uniqueness,
};
