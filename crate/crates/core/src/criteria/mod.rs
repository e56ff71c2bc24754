//! Finite-window evaluation of spectral-type certificates.
//!
//! No function here asserts a theorem's conclusion. Each reports window
//! extrema and a three-way verdict: `certified-at-scale` when every hypothesis
//! held on the whole window with a stable trend (the last-quartile extremum
//! within 10% of the head extremum), `violated` with a concrete witness, and
//! `inconclusive` otherwise.

pub mod asymptotic;
pub mod derivative;
pub mod report;
pub mod weights;

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coefficients::CoefficientSequence;
use crate::error::{Error, Result};

pub use asymptotic::{asymptotic_conditions_check, discreteness_check};
pub use derivative::gn_derivative_bound;
pub use report::{ConditionBlock, CriterionReport, GridSummary, Verdict, WindowInfo, Witness};
pub use weights::{
    bounded_weight_criterion, equicontinuity_diagnostic, main_estimate_infimum,
    transfer_lower_bound,
};

/// Inclusive index range `start..=end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexWindow {
    pub start: usize,
    pub end: usize,
}

impl IndexWindow {
    pub fn new(start: usize, end: usize) -> Result<Self> {
        if start > end {
            return Err(Error::InvalidArgument(format!(
                "empty window {start}:{end}"
            )));
        }
        Ok(IndexWindow { start, end })
    }

    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub(crate) fn info(&self, xs: Option<&[f64]>) -> WindowInfo {
        WindowInfo {
            n_start: self.start,
            n_end: self.end,
            x_grid: xs.and_then(GridSummary::of),
        }
    }
}

impl FromStr for IndexWindow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("window `{s}` is not of the form start:end"));
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        IndexWindow::new(
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        )
    }
}

/// Evaluate `f` at every grid point in parallel, preserving order.
pub(crate) fn per_point<R, F>(xs: &[f64], f: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(f64) -> Result<R> + Sync,
{
    xs.par_iter().map(|&x| f(x)).collect()
}

/// Record whether `[lo, hi]` sits strictly inside every band of the window.
pub(crate) fn require_centered(
    seq: &CoefficientSequence,
    interval: (f64, f64),
    window: IndexWindow,
    report: &mut CriterionReport,
) -> Result<()> {
    let centered = seq.centered_check(interval, window.start, window.end, 0.0)?;
    match centered.centered_from {
        Some(n0) if n0 == window.start => {}
        Some(n0) => {
            report.note(format!(
                "interval [{}, {}] is inside the bands only from n = {n0}",
                interval.0, interval.1
            ));
            report.downgrade(Verdict::Inconclusive, None);
        }
        None => {
            report.note(format!(
                "interval [{}, {}] is not inside the bands at the end of the window",
                interval.0, interval.1
            ));
            report.downgrade(Verdict::Inconclusive, None);
        }
    }
    report.note(
        "assumed: the interval lies in the spectrum of the operator (not checkable numerically)",
    );
    Ok(())
}

/// Grid points restricted to a closed interval.
pub(crate) fn points_in(xs: &[f64], interval: (f64, f64)) -> Result<Vec<f64>> {
    let inside: Vec<f64> = xs
        .iter()
        .copied()
        .filter(|&x| interval.0 <= x && x <= interval.1)
        .collect();
    if inside.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no grid point lies in [{}, {}]",
            interval.0, interval.1
        )));
    }
    Ok(inside)
}
