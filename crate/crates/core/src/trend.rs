//! Finite-window trend rules shared by the diagnostics.
//!
//! A window is split into a head (first three quarters) and a tail (last
//! quarter). A statistic is stable when its tail extremum stays within 10% of
//! the head extremum in the adverse direction.

use serde::{Deserialize, Serialize};

/// Allowed relative drift between head and tail extrema.
pub const STABILITY_FRACTION: f64 = 0.1;

/// Index where the tail (last quarter, at least one element) begins.
pub fn tail_start(len: usize) -> usize {
    len - (len / 4).max(1).min(len)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesTrend {
    GrowingUnbounded,
    ApparentlyConvergent,
}

/// Classify a sequence of non-decreasing partial sums: apparently convergent
/// when the tail adds at most 10% of the final sum.
pub fn partial_sum_trend(sums: &[f64]) -> SeriesTrend {
    let Some(&last) = sums.last() else {
        return SeriesTrend::ApparentlyConvergent;
    };
    if sums.len() < 4 {
        return SeriesTrend::GrowingUnbounded;
    }
    let before_tail = sums[tail_start(sums.len()) - 1];
    if last - before_tail <= STABILITY_FRACTION * last.abs() {
        SeriesTrend::ApparentlyConvergent
    } else {
        SeriesTrend::GrowingUnbounded
    }
}

/// Extremum over head and tail together with its location.
#[derive(Clone, Copy, Debug)]
pub struct Extremum {
    pub value: f64,
    pub index: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct SplitExtrema {
    pub head: Extremum,
    pub tail: Extremum,
}

impl SplitExtrema {
    pub fn overall(&self, maximum: bool) -> Extremum {
        let pick_tail = if maximum {
            self.tail.value > self.head.value
        } else {
            self.tail.value < self.head.value
        };
        if pick_tail {
            self.tail
        } else {
            self.head
        }
    }
}

fn extremum(values: &[f64], offset: usize, maximum: bool) -> Extremum {
    let mut best = Extremum {
        value: if maximum {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        },
        index: offset,
    };
    for (i, &v) in values.iter().enumerate() {
        let better = if maximum {
            v > best.value
        } else {
            v < best.value
        };
        if better || v.is_nan() {
            best = Extremum {
                value: v,
                index: offset + i,
            };
            if v.is_nan() {
                break;
            }
        }
    }
    best
}

/// Split extrema; for windows shorter than two elements head equals tail.
pub fn split_extrema(values: &[f64], maximum: bool) -> SplitExtrema {
    if values.len() < 2 {
        let e = extremum(values, 0, maximum);
        return SplitExtrema { head: e, tail: e };
    }
    let t = tail_start(values.len());
    SplitExtrema {
        head: extremum(&values[..t], 0, maximum),
        tail: extremum(&values[t..], t, maximum),
    }
}

/// True when a quantity that should stay bounded above grows in the tail.
pub fn grows(s: &SplitExtrema) -> bool {
    !(s.tail.value <= (1.0 + STABILITY_FRACTION) * s.head.value)
}

/// True when a quantity that should stay bounded below decays in the tail.
pub fn decays(s: &SplitExtrema) -> bool {
    !(s.tail.value >= (1.0 - STABILITY_FRACTION) * s.head.value)
}
