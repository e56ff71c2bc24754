//! Criteria that look only at the coefficients: the discreteness test and the
//! five growth conditions for absolutely continuous spectrum.

use crate::coefficients::CoefficientSequence;
use crate::error::{Error, Result};
use crate::trend::{
    decays, grows, partial_sum_trend, split_extrema, tail_start, SeriesTrend, STABILITY_FRACTION,
};

use super::{ConditionBlock, CriterionReport, IndexWindow, Verdict, Witness};

/// Threshold on `limsup b_{n-1}^2 / |a_{n-1} a_n|` below which the spectrum is discrete.
pub const DISCRETENESS_BOUND: f64 = 0.25;

/// Window statistics of `b_{n-1}^2 / |a_{n-1} a_n|` and of `|a_n|`.
///
/// Certified when the tail supremum of the ratio is below `1/4 - margin` and
/// `|a_n|` grows without bound (analytically for presets, by a strictly
/// increasing tail for other sequences).
pub fn discreteness_check(
    seq: &CoefficientSequence,
    window: IndexWindow,
    margin: f64,
) -> Result<CriterionReport> {
    let start = window.start.max(1);
    let window = IndexWindow::new(start, window.end.max(start))?;
    let w = seq.window(window.end)?;
    let mut report = CriterionReport::new("discreteness", window.info(None));
    let mut ratios = Vec::with_capacity(window.len());
    for n in window.start..=window.end {
        for k in [n - 1, n] {
            if w.a[k] == 0.0 {
                return Err(Error::ZeroDiagonal { k });
            }
        }
        ratios.push(w.b[n - 1] * w.b[n - 1] / (w.a[n - 1] * w.a[n]).abs());
    }
    let s = split_extrema(&ratios, true);
    let tail = s.tail;
    report.stat("window_sup", s.overall(true).value);
    report.stat("tail_sup", tail.value);
    report.stat("tail_sup_n", (window.start + tail.index) as f64);
    report.stat("margin", margin);

    let t = tail_start(window.len()) + window.start;
    let abs_a: Vec<f64> = w.a.iter().map(|a| a.abs()).collect();
    report.stat("abs_a_end", abs_a[window.end]);
    let tail_increasing = abs_a[t.max(1) - 1..=window.end]
        .windows(2)
        .all(|p| p[1] > p[0]);
    let unbounded = match seq.analytic().diag_unbounded {
        Some(v) => {
            report.note(format!(
                "lim |a_n| = infinity is known analytically to be {v} for this family"
            ));
            v
        }
        None => {
            report.note("lim |a_n| = infinity is analytic-only for this sequence; judged from a strictly increasing tail");
            tail_increasing && grows(&split_extrema(&abs_a[window.start..=window.end], true))
        }
    };

    if tail.value >= DISCRETENESS_BOUND {
        report.downgrade(
            Verdict::Violated,
            Some(Witness {
                n: window.start + tail.index,
                x: None,
                value: tail.value,
                description: "b_{n-1}^2 / |a_{n-1} a_n| reaches 1/4 in the last quarter of the window".into(),
            }),
        );
    } else if !unbounded {
        report.note("|a_n| does not grow without bound on the window: the hypothesis fails");
        report.downgrade(Verdict::Inconclusive, None);
    } else if tail.value >= DISCRETENESS_BOUND - margin {
        report.note("tail supremum is within the safety margin of 1/4");
        report.downgrade(Verdict::Inconclusive, None);
    }
    Ok(report)
}

fn log_decays(log_head: f64, log_tail: f64) -> bool {
    !(log_tail >= (1.0 - STABILITY_FRACTION).ln() + log_head)
}

fn series_block(
    block: &mut ConditionBlock,
    label: &str,
    terms: impl Iterator<Item = (usize, f64)>,
) {
    let mut sum = 0.0;
    let mut sums = Vec::new();
    let mut last_n = 0;
    for (n, t) in terms {
        sum += t.abs();
        sums.push(sum);
        last_n = n;
    }
    block.stat(&format!("{label}_partial_sum"), sum);
    let trend = partial_sum_trend(&sums);
    if trend == SeriesTrend::GrowingUnbounded {
        block.fail(
            Verdict::Violated,
            Some(Witness {
                n: last_n,
                x: None,
                value: sum,
                description: format!(
                    "partial sums of {label} keep growing in the last quarter of the window"
                ),
            }),
        );
    }
}

/// Evaluate the five growth conditions on `b_n` and `a_n` over `0..=n_max`.
///
/// Condition 5 uses `r_n = b_{n-1}^2 b_{n-3}^2 ... / (b_n b_{n-2}^2 b_{n-4}^2 ...)`
/// under two readings of where the alternating product stops: convention A
/// leaves `b_0` out of the even-`n` denominator, convention B includes it.
pub fn asymptotic_conditions_check(
    seq: &CoefficientSequence,
    n_max: usize,
) -> Result<CriterionReport> {
    if n_max < 8 {
        return Err(Error::InvalidArgument(
            "growth conditions need n_max >= 8".into(),
        ));
    }
    // fast-growing sequences leave f64 range first; evaluate up to the last finite index
    let (w, overflow) = match seq.window(n_max) {
        Err(Error::NonFiniteCoefficient { k }) if k > 8 => (seq.window(k - 1)?, Some(k)),
        other => (other?, None),
    };
    let n_max = w.top();
    let facts = seq.analytic();
    let window = IndexWindow::new(0, n_max)?;
    let mut report = CriterionReport::new("thm39", window.info(None));
    if let Some(k) = overflow {
        report.note(format!(
            "coefficient {k} overflows f64; window truncated to n <= {n_max}"
        ));
    }
    let b = &w.b;
    let a = &w.a;

    // (1) b_n -> infinity and sum 1/b_n = infinity
    let mut c1 = ConditionBlock::new("condition-1");
    let b_split = split_extrema(b, true);
    c1.stat("b_head_max", b_split.head.value);
    c1.stat("b_tail_max", b_split.tail.value);
    let b_grows = match facts.offdiag_unbounded {
        Some(v) => {
            c1.notes.push(format!(
                "b_n -> infinity is known analytically to be {v} for this family"
            ));
            v
        }
        None => grows(&b_split),
    };
    if !b_grows {
        c1.fail(
            Verdict::Violated,
            Some(Witness {
                n: n_max,
                x: None,
                value: b[n_max],
                description: "b_n does not grow on the window".into(),
            }),
        );
    }
    let mut sums = Vec::with_capacity(n_max + 1);
    let mut s = 0.0;
    for &bn in b {
        s += 1.0 / bn;
        sums.push(s);
    }
    c1.stat("reciprocal_partial_sum", s);
    let diverges = match facts.reciprocal_sum_diverges {
        Some(v) => {
            c1.notes.push(format!(
                "divergence of sum 1/b_n is known analytically to be {v} for this family"
            ));
            v
        }
        None => {
            c1.notes.push("divergence of sum 1/b_n is analytic-only for this sequence; judged from the window trend".into());
            partial_sum_trend(&sums) == SeriesTrend::GrowingUnbounded
        }
    };
    if !diverges {
        c1.fail(
            Verdict::Violated,
            Some(Witness {
                n: n_max,
                x: None,
                value: s,
                description: "sum of 1/b_n appears to converge".into(),
            }),
        );
    }
    report.push_block(c1);

    // (2) 0 < C1 < b_{n+1}/b_n < C2
    let mut c2 = ConditionBlock::new("condition-2");
    let ratios: Vec<f64> = b.windows(2).map(|p| p[1] / p[0]).collect();
    let hi = split_extrema(&ratios, true);
    let lo = split_extrema(&ratios, false);
    c2.stat("ratio_inf", lo.overall(false).value);
    c2.stat("ratio_sup", hi.overall(true).value);
    if grows(&hi) {
        c2.fail(
            Verdict::Violated,
            Some(Witness {
                n: hi.tail.index,
                x: None,
                value: hi.tail.value,
                description: "b_{n+1}/b_n grows across the window".into(),
            }),
        );
    }
    if decays(&lo) {
        c2.fail(
            Verdict::Violated,
            Some(Witness {
                n: lo.tail.index,
                x: None,
                value: lo.tail.value,
                description: "b_{n+1}/b_n decays across the window".into(),
            }),
        );
    }
    report.push_block(c2);

    // (3) a_n/b_n in l2 when |a_n| -> infinity, 1/b_n in l2 when |a_n| is bounded
    let mut c3 = ConditionBlock::new("condition-3");
    let abs_a: Vec<f64> = a.iter().map(|x| x.abs()).collect();
    let a_bounded = match facts.diag_unbounded {
        Some(v) => !v,
        None => !grows(&split_extrema(&abs_a, true)),
    };
    if a_bounded {
        c3.notes.push("|a_n| bounded: testing sum 1/b_n^2".into());
        series_block(
            &mut c3,
            "inverse_b_squared",
            b.iter().enumerate().map(|(n, x)| (n, 1.0 / (x * x))),
        );
        if facts.reciprocal_square_sum_converges == Some(false) {
            c3.notes.push(
                "sum 1/b_n^2 is known to diverge for this family; its growth is too slow to register on the window"
                    .into(),
            );
        }
    } else {
        c3.notes
            .push("|a_n| unbounded: testing sum (a_n/b_n)^2".into());
        series_block(
            &mut c3,
            "a_over_b_squared",
            a.iter()
                .zip(b)
                .enumerate()
                .map(|(n, (x, y))| (n, (x / y).powi(2))),
        );
        if facts.diag_ratio_square_sum_converges == Some(false) {
            c3.notes
                .push("sum (a_n/b_n)^2 is known to diverge for this family".into());
        }
    }
    report.push_block(c3);

    // (4) three l1 sequences
    let mut c4 = ConditionBlock::new("condition-4");
    series_block(
        &mut c4,
        "ratio_differences",
        (2..=n_max).map(|n| (n, b[n - 1] / b[n] - b[n - 2] / b[n - 1])),
    );
    series_block(
        &mut c4,
        "second_differences",
        (2..=n_max).map(|n| (n, (b[n] - b[n - 2]) / (b[n - 1] * b[n]))),
    );
    series_block(
        &mut c4,
        "diagonal_mixing",
        (2..=n_max).map(|n| (n, (b[n] * a[n - 1] - a[n] * b[n - 2]) / (b[n - 1] * b[n]))),
    );
    report.push_block(c4);

    // (5) liminf r_n > 0, tracked as ln r_n
    let mut c5 = ConditionBlock::new("condition-5");
    let mut log_a = vec![0.0; n_max + 1];
    let mut log_b = vec![0.0; n_max + 1];
    log_a[0] = b[0].ln();
    log_b[0] = -b[0].ln();
    log_a[1] = 2.0 * b[0].ln() - b[1].ln();
    log_b[1] = log_a[1];
    for n in 2..=n_max {
        let step = 2.0 * b[n - 1].ln() - b[n].ln() - b[n - 2].ln();
        log_a[n] = log_a[n - 2] + step;
        log_b[n] = log_b[n - 2] + step;
    }
    for (name, logs) in [("convention_a", &log_a), ("convention_b", &log_b)] {
        let s = split_extrema(&logs[1..], false);
        let overall = s.overall(false);
        c5.stat(
            &format!("{name}_log10_inf"),
            overall.value / std::f64::consts::LN_10,
        );
        c5.stat(&format!("{name}_inf_n"), (overall.index + 1) as f64);
        c5.stat(
            &format!("{name}_log10_tail_inf"),
            s.tail.value / std::f64::consts::LN_10,
        );
        if log_decays(s.head.value, s.tail.value) {
            c5.fail(
                Verdict::Violated,
                Some(Witness {
                    n: s.tail.index + 1,
                    x: None,
                    value: s.tail.value.exp(),
                    description: format!("r_n ({name}) decays across the window"),
                }),
            );
        }
    }
    report.push_block(c5);
    Ok(report)
}
