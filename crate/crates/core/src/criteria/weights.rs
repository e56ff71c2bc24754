//! Criteria built on the approximant weights `f_n` and the denominators `g_n`.

use crate::approx::{weights_over_n, WeightMethod};
use crate::coefficients::CoefficientSequence;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::polynomials::{p_values, turan_forms_sweep};
use crate::scaled::ldexp;
use crate::trend::{decays, grows, split_extrema};

use super::{
    per_point, points_in, require_centered, CriterionReport, IndexWindow, Verdict, Witness,
};

/// Per-`n` extremum over the grid together with the grid point attaining it.
pub(super) fn extremum_over_grid(
    columns: &[Vec<f64>],
    xs: &[f64],
    window: IndexWindow,
    maximum: bool,
) -> (Vec<f64>, Vec<f64>) {
    let mut values = Vec::with_capacity(window.len());
    let mut at = Vec::with_capacity(window.len());
    for n in window.start..=window.end {
        let mut best = if maximum {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
        let mut best_x = xs[0];
        for (column, &x) in columns.iter().zip(xs) {
            let v = column[n];
            let better = if maximum { v > best } else { v < best };
            if better || v.is_nan() {
                best = v;
                best_x = x;
            }
        }
        values.push(best);
        at.push(best_x);
    }
    (values, at)
}

/// `sup_n max_x f_n(x)` over the window; flags growth of the per-`n` maxima.
pub fn bounded_weight_criterion(
    seq: &CoefficientSequence,
    interval: (f64, f64),
    xs: &[f64],
    window: IndexWindow,
) -> Result<CriterionReport> {
    let xs = points_in(xs, interval)?;
    let mut report = CriterionReport::new("bounded-weight", window.info(Some(&xs)));
    require_centered(seq, interval, window, &mut report)?;
    let w = seq.window(window.end)?;
    let columns = per_point(&xs, |x| weights_over_n(&w, x, WeightMethod::TuranDet))?;
    let (maxima, at) = extremum_over_grid(&columns, &xs, window, true);
    let s = split_extrema(&maxima, true);
    let overall = s.overall(true);
    report.stat("sup", overall.value);
    report.stat("sup_n", (window.start + overall.index) as f64);
    report.stat("sup_x", at[overall.index]);
    report.stat("head_sup", s.head.value);
    report.stat("tail_sup", s.tail.value);
    if grows(&s) {
        report.downgrade(
            Verdict::Violated,
            Some(Witness {
                n: window.start + s.tail.index,
                x: Some(at[s.tail.index]),
                value: s.tail.value,
                description: "maximum of f_n in the last quarter of the window exceeds the earlier maximum by more than 10%"
                    .into(),
            }),
        );
    }
    Ok(report)
}

/// `inf_{n,x} (1/b_n) sum_k [(b_k^2 - b_{k-1}^2) P_k^2 + b_{k-1}(a_k - a_{k-1}) P_{k-1} P_k]`,
/// which equals `inf b_n g_n(x)`.
pub fn main_estimate_infimum(
    seq: &CoefficientSequence,
    interval: (f64, f64),
    xs: &[f64],
    window: IndexWindow,
) -> Result<CriterionReport> {
    let xs = points_in(xs, interval)?;
    let mut report = CriterionReport::new("main-estimate", window.info(Some(&xs)));
    let w = seq.window(window.end)?;
    if w.diagonal_is_zero() {
        report.note("zero diagonal: the sum reduces to (1/b_n) sum_k (b_k^2 - b_{k-1}^2) P_k^2");
    }
    let columns = per_point(&xs, |x| {
        Ok(turan_forms_sweep(&w, x)?
            .iter()
            .enumerate()
            .map(|(n, f)| ldexp(f.sum * w.b[n], f.exponent))
            .collect::<Vec<f64>>())
    })?;
    let (minima, at) = extremum_over_grid(&columns, &xs, window, false);
    let s = split_extrema(&minima, false);
    let overall = s.overall(false);
    report.stat("inf", overall.value);
    report.stat("inf_n", (window.start + overall.index) as f64);
    report.stat("inf_x", at[overall.index]);
    report.stat("head_inf", s.head.value);
    report.stat("tail_inf", s.tail.value);
    if !(overall.value > 0.0) {
        report.downgrade(
            Verdict::Violated,
            Some(Witness {
                n: window.start + overall.index,
                x: Some(at[overall.index]),
                value: overall.value,
                description: "weighted sum is not positive".into(),
            }),
        );
    } else if decays(&s) {
        report.downgrade(
            Verdict::Violated,
            Some(Witness {
                n: window.start + s.tail.index,
                x: Some(at[s.tail.index]),
                value: s.tail.value,
                description: "infimum in the last quarter of the window fell more than 10% below the earlier infimum"
                    .into(),
            }),
        );
    }
    Ok(report)
}

/// `inf_{n,x} b_n (P_{n+1}(x)^2 + P_n(x)^2)` for grid points with `|x| <= k_bound`,
/// under the hypothesis `|x - a_n| <= b_n`.
pub fn transfer_lower_bound(
    seq: &CoefficientSequence,
    k_bound: f64,
    xs: &[f64],
    window: IndexWindow,
) -> Result<CriterionReport> {
    if !(k_bound > 0.0) {
        return Err(Error::InvalidArgument("K must be positive".into()));
    }
    let xs = points_in(xs, (-k_bound, k_bound))?;
    let mut report = CriterionReport::new("transfer", window.info(Some(&xs)));
    let w = seq.window(window.end)?;
    let columns = per_point(&xs, |x| {
        let p = p_values(&w, window.end + 1, x)?;
        Ok((0..=window.end)
            .map(|n| {
                p[n + 1]
                    .mul(p[n + 1])
                    .add(p[n].mul(p[n]))
                    .scale(w.b[n])
                    .value()
            })
            .collect::<Vec<f64>>())
    })?;
    let mut failures = 0usize;
    let mut first_failure = None;
    for n in window.start..=window.end {
        for &x in &xs {
            if (x - w.a[n]).abs() > w.b[n] {
                failures += 1;
                first_failure.get_or_insert((n, x));
            }
        }
    }
    report.stat("hypothesis_failures", failures as f64);
    if let Some((n, x)) = first_failure {
        report.note(format!(
            "hypothesis |x - a_n| <= b_n fails first at n = {n}, x = {x}"
        ));
        report.stat("first_failure_n", n as f64);
        report.stat("first_failure_x", x);
        report.downgrade(Verdict::Inconclusive, None);
    }
    let (minima, at) = extremum_over_grid(&columns, &xs, window, false);
    let s = split_extrema(&minima, false);
    let overall = s.overall(false);
    report.stat("inf", overall.value);
    report.stat("inf_n", (window.start + overall.index) as f64);
    report.stat("inf_x", at[overall.index]);
    report.stat("head_inf", s.head.value);
    report.stat("tail_inf", s.tail.value);
    if decays(&s) || !(overall.value > 0.0) {
        let e = if decays(&s) { s.tail } else { overall };
        report.downgrade(
            Verdict::Violated,
            Some(Witness {
                n: window.start + e.index,
                x: Some(at[e.index]),
                value: e.value,
                description: "b_n (P_{n+1}^2 + P_n^2) is not bounded away from zero on the window"
                    .into(),
            }),
        );
    }
    Ok(report)
}

/// Moduli of continuity `omega_n(delta) = max_{|x - x'| <= delta} |f_n(x) - f_n(x')|`
/// on a uniform grid over the interval.
pub fn equicontinuity_diagnostic(
    seq: &CoefficientSequence,
    interval: (f64, f64),
    grid_points: usize,
    window: IndexWindow,
    deltas: &[f64],
) -> Result<CriterionReport> {
    if deltas.is_empty() || deltas.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::InvalidArgument("deltas must be positive".into()));
    }
    let grid = Grid::new(interval.0, interval.1, grid_points)?;
    let xs = grid.points();
    let mut report = CriterionReport::new("equicontinuity", window.info(Some(&xs)));
    require_centered(seq, interval, window, &mut report)?;
    let w = seq.window(window.end)?;
    let columns = per_point(&xs, |x| weights_over_n(&w, x, WeightMethod::TuranDet))?;
    let spacing = grid.spacing();
    let mut lipschitz: f64 = 0.0;
    for &delta in deltas {
        let reach = if spacing > 0.0 {
            (delta / spacing * (1.0 + 1e-9)).floor() as usize
        } else {
            0
        };
        if reach == 0 {
            report.note(format!(
                "delta = {delta} is below the grid spacing {spacing}; skipped"
            ));
            continue;
        }
        let omegas: Vec<f64> = (window.start..=window.end)
            .map(|n| {
                let mut omega: f64 = 0.0;
                for i in 0..xs.len() {
                    for j in i + 1..xs.len().min(i + reach + 1) {
                        omega = omega.max((columns[j][n] - columns[i][n]).abs());
                    }
                }
                omega
            })
            .collect();
        let s = split_extrema(&omegas, true);
        let sup = s.overall(true).value;
        report.stat(&format!("sup_omega[delta={delta}]"), sup);
        report.stat(&format!("tail_omega[delta={delta}]"), s.tail.value);
        lipschitz = lipschitz.max(sup / delta);
        if grows(&s) {
            report.downgrade(
                Verdict::Violated,
                Some(Witness {
                    n: window.start + s.tail.index,
                    x: None,
                    value: s.tail.value,
                    description: format!(
                        "modulus of continuity at delta = {delta} grows across the window"
                    ),
                }),
            );
        }
    }
    report.stat("lipschitz_estimate", lipschitz);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        Grid::new(lo, hi, n).unwrap().points()
    }

    #[test]
    fn hermite_weights_bounded() {
        let h = CoefficientSequence::hermite();
        let r = bounded_weight_criterion(
            &h,
            (-1.0, 1.0),
            &grid(-1.0, 1.0, 41),
            IndexWindow::new(1, 2000).unwrap(),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::CertifiedAtScale, "{r:?}");
        assert!((r.statistics["sup"] - 2.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn paired_weights_grow() {
        let p = CoefficientSequence::paired(1.0, 2.0).unwrap();
        let r = bounded_weight_criterion(
            &p,
            (-0.5, 0.5),
            &grid(-0.5, 0.5, 21),
            IndexWindow::new(1, 200).unwrap(),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        assert_eq!(r.witnesses[0].x, Some(0.0));
    }

    #[test]
    fn main_estimate_examples() {
        let c = CoefficientSequence::constant(0.0, 0.5).unwrap();
        let r = main_estimate_infimum(
            &c,
            (-0.9, 0.9),
            &grid(-0.9, 0.9, 19),
            IndexWindow::new(1, 300).unwrap(),
        )
        .unwrap();
        assert!((r.statistics["inf"] - 0.5).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::CertifiedAtScale);
        let h = CoefficientSequence::hermite();
        let r = main_estimate_infimum(
            &h,
            (-1.0, 1.0),
            &grid(-1.0, 1.0, 21),
            IndexWindow::new(1, 1000).unwrap(),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::CertifiedAtScale, "{r:?}");
        let p = CoefficientSequence::paired(1.0, 2.0).unwrap();
        let r = main_estimate_infimum(
            &p,
            (-0.5, 0.5),
            &grid(-0.5, 0.5, 11),
            IndexWindow::new(1, 100).unwrap(),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
    }

    #[test]
    fn transfer_examples() {
        let h = CoefficientSequence::hermite();
        let r = transfer_lower_bound(
            &h,
            2.0,
            &grid(-2.0, 2.0, 41),
            IndexWindow::new(100, 2000).unwrap(),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::CertifiedAtScale, "{r:?}");
        assert!(r.statistics["inf"] > 0.0);
        let p = CoefficientSequence::paired(1.0, 2.0).unwrap();
        let r = transfer_lower_bound(&p, 0.5, &[0.0], IndexWindow::new(10, 200).unwrap()).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        let r = transfer_lower_bound(
            &h,
            2.0,
            &grid(-2.0, 2.0, 5),
            IndexWindow::new(0, 50).unwrap(),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn equicontinuity_examples() {
        let h = CoefficientSequence::hermite();
        let r = equicontinuity_diagnostic(
            &h,
            (-2.0, 2.0),
            81,
            IndexWindow::new(2, 1000).unwrap(),
            &[0.05, 0.1, 0.2],
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::CertifiedAtScale, "{r:?}");
        let c = CoefficientSequence::constant(0.0, 0.5).unwrap();
        let r = equicontinuity_diagnostic(
            &c,
            (-0.5, 0.5),
            101,
            IndexWindow::new(1, 50).unwrap(),
            &[0.01],
        )
        .unwrap();
        let fj = |x: f64| crate::approx::weight_fj(0.0, 0.5, x);
        let xs = grid(-0.5, 0.5, 101);
        let want = xs
            .windows(2)
            .map(|p| (fj(p[1]) - fj(p[0])).abs())
            .fold(0.0, f64::max);
        assert!((r.statistics["sup_omega[delta=0.01]"] - want).abs() < 1e-12);
        let p = CoefficientSequence::paired(1.0, 2.0).unwrap();
        let r = equicontinuity_diagnostic(
            &p,
            (-0.5, 0.5),
            41,
            IndexWindow::new(1, 120).unwrap(),
            &[0.05],
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
    }
}
