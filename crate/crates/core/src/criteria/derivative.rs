//! Logarithmic derivative bound `|g_n'(x)| <= C(x) g_n(x)` by finite differences.

use crate::coefficients::{CoefficientSequence, CoefficientWindow, Family};
use crate::error::{Error, Result};
use crate::polynomials::{p_values, turan_forms_sweep};
use crate::scaled::Scaled;
use crate::trend::{grows, split_extrema};

use super::weights::extremum_over_grid;
use super::{per_point, points_in, CriterionReport, IndexWindow, Verdict, Witness};

/// Difference step as a fraction of the narrowest band width in the window.
pub const STEP_FRACTION: f64 = 1e-6;

/// Ratios below this multiple of `eps / h` are indistinguishable from rounding.
const NOISE_FACTOR: f64 = 1e3;

struct PointEstimates {
    raw: Vec<f64>,
    extrapolated: Vec<f64>,
    richardson_gap: Vec<f64>,
    exact: Option<Vec<f64>>,
}

fn g_column(w: &CoefficientWindow, x: f64) -> Result<Vec<Scaled<f64>>> {
    Ok(turan_forms_sweep(w, x)?
        .iter()
        .map(|f| f.robust())
        .collect())
}

/// `(g(x+h) - g(x-h)) / (2h g(x))` for every `n`, kept in scaled arithmetic.
fn log_derivative(w: &CoefficientWindow, x: f64, h: f64, g0: &[Scaled<f64>]) -> Result<Vec<f64>> {
    let plus = g_column(w, x + h)?;
    let minus = g_column(w, x - h)?;
    Ok(plus
        .iter()
        .zip(&minus)
        .zip(g0)
        .map(|((p, m), g)| p.sub(*m).ratio(g) / (2.0 * h))
        .collect())
}

/// Hermite only: `g_n'/g_n` from `g_n' = (2x/b_n^2) sum_{j<=n-1, j = n-1 mod 2} P_j^2`.
fn hermite_exact(w: &CoefficientWindow, x: f64, g0: &[Scaled<f64>]) -> Result<Vec<f64>> {
    let p = p_values(w, w.top() + 1, x)?;
    let squares: Vec<Scaled<f64>> = p.iter().map(|v| v.mul(*v)).collect();
    // parity[j] = P_j^2 + P_{j-2}^2 + ...
    let mut parity: Vec<Scaled<f64>> = Vec::with_capacity(squares.len());
    for (j, s) in squares.iter().enumerate() {
        let below = if j >= 2 {
            parity[j - 2]
        } else {
            Scaled::zero()
        };
        parity.push(below.add(*s));
    }
    Ok(g0
        .iter()
        .enumerate()
        .map(|(n, g)| {
            if n == 0 {
                return 0.0;
            }
            2.0 * x / (w.b[n] * w.b[n]) * parity[n - 1].ratio(g)
        })
        .collect())
}

fn estimates(w: &CoefficientWindow, x: f64, h: f64, hermite: bool) -> Result<PointEstimates> {
    if x + h == x || x - h == x {
        return Err(Error::StepUnderflow { x });
    }
    let g0 = g_column(w, x)?;
    let coarse = log_derivative(w, x, h, &g0)?;
    let fine = log_derivative(w, x, 0.5 * h, &g0)?;
    let extrapolated: Vec<f64> = coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| f + (f - c) / 3.0)
        .collect();
    let richardson_gap = coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (c - f).abs())
        .collect();
    let exact = if hermite {
        Some(hermite_exact(w, x, &g0)?)
    } else {
        None
    };
    Ok(PointEstimates {
        raw: fine.iter().map(|v| v.abs()).collect(),
        extrapolated,
        richardson_gap,
        exact,
    })
}

/// Central-difference estimate of `sup_n |g_n'(x)| / g_n(x)` on the grid.
///
/// The step is `STEP_FRACTION` times the narrowest band width in the window,
/// halved once for a Richardson check. Raw (step `h/2`) and extrapolated
/// ratios are both reported. For the Hermite preset the estimate is checked
/// against the exact derivative.
pub fn gn_derivative_bound(
    seq: &CoefficientSequence,
    interval: (f64, f64),
    xs: &[f64],
    window: IndexWindow,
) -> Result<CriterionReport> {
    let xs = points_in(xs, interval)?;
    let mut report = CriterionReport::new("gn-bound", window.info(Some(&xs)));
    let w = seq.window(window.end)?;
    let narrowest = (window.start..=window.end)
        .map(|n| w.band(n).width())
        .fold(f64::INFINITY, f64::min);
    let h = STEP_FRACTION * narrowest;
    report.stat("step", h);
    let hermite = matches!(seq.family(), Family::Hermite);
    let points = per_point(&xs, |x| estimates(&w, x, h, hermite))?;

    let raw: Vec<Vec<f64>> = points.iter().map(|p| p.raw.clone()).collect();
    let extrapolated: Vec<Vec<f64>> = points
        .iter()
        .map(|p| p.extrapolated.iter().map(|v| v.abs()).collect())
        .collect();
    let (raw_max, _) = extremum_over_grid(&raw, &xs, window, true);
    let (ext_max, at) = extremum_over_grid(&extrapolated, &xs, window, true);
    let gap = points
        .iter()
        .flat_map(|p| p.richardson_gap[window.start..=window.end].iter().copied())
        .fold(0.0, f64::max);
    let raw_sup = raw_max.iter().copied().fold(0.0, f64::max);
    report.stat("sup_ratio_raw", raw_sup);
    report.stat("richardson_max_gap", gap);

    // per-x supremum over n, the constant C(x)
    for (x, p) in xs.iter().zip(&points) {
        let c = p.extrapolated[window.start..=window.end]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        report.stat(&format!("sup_n_ratio[x={x}]"), c);
    }

    if let Some(exact_cols) = points
        .iter()
        .map(|p| p.exact.as_ref())
        .collect::<Option<Vec<_>>>()
    {
        let mut worst: f64 = 0.0;
        for (p, exact) in points.iter().zip(exact_cols) {
            let range = window.start..=window.end;
            for (fd, ex) in p.extrapolated[range.clone()].iter().zip(&exact[range]) {
                // both are g'/g, so the denominator is |g'|/g + 1
                worst = worst.max((fd - ex).abs() / (ex.abs() + 1.0));
            }
        }
        report.stat("exact_relative_discrepancy", worst);
        report.note("Hermite preset: finite differences cross-checked against g_n' = (2x/b_n^2) sum of P_j^2 over j = n-1, n-3, ...");
    }

    let noise = NOISE_FACTOR * f64::EPSILON / h;
    report.stat("noise_floor", noise);
    let clamped: Vec<f64> = ext_max.iter().map(|v| v.max(noise)).collect();
    let s = split_extrema(&clamped, true);
    let overall = split_extrema(&ext_max, true).overall(true);
    report.stat("sup_ratio", overall.value);
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
                value: ext_max[s.tail.index],
                description: "|g_n'|/g_n in the last quarter of the window exceeds the earlier maximum by more than 10%"
                    .into(),
            }),
        );
    }
    Ok(report)
}
