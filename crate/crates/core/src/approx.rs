//! Spectral data of the approximants `A_n`: the Jacobi matrix that agrees with
//! `J` up to index `n` and continues with the constant entries `(a_n, b_n)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coefficients::{BandInterval, CoefficientSequence, CoefficientWindow};
use crate::contfrac::{boundary_k, constant_tail_k, tail_assembled_r};
use crate::criteria::report::{CriterionReport, Verdict, WindowInfo, Witness};
use crate::error::{Error, Result};
use crate::polynomials::{p_values, turan_forms_at, turan_forms_sweep, TuranForms};
use crate::quadrature::{integrate, QuadResult};
use crate::scaled::{ldexp, Scaled};

/// How the weight denominator `g_n` is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMethod {
    /// Determinant form, falling back to the sum form when the two disagree.
    #[default]
    TuranDet,
    /// Sum form throughout.
    TuranSum,
}

impl fmt::Display for WeightMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightMethod::TuranDet => "turan-det",
            WeightMethod::TuranSum => "turan-sum",
        })
    }
}

impl FromStr for WeightMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "turan-det" => Ok(WeightMethod::TuranDet),
            "turan-sum" => Ok(WeightMethod::TuranSum),
            other => Err(Error::InvalidArgument(format!(
                "unknown weight method `{other}`"
            ))),
        }
    }
}

/// Semicircle density of the constant matrix `(a, b)`:
/// `sqrt(4b^2 - (a-x)^2) / (2 pi b^2)` on the open band, 0 elsewhere.
pub fn weight_fj(a: f64, b: f64, x: f64) -> f64 {
    let d = x - a;
    if d.abs() >= 2.0 * b {
        return 0.0;
    }
    ((2.0 * b - d) * (2.0 * b + d)).sqrt() / (2.0 * PI * b * b)
}

fn denominator(forms: &TuranForms, method: WeightMethod) -> Scaled<f64> {
    match method {
        WeightMethod::TuranDet => forms.robust(),
        WeightMethod::TuranSum => Scaled::new(forms.sum, forms.exponent),
    }
}

/// `f_n(x)` given precomputed forms at `(n, x)`.
pub fn weight_from_forms(
    band: BandInterval,
    x: f64,
    forms: &TuranForms,
    method: WeightMethod,
) -> Result<f64> {
    if !band.contains_open(x) {
        return Ok(0.0);
    }
    let a = band.center();
    let b = band.width() / 4.0;
    let g = denominator(forms, method);
    if !(g.mantissa > 0.0) {
        return Err(Error::NumericalBreakdown {
            n: band.n,
            x,
            g: g.value(),
        });
    }
    Ok(ldexp(weight_fj(a, b, x) / g.mantissa, -g.exponent))
}

/// Spectral density of `A_n` at `x`.
pub fn weight_fn(seq: &CoefficientSequence, n: usize, x: f64, method: WeightMethod) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("weight needs n >= 1".into()));
    }
    let w = seq.window(n)?;
    weight_in_window(&w, n, x, method)
}

pub(crate) fn weight_in_window(
    w: &CoefficientWindow,
    n: usize,
    x: f64,
    method: WeightMethod,
) -> Result<f64> {
    let band = w.band(n);
    if !band.contains_open(x) {
        return Ok(0.0);
    }
    let forms = turan_forms_at(w, n, x)?;
    weight_from_forms(band, x, &forms, method)
}

/// `f_n(x)` for every `n` in `0..=w.top()` at a fixed `x`, from one recurrence pass.
pub fn weights_over_n(w: &CoefficientWindow, x: f64, method: WeightMethod) -> Result<Vec<f64>> {
    let forms = turan_forms_sweep(w, x)?;
    forms
        .iter()
        .enumerate()
        .map(|(n, f)| weight_from_forms(w.band(n), x, f, method))
        .collect()
}

/// Samples of `f_n` on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightCurve {
    pub n: usize,
    pub xs: Vec<f64>,
    pub fs: Vec<f64>,
    pub band: BandInterval,
    pub method: WeightMethod,
}

/// Evaluate `f_n` on `xs` (points are processed in parallel).
pub fn weight_curve(
    seq: &CoefficientSequence,
    n: usize,
    xs: &[f64],
    method: WeightMethod,
) -> Result<WeightCurve> {
    if n == 0 {
        return Err(Error::InvalidArgument("weight needs n >= 1".into()));
    }
    let w = seq.window(n)?;
    let fs = xs
        .par_iter()
        .map(|&x| weight_in_window(&w, n, x, method))
        .collect::<Result<Vec<_>>>()?;
    Ok(WeightCurve {
        n,
        xs: xs.to_vec(),
        fs,
        band: w.band(n),
        method,
    })
}

/// Closed product form of `f_n(0)` for zero-diagonal sequences:
/// `f_n(0) = (1/(pi b_n)) * prod_{j < (n+1)/2} (b_{2j+1}/b_{2j})^2`.
pub fn fn_at_zero(seq: &CoefficientSequence, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("weight needs n >= 1".into()));
    }
    let w = seq.window(n)?;
    fn_at_zero_in_window(&w, n)
}

pub(crate) fn fn_at_zero_in_window(w: &CoefficientWindow, n: usize) -> Result<f64> {
    for (k, &a) in w.a[..=n].iter().enumerate() {
        if a != 0.0 {
            return Err(Error::NonZeroDiagonal { k, a });
        }
    }
    let mut product = Scaled::from_value(1.0 / (PI * w.b[n]));
    for j in 0..n.div_ceil(2) {
        let r = w.b[2 * j + 1] / w.b[2 * j];
        product = product.scale(r * r);
    }
    Ok(product.value())
}

/// Resolvent entry of `A_n` at `lambda`.
pub fn rn(seq: &CoefficientSequence, n: usize, lambda: Complex64) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::InvalidArgument("approximant needs n >= 1".into()));
    }
    let (a, b) = seq.coeff(n)?;
    let k = constant_tail_k(a, b, lambda)?;
    tail_assembled_r(seq, n, lambda, k)
}

/// Share of the band width, at each edge, integrated after the substitution
/// `x = a_n + 2 b_n sin(theta)`.
pub const EDGE_FRACTION: f64 = 0.1;

const QUAD_ABS_TOL: f64 = 1e-13;
const QUAD_REL_TOL: f64 = 1e-12;
const QUAD_MAX_PANELS: usize = 4000;

fn integrate_plain(
    w: &CoefficientWindow,
    n: usize,
    u: f64,
    v: f64,
    method: WeightMethod,
) -> Result<QuadResult> {
    integrate(
        |x| weight_in_window(w, n, x, method),
        u,
        v,
        QUAD_ABS_TOL,
        QUAD_REL_TOL,
        QUAD_MAX_PANELS,
    )
}

fn integrate_angular(
    w: &CoefficientWindow,
    n: usize,
    u: f64,
    v: f64,
    method: WeightMethod,
) -> Result<QuadResult> {
    let (a, b) = (w.a[n], w.b[n]);
    let to_theta = |x: f64| ((x - a) / (2.0 * b)).clamp(-1.0, 1.0).asin();
    let integrand = |theta: f64| -> Result<f64> {
        let x = a + 2.0 * b * theta.sin();
        let forms = turan_forms_at(w, n, x)?;
        let g = denominator(&forms, method);
        if !(g.mantissa > 0.0) {
            return Err(Error::NumericalBreakdown { n, x, g: g.value() });
        }
        let c = theta.cos();
        Ok(ldexp(2.0 * c * c / (PI * g.mantissa), -g.exponent))
    };
    integrate(
        integrand,
        to_theta(u),
        to_theta(v),
        QUAD_ABS_TOL,
        QUAD_REL_TOL,
        QUAD_MAX_PANELS,
    )
}

/// `int_u^v f_n(x) dx` for `u <= v`, clipped to the band.
pub fn integrate_weight(
    w: &CoefficientWindow,
    n: usize,
    u: f64,
    v: f64,
    method: WeightMethod,
) -> Result<QuadResult> {
    let band = w.band(n);
    let (u, v) = (u.max(band.lo), v.min(band.hi));
    let mut total = QuadResult {
        value: 0.0,
        error: 0.0,
        evaluations: 0,
    };
    if u >= v {
        return Ok(total);
    }
    let edge = EDGE_FRACTION * band.width();
    let cuts = [band.lo, band.lo + edge, band.hi - edge, band.hi];
    for zone in 0..3 {
        let (zu, zv) = (u.max(cuts[zone]), v.min(cuts[zone + 1]));
        if zu >= zv {
            continue;
        }
        let part = if zone == 1 {
            integrate_plain(w, n, zu, zv, method)?
        } else {
            integrate_angular(w, n, zu, zv, method)?
        };
        total.value += part.value;
        total.error += part.error;
        total.evaluations += part.evaluations;
    }
    Ok(total)
}

/// `int_{I_n} f_n`, which equals 1 when `A_n` has no eigenvalues off the band.
pub fn band_mass(seq: &CoefficientSequence, n: usize, method: WeightMethod) -> Result<QuadResult> {
    let w = seq.window(n)?;
    let band = w.band(n);
    integrate_weight(&w, n, band.lo, band.hi, method)
}

/// Eigenvalue of `A_n` outside its band, with its spectral mass.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointMass {
    pub location: f64,
    pub mass: f64,
}

/// Whether `b_k >= b_{k-1}` and `|a_k - a_{k-1}| <= 2 (b_k - b_{k-1})` for `1 <= k <= n`.
fn monotone_band_conditions(w: &CoefficientWindow, n: usize) -> Option<(usize, f64, f64)> {
    for k in 1..=n {
        let (db, da) = (w.b[k] - w.b[k - 1], (w.a[k] - w.a[k - 1]).abs());
        let slack = 4.0
            * f64::EPSILON
            * w.b[k]
                .max(w.b[k - 1])
                .max(w.a[k].abs())
                .max(w.a[k - 1].abs());
        if db < -slack || da > 2.0 * db + slack {
            return Some((k, db, da));
        }
    }
    None
}

const EIGEN_SCAN_POINTS: usize = 2000;

/// Eigenvalues of `A_n` off its band: zeros of `P_n + P_{n-1} b_{n-1} D_n(x)`
/// located by sign changes on a grid spanning the Gershgorin bound, then bisected.
pub fn off_band_eigenvalues(seq: &CoefficientSequence, n: usize) -> Result<Vec<PointMass>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let w = seq.window(n)?;
    off_band_eigenvalues_in_window(seq, &w, n)
}

fn off_band_eigenvalues_in_window(
    seq: &CoefficientSequence,
    w: &CoefficientWindow,
    n: usize,
) -> Result<Vec<PointMass>> {
    let band = w.band(n);
    let mut g_lo = band.lo;
    let mut g_hi = band.hi;
    for k in 0..=n {
        let radius = w.b_before(k) + w.b[k];
        g_lo = g_lo.min(w.a[k] - radius);
        g_hi = g_hi.max(w.a[k] + radius);
    }
    let h = |x: f64| -> Result<f64> {
        let p = p_values(w, n, x)?;
        let (d, _) = boundary_k(w.a[n], w.b[n], x);
        Ok(p[n].add(p[n - 1].scale(w.b[n - 1] * d)).mantissa)
    };
    let pad = 1e-9 * (g_hi - g_lo).max(1.0);
    let gap = 1e-12 * band.width();
    let mut found = Vec::new();
    for (lo, hi) in [(g_lo - pad, band.lo - gap), (band.hi + gap, g_hi + pad)] {
        if lo >= hi {
            continue;
        }
        let step = (hi - lo) / EIGEN_SCAN_POINTS as f64;
        let mut x0 = lo;
        let mut h0 = h(x0)?;
        for i in 1..=EIGEN_SCAN_POINTS {
            let x1 = if i == EIGEN_SCAN_POINTS {
                hi
            } else {
                lo + step * i as f64
            };
            let h1 = h(x1)?;
            if h0 == 0.0 || h0.signum() != h1.signum() {
                let root = if h0 == 0.0 {
                    x0
                } else {
                    bisect(&h, x0, x1, h0)?
                };
                found.push(root);
            }
            x0 = x1;
            h0 = h1;
        }
    }
    found.dedup();
    found
        .into_iter()
        .map(|location| {
            let eps = 1e-7 * location.abs().max(band.width());
            let r = rn(seq, n, Complex64::new(location, eps))?;
            Ok(PointMass {
                location,
                mass: eps * r.im,
            })
        })
        .collect()
}

fn bisect<F: Fn(f64) -> Result<f64>>(
    h: &F,
    mut lo: f64,
    mut hi: f64,
    mut h_lo: f64,
) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let hm = h(mid)?;
        if hm == 0.0 {
            return Ok(mid);
        }
        if hm.signum() == h_lo.signum() {
            lo = mid;
            h_lo = hm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Samples of the distribution function `sigma_n(lambda) = mu_n((-inf, lambda])`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionSamples {
    pub n: usize,
    pub lambdas: Vec<f64>,
    /// `sigma_n` at each grid point.
    pub sigma: Vec<f64>,
    /// `sigma_n(lambda) - sigma_n(base_point)`.
    pub increments: Vec<f64>,
    pub base_point: f64,
    /// `sigma_n(base_point)`: integral from the lower band edge plus any point
    /// masses at or below the base point.
    pub base_value: f64,
    pub quadrature_error: f64,
    pub evaluations: usize,
    pub point_masses: Vec<PointMass>,
    pub band: BandInterval,
}

/// Distribution function of `A_n` on a sorted grid, relative to `base`.
pub fn sigma_n(
    seq: &CoefficientSequence,
    n: usize,
    base: f64,
    grid: &[f64],
) -> Result<DistributionSamples> {
    sigma_n_with(seq, n, base, grid, WeightMethod::TuranDet)
}

pub fn sigma_n_with(
    seq: &CoefficientSequence,
    n: usize,
    base: f64,
    grid: &[f64],
    method: WeightMethod,
) -> Result<DistributionSamples> {
    if n == 0 {
        return Err(Error::InvalidArgument("distribution needs n >= 1".into()));
    }
    if grid.windows(2).any(|p| !(p[0] <= p[1])) {
        return Err(Error::InvalidArgument(
            "grid must be sorted ascending".into(),
        ));
    }
    if !base.is_finite() || grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(
            "grid and base point must be finite".into(),
        ));
    }
    let w = seq.window(n)?;
    let band = w.band(n);
    let point_masses = if monotone_band_conditions(&w, n).is_some() {
        off_band_eigenvalues_in_window(seq, &w, n)?
    } else {
        Vec::new()
    };

    // cumulative integral from the lower edge through every sorted point
    let mut points: Vec<f64> = grid.to_vec();
    points.push(base);
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| points[i].total_cmp(&points[j]));
    let segments: Vec<(f64, f64)> = order
        .iter()
        .scan(band.lo, |prev, &i| {
            let seg = (*prev, points[i].max(*prev));
            *prev = seg.1;
            Some(seg)
        })
        .collect();
    let parts = segments
        .par_iter()
        .map(|&(u, v)| integrate_weight(&w, n, u, v, method))
        .collect::<Result<Vec<_>>>()?;
    let mut cumulative = vec![0.0; points.len()];
    let (mut running, mut error, mut evaluations) = (0.0, 0.0, 0);
    for (&i, part) in order.iter().zip(&parts) {
        running += part.value;
        error += part.error;
        evaluations += part.evaluations;
        cumulative[i] = running;
    }
    let mass_below = |x: f64| -> f64 {
        point_masses
            .iter()
            .filter(|m| m.location <= x)
            .map(|m| m.mass)
            .sum()
    };
    let measure = |i: usize| cumulative[i] + mass_below(points[i]);
    let base_value = measure(grid.len());
    let sigma: Vec<f64> = (0..grid.len()).map(measure).collect();
    let increments = sigma.iter().map(|s| s - base_value).collect();
    Ok(DistributionSamples {
        n,
        lambdas: grid.to_vec(),
        sigma,
        increments,
        base_point: base,
        base_value,
        quadrature_error: error,
        evaluations,
        point_masses,
        band,
    })
}

/// Check `b_n >= b_{n-1}` and `|a_n - a_{n-1}| <= 2(b_n - b_{n-1})` for `1 <= n <= n_max`;
/// together they make the spectrum of each `A_n` purely absolutely continuous
/// on nested bands.
pub fn ac_conditions_an(seq: &CoefficientSequence, n_max: usize) -> Result<CriterionReport> {
    let w = seq.window(n_max)?;
    let mut report = CriterionReport::new(
        "approximant-ac-conditions",
        WindowInfo {
            n_start: 1,
            n_end: n_max,
            x_grid: None,
        },
    );
    let mut min_db = f64::INFINITY;
    let mut min_margin = f64::INFINITY;
    for k in 1..=n_max {
        let db = w.b[k] - w.b[k - 1];
        min_db = min_db.min(db);
        min_margin = min_margin.min(2.0 * db - (w.a[k] - w.a[k - 1]).abs());
    }
    if n_max >= 1 {
        report.stat("min_b_increment", min_db);
        report.stat("min_band_margin", min_margin);
    }
    if let Some((k, db, da)) = monotone_band_conditions(&w, n_max) {
        let description = if db < 0.0 {
            format!("b_{k} < b_{}", k - 1)
        } else {
            format!(
                "|a_{k} - a_{}| = {da} > 2 (b_{k} - b_{}) = {}",
                k - 1,
                k - 1,
                2.0 * db
            )
        };
        report.downgrade(
            Verdict::Violated,
            Some(Witness {
                n: k,
                x: None,
                value: if db < 0.0 { db } else { da - 2.0 * db },
                description,
            }),
        );
    }
    Ok(report)
}

/// Outcome of [`zero_eigenvalue_test`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroEigenvalueReport {
    pub terms: usize,
    /// Natural log of `sum_{k<N} P_{2k}(0)^2`.
    pub log_partial_sum: f64,
    /// Largest ratio `P_{2k+2}(0)^2 / P_{2k}(0)^2` over the second half of the terms.
    pub tail_ratio: f64,
    /// Geometric bound on the remainder relative to the partial sum (`inf` if `tail_ratio >= 1`).
    pub relative_remainder: f64,
    pub tolerance: f64,
    /// True when the series appears summable: `x = 0` is then an eigenvalue candidate.
    pub indicator: bool,
}

/// Partial sums of `sum_k P_{2k}(0)^2` for a zero-diagonal sequence; a
/// summable series makes `x = 0` an eigenvalue.
pub fn zero_eigenvalue_test(
    seq: &CoefficientSequence,
    terms: usize,
    tol: f64,
) -> Result<ZeroEigenvalueReport> {
    if terms < 2 {
        return Err(Error::InvalidArgument(
            "zero-eigenvalue test needs at least 2 terms".into(),
        ));
    }
    let w = seq.window(2 * terms - 1)?;
    for (k, &a) in w.a.iter().enumerate() {
        if a != 0.0 {
            return Err(Error::NonZeroDiagonal { k, a });
        }
    }
    // log P_{2k}(0)^2 = sum_{j<k} 2 ln(b_{2j} / b_{2j+1})
    let mut log_terms = Vec::with_capacity(terms);
    let mut log_t = 0.0;
    for k in 0..terms {
        log_terms.push(log_t);
        log_t += 2.0 * (w.b[2 * k] / w.b[2 * k + 1]).ln();
    }
    let peak = log_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_sum = peak + log_terms.iter().map(|t| (t - peak).exp()).sum::<f64>().ln();
    let half = terms / 2;
    let log_ratio = log_terms[half..]
        .windows(2)
        .map(|p| p[1] - p[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let tail_ratio = log_ratio.exp();
    let relative_remainder = if tail_ratio < 1.0 {
        (log_terms[terms - 1] + log_ratio - (-tail_ratio).ln_1p() - log_sum).exp()
    } else {
        f64::INFINITY
    };
    Ok(ZeroEigenvalueReport {
        terms,
        log_partial_sum: log_sum,
        tail_ratio,
        relative_remainder,
        tolerance: tol,
        indicator: tail_ratio < 1.0 && relative_remainder <= tol,
    })
}
