//! Acceptance suite: one pass/fail line per criterion, nonzero exit on any failure.

use std::f64::consts::PI;
use std::time::Instant;

use jacobi_spectral::approx::{
    band_mass, fn_at_zero, sigma_n, weight_fn, zero_eigenvalue_test, WeightMethod,
};
use jacobi_spectral::contfrac::{constant_tail_k, resolvent_limit, tail_series_k};
use jacobi_spectral::criteria::{
    asymptotic_conditions_check, bounded_weight_criterion, discreteness_check, IndexWindow, Verdict,
};
use jacobi_spectral::grid::Grid;
use jacobi_spectral::oracle::{dense_resolvent, kolmogorov_distance, truncation_measure};
use jacobi_spectral::polynomials::{eval_pq, turan_forms_sweep, wronskian_residual_of};
use jacobi_spectral::CoefficientSequence;
use num_complex::Complex64;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Running maximum that keeps a NaN once seen, unlike `f64::max`.
fn worse(acc: f64, v: f64) -> f64 {
    if acc.is_nan() || v.is_nan() {
        f64::NAN
    } else {
        acc.max(v)
    }
}

/// Deterministic points in [0, 1): fractional parts of k times the golden ratio.
fn weyl(k: usize) -> f64 {
    (k as f64 * 0.618_033_988_749_895).fract()
}

fn criterion_1() -> Outcome {
    let presets = [
        ("constant", CoefficientSequence::constant(0.3, 0.7).unwrap()),
        ("hermite", CoefficientSequence::hermite()),
        ("power(0.5)", CoefficientSequence::power(0.5, 1.0).unwrap()),
        ("power(1)", CoefficientSequence::power(1.0, 1.0).unwrap()),
    ];
    let mut worst: f64 = 0.0;
    let mut worst_at = String::new();
    for (name, seq) in &presets {
        for s in 0..50 {
            let x = -3.0 + 6.0 * weyl(2 * s + 1);
            let y = (0.05 + 3.0 * weyl(2 * s + 2)) * if s % 2 == 0 { 1.0 } else { -1.0 };
            // one recurrence pass per point; the table is re-read at every n
            let mut real = eval_pq(seq, 500, x).unwrap();
            let mut cplx = eval_pq(seq, 500, Complex64::new(x, y)).unwrap();
            for n in 1..=500 {
                let b = seq.b(n - 1).unwrap();
                (real.n, cplx.n) = (n, n);
                let r_real = wronskian_residual_of(&real, b);
                let r_cplx = wronskian_residual_of(&cplx, b);
                for (r, z) in [(r_real, format!("{x}")), (r_cplx, format!("{x}{y:+}i"))] {
                    if !worst.is_nan() && worse(worst, r) != worst {
                        worst = r;
                        worst_at = format!("{name}, n={n}, point {z}");
                    }
                }
            }
        }
    }
    outcome(
        worst <= 1e-10,
        format!("max Wronskian residual {worst:.3e} ({worst_at})"),
    )
}

fn criterion_2() -> Outcome {
    let presets = [
        (
            "constant(0,1/2)",
            CoefficientSequence::constant(0.0, 0.5).unwrap(),
        ),
        ("hermite", CoefficientSequence::hermite()),
        ("power(0.5)", CoefficientSequence::power(0.5, 1.0).unwrap()),
        ("power(1)", CoefficientSequence::power(1.0, 1.0).unwrap()),
    ];
    let xs = Grid::new(-0.95, 0.95, 39).unwrap().points();
    let mut spread: f64 = 0.0;
    let mut chebyshev: f64 = 0.0;
    for (name, seq) in &presets {
        let w = seq.window(2000).unwrap();
        for &x in &xs {
            for f in turan_forms_sweep(&w, x).unwrap().iter().skip(1) {
                spread = worse(spread, f.max_relative_spread());
                if *name == "constant(0,1/2)" {
                    for v in [f.determinant_value(), f.sum_value(), f.alternative_value()] {
                        chebyshev = worse(chebyshev, (v - 1.0).abs());
                    }
                }
            }
        }
    }
    outcome(
        spread <= 1e-8 && chebyshev <= 1e-12,
        format!("max pairwise relative spread {spread:.3e}; Chebyshev |g - 1| {chebyshev:.3e}"),
    )
}

fn criterion_3() -> Outcome {
    let seq = CoefficientSequence::constant(0.0, 0.5).unwrap();
    let lambda = Complex64::new(0.0, 1.0);
    // independent root of b^2 K^2 - (a - lambda) K + 1 = 0 with Im K > 0
    let (a, b) = (0.0, 0.5);
    let s = ((a - lambda) * (a - lambda) - 4.0 * b * b).sqrt();
    let roots = [
        ((a - lambda) + s) / (2.0 * b * b),
        ((a - lambda) - s) / (2.0 * b * b),
    ];
    let target = if roots[0].im > 0.0 {
        roots[0]
    } else {
        roots[1]
    };
    let (cf, cert) = resolvent_limit(&seq, lambda, 1e-13, 100_000).unwrap();
    let dense = dense_resolvent(&seq, 5000, lambda).unwrap();
    let (e1, e2) = ((cf - target).norm(), (dense - target).norm());
    outcome(
        cert.converged && e1 <= 1e-6 && e2 <= 1e-6 && (target.im - 0.82843).abs() < 1e-5,
        format!(
            "target {:.6}i; continued fraction error {e1:.2e}, dense error {e2:.2e}",
            target.im
        ),
    )
}

fn criterion_4() -> Outcome {
    let seq = CoefficientSequence::constant(5.0, 1.0).unwrap();
    let lambda = Complex64::new(0.0, 1.0);
    let (k, cert, state) = tail_series_k(&seq, 3, lambda, 10_000, 1e-16).unwrap();
    let closed = constant_tail_k(5.0, 1.0, lambda).unwrap();
    let err = (k - closed).norm();
    let gap_ok = state.min_denominator_gap >= 1.0 - 1e-12;
    let bound_ok = state.max_partial_modulus <= 1.0 + 1e-12;
    outcome(
        cert.converged && err <= 1e-10 && gap_ok && bound_ok,
        format!(
            "|series - closed form| {err:.2e}; min |N_k| - |N_(k-1)| {:.6}; max |partial sum| {:.6}",
            state.min_denominator_gap, state.max_partial_modulus
        ),
    )
}

fn criterion_5() -> Outcome {
    let seq = CoefficientSequence::custom(|k| (((k + 1) * (k + 1)) as f64, (k + 1) as f64));
    let report = discreteness_check(&seq, IndexWindow::new(2, 500).unwrap(), 0.0).unwrap();
    let tail = report.statistics["tail_sup"];
    let small = truncation_measure(&seq, 1000).unwrap();
    let large = truncation_measure(&seq, 2000).unwrap();
    let drift = (0..10)
        .map(|i| (small.nodes[i] - large.nodes[i]).abs())
        .fold(0.0, worse);
    outcome(
        report.verdict == Verdict::CertifiedAtScale && tail < 0.26 && drift <= 1e-6,
        format!(
            "verdict {}; tail sup {tail:.3e}; eigenvalue drift N=1000 vs 2000 {drift:.2e}",
            report.verdict.as_str()
        ),
    )
}

fn criterion_6() -> Outcome {
    let seq = CoefficientSequence::constant(0.0, 0.5).unwrap();
    let mut worst: f64 = 0.0;
    for n in [1, 10, 100] {
        let m = band_mass(&seq, n, WeightMethod::TuranDet).unwrap();
        worst = worse(worst, (m.value - 1.0).abs());
    }
    let xs = Grid::new(-1.0, 1.0, 401).unwrap().points();
    let sigma = sigma_n(&seq, 10, -1.0, &xs).unwrap();
    let measure = truncation_measure(&seq, 2000).unwrap();
    let d = kolmogorov_distance(&measure, &xs, &sigma.sigma).unwrap();
    outcome(
        worst <= 1e-8 && d <= 0.01,
        format!("max |mass - 1| {worst:.2e}; Kolmogorov distance {d:.4}"),
    )
}

fn criterion_7() -> Outcome {
    let seq = CoefficientSequence::hermite();
    let gauss = |x: f64| (-x * x).exp() / PI.sqrt();
    let mut worst: f64 = 0.0;
    for x in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        worst = worse(
            worst,
            (weight_fn(&seq, 10_000, x, WeightMethod::TuranDet).unwrap() - gauss(x)).abs(),
        );
    }
    let at_zero: Vec<f64> = [100, 1000, 10_000]
        .iter()
        .map(|&n| (weight_fn(&seq, n, 0.0, WeightMethod::TuranDet).unwrap() - gauss(0.0)).abs())
        .collect();
    let monotone = at_zero.windows(2).all(|p| p[1] <= p[0] * (1.0 + 1e-6));
    outcome(
        worst <= 0.01 && monotone,
        format!(
            "max error at n=10^4 {worst:.3e}; error at 0 for n=10^2,10^3,10^4: {:.3e}, {:.3e}, {:.3e}",
            at_zero[0], at_zero[1], at_zero[2]
        ),
    )
}

fn criterion_8() -> Outcome {
    let presets = [
        ("hermite", CoefficientSequence::hermite()),
        ("power(0.5)", CoefficientSequence::power(0.5, 1.0).unwrap()),
        ("power(1)", CoefficientSequence::power(1.0, 1.0).unwrap()),
    ];
    let mut worst: f64 = 0.0;
    let mut parity_ok = true;
    let mut checked = 0;
    for (_, seq) in &presets {
        // index 0 is unused; the product formula starts at n = 1
        let f: Vec<f64> = std::iter::once(f64::NAN)
            .chain((1..=2000).map(|n| {
                let product = fn_at_zero(seq, n).unwrap();
                let direct = weight_fn(seq, n, 0.0, WeightMethod::TuranDet).unwrap();
                worst = worse(worst, (product - direct).abs() / direct.abs());
                product
            }))
            .collect();
        let b: Vec<f64> = (0..=2001).map(|k| seq.b(k).unwrap()).collect();
        let log_concave = (1..=2000).all(|k| b[k - 1] * b[k + 1] <= b[k] * b[k] * (1.0 + 1e-15));
        if log_concave {
            checked += 1;
            for k in 1..1000 {
                let (odd, next_odd) = (f[2 * k - 1], f[2 * k + 1]);
                let (even, next_even) = (f[2 * k], f[2 * k + 2]);
                let slack = 1e-12;
                parity_ok &= next_odd <= odd * (1.0 + slack);
                parity_ok &= next_even >= even * (1.0 - slack);
                parity_ok &= even <= odd * (1.0 + slack);
            }
        }
    }
    outcome(
        worst <= 1e-10 && parity_ok,
        format!("max relative gap product vs recurrence {worst:.2e}; parity ordering checked on {checked} log-concave presets: {parity_ok}"),
    )
}

fn criterion_9() -> Outcome {
    let seq = CoefficientSequence::paired(1.0, 2.0).unwrap();
    let z = zero_eigenvalue_test(&seq, 100, 1e-10).unwrap();
    let xs = Grid::new(-0.5, 0.5, 21).unwrap().points();
    let report =
        bounded_weight_criterion(&seq, (-0.5, 0.5), &xs, IndexWindow::new(1, 200).unwrap())
            .unwrap();
    let witness_at_zero = report.witnesses.iter().any(|w| w.x == Some(0.0));
    outcome(
        z.indicator && z.tail_ratio < 1.0 && report.verdict == Verdict::Violated && witness_at_zero,
        format!(
            "tail ratio {:.4}; indicator {}; bounded-weight verdict {}; witness at x=0: {witness_at_zero}",
            z.tail_ratio,
            z.indicator,
            report.verdict.as_str()
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for (name, seq) in [
        ("hermite", CoefficientSequence::hermite()),
        ("power(1)", CoefficientSequence::power(1.0, 1.0).unwrap()),
    ] {
        let r = asymptotic_conditions_check(&seq, 5000).unwrap();
        let all = r.blocks.len() == 5
            && r.blocks
                .iter()
                .all(|b| b.verdict == Verdict::CertifiedAtScale);
        pass &= all;
        lines.push(format!("{name} all five certified: {all}"));
    }
    let g = CoefficientSequence::paired(1.0, 2.0).unwrap();
    let r = asymptotic_conditions_check(&g, 5000).unwrap();
    let c5 = r
        .block("condition-5")
        .map(|b| b.verdict == Verdict::Violated && !b.witnesses.is_empty());
    let ok = r.verdict == Verdict::Violated && c5 == Some(true);
    pass &= ok;
    lines.push(format!(
        "paired-growing violated with condition-5 witness: {ok}"
    ));
    outcome(pass, lines.join("; "))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("identity suite", criterion_1),
        ("Turan form agreement", criterion_2),
        ("closed-form resolvent", criterion_3),
        ("Pringsheim series", criterion_4),
        ("discreteness certificate", criterion_5),
        ("semicircle normalization", criterion_6),
        ("Hermite Gaussian limit", criterion_7),
        ("weight at zero by products", criterion_8),
        ("eigenvalue at zero", criterion_9),
        ("growth conditions window check", criterion_10),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failures += 1;
        }
        println!(
            "[{tag}] criterion {}: {name}: {} [{:.2}s]",
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
