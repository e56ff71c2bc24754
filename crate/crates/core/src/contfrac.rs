//! Continued-fraction evaluation of the resolvent entry `R(λ) = ((J - λ)^{-1} e_0, e_0)`
//! and of its tails `K_n(λ)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coefficients::CoefficientSequence;
use crate::error::{Error, Result};
use crate::polynomials::{eval_pq, step};
use crate::scaled::{Scalar, Scaled};

/// Consecutive small steps required before a limit is accepted.
pub const STABILIZATION_WINDOW: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Guarantee {
    PringsheimBound,
    CauchyEmpirical,
    ClosedForm,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceCertificate {
    pub converged: bool,
    pub iterations: usize,
    /// Size of the last step between successive approximants.
    pub residual: f64,
    pub guarantee: Guarantee,
}

/// `-Q_n(λ)/P_n(λ)`.
pub fn resolvent_approximant(
    seq: &CoefficientSequence,
    n: usize,
    lambda: Complex64,
) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::InvalidArgument("approximant needs n >= 1".into()));
    }
    let t = eval_pq(seq, n, lambda)?;
    if t.p[n].mantissa == Complex64::new(0.0, 0.0) {
        return Err(Error::ApproximantPole { n });
    }
    Ok(-t.q[n].ratio(&t.p[n]))
}

fn require_complex(lambda: Complex64) -> Result<()> {
    if lambda.im == 0.0 || !lambda.im.is_finite() || !lambda.re.is_finite() {
        Err(Error::RealSpectralParameter)
    } else {
        Ok(())
    }
}

/// Iterate approximants `-Q_n/P_n` until [`STABILIZATION_WINDOW`] consecutive
/// steps are below `tol`, or `n_max` is reached.
pub fn resolvent_limit(
    seq: &CoefficientSequence,
    lambda: Complex64,
    tol: f64,
    n_max: usize,
) -> Result<(Complex64, ConvergenceCertificate)> {
    require_complex(lambda)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let (a0, b0) = seq.coeff(0)?;
    let mut p_prev = Scaled::from_value(Complex64::new(1.0, 0.0));
    let mut q_prev = Scaled::<Complex64>::zero();
    let mut p = Scaled::from_value((lambda - a0) / b0);
    let mut q = Scaled::from_value(Complex64::new(1.0 / b0, 0.0));
    let mut value = -q.ratio(&p);
    let mut b_prev = b0;
    let mut small_steps = 0;
    let mut residual = f64::INFINITY;
    let mut n = 1;
    while n < n_max {
        let (a, b) = seq.coeff(n)?;
        let shift = lambda - a;
        let p_next = step(p_prev, p, shift, b_prev, b, n)?;
        let q_next = step(q_prev, q, shift, b_prev, b, n)?;
        (p_prev, p, q_prev, q) = (p, p_next, q, q_next);
        b_prev = b;
        n += 1;
        let next = -q.ratio(&p);
        if !next.finite() {
            return Err(Error::NonFiniteIntermediate { k: n });
        }
        residual = (next - value).norm();
        value = next;
        if residual < tol {
            small_steps += 1;
            if small_steps >= STABILIZATION_WINDOW {
                break;
            }
        } else {
            small_steps = 0;
        }
    }
    let converged = small_steps >= STABILIZATION_WINDOW;
    Ok((
        value,
        ConvergenceCertificate {
            converged,
            iterations: n,
            residual,
            guarantee: Guarantee::CauchyEmpirical,
        },
    ))
}

/// Roots of `b^2 K^2 - (a - λ) K + 1 = 0` as (larger modulus, smaller modulus).
fn quadratic_roots(a: f64, b: f64, lambda: Complex64) -> (Complex64, Complex64) {
    let d = Complex64::new(a, 0.0) - lambda;
    let disc = (d * d - 4.0 * b * b).sqrt();
    // pick the sign that avoids cancellation, recover the other root from the product 1/b^2
    let plus = d + disc;
    let minus = d - disc;
    let big = (if plus.norm() >= minus.norm() {
        plus
    } else {
        minus
    }) / (2.0 * b * b);
    if big.norm() == 0.0 {
        return (big, big);
    }
    let small = 1.0 / (b * b * big);
    (big, small)
}

/// Tail `K` of the constant Jacobi matrix with entries `(a, b)`.
///
/// Off the real axis the root with `sign(Im K) = sign(Im λ)` is returned; on
/// the real axis outside the closed band the root with `|K| <= 1/b`.
pub fn constant_tail_k(a: f64, b: f64, lambda: Complex64) -> Result<Complex64> {
    if !(b > 0.0) {
        return Err(Error::NonPositiveOffDiagonal { k: 0, b });
    }
    let (big, small) = quadratic_roots(a, b, lambda);
    if lambda.im == 0.0 {
        let x = lambda.re;
        if (x - a).abs() <= 2.0 * b {
            return Err(Error::InsideBand {
                x,
                lo: a - 2.0 * b,
                hi: a + 2.0 * b,
            });
        }
        return Ok(Complex64::new(small.re, 0.0));
    }
    let want = lambda.im.signum();
    let big_ok = big.im.signum() == want && big.im != 0.0;
    let small_ok = small.im.signum() == want && small.im != 0.0;
    Ok(match (big_ok, small_ok) {
        (true, false) => big,
        (false, true) => small,
        // ties only occur through rounding right at the band; both roots coincide there
        _ => small,
    })
}

/// Boundary values `K(x + i0) = D(x) + i B(x)` of the constant-tail function.
pub fn boundary_k(a: f64, b: f64, x: f64) -> (f64, f64) {
    let d = a - x;
    let b2 = b * b;
    if d.abs() <= 2.0 * b {
        let width = ((2.0 * b - d) * (2.0 * b + d)).max(0.0).sqrt();
        (d / (2.0 * b2), width / (2.0 * b2))
    } else {
        let root = ((d - 2.0 * b) * (d + 2.0 * b)).sqrt();
        let big = (d + d.signum() * root) / (2.0 * b2);
        (1.0 / (b2 * big), 0.0)
    }
}

/// Record of the equivalent-fraction series evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailSeriesState {
    /// Elements `C_0, C_1, ...` of the transformed fraction.
    pub c: Vec<Complex64>,
    /// Final numerator and denominator, unscaled when representable.
    pub numerator: Complex64,
    pub denominator: Complex64,
    pub partial_sum: Complex64,
    /// Smallest observed `|N_k| - |N_{k-1}|`.
    pub min_denominator_gap: f64,
    /// Largest modulus among the partial sums.
    pub max_partial_modulus: f64,
    /// Whether every `|C_k| < 1` so far.
    pub contractive: bool,
}

/// Terms must stay below `tol` this many times in a row.
const SERIES_WINDOW: usize = 2;

/// `K_n(λ)` as the sum of the series of differences of successive
/// approximants of `C_0/(2 + C_1/(2 + C_2/(2 + ...)))` with
/// `C_0 = 2/(a_n - λ)` and `C_k = -4 b_{n+k-1}^2 / ((a_{n+k-1} - λ)(a_{n+k} - λ))`.
pub fn tail_series_k(
    seq: &CoefficientSequence,
    n: usize,
    lambda: Complex64,
    k_max: usize,
    tol: f64,
) -> Result<(Complex64, ConvergenceCertificate, TailSeriesState)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let one = Complex64::new(1.0, 0.0);
    let shifted = |k: usize| -> Result<Complex64> {
        let d = seq.a(n + k)? - lambda;
        if d == Complex64::new(0.0, 0.0) {
            Err(Error::ZeroDenominator { n: n + k })
        } else {
            Ok(d)
        }
    };
    let mut state = TailSeriesState {
        c: Vec::new(),
        numerator: Complex64::new(0.0, 0.0),
        denominator: one,
        partial_sum: Complex64::new(0.0, 0.0),
        min_denominator_gap: f64::INFINITY,
        max_partial_modulus: 0.0,
        contractive: true,
    };
    // N_{k-2}, N_{k-1}
    let mut n_older = Scaled::<Complex64>::zero();
    let mut n_old = Scaled::from_value(one);
    let mut m_older = Scaled::from_value(one);
    let mut m_old = Scaled::<Complex64>::zero();
    let mut product = Scaled::from_value(one);
    let mut d_prev = shifted(0)?;
    let mut small_terms = 0;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    for k in 0..k_max.max(1) {
        let c_k = if k == 0 {
            2.0 / d_prev
        } else {
            let d = shifted(k)?;
            let b = seq.b(n + k - 1)?;
            let c = -4.0 * b * b / (d_prev * d);
            d_prev = d;
            c
        };
        state.c.push(c_k);
        if c_k.norm() >= 1.0 {
            state.contractive = false;
        }
        let n_k = n_old
            .scale(Complex64::new(2.0, 0.0))
            .add(n_older.scale(c_k));
        let m_k = m_old
            .scale(Complex64::new(2.0, 0.0))
            .add(m_older.scale(c_k));
        if n_k.mantissa == Complex64::new(0.0, 0.0) {
            return Err(Error::ZeroDenominator { n: n + k });
        }
        product = product.scale(c_k);
        let magnitude = product.div(n_k.mul(n_old)).value();
        let term = if k % 2 == 0 { magnitude } else { -magnitude };
        let gap = n_k.modulus().sub(n_old.modulus()).value();
        state.min_denominator_gap = state.min_denominator_gap.min(gap);
        state.partial_sum += term;
        state.max_partial_modulus = state.max_partial_modulus.max(state.partial_sum.norm());
        (n_older, n_old, m_older, m_old) = (n_old, n_k, m_old, m_k);
        iterations = k + 1;
        residual = term.norm();
        if residual < tol {
            small_terms += 1;
            if small_terms >= SERIES_WINDOW {
                break;
            }
        } else {
            small_terms = 0;
        }
    }
    state.numerator = m_old.value();
    state.denominator = n_old.value();
    let converged = small_terms >= SERIES_WINDOW;
    let guarantee = if state.contractive {
        Guarantee::PringsheimBound
    } else {
        Guarantee::None
    };
    let cert = ConvergenceCertificate {
        converged,
        iterations,
        residual,
        guarantee,
    };
    Ok((state.partial_sum, cert, state))
}

/// `-(Q_n + Q_{n-1} b_{n-1} K) / (P_n + P_{n-1} b_{n-1} K)`: the resolvent entry
/// rebuilt from the first `n` levels and the tail value `K` at level `n`.
pub fn tail_assembled_r(
    seq: &CoefficientSequence,
    n: usize,
    lambda: Complex64,
    k: Complex64,
) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::InvalidArgument("tail assembly needs n >= 1".into()));
    }
    let t = eval_pq(seq, n, lambda)?;
    let bk = k * seq.b(n - 1)?;
    let num = t.q[n].add(t.q[n - 1].scale(bk));
    let den = t.p[n].add(t.p[n - 1].scale(bk));
    if den.mantissa == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroDenominator { n });
    }
    Ok(-num.ratio(&den))
}
