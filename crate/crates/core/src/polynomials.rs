//! First- and second-kind orthogonal polynomials of a Jacobi matrix.
//!
//! Both families solve `b_{k-1} y_{k-1} + a_k y_k + b_k y_{k+1} = z y_k` and
//! differ only in their starting values:
//! `P_0 = 1, P_1 = (z - a_0)/b_0` and `Q_0 = 0, Q_1 = 1/b_0`.

use crate::coefficients::{CoefficientSequence, CoefficientWindow};
use crate::error::{Error, Result};
use crate::scaled::{diff_of_products, ldexp, Scalar, Scaled};

/// Scaled values `P_0..=P_n` and `Q_0..=Q_n` at one point.
#[derive(Clone, Debug)]
pub struct PolyTable<T> {
    pub n: usize,
    pub point: T,
    pub p: Vec<Scaled<T>>,
    pub q: Vec<Scaled<T>>,
}

impl<T: Scalar> PolyTable<T> {
    /// Unscaled `P_k`; overflows to infinity for very large magnitudes.
    pub fn p_value(&self, k: usize) -> T {
        self.p[k].value()
    }

    pub fn q_value(&self, k: usize) -> T {
        self.q[k].value()
    }
}

fn check_point<T: Scalar>(point: T) -> Result<()> {
    if point.finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(
            "evaluation point must be finite".into(),
        ))
    }
}

/// One recurrence step from `(prev, cur) = (y_{k-1}, y_k)` to `y_{k+1}`.
#[inline]
pub(crate) fn step<T: Scalar>(
    prev: Scaled<T>,
    cur: Scaled<T>,
    shift: T,
    b_prev: f64,
    b_k: f64,
    k: usize,
) -> Result<Scaled<T>> {
    let zero = T::zero();
    let e = if cur.mantissa == zero {
        prev.exponent
    } else if prev.mantissa == zero {
        cur.exponent
    } else {
        cur.exponent.max(prev.exponent)
    };
    let m = (shift * cur.at_exponent(e) - prev.at_exponent(e) * b_prev) / b_k;
    if !m.finite() {
        return Err(Error::NonFiniteIntermediate { k: k + 1 });
    }
    Ok(Scaled::new(m, e).normalized())
}

/// Run the recurrence from the given starting pair up to index `n`.
/// Needs `a_0..a_{n-1}` and `b_0..b_{n-1}`.
pub(crate) fn run_recurrence<T: Scalar>(
    a: &[f64],
    b: &[f64],
    n: usize,
    point: T,
    y0: Scaled<T>,
    y1: Scaled<T>,
) -> Result<Vec<Scaled<T>>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(y0);
    if n == 0 {
        return Ok(out);
    }
    out.push(y1);
    for k in 1..n {
        let shift = point - T::from_real(a[k]);
        let next = step(out[k - 1], out[k], shift, b[k - 1], b[k], k)?;
        out.push(next);
    }
    Ok(out)
}

/// `P_0..=P_n` from a materialized window (needs indices `< n`).
pub fn p_values<T: Scalar>(w: &CoefficientWindow, n: usize, point: T) -> Result<Vec<Scaled<T>>> {
    check_point(point)?;
    if n > w.len() {
        return Err(Error::IndexBeyondTable {
            k: n - 1,
            len: w.len(),
        });
    }
    let p1 = if n == 0 {
        Scaled::zero()
    } else {
        Scaled::from_value((point - T::from_real(w.a[0])) / w.b[0])
    };
    run_recurrence(&w.a, &w.b, n, point, Scaled::from_value(T::one()), p1)
}

/// `Q_0..=Q_n` from a materialized window.
pub fn q_values<T: Scalar>(w: &CoefficientWindow, n: usize, point: T) -> Result<Vec<Scaled<T>>> {
    check_point(point)?;
    if n > w.len() {
        return Err(Error::IndexBeyondTable {
            k: n - 1,
            len: w.len(),
        });
    }
    let q1 = if n == 0 {
        Scaled::zero()
    } else {
        Scaled::from_value(T::from_real(1.0 / w.b[0]))
    };
    run_recurrence(&w.a, &w.b, n, point, Scaled::zero(), q1)
}

fn window_below(seq: &CoefficientSequence, n: usize) -> Result<CoefficientWindow> {
    if n == 0 {
        Ok(CoefficientWindow {
            a: Vec::new(),
            b: Vec::new(),
        })
    } else {
        seq.window(n - 1)
    }
}

/// Evaluate `P_0..=P_n` and `Q_0..=Q_n` at `point`.
pub fn eval_pq<T: Scalar>(seq: &CoefficientSequence, n: usize, point: T) -> Result<PolyTable<T>> {
    let w = window_below(seq, n)?;
    Ok(PolyTable {
        n,
        point,
        p: p_values(&w, n, point)?,
        q: q_values(&w, n, point)?,
    })
}

/// Relative residual of `P_{n-1} Q_n - P_n Q_{n-1} = 1/b_{n-1}`, measured
/// against the largest of the three magnitudes involved.
pub fn wronskian_residual<T: Scalar>(seq: &CoefficientSequence, n: usize, point: T) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("wronskian needs n >= 1".into()));
    }
    let table = eval_pq(seq, n, point)?;
    let b = seq.b(n - 1)?;
    Ok(wronskian_residual_of(&table, b))
}

/// Same as [`wronskian_residual`] on an existing table; `b` is `b_{n-1}`.
pub fn wronskian_residual_of<T: Scalar>(table: &PolyTable<T>, b: f64) -> f64 {
    let n = table.n;
    let left = table.p[n - 1].mul(table.q[n]);
    let right = table.p[n].mul(table.q[n - 1]);
    let target = Scaled::from_value(T::from_real(1.0 / b));
    let diff = left.sub(right).sub(target).modulus();
    let scale = [left.modulus(), right.modulus(), target.modulus()]
        .into_iter()
        .fold(Scaled::new(1e-300, 0), |acc, m| {
            if m.log2_modulus() > acc.log2_modulus() {
                m
            } else {
                acc
            }
        });
    diff.ratio(&scale)
}

/// The three equivalent forms of the weight denominator `g_n(x)`, all stored
/// as mantissas over the common factor `2^exponent`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TuranForms {
    pub n: usize,
    /// `P_n^2 - (b_{n-1}/b_n) P_{n-1} P_{n+1}`.
    pub determinant: f64,
    /// `(1/b_n^2) sum_k [(b_k^2 - b_{k-1}^2) P_k^2 + b_{k-1}(a_k - a_{k-1}) P_{k-1} P_k]`.
    pub sum: f64,
    /// `P_{n+1}^2 + P_n^2 - ((x - a_n)/b_n) P_{n+1} P_n`.
    pub alternative: f64,
    pub exponent: i32,
}

/// Forms disagreeing by more than this relative amount fall back to the sum form.
pub const FORM_AGREEMENT: f64 = 1e-6;

impl TuranForms {
    pub fn determinant_value(&self) -> f64 {
        ldexp(self.determinant, self.exponent)
    }

    pub fn sum_value(&self) -> f64 {
        ldexp(self.sum, self.exponent)
    }

    pub fn alternative_value(&self) -> f64 {
        ldexp(self.alternative, self.exponent)
    }

    /// Largest pairwise relative disagreement between the three forms.
    pub fn max_relative_spread(&self) -> f64 {
        let v = [self.determinant, self.sum, self.alternative];
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in i + 1..3 {
                let scale = v[i].abs().max(v[j].abs()).max(1e-300);
                worst = worst.max((v[i] - v[j]).abs() / scale);
            }
        }
        worst
    }

    /// Determinant form, replaced by the sum form when the two disagree.
    pub fn robust(&self) -> Scaled<f64> {
        let scale = self.determinant.abs().max(self.sum.abs()).max(1e-300);
        let m = if (self.determinant - self.sum).abs() > FORM_AGREEMENT * scale {
            self.sum
        } else {
            self.determinant
        };
        Scaled::new(m, self.exponent)
    }
}

fn max_exponent(values: &[Scaled<f64>]) -> i32 {
    values
        .iter()
        .filter(|v| v.mantissa != 0.0)
        .map(|v| v.exponent)
        .max()
        .unwrap_or(0)
}

/// `g_n(x)` in all three forms for every `n` in `0..=w.top()`.
///
/// One recurrence pass serves the whole range, so scanning a window of `n`
/// costs the same as a single evaluation at its top index.
pub fn turan_forms_sweep(w: &CoefficientWindow, x: f64) -> Result<Vec<TuranForms>> {
    turan_forms_upto(w, w.top(), x)
}

/// Same as [`turan_forms_sweep`] restricted to `n <= top`.
pub fn turan_forms_upto(w: &CoefficientWindow, top: usize, x: f64) -> Result<Vec<TuranForms>> {
    if top > w.top() {
        return Err(Error::IndexBeyondTable {
            k: top,
            len: w.len(),
        });
    }
    let p = p_values(w, top + 1, x)?;
    let mut out = Vec::with_capacity(top + 1);
    let mut running = Scaled::<f64>::zero();
    for n in 0..=top {
        let b_prev = w.b_before(n);
        let b_n = w.b[n];
        let a_prev = if n == 0 { 0.0 } else { w.a[n - 1] };
        let p_prev = if n == 0 { Scaled::zero() } else { p[n - 1] };

        let square = p[n].mul(p[n]).scale(b_n * b_n - b_prev * b_prev);
        let cross = p_prev.mul(p[n]).scale(b_prev * (w.a[n] - a_prev));
        running = running.add(square).add(cross);

        let e = max_exponent(&[p_prev, p[n], p[n + 1]]);
        let (pm, pc, pn) = (
            p_prev.at_exponent(e),
            p[n].at_exponent(e),
            p[n + 1].at_exponent(e),
        );
        let determinant = diff_of_products(pc, pc, (b_prev / b_n) * pm, pn);
        let rho = (x - w.a[n]) / b_n;
        let alternative = pn.mul_add(pn, pc.mul_add(pc, -(rho * pn) * pc));
        let sum = running.at_exponent(2 * e) / (b_n * b_n);
        out.push(TuranForms {
            n,
            determinant,
            sum,
            alternative,
            exponent: 2 * e,
        });
    }
    Ok(out)
}

/// `g_n(x)` in all three forms at a single `n`.
pub fn turan_forms(seq: &CoefficientSequence, n: usize, x: f64) -> Result<TuranForms> {
    let w = seq.window(n)?;
    turan_forms_at(&w, n, x)
}

/// Forms at a single `n` from a window reaching at least index `n`.
pub fn turan_forms_at(w: &CoefficientWindow, n: usize, x: f64) -> Result<TuranForms> {
    Ok(*turan_forms_upto(w, n, x)?.last().expect("non-empty sweep"))
}

/// `P_n^2 - (b_{n-1}/b_n) P_{n-1} P_{n+1}`.
pub fn turan_determinant(seq: &CoefficientSequence, n: usize, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "turan determinant needs n >= 1".into(),
        ));
    }
    Ok(turan_forms(seq, n, x)?.determinant_value())
}

/// Sum form of the Turán determinant.
pub fn turan_sum(seq: &CoefficientSequence, n: usize, x: f64) -> Result<f64> {
    Ok(turan_forms(seq, n, x)?.sum_value())
}

/// `P_{n+1}^2 + P_n^2 - ((x - a_n)/b_n) P_{n+1} P_n`.
pub fn alt_denominator(seq: &CoefficientSequence, n: usize, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "alternative denominator needs n >= 1".into(),
        ));
    }
    Ok(turan_forms(seq, n, x)?.alternative_value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn chebyshev_at_zero() {
        let c = CoefficientSequence::constant(0.0, 0.5).unwrap();
        let t = eval_pq(&c, 2, 0.0).unwrap();
        let p: Vec<f64> = (0..=2).map(|k| t.p_value(k)).collect();
        assert_eq!(p, vec![1.0, 0.0, -1.0]);
    }

    #[test]
    fn hermite_p2_at_zero() {
        let h = CoefficientSequence::hermite();
        let t = eval_pq(&h, 2, 0.0).unwrap();
        assert!((t.p_value(2) + 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn initial_conditions() {
        let s = CoefficientSequence::polynomial(1.0, 2.0, 0.5, 3.0).unwrap();
        let a0 = s.a(0).unwrap();
        let t = eval_pq(&s, 1, a0).unwrap();
        assert_eq!(t.p_value(0), 1.0);
        assert_eq!(t.q_value(0), 0.0);
        assert_eq!(t.p_value(1), 0.0);
        assert_eq!(t.q_value(1), 1.0 / s.b(0).unwrap());
    }

    #[test]
    fn wronskian_examples() {
        let h = CoefficientSequence::hermite();
        assert!(wronskian_residual(&h, 1, 0.3).unwrap() < 1e-15);
        assert!(wronskian_residual(&h, 200, 1.3).unwrap() < 1e-10);
        assert!(wronskian_residual(&h, 200, Complex64::new(2.0, 1.0)).unwrap() < 1e-10);
    }

    #[test]
    fn scaling_keeps_far_points_finite() {
        let h = CoefficientSequence::constant(0.0, 0.5).unwrap();
        let t = eval_pq(&h, 3000, Complex64::new(0.0, 5.0)).unwrap();
        assert!(t.p[3000].log2_modulus() > 3000.0);
        for v in &t.p {
            assert!(v.mantissa.norm() <= ldexp(1.0, 513));
        }
        let w = wronskian_residual_of(&t, h.b(2999).unwrap());
        assert!(w < 1e-10, "{w}");
    }

    #[test]
    fn turan_examples() {
        let c = CoefficientSequence::constant(0.0, 0.5).unwrap();
        assert!((turan_determinant(&c, 10, 0.3).unwrap() - 1.0).abs() < 1e-13);
        assert!((alt_denominator(&c, 10, 0.0).unwrap() - 1.0).abs() < 1e-13);
        assert_eq!(turan_sum(&c, 0, 0.7).unwrap(), 1.0);

        let h = CoefficientSequence::hermite();
        let t = eval_pq(&h, 5, 0.0).unwrap();
        let squares: f64 = (0..=5).map(|k| t.p_value(k).powi(2)).sum();
        let expected = squares / 6.0;
        assert!(rel(turan_determinant(&h, 5, 0.0).unwrap(), expected) < 1e-14);

        let t21 = eval_pq(&h, 21, 0.0).unwrap();
        let alt = t21.p_value(21).powi(2) + t21.p_value(20).powi(2);
        assert!(rel(alt_denominator(&h, 20, 0.0).unwrap(), alt) < 1e-15);

        let f = turan_forms(&h, 50, 1.1).unwrap();
        assert!(f.max_relative_spread() < 1e-10);
        let p = CoefficientSequence::power(1.0, 1.0).unwrap();
        assert!(turan_forms(&p, 50, 0.5).unwrap().max_relative_spread() < 1e-10);
        assert!(turan_forms(&h, 20, 0.7).unwrap().max_relative_spread() < 1e-10);
    }

    #[test]
    fn turan_n1_hand_expansion() {
        // n = 1: P_1^2 - (b_0/b_1) P_0 P_2 with P_2 = ((x-a_1)P_1 - b_0)/b_1
        let s = CoefficientSequence::polynomial(1.0, 0.3, 0.7, 1.2).unwrap();
        let (a0, b0) = s.coeff(0).unwrap();
        let (a1, b1) = s.coeff(1).unwrap();
        for x in [-1.0, a1, 0.4, 2.5] {
            let p1 = (x - a0) / b0;
            let p2 = ((x - a1) * p1 - b0) / b1;
            let want = p1 * p1 - b0 / b1 * p2;
            assert!(rel(turan_determinant(&s, 1, x).unwrap(), want) < 1e-13);
        }
    }

    #[test]
    fn sweep_matches_single_evaluations() {
        let h = CoefficientSequence::hermite();
        let w = h.window(60).unwrap();
        let sweep = turan_forms_sweep(&w, 0.9).unwrap();
        for n in [1, 7, 30, 60] {
            let single = turan_forms(&h, n, 0.9).unwrap();
            assert!(rel(sweep[n].determinant_value(), single.determinant_value()) < 1e-15);
        }
    }

    #[test]
    fn hermite_odd_vanish_at_zero() {
        let h = CoefficientSequence::hermite();
        let t = eval_pq(&h, 401, 0.0).unwrap();
        for k in (1..=401).step_by(2) {
            assert_eq!(t.p_value(k), 0.0);
        }
    }

    #[test]
    fn table_end_is_reported() {
        let t = CoefficientSequence::from_table(vec![(0.0, 1.0); 4]).unwrap();
        assert!(eval_pq(&t, 4, 0.1).is_ok());
        assert!(matches!(
            eval_pq(&t, 5, 0.1),
            Err(Error::IndexBeyondTable { .. })
        ));
        assert!(turan_determinant(&t, 3, 0.1).is_ok());
        assert!(turan_determinant(&t, 4, 0.1).is_err());
    }
}
