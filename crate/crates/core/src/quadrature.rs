//! Adaptive 7/15-point Gauss-Kronrod quadrature.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Gauss weights for the odd-indexed Kronrod nodes (and the centre).
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

fn kronrod<F: FnMut(f64) -> Result<f64>>(f: &mut F, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let fc = f(c)?;
    let mut gauss = fc * WG[3];
    let mut kron = fc * WGK[7];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x)? + f(c + x)?;
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Ok((kron * h, ((kron - gauss) * h).abs()))
}

struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrate `f` over `[lo, hi]`, bisecting the worst panel until the summed
/// error estimate drops below `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if lo == hi {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    if lo > hi {
        let r = integrate(f, hi, lo, abs_tol, rel_tol, max_panels)?;
        return Ok(QuadResult {
            value: -r.value,
            ..r
        });
    }
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::QuadratureFailure {
            lo,
            hi,
            reason: "infinite limits".into(),
        });
    }
    let (value, error) = kronrod(&mut f, lo, hi)?;
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        lo,
        hi,
        value,
        error,
    });
    let (mut total, mut total_err) = (value, error);
    loop {
        if !(total.is_finite() && total_err.is_finite()) {
            return Err(Error::QuadratureFailure {
                lo,
                hi,
                reason: "non-finite integrand".into(),
            });
        }
        if total_err <= abs_tol.max(rel_tol * total.abs()) {
            break;
        }
        if heap.len() >= max_panels {
            return Err(Error::QuadratureFailure {
                lo,
                hi,
                reason: format!("error estimate {total_err:e} after {max_panels} panels"),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            return Err(Error::QuadratureFailure {
                lo,
                hi,
                reason: "panel width underflow".into(),
            });
        }
        let (lv, le) = kronrod(&mut f, worst.lo, mid)?;
        let (rv, re) = kronrod(&mut f, mid, worst.hi)?;
        evaluations += 30;
        heap.push(Panel {
            lo: worst.lo,
            hi: mid,
            value: lv,
            error: le,
        });
        heap.push(Panel {
            lo: mid,
            hi: worst.hi,
            value: rv,
            error: re,
        });
        // full re-summation: incremental updates cancel badly after a huge first estimate
        total = heap.iter().map(|p| p.value).sum();
        total_err = heap.iter().map(|p| p.error).sum();
    }
    // re-add in a fixed order so the result does not depend on heap history
    let mut panels = heap.into_vec();
    panels.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let value = panels.iter().map(|p| p.value).sum();
    let error = panels.iter().map(|p| p.error).sum();
    Ok(QuadResult {
        value,
        error,
        evaluations,
    })
}
