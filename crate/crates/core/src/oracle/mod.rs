//! Brute-force ground truth from finite truncations of the Jacobi matrix.

pub mod eigen;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coefficients::CoefficientSequence;
use crate::error::{Error, Result};

/// Spectral measure of the `N x N` truncation at the first basis vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralMeasureDiscrete {
    /// Eigenvalues, ascending.
    pub nodes: Vec<f64>,
    /// Squared first components of the normalized eigenvectors.
    pub weights: Vec<f64>,
}

impl SpectralMeasureDiscrete {
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `sum_i w_i lambda_i^k`.
    pub fn moment(&self, k: i32) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(l, w)| w * l.powi(k))
            .sum()
    }

    /// Mass of `(-inf, x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        let end = self.nodes.partition_point(|&l| l <= x);
        self.weights[..end].iter().sum()
    }

    /// Mass of `[lo, x]`.
    fn mass_between(&self, lo: f64, x: f64) -> f64 {
        let start = self.nodes.partition_point(|&l| l < lo);
        let end = self.nodes.partition_point(|&l| l <= x);
        if end <= start {
            0.0
        } else {
            self.weights[start..end].iter().sum()
        }
    }
}

/// Eigen-decomposition of the truncation `(a_k, b_k)`, `k < size`.
pub fn truncation_measure(
    seq: &CoefficientSequence,
    size: usize,
) -> Result<SpectralMeasureDiscrete> {
    if size == 0 {
        return Err(Error::InvalidArgument(
            "truncation size must be at least 1".into(),
        ));
    }
    let w = seq.window(size - 1)?;
    let mut d = w.a;
    let mut e = w.b;
    let mut z = vec![0.0; size];
    z[0] = 1.0;
    eigen::tql_first_row(&mut d, &mut e, &mut z)?;
    let mut pairs: Vec<(f64, f64)> = d.into_iter().zip(z.into_iter().map(|v| v * v)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (nodes, weights) = pairs.into_iter().unzip();
    Ok(SpectralMeasureDiscrete { nodes, weights })
}

/// `((T_N - lambda)^{-1})_{00}` by Gaussian elimination on the tridiagonal system.
pub fn dense_resolvent(
    seq: &CoefficientSequence,
    size: usize,
    lambda: Complex64,
) -> Result<Complex64> {
    if size == 0 {
        return Err(Error::InvalidArgument(
            "truncation size must be at least 1".into(),
        ));
    }
    let w = seq.window(size - 1)?;
    // forward sweep: pivots and the transformed right-hand side of e_0
    let mut pivots = Vec::with_capacity(size);
    let mut rhs = Vec::with_capacity(size);
    for k in 0..size {
        let mut pivot = Complex64::new(w.a[k], 0.0) - lambda;
        let mut r = if k == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
        if k > 0 {
            let m = w.b[k - 1] / pivots[k - 1];
            pivot -= m * w.b[k - 1];
            r -= m * rhs[k - 1];
        }
        if pivot == Complex64::new(0.0, 0.0) || !pivot.is_finite() {
            return Err(Error::SingularSystem { row: k });
        }
        pivots.push(pivot);
        rhs.push(r);
    }
    let mut x = rhs[size - 1] / pivots[size - 1];
    for k in (0..size - 1).rev() {
        x = (rhs[k] - w.b[k] * x) / pivots[k];
    }
    Ok(x)
}

/// `sup |F(x) - G(x)|` over the curve points, where `F` is the measure's CDF
/// and `G` the sampled distribution function, both renormalized to the mass
/// of `[xs[0], xs[last]]`.
pub fn kolmogorov_distance(
    measure: &SpectralMeasureDiscrete,
    xs: &[f64],
    sigma: &[f64],
) -> Result<f64> {
    if xs.len() != sigma.len() || xs.len() < 2 {
        return Err(Error::RangeMismatch(format!(
            "curve needs at least two points and matching lengths (got {} and {})",
            xs.len(),
            sigma.len()
        )));
    }
    if xs.windows(2).any(|p| !(p[0] < p[1])) {
        return Err(Error::RangeMismatch(
            "curve points must be strictly increasing".into(),
        ));
    }
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    let measure_mass = measure.mass_between(lo, hi);
    if !(measure_mass > 0.0) {
        return Err(Error::RangeMismatch(format!(
            "no truncation node lies in [{lo}, {hi}]"
        )));
    }
    let curve_mass = sigma[sigma.len() - 1] - sigma[0];
    if !(curve_mass > 0.0) {
        return Err(Error::RangeMismatch(format!(
            "distribution curve carries no mass on [{lo}, {hi}]"
        )));
    }
    // the curve's mass at xs[0] itself is invisible; count nodes from just above lo
    let at_lo = measure.mass_between(lo, lo);
    Ok(xs
        .iter()
        .zip(sigma)
        .map(|(&x, &s)| {
            let f = (measure.mass_between(lo, x) - at_lo)
                / (measure_mass - at_lo).max(f64::MIN_POSITIVE);
            let g = (s - sigma[0]) / curve_mass;
            (f - g).abs()
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::sigma_n;
    use crate::contfrac::constant_tail_k;
    use crate::grid::Grid;

    #[test]
    fn tiny_truncations() {
        let c = CoefficientSequence::constant(5.0, 1.0).unwrap();
        let m = truncation_measure(&c, 1).unwrap();
        assert_eq!((m.nodes.clone(), m.weights.clone()), (vec![5.0], vec![1.0]));
        let half = CoefficientSequence::constant(0.0, 0.5).unwrap();
        let m = truncation_measure(&half, 2).unwrap();
        for (l, w) in m.nodes.iter().zip(&m.weights) {
            assert!((l.abs() - 0.5).abs() < 1e-15 && (w - 0.5).abs() < 1e-15);
        }
        let lambda = Complex64::new(0.3, 0.7);
        let r = dense_resolvent(&c, 1, lambda).unwrap();
        assert!((r - 1.0 / (5.0 - lambda)).norm() < 1e-15);
    }

    #[test]
    fn moments_match_matrix_entries() {
        let h = CoefficientSequence::power(0.5, 1.3).unwrap();
        let m = truncation_measure(&h, 300).unwrap();
        let (a0, b0) = h.coeff(0).unwrap();
        assert!((m.total_mass() - 1.0).abs() < 1e-10);
        assert!((m.moment(1) - a0).abs() < 1e-10);
        assert!((m.moment(2) - (a0 * a0 + b0 * b0)).abs() < 1e-10);
        assert!(m.nodes.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn resolvent_of_semicircle() {
        let c = CoefficientSequence::constant(0.0, 0.5).unwrap();
        let i = Complex64::new(0.0, 1.0);
        let r = dense_resolvent(&c, 5000, i).unwrap();
        let k = constant_tail_k(0.0, 0.5, i).unwrap();
        assert!((r - k).norm() < 1e-6, "{r} {k}");
        assert!((r.im - 0.828427).abs() < 1e-6);
    }

    #[test]
    fn distance_to_own_cdf_is_zero() {
        let c = CoefficientSequence::hermite();
        let m = truncation_measure(&c, 50).unwrap();
        let xs = Grid::new(-3.0, 3.0, 101).unwrap().points();
        let sigma: Vec<f64> = xs.iter().map(|&x| m.cdf(x)).collect();
        assert!(kolmogorov_distance(&m, &xs, &sigma).unwrap() < 1e-14);
        assert!(matches!(
            kolmogorov_distance(&m, &[100.0, 101.0], &[0.0, 1.0]),
            Err(Error::RangeMismatch(_))
        ));
    }

    #[test]
    fn semicircle_truncation_matches_weight() {
        let c = CoefficientSequence::constant(0.0, 0.5).unwrap();
        let m = truncation_measure(&c, 2000).unwrap();
        let xs = Grid::new(-1.0, 1.0, 401).unwrap().points();
        let s = sigma_n(&c, 10, -1.0, &xs).unwrap();
        assert!(kolmogorov_distance(&m, &xs, &s.sigma).unwrap() <= 0.01);
    }
}
