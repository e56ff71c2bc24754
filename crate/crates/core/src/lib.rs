//! Spectral data of self-adjoint Jacobi matrices: orthogonal polynomial
//! recurrences, continued-fraction resolvents, spectral weights of
//! constant-tail approximants and finite-window spectral diagnostics.

// `!(x > 0.0)` is used on purpose so that NaN takes the rejecting branch;
// quadrature nodes keep their published digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod approx;
pub mod cli;
pub mod coefficients;
pub mod contfrac;
pub mod criteria;
pub mod error;
pub mod grid;
pub mod io;
pub mod oracle;
pub mod polynomials;
pub mod quadrature;
pub mod scaled;
pub mod trend;

pub use coefficients::{BandInterval, CoefficientSequence, CoefficientWindow, Family};
pub use error::{Error, Result};
