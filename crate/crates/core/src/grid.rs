//! Uniform real grids written as `lo:hi:count`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidArgument("grid bounds must be finite".into()));
        }
        if count == 0 || (count == 1 && lo != hi) || (count > 1 && !(lo < hi)) {
            return Err(Error::InvalidArgument(format!(
                "bad grid {lo}:{hi}:{count}"
            )));
        }
        Ok(Grid { lo, hi, count })
    }

    /// Points `lo + (hi - lo) i / (count - 1)`; endpoints are hit exactly.
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == self.count - 1 {
                    self.hi
                } else {
                    self.lo + (self.hi - self.lo) * (i as f64 / last)
                }
            })
            .collect()
    }

    pub fn spacing(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.hi - self.lo) / (self.count - 1) as f64
        }
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::InvalidArgument(format!("grid `{s}` is not of the form lo:hi:count"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo = parts[0].trim().parse::<f64>().map_err(|_| bad())?;
        let hi = parts[1].trim().parse::<f64>().map_err(|_| bad())?;
        let count = parts[2].trim().parse::<usize>().map_err(|_| bad())?;
        Grid::new(lo, hi, count)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.count)
    }
}
