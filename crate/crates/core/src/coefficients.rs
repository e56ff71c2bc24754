//! Jacobi coefficient sequences `(a_k, b_k)`, their band intervals and the
//! self-adjointness diagnostic.

use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trend::{partial_sum_trend, SeriesTrend};

type CoefficientFn = dyn Fn(usize) -> (f64, f64) + Send + Sync;

/// Source of the diagonal `a_k` and off-diagonal `b_k` entries.
#[derive(Clone)]
pub enum Family {
    /// `a_k = a`, `b_k = b`.
    Constant { a: f64, b: f64 },
    /// `a_k = 0`, `b_k = sqrt((k+1)/2)`.
    Hermite,
    /// `a_k = 0`, `b_k = scale * (k+1)^exponent`.
    Power { exponent: f64, scale: f64 },
    /// `a_k = 0`, `b_0 = b0`, `b_{2k-1} = b_{2k} = b0 * ratio^k`.
    Paired { b0: f64, ratio: f64 },
    /// `a_k = diag_scale * (k+1)^diag_exponent`, `b_k = scale * (k+1)^exponent`.
    Polynomial {
        diag_exponent: f64,
        diag_scale: f64,
        exponent: f64,
        scale: f64,
    },
    /// Finite table loaded from a `.jcoef.csv` file.
    Table(Arc<[(f64, f64)]>),
    /// Arbitrary closure.
    Custom(Arc<CoefficientFn>),
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Table(rows) => write!(f, "Table(len = {})", rows.len()),
            Family::Custom(_) => write!(f, "Custom(..)"),
            other => write!(
                f,
                "{}",
                CoefficientSequence::new_unchecked(other.clone()).label()
            ),
        }
    }
}

/// Known limit behaviour of a preset; `None` when only finite data exists.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalyticFacts {
    /// `sum 1/b_n = infinity` (Carleman).
    pub reciprocal_sum_diverges: Option<bool>,
    /// `sum 1/b_n^2 < infinity`.
    pub reciprocal_square_sum_converges: Option<bool>,
    /// `sum (a_n/b_n)^2 < infinity`.
    pub diag_ratio_square_sum_converges: Option<bool>,
    /// `b_n -> infinity`.
    pub offdiag_unbounded: Option<bool>,
    /// `|a_n| -> infinity`.
    pub diag_unbounded: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct CoefficientSequence {
    family: Family,
}

/// `I_n = [a_n - 2 b_n, a_n + 2 b_n]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandInterval {
    pub n: usize,
    pub lo: f64,
    pub hi: f64,
}

impl BandInterval {
    pub fn from_coefficients(n: usize, a: f64, b: f64) -> Self {
        BandInterval {
            n,
            lo: a - 2.0 * b,
            hi: a + 2.0 * b,
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains_closed(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_open(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
}

/// Coefficients `a_0..=a_n`, `b_0..=b_n` materialized for fast sweeps.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientWindow {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl CoefficientWindow {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Largest index available.
    pub fn top(&self) -> usize {
        self.a.len() - 1
    }

    pub fn band(&self, n: usize) -> BandInterval {
        BandInterval::from_coefficients(n, self.a[n], self.b[n])
    }

    /// `b_{k-1}` with the convention `b_{-1} = 0`.
    pub fn b_before(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.b[k - 1]
        }
    }

    pub fn diagonal_is_zero(&self) -> bool {
        self.a.iter().all(|&a| a == 0.0)
    }
}

/// Result of [`CoefficientSequence::centered_check`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenteredReport {
    pub interval: (f64, f64),
    pub n_start: usize,
    pub n_end: usize,
    pub margin: f64,
    /// First `N0` in range such that the interval sits strictly inside
    /// `I_n` for every `n` in `N0..=n_end`.
    pub centered_from: Option<usize>,
}

impl CenteredReport {
    pub fn is_centered(&self) -> bool {
        self.centered_from.is_some()
    }
}

/// Result of [`CoefficientSequence::carleman_diagnostic`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CarlemanReport {
    pub terms: usize,
    pub partial_sum: f64,
    pub trend: SeriesTrend,
    /// Known divergence of `sum 1/b_n` for presets.
    pub analytic_divergent: Option<bool>,
}

impl CoefficientSequence {
    fn new_unchecked(family: Family) -> Self {
        CoefficientSequence { family }
    }

    pub fn constant(a: f64, b: f64) -> Result<Self> {
        Self::from_family(Family::Constant { a, b })
    }

    pub fn hermite() -> Self {
        CoefficientSequence {
            family: Family::Hermite,
        }
    }

    pub fn power(exponent: f64, scale: f64) -> Result<Self> {
        Self::from_family(Family::Power { exponent, scale })
    }

    pub fn paired(b0: f64, ratio: f64) -> Result<Self> {
        Self::from_family(Family::Paired { b0, ratio })
    }

    pub fn polynomial(
        diag_exponent: f64,
        diag_scale: f64,
        exponent: f64,
        scale: f64,
    ) -> Result<Self> {
        Self::from_family(Family::Polynomial {
            diag_exponent,
            diag_scale,
            exponent,
            scale,
        })
    }

    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(usize) -> (f64, f64) + Send + Sync + 'static,
    {
        CoefficientSequence {
            family: Family::Custom(Arc::new(f)),
        }
    }

    pub fn from_table(rows: Vec<(f64, f64)>) -> Result<Self> {
        for (k, &(a, b)) in rows.iter().enumerate() {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::NonFiniteCoefficient { k });
            }
            if b <= 0.0 {
                return Err(Error::NonPositiveOffDiagonal { k, b });
            }
        }
        Ok(CoefficientSequence {
            family: Family::Table(rows.into()),
        })
    }

    pub fn from_family(family: Family) -> Result<Self> {
        let invalid = |family: &str, reason: &str| Error::InvalidParams {
            family: family.to_string(),
            reason: reason.to_string(),
        };
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match &family {
            Family::Constant { a, b } => {
                if !finite(&[*a, *b]) {
                    return Err(invalid("constant", "parameters must be finite"));
                }
                if *b <= 0.0 {
                    return Err(invalid("constant", "b must be positive"));
                }
            }
            Family::Power { exponent, scale } => {
                if !finite(&[*exponent, *scale]) || *scale <= 0.0 {
                    return Err(invalid("power", "scale must be positive and finite"));
                }
            }
            Family::Paired { b0, ratio } => {
                if !finite(&[*b0, *ratio]) || *b0 <= 0.0 || *ratio <= 0.0 {
                    return Err(invalid("paired", "b0 and ratio must be positive"));
                }
            }
            Family::Polynomial {
                diag_exponent,
                diag_scale,
                exponent,
                scale,
            } => {
                if !finite(&[*diag_exponent, *diag_scale, *exponent, *scale]) || *scale <= 0.0 {
                    return Err(invalid("poly", "off-diagonal scale must be positive"));
                }
            }
            Family::Table(rows) => return Self::from_table(rows.to_vec()),
            Family::Hermite | Family::Custom(_) => {}
        }
        Ok(CoefficientSequence { family })
    }

    /// Build a preset by name: `constant(a,b)`, `hermite`, `power(exponent,scale)`,
    /// `paired(b0,ratio)` and `poly(diag_exponent,diag_scale,exponent,scale)`.
    pub fn preset(kind: &str, params: &[f64]) -> Result<Self> {
        let arity = |n: usize| -> Result<()> {
            if params.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidParams {
                    family: kind.to_string(),
                    reason: format!("expected {n} parameters, got {}", params.len()),
                })
            }
        };
        match kind {
            "constant" => {
                arity(2)?;
                Self::constant(params[0], params[1])
            }
            "hermite" => {
                arity(0)?;
                Ok(Self::hermite())
            }
            "power" => {
                arity(2)?;
                Self::power(params[0], params[1])
            }
            "paired" => match params.len() {
                1 => Self::paired(1.0, params[0]),
                _ => {
                    arity(2)?;
                    Self::paired(params[0], params[1])
                }
            },
            "paired-growing" => {
                arity(0)?;
                Self::paired(1.0, 2.0)
            }
            "poly" => {
                arity(4)?;
                Self::polynomial(params[0], params[1], params[2], params[3])
            }
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }

    /// Parse a family spec such as `constant:0,0.5`, `hermite`, `power:1,1`,
    /// `paired:2` or `table:path/to/file.jcoef.csv`.
    pub fn parse_spec(spec: &str) -> Result<Self> {
        let (kind, rest) = match spec.split_once(':') {
            Some((k, r)) => (k.trim(), Some(r.trim())),
            None => (spec.trim(), None),
        };
        if kind == "table" {
            let path = rest
                .filter(|p| !p.is_empty())
                .ok_or_else(|| Error::InvalidParams {
                    family: "table".into(),
                    reason: "missing path".into(),
                })?;
            return Self::load_table_file(path);
        }
        let params = match rest {
            None | Some("") => Vec::new(),
            Some(r) => r
                .split(',')
                .map(|t| {
                    t.trim().parse::<f64>().map_err(|_| Error::InvalidParams {
                        family: kind.to_string(),
                        reason: format!("cannot parse `{t}` as a number"),
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        };
        Self::preset(kind, &params)
    }

    pub fn load_table_file(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::load_table(file)
    }

    /// Read the headerless `a_k,b_k` CSV format, one row per `k`.
    pub fn load_table<R: Read>(stream: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(stream);
        let mut rows = Vec::new();
        for (idx, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::TableParse {
                line: idx + 1,
                reason: e.to_string(),
            })?;
            if record.len() != 2 {
                return Err(Error::TableParse {
                    line: idx + 1,
                    reason: format!("expected 2 fields, found {}", record.len()),
                });
            }
            let field = |i: usize| -> Result<f64> {
                record[i].parse::<f64>().map_err(|_| Error::TableParse {
                    line: idx + 1,
                    reason: format!("cannot parse `{}`", &record[i]),
                })
            };
            rows.push((field(0)?, field(1)?));
        }
        if rows.is_empty() {
            return Err(Error::TableParse {
                line: 0,
                reason: "empty table".into(),
            });
        }
        Self::from_table(rows)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Number of defined indices, `None` for infinite sequences.
    pub fn len(&self) -> Option<usize> {
        match &self.family {
            Family::Table(rows) => Some(rows.len()),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// Short human-readable description used in report metadata.
    pub fn label(&self) -> String {
        match &self.family {
            Family::Constant { a, b } => format!("constant:{a},{b}"),
            Family::Hermite => "hermite".into(),
            Family::Power { exponent, scale } => format!("power:{exponent},{scale}"),
            Family::Paired { b0, ratio } => format!("paired:{b0},{ratio}"),
            Family::Polynomial {
                diag_exponent,
                diag_scale,
                exponent,
                scale,
            } => {
                format!("poly:{diag_exponent},{diag_scale},{exponent},{scale}")
            }
            Family::Table(rows) => format!("table[{}]", rows.len()),
            Family::Custom(_) => "custom".into(),
        }
    }

    /// `(a_k, b_k)`; the same `k` always yields bit-identical values.
    pub fn coeff(&self, k: usize) -> Result<(f64, f64)> {
        let kf = (k + 1) as f64;
        let (a, b) = match &self.family {
            Family::Constant { a, b } => (*a, *b),
            Family::Hermite => (0.0, (0.5 * kf).sqrt()),
            Family::Power { exponent, scale } => (0.0, scale * kf.powf(*exponent)),
            Family::Paired { b0, ratio } => {
                let level = k.div_ceil(2);
                (0.0, b0 * ratio.powi(level as i32))
            }
            Family::Polynomial {
                diag_exponent,
                diag_scale,
                exponent,
                scale,
            } => (
                diag_scale * kf.powf(*diag_exponent),
                scale * kf.powf(*exponent),
            ),
            Family::Table(rows) => {
                return rows
                    .get(k)
                    .copied()
                    .ok_or(Error::IndexBeyondTable { k, len: rows.len() })
            }
            Family::Custom(f) => f(k),
        };
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::NonFiniteCoefficient { k });
        }
        if b <= 0.0 {
            return Err(Error::NonPositiveOffDiagonal { k, b });
        }
        Ok((a, b))
    }

    pub fn a(&self, k: usize) -> Result<f64> {
        self.coeff(k).map(|c| c.0)
    }

    pub fn b(&self, k: usize) -> Result<f64> {
        self.coeff(k).map(|c| c.1)
    }

    /// Materialize `(a_k, b_k)` for `k = 0..=n`.
    pub fn window(&self, n: usize) -> Result<CoefficientWindow> {
        let mut a = Vec::with_capacity(n + 1);
        let mut b = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let (ak, bk) = self.coeff(k)?;
            a.push(ak);
            b.push(bk);
        }
        Ok(CoefficientWindow { a, b })
    }

    pub fn band_interval(&self, n: usize) -> Result<BandInterval> {
        let (a, b) = self.coeff(n)?;
        Ok(BandInterval::from_coefficients(n, a, b))
    }

    /// Find the first `N0` in `n_start..=n_end` from which `[lo, hi]` lies in the
    /// open interior of every `I_n` (shrunk by `margin` on both sides).
    pub fn centered_check(
        &self,
        interval: (f64, f64),
        n_start: usize,
        n_end: usize,
        margin: f64,
    ) -> Result<CenteredReport> {
        let (lo, hi) = interval;
        if !(lo < hi) {
            return Err(Error::InvalidArgument(format!(
                "interval [{lo}, {hi}] is empty"
            )));
        }
        if n_start > n_end {
            return Err(Error::InvalidArgument(format!(
                "n_start {n_start} > n_end {n_end}"
            )));
        }
        let mut centered_from = None;
        for n in (n_start..=n_end).rev() {
            let band = self.band_interval(n)?;
            if band.lo + margin < lo && hi < band.hi - margin {
                centered_from = Some(n);
            } else {
                break;
            }
        }
        Ok(CenteredReport {
            interval,
            n_start,
            n_end,
            margin,
            centered_from,
        })
    }

    /// Partial sum `S_N = sum_{k<N} 1/b_k` with a window trend and, for
    /// presets, the known analytic verdict.
    pub fn carleman_diagnostic(&self, terms: usize) -> Result<CarlemanReport> {
        if terms == 0 {
            return Err(Error::InvalidArgument(
                "carleman diagnostic needs N >= 1".into(),
            ));
        }
        let mut sums = Vec::with_capacity(terms);
        let mut s = 0.0;
        for k in 0..terms {
            s += 1.0 / self.b(k)?;
            sums.push(s);
        }
        Ok(CarlemanReport {
            terms,
            partial_sum: s,
            trend: partial_sum_trend(&sums),
            analytic_divergent: self.analytic().reciprocal_sum_diverges,
        })
    }

    pub fn analytic(&self) -> AnalyticFacts {
        // sum (k+1)^(-p) converges iff p > 1
        let p_series = |p: f64| p > 1.0;
        match &self.family {
            Family::Constant { a, .. } => AnalyticFacts {
                reciprocal_sum_diverges: Some(true),
                reciprocal_square_sum_converges: Some(false),
                diag_ratio_square_sum_converges: Some(*a == 0.0),
                offdiag_unbounded: Some(false),
                diag_unbounded: Some(false),
            },
            Family::Hermite => AnalyticFacts {
                reciprocal_sum_diverges: Some(true),
                reciprocal_square_sum_converges: Some(false),
                diag_ratio_square_sum_converges: Some(true),
                offdiag_unbounded: Some(true),
                diag_unbounded: Some(false),
            },
            Family::Power { exponent, .. } => AnalyticFacts {
                reciprocal_sum_diverges: Some(!p_series(*exponent)),
                reciprocal_square_sum_converges: Some(p_series(2.0 * exponent)),
                diag_ratio_square_sum_converges: Some(true),
                offdiag_unbounded: Some(*exponent > 0.0),
                diag_unbounded: Some(false),
            },
            Family::Paired { ratio, .. } => AnalyticFacts {
                reciprocal_sum_diverges: Some(*ratio <= 1.0),
                reciprocal_square_sum_converges: Some(*ratio > 1.0),
                diag_ratio_square_sum_converges: Some(true),
                offdiag_unbounded: Some(*ratio > 1.0),
                diag_unbounded: Some(false),
            },
            Family::Polynomial {
                diag_exponent,
                diag_scale,
                exponent,
                ..
            } => {
                let zero_diag = *diag_scale == 0.0;
                AnalyticFacts {
                    reciprocal_sum_diverges: Some(!p_series(*exponent)),
                    reciprocal_square_sum_converges: Some(p_series(2.0 * exponent)),
                    diag_ratio_square_sum_converges: Some(
                        zero_diag || p_series(2.0 * (exponent - diag_exponent)),
                    ),
                    offdiag_unbounded: Some(*exponent > 0.0),
                    diag_unbounded: Some(!zero_diag && *diag_exponent > 0.0),
                }
            }
            Family::Table(_) | Family::Custom(_) => AnalyticFacts::default(),
        }
    }
}

impl FromStr for CoefficientSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_spec(s)
    }
}
