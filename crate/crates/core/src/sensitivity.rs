//! ℓ1/ℓ2 sensitivity bounds for the supported aggregates in the bounded
//! (change-one) neighbouring model: two datasets of equal size `n` that
//! differ in exactly one record.
//!
//! | query    | bound                |
//! |----------|----------------------|
//! | count    | 1                    |
//! | sum      | M − m                |
//! | mean     | (M − m)/n            |
//! | variance | (n − 1)/n² · (M − m)² |
//!
//! For scalar outputs the ℓ1 and ℓ2 bounds coincide.
//!
//! Under change-one the number of rows never changes, so the literal row count
//! has sensitivity 0. Count is treated as a predicate count (one substitution
//! moves at most one record into or out of the counted cell) and keeps
//! sensitivity 1. [`brute_force_sensitivity`] reports the literal row-count
//! behaviour, which is why it returns 0 for [`QueryKind::Count`].
//!
//! The variance bound holds for the `1/n` (population) variance, for which
//! it is tight; it does *not* bound the `1/(n−1)` sample variance (at n = 2,
//! `[0, 0] → [0, 1]` moves `s²` by 0.5 against a bound of 0.25). Variance
//! queries therefore noise the `1/n` statistic and release the sample variance
//! by multiplying with the public factor `n/(n−1)`, which is post-processing.
//! [`QueryKind::noised_statistic`] and [`QueryKind::release_scale`] describe
//! that split, and [`brute_force_sensitivity`] checks the noised statistic.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Declared data domain `[lower, upper]` with `lower < upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDomain")]
pub struct BoundedDomain {
    lower: f64,
    upper: f64,
}

#[derive(Deserialize)]
struct RawDomain {
    lower: f64,
    upper: f64,
}

impl TryFrom<RawDomain> for BoundedDomain {
    type Error = Error;

    fn try_from(raw: RawDomain) -> Result<Self> {
        Self::new(raw.lower, raw.upper)
    }
}

impl BoundedDomain {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if lower.is_finite() && upper.is_finite() && lower < upper {
            Ok(Self { lower, upper })
        } else {
            Err(Error::InvalidDomain { lower, upper })
        }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lower, self.upper)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryKind {
    Count,
    Sum,
    Mean,
    Variance,
}

impl QueryKind {
    pub const ALL: [QueryKind; 4] = [Self::Count, Self::Sum, Self::Mean, Self::Variance];

    pub fn name(self) -> &'static str {
        match self {
            Self::Count => "count",
            Self::Sum => "sum",
            Self::Mean => "mean",
            Self::Variance => "variance",
        }
    }

    /// Fewest rows the query is defined for.
    pub fn min_rows(self) -> usize {
        match self {
            Self::Variance => 2,
            _ => 1,
        }
    }

    /// Non-private value of the aggregate.
    pub fn evaluate(self, values: &[f64]) -> Result<f64> {
        let stat = self.noised_statistic(values)?;
        Ok(stat * self.release_scale(values.len()))
    }

    /// The statistic the mechanism adds noise to. Equal to [`Self::evaluate`]
    /// except for variance, where it is the `1/n` variance.
    pub fn noised_statistic(self, values: &[f64]) -> Result<f64> {
        let n = values.len();
        if n == 0 {
            return Err(Error::EmptyColumn);
        }
        if n < self.min_rows() {
            return Err(Error::NotEnoughRows {
                required: self.min_rows(),
                actual: n,
            });
        }
        Ok(match self {
            Self::Count => n as f64,
            Self::Sum => values.iter().sum(),
            Self::Mean => mean(values),
            Self::Variance => population_variance(values),
        })
    }

    /// Public factor mapping the noised statistic to the released aggregate.
    pub fn release_scale(self, n: usize) -> f64 {
        match self {
            Self::Variance if n >= 2 => n as f64 / (n - 1) as f64,
            _ => 1.0,
        }
    }
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QueryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "count" => Ok(Self::Count),
            "sum" => Ok(Self::Sum),
            "mean" => Ok(Self::Mean),
            "var" | "variance" => Ok(Self::Variance),
            other => Err(Error::InvalidParameter(alloc::format!(
                "unknown query kind {other:?}"
            ))),
        }
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn population_variance(values: &[f64]) -> f64 {
    let m = mean(values);
    let ss: f64 = values.iter().map(|x| (x - m) * (x - m)).sum();
    ss / values.len() as f64
}

pub fn count_sensitivity() -> f64 {
    1.0
}

pub fn sum_sensitivity(d: &BoundedDomain) -> f64 {
    d.width()
}

pub fn mean_sensitivity(d: &BoundedDomain, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::NotEnoughRows {
            required: 1,
            actual: 0,
        });
    }
    Ok(d.width() / n as f64)
}

pub fn variance_sensitivity(d: &BoundedDomain, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::NotEnoughRows {
            required: 2,
            actual: n,
        });
    }
    let n = n as f64;
    let w = d.width();
    Ok((n - 1.0) / (n * n) * w * w)
}

/// Closed-form sensitivity of `kind` on `n` rows drawn from `d`. Count ignores `d` and `n`.
pub fn sensitivity_for(kind: QueryKind, d: &BoundedDomain, n: usize) -> Result<f64> {
    match kind {
        QueryKind::Count => Ok(count_sensitivity()),
        QueryKind::Sum => Ok(sum_sensitivity(d)),
        QueryKind::Mean => mean_sensitivity(d, n),
        QueryKind::Variance => variance_sensitivity(d, n),
    }
}

/// Largest number of datasets [`brute_force_sensitivity`] will enumerate.
pub const MAX_ENUMERATION: u128 = 1_000_000;

/// Exhaustive change-one sensitivity over datasets of size `n` with values in `grid`.
///
/// Every dataset in `gridⁿ` is paired with every single-position substitution
/// from `grid`; the largest `|f(D) − f(D′)|` is returned, where `f` is the
/// statistic the query noises ([`QueryKind::noised_statistic`]).
pub fn brute_force_sensitivity(
    kind: QueryKind,
    d: &BoundedDomain,
    n: usize,
    grid: &[f64],
) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("grid is empty".into()));
    }
    if let Some(v) = grid.iter().find(|v| !d.contains(**v)) {
        return Err(Error::InvalidParameter(alloc::format!(
            "grid value {v} lies outside [{}, {}]",
            d.lower(),
            d.upper()
        )));
    }
    if n < kind.min_rows() {
        return Err(Error::NotEnoughRows {
            required: kind.min_rows(),
            actual: n,
        });
    }
    let datasets = (grid.len() as u128)
        .checked_pow(n as u32)
        .unwrap_or(u128::MAX);
    if datasets > MAX_ENUMERATION {
        return Err(Error::InfeasibleEnumeration(datasets));
    }

    let k = grid.len();
    let mut digits = vec![0usize; n];
    let mut data: Vec<f64> = vec![grid[0]; n];
    let mut neighbour = data.clone();
    let mut worst: f64 = 0.0;
    loop {
        for (slot, &g) in data.iter_mut().zip(&digits) {
            *slot = grid[g];
        }
        let base = kind.noised_statistic(&data)?;
        for i in 0..n {
            neighbour.copy_from_slice(&data);
            for &g in grid {
                neighbour[i] = g;
                let diff = (kind.noised_statistic(&neighbour)? - base).abs();
                worst = worst.max(diff);
            }
        }
        // Odometer increment over gridⁿ.
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(worst);
            }
            digits[pos] += 1;
            if digits[pos] < k {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}
