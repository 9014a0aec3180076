//! Validated numeric columns and the bounds helpers that operate on them.

use alloc::string::String;
use alloc::vec::Vec;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sensitivity::BoundedDomain;

/// Half-width added on each side when inferred bounds collapse to a point.
pub const DEGENERATE_WIDENING: f64 = 0.5;

/// A named column of finite reals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericColumn {
    name: String,
    values: Vec<f64>,
}

impl NumericColumn {
    /// Rejects NaN and infinite values.
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!(
                "value {v} at index {i} is not finite"
            )));
        }
        Ok(Self {
            name: name.into(),
            values,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Bounds taken from the column's own min and max.
///
/// Data-derived bounds depend on the private data and are therefore not
/// differentially private; callers must surface a warning.
pub fn infer_bounds(c: &NumericColumn) -> Result<BoundedDomain> {
    infer_bounds_with_widening(c, DEGENERATE_WIDENING)
}

/// Like [`infer_bounds`], with a configurable widening for constant columns.
pub fn infer_bounds_with_widening(c: &NumericColumn, widening: f64) -> Result<BoundedDomain> {
    let mut it = c.values.iter().copied();
    let first = it.next().ok_or(Error::EmptyColumn)?;
    let (lo, hi) = it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo < hi {
        BoundedDomain::new(lo, hi)
    } else {
        BoundedDomain::new(lo - widening, hi + widening)
    }
}

pub fn clamp_to_bounds(c: &NumericColumn, d: &BoundedDomain) -> NumericColumn {
    NumericColumn {
        name: c.name.clone(),
        values: c.values.iter().map(|v| d.clamp(*v)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn col(v: &[f64]) -> NumericColumn {
        NumericColumn::new("x", v.to_vec()).unwrap()
    }

    #[test]
    fn rejects_non_finite() {
        assert!(NumericColumn::new("x", vec![1.0, f64::NAN]).is_err());
        assert!(NumericColumn::new("x", vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn infer_examples() {
        let d = infer_bounds(&col(&[18.0, 25.0, 90.0])).unwrap();
        assert_eq!((d.lower(), d.upper()), (18.0, 90.0));
        let d = infer_bounds(&col(&[5.0, 5.0, 5.0])).unwrap();
        assert_eq!((d.lower(), d.upper()), (4.5, 5.5));
        assert_eq!(infer_bounds(&col(&[])), Err(Error::EmptyColumn));
    }

    #[test]
    fn clamp_examples() {
        let d = BoundedDomain::new(18.0, 90.0).unwrap();
        let c = clamp_to_bounds(&col(&[10.0, 50.0, 100.0]), &d);
        assert_eq!(c.values(), &[18.0, 50.0, 90.0]);
        let inside = col(&[20.0, 30.0]);
        assert_eq!(clamp_to_bounds(&inside, &d), inside);
    }
}
