//! Test-only access to values that a release never exposes.
//!
//! Compiled only with the `test-hooks` feature. Statistical tests use it to
//! check noise calibration before clamping and rounding.

use crate::column::NumericColumn;
use crate::error::Result;
use crate::mechanisms::laplace_mechanism;
use crate::queries::{prepare, resolve_bounds, QuerySpec};
use crate::rng::UniformSource;

/// One trial of a query, with the values a release withholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnreleasedTrial {
    /// Non-private aggregate over the (clamped) inputs.
    pub true_value: f64,
    /// `true_value` plus Laplace noise, before output clamping and rounding.
    pub noisy_unclamped: f64,
    /// Sensitivity of the noised statistic.
    pub sensitivity: f64,
    /// Public factor applied to the noised statistic on release.
    pub release_scale: f64,
}

/// Runs one trial of `spec` (bounds inferred if absent) and exposes the pre-clamp value.
pub fn unreleased_trial<U: UniformSource + ?Sized>(
    column: &NumericColumn,
    spec: &QuerySpec,
    rng: &mut U,
) -> Result<UnreleasedTrial> {
    let (spec, _) = resolve_bounds(column, spec)?;
    let p = prepare(column.values(), &spec)?;
    let noisy = laplace_mechanism(p.statistic, p.sensitivity, &p.params, rng)?;
    Ok(UnreleasedTrial {
        true_value: p.true_value(),
        noisy_unclamped: noisy * p.scale,
        sensitivity: p.sensitivity,
        release_scale: p.scale,
    })
}
