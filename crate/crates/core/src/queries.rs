//! Differentially private aggregates built from the sensitivity calculus and
//! the bounded Laplace mechanism.
//!
//! Each query clamps its inputs into the declared domain (unless disabled),
//! computes the plain aggregate, adds Laplace noise scaled to the query's
//! sensitivity and clamps the noisy answer into the query's feasible range:
//!
//! | query    | sensitivity            | output range      |
//! |----------|------------------------|-------------------|
//! | count    | 1                      | [0, 2n], rounded  |
//! | sum      | M − m                  | [n·m, n·M]        |
//! | mean     | (M − m)/n              | [m, M]            |
//! | variance | (n − 1)/n² · (M − m)²  | [0, (M − m)²]     |
//!
//! Variance noises the `1/n` variance, which the bound above covers, and
//! releases the sample variance by rescaling with `n/(n−1)`.
//!
//! True aggregates never leave this module in a [`DpResult`].

use alloc::borrow::Cow;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::column::{infer_bounds, NumericColumn};
use crate::error::{Error, Result};
use crate::mechanisms::{bounded_laplace_mechanism, OutputRange, PrivacyParams};
use crate::rng::UniformSource;
use crate::sensitivity::{sensitivity_for, BoundedDomain, QueryKind};

/// Attached to every result whose bounds were taken from the data itself.
pub const INFERRED_BOUNDS_WARNING: &str = "bounds were inferred from the column's min and max; \
data-derived bounds are not differentially private and leak the extreme values";

/// Named privacy presets, strongest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrivacyLevel {
    VeryHigh,
    High,
    Moderate,
    Low,
    VeryLow,
}

/// Level → ε table, ordered from strongest to weakest privacy.
pub const LEVEL_EPSILONS: [(PrivacyLevel, f64); 5] = [
    (PrivacyLevel::VeryHigh, 0.01),
    (PrivacyLevel::High, 0.1),
    (PrivacyLevel::Moderate, 0.5),
    (PrivacyLevel::Low, 1.0),
    (PrivacyLevel::VeryLow, 5.0),
];

impl PrivacyLevel {
    pub const ALL: [PrivacyLevel; 5] = [
        Self::VeryHigh,
        Self::High,
        Self::Moderate,
        Self::Low,
        Self::VeryLow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::VeryHigh => "very_high",
            Self::High => "high",
            Self::Moderate => "moderate",
            Self::Low => "low",
            Self::VeryLow => "very_low",
        }
    }

    pub fn epsilon(self) -> f64 {
        LEVEL_EPSILONS
            .iter()
            .find(|(level, _)| *level == self)
            .map(|(_, e)| *e)
            .expect("every level has a preset")
    }
}

impl fmt::Display for PrivacyLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PrivacyLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::InvalidParameter(alloc::format!("unknown privacy level {s:?}")))
    }
}

pub fn level_to_epsilon(level: PrivacyLevel) -> PrivacyParams {
    PrivacyParams::pure(level.epsilon()).expect("presets are positive")
}

/// Either explicit parameters or a named preset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Privacy {
    Params(PrivacyParams),
    Level(PrivacyLevel),
}

impl Privacy {
    pub fn resolve(&self) -> PrivacyParams {
        match self {
            Self::Params(p) => *p,
            Self::Level(l) => level_to_epsilon(*l),
        }
    }

    pub fn level(&self) -> Option<PrivacyLevel> {
        match self {
            Self::Level(l) => Some(*l),
            Self::Params(_) => None,
        }
    }
}

impl From<PrivacyParams> for Privacy {
    fn from(p: PrivacyParams) -> Self {
        Self::Params(p)
    }
}

impl From<PrivacyLevel> for Privacy {
    fn from(l: PrivacyLevel) -> Self {
        Self::Level(l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuerySpec {
    pub kind: QueryKind,
    /// `None` means the bounds are inferred from the data by [`run_query`].
    pub bounds: Option<BoundedDomain>,
    pub privacy: Privacy,
    /// Clamp inputs into `bounds` before aggregating. Required for the
    /// sensitivity bounds to hold on out-of-range data.
    pub clamp_inputs: bool,
}

impl QuerySpec {
    pub fn new(kind: QueryKind, privacy: impl Into<Privacy>) -> Self {
        Self {
            kind,
            bounds: None,
            privacy: privacy.into(),
            clamp_inputs: true,
        }
    }

    pub fn with_bounds(mut self, bounds: BoundedDomain) -> Self {
        self.bounds = Some(bounds);
        self
    }

    pub fn with_clamp_inputs(mut self, clamp: bool) -> Self {
        self.clamp_inputs = clamp;
        self
    }
}

/// A released answer. Carries no trace of the true aggregate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpResult {
    pub query: QueryKind,
    pub value: f64,
    pub epsilon_spent: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub privacy_level: Option<PrivacyLevel>,
    pub true_value_withheld: bool,
    pub bounds_used: Option<BoundedDomain>,
    pub bounds_were_inferred: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

/// Feasible output range of `kind` over `n` rows from `bounds`.
pub fn feasible_range(
    kind: QueryKind,
    bounds: Option<&BoundedDomain>,
    n: usize,
) -> Result<OutputRange> {
    let nf = n as f64;
    if kind == QueryKind::Count {
        return OutputRange::new(0.0, 2.0 * nf);
    }
    let d = bounds.ok_or(Error::UnresolvedBounds)?;
    match kind {
        QueryKind::Sum => OutputRange::new(nf * d.lower(), nf * d.upper()),
        QueryKind::Mean => OutputRange::new(d.lower(), d.upper()),
        QueryKind::Variance => OutputRange::new(0.0, d.width() * d.width()),
        QueryKind::Count => unreachable!(),
    }
}

/// Everything a release needs except the noise draw.
pub(crate) struct Prepared {
    pub params: PrivacyParams,
    /// The statistic that receives noise (see [`QueryKind::noised_statistic`]).
    pub statistic: f64,
    pub sensitivity: f64,
    /// Public factor from the noised statistic to the released aggregate.
    pub scale: f64,
    /// Feasible range of the noised statistic.
    pub range: OutputRange,
    pub release_range: OutputRange,
}

impl Prepared {
    /// The non-private aggregate, in release units.
    pub fn true_value(&self) -> f64 {
        self.statistic * self.scale
    }
}

pub(crate) fn prepare(values: &[f64], spec: &QuerySpec) -> Result<Prepared> {
    let n = values.len();
    if n == 0 {
        return Err(Error::EmptyColumn);
    }
    if n < spec.kind.min_rows() {
        return Err(Error::NotEnoughRows {
            required: spec.kind.min_rows(),
            actual: n,
        });
    }
    let params = spec.privacy.resolve();
    let release_range = feasible_range(spec.kind, spec.bounds.as_ref(), n)?;
    let scale = spec.kind.release_scale(n);
    let range = OutputRange::new(release_range.lo() / scale, release_range.hi() / scale)?;

    let statistic = match (spec.kind, &spec.bounds) {
        (QueryKind::Count, _) => spec.kind.noised_statistic(values)?,
        (_, Some(d)) => {
            let inputs: Cow<'_, [f64]> = if spec.clamp_inputs {
                Cow::Owned(values.iter().map(|v| d.clamp(*v)).collect())
            } else {
                Cow::Borrowed(values)
            };
            spec.kind.noised_statistic(&inputs)?
        }
        (_, None) => return Err(Error::UnresolvedBounds),
    };
    let sensitivity = match &spec.bounds {
        Some(d) => sensitivity_for(spec.kind, d, n)?,
        None => crate::sensitivity::count_sensitivity(),
    };
    Ok(Prepared {
        params,
        statistic,
        sensitivity,
        scale,
        range,
        release_range,
    })
}

fn post_process(kind: QueryKind, x: f64) -> f64 {
    match kind {
        QueryKind::Count => libm::round(x).max(0.0),
        _ => x,
    }
}

/// Noisy release for a prepared query, without the [`DpResult`] wrapper.
pub(crate) fn release_value<U: UniformSource + ?Sized>(
    kind: QueryKind,
    p: &Prepared,
    rng: &mut U,
) -> Result<f64> {
    let noisy = bounded_laplace_mechanism(p.statistic, p.sensitivity, &p.params, p.range, rng)?;
    Ok(post_process(kind, p.release_range.clamp(noisy * p.scale)))
}

fn execute<U: UniformSource + ?Sized>(
    kind: QueryKind,
    column: &NumericColumn,
    spec: &QuerySpec,
    rng: &mut U,
) -> Result<DpResult> {
    let spec = QuerySpec { kind, ..*spec };
    let prepared = prepare(column.values(), &spec)?;
    let value = release_value(kind, &prepared, rng)?;
    Ok(DpResult {
        query: kind,
        value,
        epsilon_spent: prepared.params.epsilon(),
        privacy_level: spec.privacy.level(),
        true_value_withheld: true,
        bounds_used: spec.bounds,
        bounds_were_inferred: false,
        warnings: Vec::new(),
    })
}

/// Noisy row count, rounded to a non-negative integer. Ignores `spec.kind`.
pub fn dp_count<U: UniformSource + ?Sized>(
    column: &NumericColumn,
    spec: &QuerySpec,
    rng: &mut U,
) -> Result<DpResult> {
    execute(QueryKind::Count, column, spec, rng)
}

pub fn dp_sum<U: UniformSource + ?Sized>(
    column: &NumericColumn,
    spec: &QuerySpec,
    rng: &mut U,
) -> Result<DpResult> {
    execute(QueryKind::Sum, column, spec, rng)
}

pub fn dp_mean<U: UniformSource + ?Sized>(
    column: &NumericColumn,
    spec: &QuerySpec,
    rng: &mut U,
) -> Result<DpResult> {
    execute(QueryKind::Mean, column, spec, rng)
}

/// Noisy sample variance (`1/(n−1)` normalization). Needs at least two rows.
pub fn dp_variance<U: UniformSource + ?Sized>(
    column: &NumericColumn,
    spec: &QuerySpec,
    rng: &mut U,
) -> Result<DpResult> {
    execute(QueryKind::Variance, column, spec, rng)
}

/// Resolves the spec (inferring bounds when absent) and dispatches on its kind.
pub fn run_query<U: UniformSource + ?Sized>(
    column: &NumericColumn,
    spec: &QuerySpec,
    rng: &mut U,
) -> Result<DpResult> {
    let (spec, inferred) = resolve_bounds(column, spec)?;
    let mut result = match spec.kind {
        QueryKind::Count => dp_count(column, &spec, rng),
        QueryKind::Sum => dp_sum(column, &spec, rng),
        QueryKind::Mean => dp_mean(column, &spec, rng),
        QueryKind::Variance => dp_variance(column, &spec, rng),
    }?;
    if inferred {
        result.bounds_were_inferred = true;
        result.warnings.push(INFERRED_BOUNDS_WARNING.into());
    }
    Ok(result)
}

/// Fills in absent bounds from the data. The flag reports whether that happened.
pub fn resolve_bounds(column: &NumericColumn, spec: &QuerySpec) -> Result<(QuerySpec, bool)> {
    match spec.bounds {
        Some(_) => Ok((*spec, false)),
        None => {
            let d = infer_bounds(column)?;
            Ok((spec.with_bounds(d), true))
        }
    }
}
