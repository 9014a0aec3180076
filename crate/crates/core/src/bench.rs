//! ε-sweep benchmark harness.
//!
//! A sweep repeats a query many times at each ε of a grid and scores the
//! noisy answers against the non-private aggregate. With `t` the true value
//! and `r₁…r_K` the released answers:
//!
//! * mean scaled error = (1/K)·Σ (rᵢ − t)/|t|   (signed, a bias indicator)
//! * MSE               = (1/K)·Σ (rᵢ − t)²
//! * RMSPE (percent)   = 100·sqrt((1/K)·Σ ((rᵢ − t)/t)²)
//!
//! Trial `j` at grid index `i` draws from `RngStream::substream(seed, i, j)`,
//! so a report is a pure function of the column and the configuration.
//! Sweeps never touch a privacy budget: they are measurements, not releases.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::column::NumericColumn;
use crate::error::{Error, Result};
use crate::mechanisms::PrivacyParams;
use crate::queries::{prepare, release_value, resolve_bounds, QuerySpec, INFERRED_BOUNDS_WARNING};
use crate::rng::{RngStream, UniformSource};
use crate::sensitivity::{BoundedDomain, QueryKind};

pub const DEFAULT_EPS_START: f64 = 0.01;
pub const DEFAULT_EPS_STOP: f64 = 0.49;
pub const DEFAULT_EPS_STEP: f64 = 0.02;
pub const DEFAULT_ITERATIONS: usize = 100;

/// Label written into every report.
pub const BENCHMARK_MODE: &str = "benchmark: non-release measurement, no privacy budget charged";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorMetrics {
    pub mean_scaled_error: f64,
    pub mse: f64,
    pub rmspe_percent: f64,
}

pub fn error_metrics(true_value: f64, results: &[f64]) -> Result<ErrorMetrics> {
    if results.is_empty() {
        return Err(Error::EmptyResults);
    }
    if true_value == 0.0 {
        return Err(Error::TrueValueZero);
    }
    let k = results.len() as f64;
    let (mut scaled, mut sq, mut pct) = (0.0, 0.0, 0.0);
    for r in results {
        let e = r - true_value;
        scaled += e / true_value.abs();
        sq += e * e;
        let rel = e / true_value;
        pct += rel * rel;
    }
    Ok(ErrorMetrics {
        mean_scaled_error: scaled / k,
        mse: sq / k,
        rmspe_percent: 100.0 * libm::sqrt(pct / k),
    })
}

/// Rounds to 12 significant decimal digits, removing stepping residue such as
/// `0.49000000000000005`.
fn tidy(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let digits = 12 - libm::ceil(libm::log10(x.abs())) as i32;
    if !(-22..=22).contains(&digits) {
        return x;
    }
    let scale = libm::pow(10.0, digits.abs() as f64);
    if digits >= 0 {
        libm::round(x * scale) / scale
    } else {
        libm::round(x / scale) * scale
    }
}

/// `start, start+step, …` up to and including `stop`, by integer stepping.
pub fn epsilon_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && start > 0.0) {
        return Err(Error::InvalidEpsilon(start));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "epsilon step must be positive, got {step}"
        )));
    }
    if !(stop.is_finite() && stop >= start) {
        return Err(Error::InvalidParameter(alloc::format!(
            "epsilon stop {stop} is below start {start}"
        )));
    }
    let steps = libm::floor((stop - start) / step + 1e-9);
    if steps > 1e6 {
        return Err(Error::InvalidParameter("epsilon grid too large".into()));
    }
    Ok((0..=steps as u64)
        .map(|k| tidy(start + k as f64 * step))
        .collect())
}

/// `[0.01, 0.03, …, 0.49]`: 25 values.
pub fn default_epsilon_grid() -> Vec<f64> {
    (0..25u32).map(|k| f64::from(1 + 2 * k) / 100.0).collect()
}

/// The query part of a sweep; privacy comes from the ε grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepQuery {
    pub kind: QueryKind,
    pub bounds: Option<BoundedDomain>,
    pub clamp_inputs: bool,
}

impl SweepQuery {
    pub fn new(kind: QueryKind) -> Self {
        Self {
            kind,
            bounds: None,
            clamp_inputs: true,
        }
    }

    pub fn with_bounds(mut self, bounds: BoundedDomain) -> Self {
        self.bounds = Some(bounds);
        self
    }

    fn spec(&self, params: PrivacyParams) -> QuerySpec {
        QuerySpec {
            kind: self.kind,
            bounds: self.bounds,
            privacy: params.into(),
            clamp_inputs: self.clamp_inputs,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    epsilons: Vec<f64>,
    iterations: usize,
    query: SweepQuery,
    master_seed: u64,
}

impl SweepConfig {
    /// Epsilons must be positive and strictly increasing; iterations ≥ 1.
    pub fn new(
        epsilons: Vec<f64>,
        iterations: usize,
        query: SweepQuery,
        master_seed: u64,
    ) -> Result<Self> {
        if epsilons.is_empty() {
            return Err(Error::InvalidParameter("epsilon grid is empty".into()));
        }
        if let Some(e) = epsilons.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
            return Err(Error::InvalidEpsilon(*e));
        }
        if epsilons.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "epsilons must be strictly increasing".into(),
            ));
        }
        if iterations == 0 {
            return Err(Error::InvalidParameter(
                "iterations must be at least 1".into(),
            ));
        }
        Ok(Self {
            epsilons,
            iterations,
            query,
            master_seed,
        })
    }

    pub fn epsilons(&self) -> &[f64] {
        &self.epsilons
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn query(&self) -> &SweepQuery {
        &self.query
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub epsilon: f64,
    pub mean_dp_value: f64,
    /// `None` when the true aggregate is zero.
    pub metrics: Option<ErrorMetrics>,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub mode: String,
    pub query: QueryKind,
    pub column: String,
    pub rows: usize,
    pub bounds_used: BoundedDomain,
    pub bounds_were_inferred: bool,
    pub clamp_inputs: bool,
    pub master_seed: u64,
    /// Set by the caller when the report is written; absent from in-memory runs.
    pub timestamp: Option<String>,
    pub records: Vec<SweepRecord>,
    pub warnings: Vec<String>,
}

pub fn run_sweep(column: &NumericColumn, cfg: &SweepConfig) -> Result<SweepReport> {
    let placeholder = PrivacyParams::pure(cfg.epsilons[0])?;
    let (resolved, inferred) = resolve_bounds(column, &cfg.query.spec(placeholder))?;
    let bounds = resolved.bounds.ok_or(Error::UnresolvedBounds)?;
    let query = SweepQuery {
        bounds: Some(bounds),
        ..cfg.query
    };

    let mut warnings = Vec::new();
    if inferred {
        warnings.push(String::from(INFERRED_BOUNDS_WARNING));
    }

    let mut records = Vec::with_capacity(cfg.epsilons.len());
    let mut results = Vec::with_capacity(cfg.iterations);
    for (i, &epsilon) in cfg.epsilons.iter().enumerate() {
        let spec = query.spec(PrivacyParams::pure(epsilon)?);
        let prepared = prepare(column.values(), &spec)?;
        results.clear();
        for j in 0..cfg.iterations {
            let mut rng = RngStream::substream(cfg.master_seed, i as u64, j as u64);
            results.push(release_value(spec.kind, &prepared, &mut rng)?);
        }
        let mean_dp_value = results.iter().sum::<f64>() / results.len() as f64;
        let metrics = match error_metrics(prepared.true_value(), &results) {
            Ok(m) => Some(m),
            Err(Error::TrueValueZero) => {
                warnings.push(alloc::format!(
                    "epsilon {epsilon}: true value is zero, scaled error metrics omitted"
                ));
                None
            }
            Err(e) => return Err(e),
        };
        records.push(SweepRecord {
            epsilon,
            mean_dp_value,
            metrics,
            iterations: cfg.iterations,
        });
    }

    Ok(SweepReport {
        mode: BENCHMARK_MODE.into(),
        query: query.kind,
        column: column.name().into(),
        rows: column.len(),
        bounds_used: bounds,
        bounds_were_inferred: inferred,
        clamp_inputs: query.clamp_inputs,
        master_seed: cfg.master_seed,
        timestamp: None,
        records,
        warnings,
    })
}

/// `n` integers drawn uniformly from `lo..=hi`, as reals.
pub fn synthetic_uniform_integers(n: usize, lo: i64, hi: i64, seed: u64) -> Vec<f64> {
    assert!(lo <= hi, "empty integer range");
    let span = (hi - lo + 1) as f64;
    let mut rng = RngStream::from_seed(seed);
    (0..n)
        .map(|_| {
            let k = libm::floor(rng.next_open01() * span).min(span - 1.0);
            lo as f64 + k
        })
        .collect()
}

/// Equal-width histogram over `[lo, hi)`; values outside are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    lo: f64,
    width: f64,
    counts: Vec<u64>,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, width: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo && width > 0.0) {
            return Err(Error::InvalidParameter("invalid histogram layout".into()));
        }
        let bins = libm::ceil((hi - lo) / width) as usize;
        Ok(Self {
            lo,
            width,
            counts: alloc::vec![0; bins],
        })
    }

    pub fn add(&mut self, x: f64) {
        if x < self.lo {
            return;
        }
        let i = ((x - self.lo) / self.width) as usize;
        if let Some(c) = self.counts.get_mut(i) {
            *c += 1;
        }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }
}

/// Outcome of comparing two output histograms bin by bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioCheck {
    /// Largest `max(a/b, b/a)` over qualifying bins.
    pub max_ratio: f64,
    pub qualifying_bins: usize,
}

/// Largest two-sided count ratio over bins where both histograms have at
/// least `min_hits` entries.
pub fn max_bin_ratio(a: &Histogram, b: &Histogram, min_hits: u64) -> Result<RatioCheck> {
    if a.counts.len() != b.counts.len() {
        return Err(Error::LengthMismatch {
            candidates: a.counts.len(),
            utilities: b.counts.len(),
        });
    }
    let mut max_ratio: f64 = 1.0;
    let mut qualifying_bins = 0;
    for (&x, &y) in a.counts.iter().zip(&b.counts) {
        if x >= min_hits && y >= min_hits {
            qualifying_bins += 1;
            let (x, y) = (x as f64, y as f64);
            max_ratio = max_ratio.max(x / y).max(y / x);
        }
    }
    Ok(RatioCheck {
        max_ratio,
        qualifying_bins,
    })
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidParameter(
            "spearman needs two equal-length samples of at least two points".into(),
        ));
    }
    let rx = ranks(x);
    let ry = ranks(y);
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    Ok(sxy / libm::sqrt(sxx * syy))
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = alloc::vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn metric_examples() {
        let m = error_metrics(10.0, &[10.0, 10.0]).unwrap();
        assert_eq!(
            (m.mean_scaled_error, m.mse, m.rmspe_percent),
            (0.0, 0.0, 0.0)
        );

        let m = error_metrics(10.0, &[8.0, 12.0]).unwrap();
        assert_eq!(m.mean_scaled_error, 0.0);
        assert_eq!(m.mse, 4.0);
        assert!((m.rmspe_percent - 20.0).abs() < 1e-12);

        assert_eq!(error_metrics(0.0, &[1.0]), Err(Error::TrueValueZero));
        assert_eq!(error_metrics(1.0, &[]), Err(Error::EmptyResults));
    }

    #[test]
    fn scaled_error_is_signed_against_negative_truth() {
        let m = error_metrics(-10.0, &[-8.0]).unwrap();
        assert!((m.mean_scaled_error - 0.2).abs() < 1e-15);
    }

    #[test]
    fn default_grid() {
        let g = default_epsilon_grid();
        assert_eq!(g.len(), 25);
        assert_eq!(g[0], 0.01);
        assert_eq!(g[24], 0.49);
        assert!(g
            .windows(2)
            .all(|w| w[0] < w[1] && (w[1] - w[0] - 0.02).abs() < 1e-12));
        assert_eq!(
            epsilon_grid(DEFAULT_EPS_START, DEFAULT_EPS_STOP, DEFAULT_EPS_STEP).unwrap(),
            g
        );
    }

    #[test]
    fn grid_guards() {
        assert!(epsilon_grid(0.01, 0.49, 0.0).is_err());
        assert!(epsilon_grid(0.0, 0.49, 0.02).is_err());
        assert!(epsilon_grid(0.5, 0.1, 0.02).is_err());
        assert_eq!(epsilon_grid(0.1, 0.1, 0.02).unwrap(), vec![0.1]);
    }

    #[test]
    fn config_validation() {
        let q = SweepQuery::new(QueryKind::Mean);
        assert!(SweepConfig::new(vec![], 1, q, 0).is_err());
        assert!(SweepConfig::new(vec![0.1, 0.1], 1, q, 0).is_err());
        assert!(SweepConfig::new(vec![0.2, 0.1], 1, q, 0).is_err());
        assert!(SweepConfig::new(vec![0.1], 0, q, 0).is_err());
        assert!(SweepConfig::new(vec![-0.1], 1, q, 0).is_err());
        assert!(SweepConfig::new(vec![0.1, 0.2], 1, q, 0).is_ok());
    }

    #[test]
    fn sweep_vanishing_noise_and_zero_truth() {
        let col = NumericColumn::new("x", vec![20.0, 30.0, 40.0]).unwrap();
        let d = BoundedDomain::new(18.0, 90.0).unwrap();
        let mut grid = default_epsilon_grid();
        grid.push(1e9);
        let cfg =
            SweepConfig::new(grid, 1, SweepQuery::new(QueryKind::Mean).with_bounds(d), 3).unwrap();
        let r = run_sweep(&col, &cfg).unwrap();
        assert_eq!(r.records.len(), 26);
        assert!(r.records[25].metrics.unwrap().mse < 1e-8);

        let zeros = NumericColumn::new("z", vec![0.0, 0.0]).unwrap();
        let d = BoundedDomain::new(-1.0, 1.0).unwrap();
        let cfg = SweepConfig::new(
            vec![0.5, 1.0],
            2,
            SweepQuery::new(QueryKind::Sum).with_bounds(d),
            3,
        )
        .unwrap();
        let r = run_sweep(&zeros, &cfg).unwrap();
        assert!(r.records.iter().all(|rec| rec.metrics.is_none()));
        assert_eq!(r.warnings.len(), 2);
    }

    #[test]
    fn sweep_infers_bounds_with_warning() {
        let col = NumericColumn::new("x", vec![20.0, 30.0, 40.0]).unwrap();
        let cfg = SweepConfig::new(vec![0.5], 3, SweepQuery::new(QueryKind::Sum), 1).unwrap();
        let r = run_sweep(&col, &cfg).unwrap();
        assert!(r.bounds_were_inferred);
        assert_eq!(r.bounds_used, BoundedDomain::new(20.0, 40.0).unwrap());
        assert_eq!(r.warnings[0], INFERRED_BOUNDS_WARNING);
    }

    #[test]
    fn synthetic_column_in_range() {
        let v = synthetic_uniform_integers(5000, 18, 90, 42);
        assert!(v
            .iter()
            .all(|x| (18.0..=90.0).contains(x) && x.fract() == 0.0));
        assert!(v.contains(&18.0) && v.contains(&90.0));
        assert_eq!(v, synthetic_uniform_integers(5000, 18, 90, 42));
    }

    #[test]
    fn spearman_basics() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert!((spearman(&x, &[10.0, 20.0, 30.0, 40.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((spearman(&x, &[4.0, 3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(ranks(&[5.0, 1.0, 5.0]), vec![2.5, 1.0, 2.5]);
    }

    #[test]
    fn histogram_ratio() {
        let mut a = Histogram::new(0.0, 2.0, 1.0).unwrap();
        let mut b = Histogram::new(0.0, 2.0, 1.0).unwrap();
        for _ in 0..10 {
            a.add(0.5);
        }
        for _ in 0..5 {
            b.add(0.5);
        }
        a.add(1.5);
        a.add(7.0);
        let r = max_bin_ratio(&a, &b, 5).unwrap();
        assert_eq!(r.qualifying_bins, 1);
        assert_eq!(r.max_ratio, 2.0);
    }
}
