//! Noise mechanisms.
//!
//! All mechanisms are pure functions of their inputs and a [`UniformSource`].
//!
//! * Laplace: `f(D) + Lap(0, Δ₁/ε)`, sampled by inverse CDF from one uniform
//!   draw, giving ε-DP for a query with ℓ1 sensitivity Δ₁.
//! * Bounded Laplace: the Laplace output clamped into the query's feasible
//!   range. Clamping is post-processing of an ε-DP release, so the guarantee
//!   is unchanged. This is *not* the truncated-Laplace distribution.
//! * Gaussian: `f(D) + N(0, σ²)` with `σ = Δ₂·sqrt(2 ln(1.25/δ))/ε`, valid for
//!   ε < 1. Normals come from the cosine branch of Box–Muller.
//! * Randomized response: report the true bit with probability
//!   `e^ε/(1+e^ε)`.
//! * Exponential: pick candidate `i` with probability ∝ `exp(ε·uᵢ/(2Δu))`.
//!
//! A sensitivity of zero is accepted and means the value is released as is.

use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::UniformSource;

/// Laplace scale `b`, in units of the query output.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct NoiseScale(f64);

impl NoiseScale {
    pub fn new(b: f64) -> Result<Self> {
        if b.is_finite() && b > 0.0 {
            Ok(Self(b))
        } else {
            Err(Error::InvalidNoiseScale(b))
        }
    }

    /// `b = Δ/ε`.
    pub fn for_query(sensitivity: f64, epsilon: f64) -> Result<Self> {
        Self::new(sensitivity / epsilon)
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Privacy parameters. `delta == 0` denotes pure ε-DP.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct PrivacyParams {
    epsilon: f64,
    delta: f64,
}

#[derive(Deserialize)]
struct RawParams {
    epsilon: f64,
    #[serde(default)]
    delta: f64,
}

impl TryFrom<RawParams> for PrivacyParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        Self::new(raw.epsilon, raw.delta)
    }
}

impl PrivacyParams {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::InvalidDelta(delta));
        }
        Ok(Self { epsilon, delta })
    }

    pub fn pure(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, 0.0)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn is_pure(&self) -> bool {
        self.delta == 0.0
    }

    fn require_pure(&self, mechanism: &'static str) -> Result<()> {
        if self.is_pure() {
            Ok(())
        } else {
            Err(Error::WrongMechanism {
                mechanism,
                delta: self.delta,
            })
        }
    }
}

/// Closed output interval `[lo, hi]` used by the bounded Laplace variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutputRange {
    lo: f64,
    hi: f64,
}

impl OutputRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::InvalidRange { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

fn check_sensitivity(sensitivity: f64) -> Result<()> {
    if sensitivity.is_finite() && sensitivity >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSensitivity(sensitivity))
    }
}

/// Inverse Laplace CDF at `u`: `−b·sgn(u−½)·ln(1−2|u−½|)`.
pub fn laplace_quantile(b: NoiseScale, u: f64) -> f64 {
    let centered = u - 0.5;
    if centered == 0.0 {
        return 0.0;
    }
    -b.0 * centered.signum() * libm::log1p(-2.0 * centered.abs())
}

/// Laplace(0, b) cumulative distribution function.
pub fn laplace_cdf(b: NoiseScale, x: f64) -> f64 {
    if x < 0.0 {
        0.5 * libm::exp(x / b.0)
    } else {
        1.0 - 0.5 * libm::exp(-x / b.0)
    }
}

/// One Laplace(0, b) draw from one uniform.
pub fn sample_laplace<U: UniformSource + ?Sized>(b: NoiseScale, rng: &mut U) -> f64 {
    laplace_quantile(b, rng.next_open01())
}

/// `true_value + Lap(Δ/ε)`. Requires pure ε-DP parameters.
pub fn laplace_mechanism<U: UniformSource + ?Sized>(
    true_value: f64,
    sensitivity: f64,
    params: &PrivacyParams,
    rng: &mut U,
) -> Result<f64> {
    check_sensitivity(sensitivity)?;
    params.require_pure("laplace")?;
    if sensitivity == 0.0 {
        return Ok(true_value);
    }
    let b = NoiseScale::for_query(sensitivity, params.epsilon)?;
    Ok(true_value + sample_laplace(b, rng))
}

/// Laplace mechanism followed by clamping into `range`.
pub fn bounded_laplace_mechanism<U: UniformSource + ?Sized>(
    true_value: f64,
    sensitivity: f64,
    params: &PrivacyParams,
    range: OutputRange,
    rng: &mut U,
) -> Result<f64> {
    laplace_mechanism(true_value, sensitivity, params, rng).map(|x| range.clamp(x))
}

/// Gaussian calibration `σ = Δ₂·sqrt(2 ln(1.25/δ))/ε` for `0 < ε < 1`, `0 < δ < 1`.
pub fn gaussian_sigma(params: &PrivacyParams, l2_sensitivity: f64) -> Result<f64> {
    check_sensitivity(l2_sensitivity)?;
    if params.delta == 0.0 {
        return Err(Error::WrongMechanism {
            mechanism: "gaussian",
            delta: 0.0,
        });
    }
    if params.epsilon >= 1.0 {
        return Err(Error::InvalidParameter(alloc::format!(
            "gaussian calibration requires epsilon < 1, got {}",
            params.epsilon
        )));
    }
    Ok(l2_sensitivity * libm::sqrt(2.0 * libm::log(1.25 / params.delta)) / params.epsilon)
}

/// Standard normal from two uniforms: `sqrt(−2 ln u₁)·cos(2π u₂)`.
pub fn box_muller(u1: f64, u2: f64) -> f64 {
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * PI * u2)
}

pub fn sample_standard_normal<U: UniformSource + ?Sized>(rng: &mut U) -> f64 {
    let u1 = rng.next_open01();
    let u2 = rng.next_open01();
    box_muller(u1, u2)
}

/// `true_value + N(0, σ²)` with σ from [`gaussian_sigma`].
pub fn gaussian_mechanism<U: UniformSource + ?Sized>(
    true_value: f64,
    l2_sensitivity: f64,
    params: &PrivacyParams,
    rng: &mut U,
) -> Result<f64> {
    let sigma = gaussian_sigma(params, l2_sensitivity)?;
    if sigma == 0.0 {
        return Ok(true_value);
    }
    Ok(true_value + sigma * sample_standard_normal(rng))
}

/// Probabilities of reporting the true bit and of flipping it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseProbabilities {
    pub truth: f64,
    pub flip: f64,
}

/// `truth = e^ε/(1+e^ε)`, `flip = 1/(1+e^ε)`, so `truth/flip = e^ε`.
///
/// Accepts ε = 0 (a fair coin) for analysis, although releases need ε > 0.
pub fn response_probabilities(epsilon: f64) -> Result<ResponseProbabilities> {
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let e = libm::exp(epsilon);
    Ok(ResponseProbabilities {
        truth: e / (1.0 + e),
        flip: 1.0 / (1.0 + e),
    })
}

/// Reports `true_bit` with probability `e^ε/(1+e^ε)`, else the flipped bit.
pub fn randomized_response<U: UniformSource + ?Sized>(
    true_bit: u8,
    params: &PrivacyParams,
    rng: &mut U,
) -> Result<u8> {
    if true_bit > 1 {
        return Err(Error::NonBinaryInput(true_bit));
    }
    params.require_pure("randomized response")?;
    let p = response_probabilities(params.epsilon)?;
    Ok(if rng.next_open01() < p.truth {
        true_bit
    } else {
        1 - true_bit
    })
}

/// Selection probabilities of the exponential mechanism, max-shifted and normalized.
pub fn exponential_probabilities(
    utilities: &[f64],
    utility_sensitivity: f64,
    params: &PrivacyParams,
) -> Result<Vec<f64>> {
    if utilities.is_empty() {
        return Err(Error::NoCandidates);
    }
    if !(utility_sensitivity.is_finite() && utility_sensitivity > 0.0) {
        return Err(Error::InvalidSensitivity(utility_sensitivity));
    }
    params.require_pure("exponential")?;
    if let Some(bad) = utilities.iter().find(|u| !u.is_finite()) {
        return Err(Error::InvalidParameter(alloc::format!(
            "utility {bad} is not finite"
        )));
    }
    let max = utilities.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = params.epsilon / (2.0 * utility_sensitivity);
    let weights: Vec<f64> = utilities
        .iter()
        .map(|u| libm::exp(scale * (u - max)))
        .collect();
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// Samples one candidate with probability ∝ `exp(ε·uᵢ/(2Δu))`.
pub fn exponential_mechanism<'a, T, U: UniformSource + ?Sized>(
    candidates: &'a [T],
    utilities: &[f64],
    utility_sensitivity: f64,
    params: &PrivacyParams,
    rng: &mut U,
) -> Result<&'a T> {
    if candidates.is_empty() {
        return Err(Error::NoCandidates);
    }
    if candidates.len() != utilities.len() {
        return Err(Error::LengthMismatch {
            candidates: candidates.len(),
            utilities: utilities.len(),
        });
    }
    let probs = exponential_probabilities(utilities, utility_sensitivity, params)?;
    let u = rng.next_open01();
    let mut cumulative = 0.0;
    for (i, p) in probs.iter().enumerate() {
        cumulative += p;
        if u < cumulative {
            return Ok(&candidates[i]);
        }
    }
    // Rounding can leave the cumulative sum a hair below 1.
    let last = probs
        .iter()
        .rposition(|p| *p > 0.0)
        .unwrap_or(probs.len() - 1);
    Ok(&candidates[last])
}
