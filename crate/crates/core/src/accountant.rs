//! Pure-ε sequential composition: the privacy loss of a series of releases
//! against one dataset is the sum of their epsilons.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed when comparing accumulated epsilons against the total.
pub const BUDGET_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Charge {
    pub label: String,
    pub epsilon: f64,
}

/// Append-only ledger whose charges never sum past the total.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetLedger {
    total_epsilon: f64,
    charges: Vec<Charge>,
}

impl BudgetLedger {
    pub fn new(total_epsilon: f64) -> Result<Self> {
        if !(total_epsilon.is_finite() && total_epsilon > 0.0) {
            return Err(Error::InvalidEpsilon(total_epsilon));
        }
        Ok(Self {
            total_epsilon,
            charges: Vec::new(),
        })
    }

    pub fn total(&self) -> f64 {
        self.total_epsilon
    }

    pub fn charges(&self) -> &[Charge] {
        &self.charges
    }

    pub fn spent(&self) -> f64 {
        self.charges.iter().fold(0.0, |acc, c| acc + c.epsilon)
    }

    /// `total − spent`, floored at zero.
    pub fn remaining(&self) -> f64 {
        (self.total_epsilon - self.spent()).max(0.0)
    }

    /// Checks a charge without recording it.
    pub fn check(&self, epsilon: f64) -> Result<()> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        if self.spent() + epsilon > self.total_epsilon + BUDGET_TOLERANCE {
            return Err(Error::BudgetExhausted {
                requested: epsilon,
                remaining: self.remaining(),
            });
        }
        Ok(())
    }

    /// Records the charge if it fits in the remaining budget; otherwise leaves
    /// the ledger untouched.
    pub fn charge(&mut self, label: impl Into<String>, epsilon: f64) -> Result<()> {
        self.check(epsilon)?;
        self.charges.push(Charge {
            label: label.into(),
            epsilon,
        });
        Ok(())
    }
}
