//! Pass/fail checks attached to reports.

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub threshold: f64,
}

impl Gate {
    /// Passes when `value ≤ threshold`; NaN fails.
    pub fn at_most<T: Real>(name: impl Into<String>, value: T, threshold: T) -> Self {
        let (value, threshold) = (value.to_f64_lossy(), threshold.to_f64_lossy());
        Self { name: name.into(), pass: value <= threshold, value, threshold }
    }

    /// Passes when `value ≥ threshold`.
    pub fn at_least<T: Real>(name: impl Into<String>, value: T, threshold: T) -> Self {
        let (value, threshold) = (value.to_f64_lossy(), threshold.to_f64_lossy());
        Self { name: name.into(), pass: value >= threshold, value, threshold }
    }

    /// A boolean condition; reported as value 1/0 against threshold 1.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self { name: name.into(), pass: ok, value: if ok { 1.0 } else { 0.0 }, threshold: 1.0 }
    }
}

pub fn all_pass(gates: &[Gate]) -> bool {
    gates.iter().all(|g| g.pass)
}
