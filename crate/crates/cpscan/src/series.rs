//! Validated one-dimensional series.

use crate::error::{Error, Result};

/// A non-empty series of finite observations, in time order.
///
/// Construction is the single validation point: every scan, detection, and
/// bootstrap routine accepts a `TimeSeries` and may assume finiteness.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
}

impl TimeSeries {
    /// Wrap raw observations, rejecting empty input and non-finite values.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("series must contain at least one value"));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "series value at index {pos} is not finite: {}",
                values[pos]
            )));
        }
        Ok(TimeSeries { values })
    }

    /// Number of observations.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false by construction; present for API completeness.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The observations, in time order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl AsRef<[f64]> for TimeSeries {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}
