//! Memory budget for state vectors and Hamiltonians.

use crate::error::{Error, Result};

pub const BUDGET_ENV: &str = "QVBS_BUDGET_MB";
pub const DEFAULT_BUDGET_MB: u64 = 1024;

/// Rough per-amplitude footprint of an exact (radical-carrying) amplitude.
pub const EXACT_AMPLITUDE_BYTES: u64 = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    mb: u64,
}

impl Budget {
    pub fn new(mb: u64) -> Self {
        Budget { mb }
    }

    /// Reads `QVBS_BUDGET_MB`, falling back to the default on absence or
    /// parse failure.
    pub fn from_env() -> Self {
        let mb = std::env::var(BUDGET_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_BUDGET_MB);
        Budget { mb }
    }

    pub fn megabytes(&self) -> u64 {
        self.mb
    }

    pub fn check_bytes(&self, bytes: u128) -> Result<()> {
        let needed_mb = bytes.div_ceil(1 << 20);
        if needed_mb > self.mb as u128 {
            return Err(Error::BudgetExceeded {
                needed_mb: needed_mb.min(u64::MAX as u128) as u64,
                budget_mb: self.mb,
            });
        }
        Ok(())
    }

    /// Budget check for a full product space `(2S+1)^L` of `bytes_each`-byte
    /// amplitudes.
    pub fn check_space(&self, spin: u32, length: usize, bytes_each: u64) -> Result<()> {
        let dim = (2 * spin as u128 + 1).checked_pow(length as u32).unwrap_or(u128::MAX);
        self.check_bytes(dim.saturating_mul(bytes_each as u128))
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_BUDGET_MB)
    }
}
