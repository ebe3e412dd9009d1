//! Finitely supported complex sequences on `{0, 1, 2, ...}` with `u(0) = 0`.

use std::collections::BTreeMap;

use num_complex::Complex;
use serde::Serialize;

use crate::cp::ensure_finite;
use crate::error::{HardyError, Result};
use crate::scalar::Real;

/// A test sequence `u`: finitely many stored values at indices `n >= 1`,
/// zero everywhere else, including at `n = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinSeq<T> {
    entries: BTreeMap<usize, Complex<T>>,
}

impl<T: Real> Default for FinSeq<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Real> FinSeq<T> {
    pub fn zero() -> Self {
        Self { entries: BTreeMap::new() }
    }

    /// Builds a sequence from `(n, value)` pairs. Index 0, duplicate
    /// indices and non-finite values are rejected.
    pub fn from_entries<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Complex<T>)>,
    {
        let mut seq = Self::zero();
        for (n, z) in entries {
            if seq.entries.contains_key(&n) {
                return Err(HardyError::InvalidInput(format!("duplicate index {n}")));
            }
            seq.insert(n, z)?;
        }
        Ok(seq)
    }

    /// `u(n) = values[n - 1]` for `n = 1..=values.len()`.
    pub fn from_values(values: &[Complex<T>]) -> Result<Self> {
        Self::from_entries(values.iter().enumerate().map(|(i, &z)| (i + 1, z)))
    }

    /// Real-valued sequence with `u(n) = values[n - 1]`.
    pub fn from_real(values: &[T]) -> Result<Self> {
        Self::from_entries(
            values
                .iter()
                .enumerate()
                .map(|(i, &x)| (i + 1, Complex::new(x, T::zero()))),
        )
    }

    /// Unit impulse at `n`.
    pub fn delta(n: usize) -> Result<Self> {
        Self::from_entries([(n, Complex::new(T::one(), T::zero()))])
    }

    pub fn insert(&mut self, n: usize, z: Complex<T>) -> Result<()> {
        if n == 0 {
            return Err(HardyError::InvalidInput("index 0 is pinned to u(0) = 0".into()));
        }
        ensure_finite(z, "sequence value")?;
        self.entries.insert(n, z);
        Ok(())
    }

    pub fn get(&self, n: usize) -> Complex<T> {
        self.entries
            .get(&n)
            .copied()
            .unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    /// Largest stored index (0 for the empty sequence).
    pub fn max_support(&self) -> usize {
        self.entries.keys().next_back().copied().unwrap_or(0)
    }

    /// Truncation horizon `N* = max_support + 1`: every summand of the
    /// infinite series vanishes beyond it.
    pub fn horizon(&self) -> usize {
        self.max_support() + 1
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(|z| z.re == T::zero() && z.im == T::zero())
    }

    pub fn is_real(&self) -> bool {
        self.entries.values().all(|z| z.im == T::zero())
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Complex<T>)> + '_ {
        self.entries.iter().map(|(&n, &z)| (n, z))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Values `u(0), u(1), ..., u(last)`.
    pub fn to_dense(&self, last: usize) -> Vec<Complex<T>> {
        let mut out = vec![Complex::new(T::zero(), T::zero()); last + 1];
        for (n, z) in self.iter() {
            if n <= last {
                out[n] = z;
            }
        }
        out
    }

    /// `λ u`.
    pub fn scaled(&self, lambda: Complex<T>) -> Self {
        Self {
            entries: self.entries.iter().map(|(&n, &z)| (n, z * lambda)).collect(),
        }
    }
}
