//! Index-to-value profiles used as the `v` and `φ` of a weight pair.

use std::fmt;

use crate::scalar::Real;

/// A real function on `{0, 1, 2, ...}`.
///
/// `increment(n) = value(n) - value(n - 1)` may be overridden when a
/// closed form avoids the cancellation of the plain difference.
pub trait Profile<T: Real>: Send + Sync {
    fn value(&self, n: usize) -> T;

    fn increment(&self, n: usize) -> T {
        debug_assert!(n >= 1);
        self.value(n) - self.value(n - 1)
    }

    /// Last index at which the profile is defined, if it is finite.
    fn coverage(&self) -> Option<usize> {
        None
    }

    fn describe(&self) -> String;
}

/// `n ↦ n^e` for `n >= 1`, and 0 at `n = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Power<T> {
    pub exponent: T,
}

impl<T: Real> Power<T> {
    pub fn new(exponent: T) -> Self {
        Self { exponent }
    }
}

impl<T: Real> Profile<T> for Power<T> {
    fn value(&self, n: usize) -> T {
        if n == 0 {
            T::zero()
        } else {
            T::from_index(n).powf(self.exponent)
        }
    }

    fn increment(&self, n: usize) -> T {
        match n {
            0 => panic!("increment needs n >= 1"),
            1 => T::one(),
            _ => {
                // n^e - (n-1)^e = -n^e expm1(e ln(1 - 1/n))
                let nn = T::from_index(n);
                -nn.powf(self.exponent) * (self.exponent * (-nn.recip()).ln_1p()).exp_m1()
            }
        }
    }

    fn describe(&self) -> String {
        format!("n^{}", self.exponent)
    }
}

/// `n ↦ (n - 1)^e` for `n >= 2`, and 0 at `n = 0, 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedPower<T> {
    pub exponent: T,
}

impl<T: Real> Profile<T> for ShiftedPower<T> {
    fn value(&self, n: usize) -> T {
        if n <= 1 {
            T::zero()
        } else {
            T::from_index(n - 1).powf(self.exponent)
        }
    }

    fn describe(&self) -> String {
        format!("(n-1)^{} for n >= 2, 0 at n = 1", self.exponent)
    }
}

/// Values stored for `n = 0..len`. Indices past the table read as NaN and
/// are caught by validation.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated<T> {
    values: Vec<T>,
}

impl<T: Real> Tabulated<T> {
    pub fn new(values: Vec<T>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
}

impl<T: Real> Profile<T> for Tabulated<T> {
    fn value(&self, n: usize) -> T {
        self.values.get(n).copied().unwrap_or_else(T::nan)
    }

    fn coverage(&self) -> Option<usize> {
        Some(self.values.len().saturating_sub(1))
    }

    fn describe(&self) -> String {
        format!("tabulated[0..={}]", self.values.len().saturating_sub(1))
    }
}

/// Any closure `usize -> T`.
pub struct FnProfile<F> {
    f: F,
    label: String,
}

impl<F> FnProfile<F> {
    pub fn new(label: impl Into<String>, f: F) -> Self {
        Self { f, label: label.into() }
    }
}

impl<F> fmt::Debug for FnProfile<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnProfile").field("label", &self.label).finish()
    }
}

impl<T: Real, F: Fn(usize) -> T + Send + Sync> Profile<T> for FnProfile<F> {
    fn value(&self, n: usize) -> T {
        (self.f)(n)
    }

    fn describe(&self) -> String {
        self.label.clone()
    }
}
