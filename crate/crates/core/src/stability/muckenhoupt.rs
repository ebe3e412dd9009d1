//! Two-weight Muckenhoupt quantity for `μ(k) = 1/((k+1) ln^p(k+1))` and
//! `ν(k) = (k+1)^{p-1}`:
//!
//! ```text
//! B(r) = [Σ_{k≥r} μ(k)] · [Σ_{k=1}^{r} ν(k)^{-1/(p-1)}]^{p-1}
//! ```

use serde::Serialize;

use crate::cp::Exponent;
use crate::error::{HardyError, Result};
use crate::numeric::{log_weight, log_weight_tail, CompensatedSum};
use crate::scalar::Real;

/// Running supremum of `B(r)` over `1 <= r <= r_max`, as an interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MuckenhouptEstimate<T> {
    pub sup_lower: T,
    pub sup_upper: T,
    pub r_at_sup: usize,
    /// `1 / (p - 1)`
    pub bound: T,
}

impl<T: Real> MuckenhouptEstimate<T> {
    pub fn within_bound(&self, tol: T) -> bool {
        self.sup_upper <= self.bound + tol
    }
}

/// Bracket on `B(r)` for every `r` in `1..=r_max`. The `μ` tails use
/// `tail_order` explicit terms past `r_max` and then the integral bracket.
pub fn muckenhoupt_profile<T: Real>(p: Exponent<T>, r_max: usize, tail_order: usize) -> Result<Vec<(T, T)>> {
    if r_max == 0 {
        return Err(HardyError::InvalidInput("r_max must be at least 1".into()));
    }
    let pe = p.get();
    let pm1 = pe - T::one();
    // μ(k) = g(k+1) with g(m) = 1/(m ln^p m); tail_μ(r) = Σ_{m>r} g(m)
    let last = r_max + tail_order.max(1);
    let (bracket_lo, bracket_hi) = log_weight_tail(last, pe);
    let mut tails = vec![T::zero(); r_max + 1];
    let mut acc = CompensatedSum::default();
    for m in (r_max + 1..=last).rev() {
        acc.add(log_weight(T::from_index(m), pe));
    }
    tails[r_max] = acc.value();
    for r in (1..r_max).rev() {
        acc.add(log_weight(T::from_index(r + 1), pe));
        tails[r] = acc.value();
    }
    let mut harmonic = CompensatedSum::default();
    let mut out = Vec::with_capacity(r_max);
    for (r, &tail) in tails.iter().enumerate().skip(1) {
        harmonic.add(T::from_index(r + 1).recip());
        let factor = harmonic.value().powf(pm1);
        out.push(((tail + bracket_lo) * factor, (tail + bracket_hi) * factor));
    }
    Ok(out)
}

/// Supremum of `B(r)` over `1..=r_max`.
pub fn muckenhoupt_constant<T: Real>(p: Exponent<T>, r_max: usize, tail_order: usize) -> Result<MuckenhouptEstimate<T>> {
    let profile = muckenhoupt_profile(p, r_max, tail_order)?;
    let mut sup_lower = T::neg_infinity();
    let mut sup_upper = T::neg_infinity();
    let mut r_at_sup = 1;
    for (i, &(lo, hi)) in profile.iter().enumerate() {
        sup_lower = sup_lower.max(lo);
        if hi > sup_upper {
            sup_upper = hi;
            r_at_sup = i + 1;
        }
    }
    Ok(MuckenhouptEstimate {
        sup_lower,
        sup_upper,
        r_at_sup,
        bound: (p.get() - T::one()).recip(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_value_at_two() {
        let prof = muckenhoupt_profile(Exponent::new(2.0f64).unwrap(), 1, 100_000).unwrap();
        let (lo, hi) = prof[0];
        assert!(hi - lo < 1e-10);
        assert!((lo - 1.054_871_400_6).abs() < 1e-8, "{lo}");
    }

    #[test]
    fn interval_is_ordered() {
        let est = muckenhoupt_constant(Exponent::new(3.0f64).unwrap(), 200, 1000).unwrap();
        assert!(est.sup_lower <= est.sup_upper);
        assert_eq!(est.bound, 0.5);
    }
}
