//! Hardy weights generated from supersolution pairs `(v, φ)` and the exact
//! remainder identity
//!
//! ```text
//! Σ_{n≥1} v(n)|u(n)-u(n-1)|^p = Σ_{n≥1} w(n)|u(n)|^p + Σ_{n≥2} v(n) R_p(u(n), φ(n))
//! ```
//!
//! which holds whenever `w(n) φ(n)^{p-1} = v(n)Δφ(n)^{p-1} - v(n+1)Δφ(n+1)^{p-1}`.
//! With `≥` in place of `=` the identity becomes an inequality.
//!
//! Every series is truncated at the horizon `N* = max_support(u) + 1`;
//! past it both `u(n)` and `u(n-1)` vanish, so the truncation is exact.
//! Sums are reduced with [`pairwise_sum`] in index order.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use serde::Serialize;

use crate::cp::{cp_clamped, Exponent, IdentityCheck, DEFAULT_ABS_TOL};
use crate::error::{HardyError, Result};
use crate::numeric::pairwise_sum;
use crate::profile::Profile;
use crate::scalar::Real;
use crate::sequence::FinSeq;

/// Supersolution data `(v, φ)` together with the exponent `p`.
///
/// Requirements, checked over whatever index range an operation touches:
/// `v(n) >= 0` and `φ(n) > 0` for `n >= 1`, `φ(0) = 0`, `φ` non-decreasing.
#[derive(Clone)]
pub struct WeightPair<T> {
    v: Arc<dyn Profile<T>>,
    phi: Arc<dyn Profile<T>>,
    p: Exponent<T>,
}

impl<T: Real> fmt::Debug for WeightPair<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightPair")
            .field("v", &self.v.describe())
            .field("phi", &self.phi.describe())
            .field("p", &self.p.get())
            .finish()
    }
}

impl<T: Real> WeightPair<T> {
    pub fn new(v: impl Profile<T> + 'static, phi: impl Profile<T> + 'static, p: Exponent<T>) -> Self {
        Self {
            v: Arc::new(v),
            phi: Arc::new(phi),
            p,
        }
    }

    pub fn from_shared(v: Arc<dyn Profile<T>>, phi: Arc<dyn Profile<T>>, p: Exponent<T>) -> Self {
        Self { v, phi, p }
    }

    pub fn p(&self) -> Exponent<T> {
        self.p
    }

    pub fn v(&self, n: usize) -> T {
        self.v.value(n)
    }

    pub fn phi(&self, n: usize) -> T {
        self.phi.value(n)
    }

    /// `Δφ(n) = φ(n) - φ(n-1)`, `n >= 1`.
    pub fn phi_increment(&self, n: usize) -> T {
        self.phi.increment(n)
    }

    pub fn describe(&self) -> String {
        format!("v = {}, phi = {}, p = {}", self.v.describe(), self.phi.describe(), self.p.get())
    }

    /// Checks the pair's requirements on `lo..=hi`.
    pub fn validate(&self, lo: usize, hi: usize) -> Result<()> {
        let violation = |index: usize, reason: String| HardyError::InvariantViolation { index, reason };
        for (name, prof) in [("v", &self.v), ("phi", &self.phi)] {
            if let Some(last) = prof.coverage() {
                if last < hi {
                    return Err(violation(
                        last + 1,
                        format!("tabulated {name} covers 0..={last}, need 0..={hi}"),
                    ));
                }
            }
        }
        if lo == 0 && self.phi(0) != T::zero() {
            return Err(violation(0, format!("phi(0) must be 0, got {}", self.phi(0))));
        }
        for n in lo.max(1)..=hi {
            let vn = self.v(n);
            if !vn.is_finite() || vn < T::zero() {
                return Err(violation(n, format!("v(n) must be finite and >= 0, got {vn}")));
            }
            let phin = self.phi(n);
            if !phin.is_finite() || phin <= T::zero() {
                return Err(violation(n, format!("phi(n) must be finite and > 0, got {phin}")));
            }
            let prev = self.phi(n - 1);
            if phin < prev || self.phi_increment(n) < T::zero() {
                return Err(violation(n, format!("phi must be non-decreasing: phi(n-1) = {prev} > phi(n) = {phin}")));
            }
        }
        Ok(())
    }
}

/// Per-index profile data needed by the engine, `n = 0..=last`.
struct Table<T> {
    phi: Vec<T>,
    /// `v(n) Δφ(n)^{p-1}`
    flux: Vec<T>,
    /// `Δφ(n)^{p-1}`
    dphi_pow: Vec<T>,
    v: Vec<T>,
}

impl<T: Real> Table<T> {
    fn build(wp: &WeightPair<T>, last: usize) -> Self {
        let pm1 = wp.p.get() - T::one();
        let mut phi = Vec::with_capacity(last + 1);
        let mut dphi_pow = Vec::with_capacity(last + 1);
        let mut v = Vec::with_capacity(last + 1);
        let mut flux = Vec::with_capacity(last + 1);
        phi.push(T::zero());
        dphi_pow.push(T::zero());
        v.push(T::zero());
        flux.push(T::zero());
        for n in 1..=last {
            phi.push(wp.phi(n));
            let dp = wp.phi_increment(n).powf(pm1);
            let vn = wp.v(n);
            dphi_pow.push(dp);
            v.push(vn);
            flux.push(vn * dp);
        }
        Self { phi, flux, dphi_pow, v }
    }

    /// `[v(n)Δφ(n)^{p-1} - v(n+1)Δφ(n+1)^{p-1}] / φ(n)^{p-1}`, needs `n + 1 <= last`.
    fn weight(&self, n: usize, pm1: T) -> T {
        (self.flux[n] - self.flux[n + 1]) / self.phi[n].powf(pm1)
    }
}

/// `R_p(u(n), φ(n))` for `n >= 2` from neighbouring values.
#[inline]
fn remainder_kernel<T: Real>(
    u_prev: Complex<T>,
    u_cur: Complex<T>,
    phi_prev: T,
    phi_cur: T,
    dphi_pow: T,
    p: T,
) -> T {
    let psi_prev = u_prev / phi_prev;
    let psi_cur = u_cur / phi_cur;
    let first = cp_clamped(u_cur - u_prev, u_cur * (phi_prev / phi_cur) - u_prev, p);
    let second = cp_clamped(psi_prev, psi_prev - psi_cur, p);
    first + phi_prev * dphi_pow * second
}

/// Hardy weight generated by the pair with equality in the supersolution
/// condition:
/// `w(n) = [v(n)Δφ(n)^{p-1} - v(n+1)Δφ(n+1)^{p-1}] / φ(n)^{p-1}`.
///
/// The result may be negative for adversarial pairs; that is not an error.
pub fn hardy_weight<T: Real>(wp: &WeightPair<T>, n: usize) -> Result<T> {
    if n == 0 {
        return Err(HardyError::InvalidInput("hardy weight is defined for n >= 1".into()));
    }
    wp.validate(n - 1, n + 1)?;
    let pm1 = wp.p.get() - T::one();
    let lead = wp.v(n) * wp.phi_increment(n).powf(pm1);
    let next = wp.v(n + 1) * wp.phi_increment(n + 1).powf(pm1);
    Ok((lead - next) / wp.phi(n).powf(pm1))
}

/// Slack of the supersolution condition at one index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionSlack<T> {
    pub n: usize,
    /// `v(n)Δφ(n)^{p-1} - v(n+1)Δφ(n+1)^{p-1} - w(n)φ(n)^{p-1}`
    pub slack: T,
    /// Magnitude of the largest of the three terms.
    pub scale: T,
}

impl<T: Real> ConditionSlack<T> {
    pub fn holds(&self, abs_tol: T) -> bool {
        self.slack >= -abs_tol * self.scale
    }
}

/// Evaluates the supersolution condition for a candidate weight `w` on
/// `first..=last`.
pub fn check_condition<T: Real>(
    wp: &WeightPair<T>,
    w: impl Fn(usize) -> T,
    first: usize,
    last: usize,
) -> Result<Vec<ConditionSlack<T>>> {
    let first = first.max(1);
    wp.validate(first - 1, last + 1)?;
    let pm1 = wp.p.get() - T::one();
    Ok((first..=last)
        .map(|n| {
            let lead = wp.v(n) * wp.phi_increment(n).powf(pm1);
            let next = wp.v(n + 1) * wp.phi_increment(n + 1).powf(pm1);
            let target = w(n) * wp.phi(n).powf(pm1);
            ConditionSlack {
                n,
                slack: lead - next - target,
                scale: lead.abs().max(next.abs()).max(target.abs()),
            }
        })
        .collect())
}

/// `R_p(u(n), φ(n))`; zero at `n = 1`.
pub fn remainder<T: Real>(u: &FinSeq<T>, wp: &WeightPair<T>, n: usize) -> Result<T> {
    if n == 0 {
        return Err(HardyError::InvalidInput("remainder is defined for n >= 1".into()));
    }
    wp.validate(n - 1, n)?;
    if n == 1 {
        return Ok(T::zero());
    }
    let p = wp.p.get();
    let dp = wp.phi_increment(n).powf(p - T::one());
    Ok(remainder_kernel(u.get(n - 1), u.get(n), wp.phi(n - 1), wp.phi(n), dp, p))
}

/// Contribution of one index to the three series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndexTerms<T> {
    pub n: usize,
    /// `v(n)|u(n) - u(n-1)|^p`
    pub lhs: T,
    /// `w(n)|u(n)|^p`
    pub weighted: T,
    /// `v(n) R_p(u(n), φ(n))`
    pub remainder: T,
}

/// Both sides of the weighted identity (or inequality) for one sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport<T> {
    /// `Σ v(n)|u(n) - u(n-1)|^p`
    pub lhs: T,
    /// `Σ w(n)|u(n)|^p`
    pub weight_sum: T,
    /// `Σ_{n≥2} v(n) R_p(u(n), φ(n))`
    pub remainder_sum: T,
    /// `lhs - weight_sum - remainder_sum`
    pub residual: T,
    /// Truncation horizon `N*`.
    pub horizon: usize,
    pub per_index: Vec<IndexTerms<T>>,
    /// Indices where the weight is negative.
    pub negative_weights: Vec<usize>,
}

impl<T: Real> VerificationReport<T> {
    fn assemble(per_index: Vec<IndexTerms<T>>, horizon: usize, negative_weights: Vec<usize>) -> Result<Self> {
        let lhs = pairwise_sum(&per_index.iter().map(|t| t.lhs).collect::<Vec<_>>());
        let weight_sum = pairwise_sum(&per_index.iter().map(|t| t.weighted).collect::<Vec<_>>());
        let remainder_sum = pairwise_sum(&per_index.iter().map(|t| t.remainder).collect::<Vec<_>>());
        let residual = lhs - weight_sum - remainder_sum;
        if !(lhs.is_finite() && weight_sum.is_finite() && remainder_sum.is_finite() && residual.is_finite()) {
            return Err(HardyError::Overflow(format!(
                "series left the finite range (lhs = {lhs}, weight_sum = {weight_sum}, remainder_sum = {remainder_sum})"
            )));
        }
        Ok(Self {
            lhs,
            weight_sum,
            remainder_sum,
            residual,
            horizon,
            per_index,
            negative_weights,
        })
    }

    /// Magnitude against which the residual is measured.
    pub fn scale(&self) -> T {
        self.lhs.abs() + self.weight_sum.abs() + self.remainder_sum.abs()
    }

    /// `|residual| / scale`, or `|residual|` when all sums vanish.
    pub fn relative_residual(&self) -> T {
        let s = self.scale();
        if s > T::zero() {
            self.residual.abs() / s
        } else {
            self.residual.abs()
        }
    }

    /// Identity reading: `|residual| <= rel_tol * scale`.
    pub fn identity_holds(&self, rel_tol: T) -> bool {
        self.residual.abs() <= rel_tol * self.scale()
    }

    /// Inequality reading: `lhs >= weight_sum + remainder_sum - tol * scale`.
    pub fn inequality_holds(&self, rel_tol: T) -> bool {
        self.residual >= -rel_tol * self.scale()
    }
}

fn collect_terms<T: Real>(
    u: &FinSeq<T>,
    wp: &WeightPair<T>,
    weight: impl Fn(&Table<T>, usize) -> T,
) -> Result<VerificationReport<T>> {
    let horizon = u.horizon();
    wp.validate(0, horizon + 1)?;
    let table = Table::build(wp, horizon + 1);
    let p = wp.p.get();
    let half_p = p * T::lit(0.5);
    let dense = u.to_dense(horizon);

    let mut per_index = Vec::with_capacity(horizon);
    let mut negative = Vec::new();
    for n in 1..=horizon {
        let w = weight(&table, n);
        if w < T::zero() {
            negative.push(n);
        }
        let (prev, cur) = (dense[n - 1], dense[n]);
        let lhs = table.v[n] * (cur - prev).norm_sqr().powf(half_p);
        let weighted = w * cur.norm_sqr().powf(half_p);
        let rem = if n == 1 {
            T::zero()
        } else {
            table.v[n] * remainder_kernel(prev, cur, table.phi[n - 1], table.phi[n], table.dphi_pow[n], p)
        };
        per_index.push(IndexTerms {
            n,
            lhs,
            weighted,
            remainder: rem,
        });
    }
    VerificationReport::assemble(per_index, horizon, negative)
}

/// Evaluates both sides of the identity with the weight generated by the
/// pair. The residual is zero up to rounding for every admissible pair.
pub fn verify_identity<T: Real>(u: &FinSeq<T>, wp: &WeightPair<T>) -> Result<VerificationReport<T>> {
    let pm1 = wp.p.get() - T::one();
    collect_terms(u, wp, |table, n| table.weight(n, pm1))
}

/// Same as [`verify_identity`] but with a caller-supplied weight `w`. When
/// `w` satisfies the supersolution condition the residual is `>= 0`.
pub fn verify_inequality<T: Real>(
    u: &FinSeq<T>,
    wp: &WeightPair<T>,
    w: impl Fn(usize) -> T,
) -> Result<VerificationReport<T>> {
    collect_terms(u, wp, |_, n| w(n))
}

/// Checks the per-index identity
/// `|u(n)-u(n-1)|^p = Δφ(n)^{p-1}(φ(n)|ψ(n)|^p - φ(n-1)|ψ(n-1)|^p) + R_p(u(n), φ(n))`
/// with `ψ = u/φ` and `ψ(0) = 0`.
pub fn pointwise_identity_residual<T: Real>(u: &FinSeq<T>, wp: &WeightPair<T>, n: usize) -> Result<IdentityCheck<T>> {
    let rem = remainder(u, wp, n)?;
    let p = wp.p.get();
    let half_p = p * T::lit(0.5);
    let (prev, cur) = (u.get(n - 1), u.get(n));
    let (phi_prev, phi_cur) = (wp.phi(n - 1), wp.phi(n));
    let psi_cur_p = (cur / phi_cur).norm_sqr().powf(half_p);
    let psi_prev_p = if n == 1 {
        T::zero()
    } else {
        (prev / phi_prev).norm_sqr().powf(half_p)
    };
    let dp = wp.phi_increment(n).powf(p - T::one());
    let lhs = (cur - prev).norm_sqr().powf(half_p);
    let a = dp * phi_cur * psi_cur_p;
    let b = dp * phi_prev * psi_prev_p;
    Ok(IdentityCheck {
        lhs,
        rhs: a - b + rem,
        scale: lhs.max(a).max(b).max(rem.abs()),
    })
}

/// Default absolute tolerance for slack checks, re-exported for callers
/// that compare slacks against `scale`.
pub fn default_abs_tol<T: Real>() -> T {
    T::lit(DEFAULT_ABS_TOL)
}
