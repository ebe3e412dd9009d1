//! Closed-form weight families and the Copson and Huang–Ye special cases.

use num_complex::Complex;
use serde::Serialize;

use crate::cp::{cp_clamped, Exponent};
use crate::error::{HardyError, Result};
use crate::numeric::{ln_gamma, ln_gamma_ratio, pairwise_sum};
use crate::profile::{Power, Profile, ShiftedPower};
use crate::scalar::Real;
use crate::sequence::FinSeq;
use crate::supersolution::{hardy_weight, IndexTerms, VerificationReport, WeightPair};

/// Parameters of the power family `v(n) = n^α`, `φ(n) = n^β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyParams<T> {
    pub p: Exponent<T>,
    pub alpha: T,
    pub beta: T,
}

impl<T: Real> FamilyParams<T> {
    /// `β < 0` is only accepted for `p = 2`.
    pub fn new(p: Exponent<T>, alpha: T, beta: T) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(HardyError::InvalidInput(format!("alpha and beta must be finite, got {alpha}, {beta}")));
        }
        if beta < T::zero() && !p.is_two() {
            return Err(HardyError::Domain(format!("beta < 0 requires p = 2, got beta = {beta}, p = {}", p.get())));
        }
        Ok(Self { p, alpha, beta })
    }

    /// The supersolution pair that generates [`power_weight`].
    pub fn pair(&self) -> WeightPair<T> {
        WeightPair::new(Power::new(self.alpha), Power::new(self.beta), self.p)
    }
}

/// `((p-1)/p)^p / n^p`.
pub fn classical_weight<T: Real>(p: Exponent<T>, n: usize) -> T {
    assert!(n >= 1, "weights are indexed from 1");
    p.hardy_constant() / T::from_index(n).powf(p.get())
}

/// `1 - (1 - 1/n)^e` and `(1 + 1/n)^e - 1`, both through `expm1`/`ln_1p`.
fn power_gaps<T: Real>(n: usize, e: T) -> (T, T) {
    let inv = T::from_index(n).recip();
    let below = if n == 1 {
        // φ(0) = 0, so the first difference is φ(1) = 1 whatever e is
        T::one()
    } else {
        -(e * (-inv).ln_1p()).exp_m1()
    };
    let above = (e * inv.ln_1p()).exp_m1();
    (below, above)
}

/// Shared kernel of [`power_weight`] and [`fkp_weight`]. Kept out of line
/// so both see identical rounding whatever the call site inlines.
#[inline(never)]
fn power_family<T: Real>(n: usize, alpha: T, beta: T, pm1: T) -> T {
    let inv = T::from_index(n).recip();
    let (below, above) = power_gaps(n, beta);
    let lead = T::from_index(n).powf(alpha);
    let ratio = (alpha * inv.ln_1p()).exp();
    lead * (below.powf(pm1) - ratio * above.powf(pm1))
}

/// `(1 - (1-1/n)^{(p-1)/p})^{p-1} - ((1+1/n)^{(p-1)/p} - 1)^{p-1}`.
pub fn fkp_weight<T: Real>(p: Exponent<T>, n: usize) -> T {
    assert!(n >= 1, "weights are indexed from 1");
    power_family(n, T::zero(), p.conjugate_ratio(), p.get() - T::one())
}

/// `n^α [(1 - (1-1/n)^β)^{p-1} - (1+1/n)^α ((1+1/n)^β - 1)^{p-1}]`.
pub fn power_weight<T: Real>(fp: &FamilyParams<T>, n: usize) -> T {
    assert!(n >= 1, "weights are indexed from 1");
    power_family(n, fp.alpha, fp.beta, fp.p.get() - T::one())
}

/// Largest magnitude among the two terms of [`power_weight`]; the natural
/// scale for comparing weights that nearly cancel.
pub fn power_weight_scale<T: Real>(fp: &FamilyParams<T>, n: usize) -> T {
    let pm1 = fp.p.get() - T::one();
    let inv = T::from_index(n).recip();
    let (below, above) = power_gaps(n, fp.beta);
    let lead = T::from_index(n).powf(fp.alpha);
    let ratio = (fp.alpha * inv.ln_1p()).exp();
    (lead * below.powf(pm1)).abs().max((lead * ratio * above.powf(pm1)).abs())
}

/// Index beyond which [`copson_phi`] switches from log-Gamma to the
/// multiplicative recurrence.
const COPSON_RECURRENCE_FROM: usize = 1000;

fn copson_gamma_shift<T: Real>(p: Exponent<T>, alpha: T) -> Result<T> {
    if !alpha.is_finite() {
        return Err(HardyError::InvalidInput(format!("alpha must be finite, got {alpha}")));
    }
    Ok((alpha + T::one()) / p.get())
}

/// `Γ(n + 1 - γ) / Γ(n)` with `γ = (α+1)/p`, by direct log-Gamma.
fn copson_phi_direct<T: Real>(gamma: T, n: usize) -> Result<T> {
    let x = T::from_index(n);
    let delta = T::one() - gamma;
    let shifted = x + delta;
    if shifted <= T::zero() && shifted == shifted.floor() {
        return Err(HardyError::Domain(format!("Gamma pole at n + 1 - (alpha+1)/p = {shifted}")));
    }
    let log_ratio = if shifted >= T::lit(0.5) {
        ln_gamma_ratio(x, delta)
    } else {
        // Γ is negative on (-1, 0), (-3, -2), ...
        let below = (-shifted.floor()).to_usize().unwrap_or(0);
        if shifted < T::zero() && below % 2 == 1 {
            return Err(HardyError::Domain(format!("Gamma({shifted}) is negative")));
        }
        ln_gamma(shifted) - ln_gamma(x)
    };
    Ok(log_ratio.exp())
}

/// Copson supersolution `φ(n) = Γ(n + 1 - (α+1)/p) / Γ(n)`, with `φ(0) = 0`.
pub fn copson_phi<T: Real>(p: Exponent<T>, alpha: T, n: usize) -> Result<T> {
    let gamma = copson_gamma_shift(p, alpha)?;
    if n == 0 {
        return Ok(T::zero());
    }
    if n <= COPSON_RECURRENCE_FROM {
        return copson_phi_direct(gamma, n);
    }
    let mut value = copson_phi_direct(gamma, COPSON_RECURRENCE_FROM)?;
    for k in COPSON_RECURRENCE_FROM..n {
        value = value * (T::from_index(k + 1) - gamma) / T::from_index(k);
    }
    Ok(value)
}

/// [`copson_phi`] tabulated on `0..=last`, with the exact increment
/// `Δφ(n) = φ(n) (1-γ) / (n-γ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CopsonPhi<T> {
    gamma: T,
    values: Vec<T>,
}

impl<T: Real> CopsonPhi<T> {
    pub fn new(p: Exponent<T>, alpha: T, last: usize) -> Result<Self> {
        let gamma = copson_gamma_shift(p, alpha)?;
        let mut values = Vec::with_capacity(last + 1);
        values.push(T::zero());
        for n in 1..=last {
            let v = if n <= COPSON_RECURRENCE_FROM {
                copson_phi_direct(gamma, n)?
            } else {
                values[n - 1] * (T::from_index(n) - gamma) / T::from_index(n - 1)
            };
            values.push(v);
        }
        Ok(Self { gamma, values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
}

impl<T: Real> Profile<T> for CopsonPhi<T> {
    fn value(&self, n: usize) -> T {
        self.values.get(n).copied().unwrap_or_else(T::nan)
    }

    fn increment(&self, n: usize) -> T {
        let phi = self.value(n);
        if n == 1 {
            phi
        } else {
            phi * (T::one() - self.gamma) / (T::from_index(n) - self.gamma)
        }
    }

    fn coverage(&self) -> Option<usize> {
        Some(self.values.len() - 1)
    }

    fn describe(&self) -> String {
        format!("Gamma(n + 1 - {})/Gamma(n)", self.gamma)
    }
}

fn require_copson_alpha<T: Real>(alpha: T) -> Result<()> {
    if alpha.is_finite() && alpha < T::zero() {
        Ok(())
    } else {
        Err(HardyError::Domain(format!("Copson inequality needs alpha < 0, got {alpha}")))
    }
}

/// Copson pair on `0..=last`: `v(1) = 0`, `v(n) = (n-1)^α` for `n >= 2`,
/// and `φ` from [`CopsonPhi`].
pub fn copson_pair<T: Real>(p: Exponent<T>, alpha: T, last: usize) -> Result<WeightPair<T>> {
    require_copson_alpha(alpha)?;
    Ok(WeightPair::new(ShiftedPower { exponent: alpha }, CopsonPhi::new(p, alpha, last)?, p))
}

/// `((p - α - 1)/p)^p`.
pub fn copson_constant<T: Real>(p: Exponent<T>, alpha: T) -> T {
    let p = p.get();
    ((p - alpha - T::one()) / p).powf(p)
}

/// `((p - α - 1)/p)^p (n+1)^{α-p}`.
pub fn copson_weight<T: Real>(p: Exponent<T>, alpha: T, n: usize) -> T {
    copson_constant(p, alpha) * T::from_index(n + 1).powf(alpha - p.get())
}

/// Checks
/// `Σ n^α|u(n)-u(n-1)|^p >= ((p-α-1)/p)^p Σ (n+1)^{α-p}|u(n)|^p + Σ_{n≥2} n^α R_p(u(n), φ(n))`
/// with the Copson `φ`. The report's `residual` is the slack of the
/// inequality and `negative_weights` is always empty.
pub fn copson_verify<T: Real>(u: &FinSeq<T>, p: Exponent<T>, alpha: T) -> Result<VerificationReport<T>> {
    require_copson_alpha(alpha)?;
    let u1 = u.get(1);
    if u1.re != T::zero() || u1.im != T::zero() {
        return Err(HardyError::Precondition(format!("Copson inequality needs u(1) = 0, got {u1}")));
    }
    let horizon = u.horizon();
    let phi = CopsonPhi::new(p, alpha, horizon)?;
    let pe = p.get();
    let half_p = pe * T::lit(0.5);
    let constant = copson_constant(p, alpha);
    let dense = u.to_dense(horizon);
    let per_index: Vec<IndexTerms<T>> = (1..=horizon)
        .map(|n| {
            let nn = T::from_index(n);
            let v = nn.powf(alpha);
            let (prev, cur) = (dense[n - 1], dense[n]);
            let remainder = if n == 1 {
                T::zero()
            } else {
                let dphi_pow = phi.increment(n).powf(pe - T::one());
                let psi_prev = prev / phi.value(n - 1);
                let psi_cur = cur / phi.value(n);
                let first = cp_clamped(cur - prev, cur * (phi.value(n - 1) / phi.value(n)) - prev, pe);
                let second = cp_clamped(psi_prev, psi_prev - psi_cur, pe);
                v * (first + phi.value(n - 1) * dphi_pow * second)
            };
            IndexTerms {
                n,
                lhs: v * (cur - prev).norm_sqr().powf(half_p),
                weighted: constant * (nn + T::one()).powf(alpha - pe) * cur.norm_sqr().powf(half_p),
                remainder,
            }
        })
        .collect();
    let lhs = pairwise_sum(&per_index.iter().map(|t| t.lhs).collect::<Vec<_>>());
    let weight_sum = pairwise_sum(&per_index.iter().map(|t| t.weighted).collect::<Vec<_>>());
    let remainder_sum = pairwise_sum(&per_index.iter().map(|t| t.remainder).collect::<Vec<_>>());
    let residual = lhs - weight_sum - remainder_sum;
    if !residual.is_finite() {
        return Err(HardyError::Overflow("Copson sums left the finite range".into()));
    }
    Ok(VerificationReport {
        lhs,
        weight_sum,
        remainder_sum,
        residual,
        horizon,
        per_index,
        negative_weights: Vec::new(),
    })
}

/// Generated Copson weight against the closed form at one index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CopsonWeightRow<T> {
    pub n: usize,
    pub generated: T,
    pub closed_form: T,
    /// `|generated - closed_form| / |closed_form|`
    pub relative_gap: T,
}

/// Compares the weight generated by [`copson_pair`] with
/// [`copson_weight`] on `first..=last`.
pub fn copson_weight_comparison<T: Real>(
    p: Exponent<T>,
    alpha: T,
    first: usize,
    last: usize,
) -> Result<Vec<CopsonWeightRow<T>>> {
    let pair = copson_pair(p, alpha, last + 1)?;
    (first.max(1)..=last)
        .map(|n| {
            let generated = hardy_weight(&pair, n)?;
            let closed_form = copson_weight(p, alpha, n);
            Ok(CopsonWeightRow {
                n,
                generated,
                closed_form,
                relative_gap: (generated - closed_form).abs() / closed_form.abs(),
            })
        })
        .collect()
}

/// Both sides of the `p = 2` identity
/// `Σ v|Δu|² + Σ div(v∇φ)/φ |u|² = Σ v(n+1) |√(φ(n)/φ(n+1)) u(n+1) - √(φ(n+1)/φ(n)) u(n)|²`
/// where `div(v∇φ)(n) = v(n+1)Δφ(n+1) - v(n)Δφ(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HuangYeCheck<T> {
    pub lhs: T,
    pub rhs: T,
    pub scale: T,
}

impl<T: Real> HuangYeCheck<T> {
    pub fn relative(&self) -> T {
        let d = (self.lhs - self.rhs).abs();
        if self.scale > T::zero() {
            d / self.scale
        } else {
            d
        }
    }
}

fn huang_ye_tables<T: Real>(u: &FinSeq<T>, v: &dyn Profile<T>, phi: &dyn Profile<T>) -> Result<(Vec<Complex<T>>, Vec<T>, Vec<T>)> {
    let last = u.horizon() + 1;
    if phi.value(0) != T::zero() {
        return Err(HardyError::InvariantViolation {
            index: 0,
            reason: format!("phi(0) must be 0, got {}", phi.value(0)),
        });
    }
    let mut vs = vec![T::zero()];
    let mut phis = vec![T::zero()];
    for n in 1..=last {
        let (vn, pn) = (v.value(n), phi.value(n));
        if !(pn.is_finite() && pn > T::zero()) {
            return Err(HardyError::InvariantViolation {
                index: n,
                reason: format!("phi(n) must be finite and > 0, got {pn}"),
            });
        }
        if !(vn.is_finite() && vn >= T::zero()) {
            return Err(HardyError::InvariantViolation {
                index: n,
                reason: format!("v(n) must be finite and >= 0, got {vn}"),
            });
        }
        vs.push(vn);
        phis.push(pn);
    }
    Ok((u.to_dense(last), vs, phis))
}

/// Left side: `Σ v|Δu|² + Σ div(v∇φ)/φ |u|²`. Only positivity of `φ` on
/// `n >= 1` is required; `φ` need not be monotone.
pub fn huang_ye_lhs<T: Real>(u: &FinSeq<T>, v: &dyn Profile<T>, phi: &dyn Profile<T>) -> Result<(T, T)> {
    let (us, vs, phis) = huang_ye_tables(u, v, phi)?;
    let horizon = u.horizon();
    let mut terms = Vec::with_capacity(2 * horizon);
    let mut scale = T::zero();
    for n in 1..=horizon {
        let grad = vs[n] * (us[n] - us[n - 1]).norm_sqr();
        let div = vs[n + 1] * (phis[n + 1] - phis[n]) - vs[n] * (phis[n] - phis[n - 1]);
        let pot = div / phis[n] * us[n].norm_sqr();
        scale = scale.max(grad.abs()).max(pot.abs());
        terms.push(grad);
        terms.push(pot);
    }
    Ok((pairwise_sum(&terms), scale))
}

/// Right side: `Σ_{n≥1} v(n+1)|√(φ(n)/φ(n+1)) u(n+1) - √(φ(n+1)/φ(n)) u(n)|²`.
pub fn huang_ye_rhs<T: Real>(u: &FinSeq<T>, v: &dyn Profile<T>, phi: &dyn Profile<T>) -> Result<T> {
    let (us, vs, phis) = huang_ye_tables(u, v, phi)?;
    let terms: Vec<T> = (1..=u.horizon())
        .map(|n| {
            let r = (phis[n] / phis[n + 1]).sqrt();
            vs[n + 1] * (us[n + 1] * r - us[n] / r).norm_sqr()
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

/// Evaluates both sides of the Huang–Ye identity.
pub fn huang_ye_check<T: Real>(u: &FinSeq<T>, v: &dyn Profile<T>, phi: &dyn Profile<T>) -> Result<HuangYeCheck<T>> {
    let (lhs, scale) = huang_ye_lhs(u, v, phi)?;
    let rhs = huang_ye_rhs(u, v, phi)?;
    Ok(HuangYeCheck {
        lhs,
        rhs,
        scale: scale.max(rhs.abs()).max(lhs.abs()),
    })
}
