//! Hardy deficit, the optimal shift toward the formal minimizers
//! `c n^{(p-1)/p}`, the resulting stability bound, and the critical
//! (logarithmic) Hardy inequality.

mod muckenhoupt;
mod shift;

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::Serialize;

use crate::cp::{radial_bracket, ConstantEstimate, Exponent, DEFAULT_C1_BUDGET};
use crate::error::{HardyError, Result};
use crate::numeric::pairwise_sum;
use crate::scalar::Real;
use crate::sequence::FinSeq;

pub use muckenhoupt::{muckenhoupt_constant, muckenhoupt_profile, MuckenhouptEstimate};
pub use shift::{log_series_tail, EXPLICIT_TAIL_TERMS};

use shift::{solve, ShiftProblem};

/// Default bracket width for the optimal shift, relative to the search radius.
pub const DEFAULT_SHIFT_TOL: f64 = 1e-12;
/// Bracket width used for the cached `c₁(p)`.
pub const C1_CACHE_TOL: f64 = 1e-10;

/// `Σ |u(n) - u(n-1)|^p - ((p-1)/p)^p Σ |u(n)|^p / n^p`.
pub fn hardy_deficit<T: Real>(u: &FinSeq<T>, p: Exponent<T>) -> Result<T> {
    let horizon = u.horizon();
    let dense = u.to_dense(horizon);
    let half_p = p.get() * T::lit(0.5);
    let grad: Vec<T> = (1..=horizon)
        .map(|n| (dense[n] - dense[n - 1]).norm_sqr().powf(half_p))
        .collect();
    let weighted: Vec<T> = u
        .iter()
        .map(|(n, z)| z.norm_sqr().powf(half_p) / T::from_index(n).powf(p.get()))
        .collect();
    let deficit = pairwise_sum(&grad) - p.hardy_constant() * pairwise_sum(&weighted);
    if !deficit.is_finite() {
        return Err(HardyError::Overflow("Hardy deficit left the finite range".into()));
    }
    Ok(deficit)
}

/// Minimizer of `c ↦ Σ_{n≥2} |u(n) - c n^{(p-1)/p}|^p / (n^p ln^p n)` and
/// its minimum, both as brackets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftOptimum<T> {
    pub shift: ConstantEstimate<T>,
    pub infimum: ConstantEstimate<T>,
    /// Bracket on the coefficient `Σ_{n>N*} 1/(n ln^p n)` of `|c|^p`.
    pub tail_lower: T,
    pub tail_upper: T,
    /// Last index summed explicitly (`N*`).
    pub truncation: usize,
}

fn shift_problem<T: Real>(u: &FinSeq<T>, p: Exponent<T>) -> (ShiftProblem<T>, usize) {
    let horizon = u.horizon().max(1);
    let pe = p.get();
    let q = p.conjugate_ratio();
    let mut problem = ShiftProblem {
        targets: Vec::new(),
        scales: Vec::new(),
        weights: Vec::new(),
        p: pe,
    };
    for n in 2..=horizon {
        let nn = T::from_index(n);
        problem.targets.push(u.get(n));
        problem.scales.push(nn.powf(q));
        problem.weights.push((nn * nn.ln()).powf(pe).recip());
    }
    (problem, horizon)
}

/// Minimizes over real `c`. The zero tail of `u` contributes
/// `|c|^p Σ_{n>N*} 1/(n ln^p n)`, bracketed by [`log_series_tail`]; the
/// reported brackets cover both ends.
pub fn optimal_shift<T: Real>(u: &FinSeq<T>, p: Exponent<T>, tol: T) -> Result<ShiftOptimum<T>> {
    if !(tol > T::zero()) {
        return Err(HardyError::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let (problem, horizon) = shift_problem(u, p);
    let tail = log_series_tail(horizon, p.get());
    let sol = solve(&problem, tail, tol)?;
    Ok(ShiftOptimum {
        shift: sol.shift,
        infimum: sol.minimum,
        tail_lower: tail.0,
        tail_upper: tail.1,
        truncation: horizon,
    })
}

/// Both sides of the stability inequality
/// `deficit >= c₁(p)/2^{p-1} ((p-1)/p)^p inf_c Σ_{n≥2} |u(n) - c n^{(p-1)/p}|^p / (n^p ln^p n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityReport<T> {
    pub deficit: T,
    pub c_star: T,
    pub c_star_lower: T,
    pub c_star_upper: T,
    /// Upper end of the bracket on the infimum; the bound uses this end.
    pub infimum_value: T,
    pub infimum_lower: T,
    /// Lower end of the `c₁(p)` bracket.
    pub c1_lower: T,
    /// `c₁(p) / 2^{p-1} · ((p-1)/p)^p`
    pub prefactor: T,
    pub bound: T,
    /// `deficit - bound`
    pub margin: T,
    pub truncation: usize,
}

fn c1_cache() -> &'static Mutex<HashMap<u64, ConstantEstimate<f64>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, ConstantEstimate<f64>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `c₁(p)` at [`C1_CACHE_TOL`], computed once per `p` per process.
pub fn c1_cached<T: Real>(p: Exponent<T>) -> Result<ConstantEstimate<T>> {
    let p = p.require_at_least_two()?;
    let key = p.get().as_f64();
    let est = {
        let cache = c1_cache().lock().unwrap_or_else(|e| e.into_inner());
        cache.get(&key.to_bits()).copied()
    };
    let est = match est {
        Some(e) => e,
        None => {
            let e = if key == 2.0 {
                ConstantEstimate::exact(1.0)
            } else {
                radial_bracket(key, C1_CACHE_TOL, DEFAULT_C1_BUDGET)?
            };
            c1_cache()
                .lock()
                .unwrap_or_else(|e| e.into_inner())
                .insert(key.to_bits(), e);
            e
        }
    };
    Ok(ConstantEstimate {
        value: T::lit(est.value),
        lower: T::lit(est.lower),
        upper: T::lit(est.upper),
        method: est.method,
        evaluations: est.evaluations,
    })
}

/// Stability report with the cached `c₁(p)`.
pub fn stability_report<T: Real>(u: &FinSeq<T>, p: Exponent<T>) -> Result<StabilityReport<T>> {
    let p = p.require_at_least_two()?;
    let c1 = c1_cached(p)?;
    stability_report_with(u, p, &c1, T::lit(DEFAULT_SHIFT_TOL))
}

/// Stability report with a caller-supplied `c₁(p)` bracket; the bound uses
/// its lower end.
pub fn stability_report_with<T: Real>(
    u: &FinSeq<T>,
    p: Exponent<T>,
    c1: &ConstantEstimate<T>,
    tol: T,
) -> Result<StabilityReport<T>> {
    let p = p.require_at_least_two()?;
    let deficit = hardy_deficit(u, p)?;
    let opt = optimal_shift(u, p, tol)?;
    let prefactor = c1.lower / T::lit(2.0).powf(p.get() - T::one()) * p.hardy_constant();
    let bound = prefactor * opt.infimum.upper;
    Ok(StabilityReport {
        deficit,
        c_star: opt.shift.value,
        c_star_lower: opt.shift.lower,
        c_star_upper: opt.shift.upper,
        infimum_value: opt.infimum.upper,
        infimum_lower: opt.infimum.lower,
        c1_lower: c1.lower,
        prefactor,
        bound,
        margin: deficit - bound,
        truncation: opt.truncation,
    })
}

/// Both sides of the critical Hardy inequality
/// `Σ_{n≥2} |v(n) - v(n-1)|^p n^{p-1} >= ((p-1)/p)^p inf_c Σ_{n≥2} |v(n) - c|^p / (n ln^p n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalHardyCheck<T> {
    pub lhs: T,
    /// Right side with the infimum over `c`.
    pub rhs: T,
    /// Right side with `c = v(1)`.
    pub rhs_at_v1: T,
    pub c_star: T,
    /// `lhs - rhs`
    pub slack: T,
}

/// Evaluates the critical Hardy inequality for a real, finitely supported
/// `v`. The tail of the right side is bracketed and its upper end is used,
/// so `rhs` never underestimates the infinite series.
pub fn critical_hardy_check<T: Real>(v: &FinSeq<T>, p: Exponent<T>) -> Result<CriticalHardyCheck<T>> {
    if !v.is_real() {
        return Err(HardyError::InvalidInput("critical Hardy check needs a real sequence".into()));
    }
    let pe = p.get();
    let half_p = pe * T::lit(0.5);
    let horizon = v.horizon().max(1);
    let dense = v.to_dense(horizon);
    let lhs_terms: Vec<T> = (2..=horizon)
        .map(|n| (dense[n] - dense[n - 1]).norm_sqr().powf(half_p) * T::from_index(n).powf(pe - T::one()))
        .collect();
    let lhs = pairwise_sum(&lhs_terms);

    let mut problem = ShiftProblem {
        targets: Vec::new(),
        scales: Vec::new(),
        weights: Vec::new(),
        p: pe,
    };
    for n in 2..=horizon {
        let nn = T::from_index(n);
        problem.targets.push(dense[n]);
        problem.scales.push(T::one());
        problem.weights.push((nn * nn.ln().powf(pe)).recip());
    }
    let tail = log_series_tail(horizon, pe);
    let sol = solve(&problem, tail, T::lit(DEFAULT_SHIFT_TOL))?;
    let constant = p.hardy_constant();
    let at_v1 = problem.value(dense[1].re, tail.1);
    let rhs = constant * sol.value_at_shift.min(at_v1);
    let rhs_at_v1 = constant * at_v1;
    if !(lhs.is_finite() && rhs_at_v1.is_finite()) {
        return Err(HardyError::Overflow("critical Hardy sums left the finite range".into()));
    }
    Ok(CriticalHardyCheck {
        lhs,
        rhs,
        rhs_at_v1,
        c_star: sol.shift.value,
        slack: lhs - rhs,
    })
}

/// `f(c)` of [`optimal_shift`] at a given `c`, with the upper tail
/// coefficient. Exposed for convexity checks and external oracles.
pub fn shift_objective<T: Real>(u: &FinSeq<T>, p: Exponent<T>, c: T) -> T {
    let (problem, horizon) = shift_problem(u, p);
    let tail = log_series_tail(horizon, p.get());
    problem.value(c, tail.1)
}
