//! The `C_p` convexity-gap functional, its algebraic identities, and the
//! constant `c₁(p)` in the lower bound `C_p(ξ, η) ≥ c₁(p) |η|^p` (`p ≥ 2`).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex;
use serde::Serialize;

use crate::error::{HardyError, Result};
use crate::scalar::Real;

/// Default relative tolerance for identity residuals.
pub const DEFAULT_REL_TOL: f64 = 1e-10;
/// Default absolute tolerance (relative to the magnitude of the terms
/// involved) below which provably non-negative quantities are clamped to 0.
pub const DEFAULT_ABS_TOL: f64 = 1e-13;
/// Default evaluation budget for the `c₁(p)` search.
pub const DEFAULT_C1_BUDGET: usize = 2_000_000;

/// Exponent `p` of the inequality, `1 < p < ∞`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Exponent<T>(T);

impl<T: Real> Exponent<T> {
    pub fn new(p: T) -> Result<Self> {
        if !p.is_finite() || p <= T::one() {
            return Err(HardyError::Domain(format!("exponent must satisfy 1 < p < inf, got {p}")));
        }
        Ok(Self(p))
    }

    #[inline]
    pub fn get(self) -> T {
        self.0
    }

    /// Errors unless `p >= 2`.
    pub fn require_at_least_two(self) -> Result<Self> {
        if self.0 < T::lit(2.0) {
            return Err(HardyError::Domain(format!("operation requires p >= 2, got {}", self.0)));
        }
        Ok(self)
    }

    /// `((p - 1) / p)^p`, the classical Hardy constant.
    pub fn hardy_constant(self) -> T {
        let p = self.0;
        ((p - T::one()) / p).powf(p)
    }

    /// `(p - 1) / p`, the exponent of the formal minimizers `n^{(p-1)/p}`.
    pub fn conjugate_ratio(self) -> T {
        (self.0 - T::one()) / self.0
    }

    pub fn is_two(self) -> bool {
        self.0 == T::lit(2.0)
    }
}

/// Tolerance pair used by verification routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances<T> {
    pub rel: T,
    pub abs: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            rel: T::lit(DEFAULT_REL_TOL),
            abs: T::lit(DEFAULT_ABS_TOL),
        }
    }
}

/// How a [`ConstantEstimate`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    GridRefine,
    GoldenSection,
    /// Sign bisection on the derivative of a convex function.
    Bisection,
    ClosedForm,
}

/// A numerically computed constant together with a bracket that contains
/// the exact value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantEstimate<T> {
    pub value: T,
    pub lower: T,
    pub upper: T,
    pub method: EstimateMethod,
    pub evaluations: usize,
}

impl<T: Real> ConstantEstimate<T> {
    pub fn exact(value: T) -> Self {
        Self {
            value,
            lower: value,
            upper: value,
            method: EstimateMethod::ClosedForm,
            evaluations: 0,
        }
    }

    pub fn width(&self) -> T {
        self.upper - self.lower
    }

    pub fn contains(&self, x: T) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Value of `C_p` before clamping, with the magnitude of the largest term
/// that entered the cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpTerms<T> {
    pub raw: T,
    pub scale: T,
}

pub(crate) fn ensure_finite<T: Real>(z: Complex<T>, what: &str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(HardyError::InvalidInput(format!("{what} is not finite: {z}")))
    }
}

/// Unclamped `|ξ|^p - |ξ-η|^p - p |ξ-η|^{p-2} Re((ξ-η) conj(η))`.
///
/// The last term is taken as 0 when `ξ = η`; for `p < 2` that is its limit.
#[inline]
pub fn cp_terms<T: Real>(xi: Complex<T>, eta: Complex<T>, p: T) -> CpTerms<T> {
    let half_p = p * T::lit(0.5);
    let d = xi - eta;
    let d2 = d.norm_sqr();
    let xi_p = xi.norm_sqr().powf(half_p);
    let d_p = d2.powf(half_p);
    let cross = if d2 == T::zero() {
        T::zero()
    } else {
        p * d2.powf(half_p - T::one()) * (d * eta.conj()).re
    };
    CpTerms {
        raw: xi_p - d_p - cross,
        scale: xi_p.max(d_p).max(cross.abs()),
    }
}

/// Clamps a quantity that is non-negative in exact arithmetic: values in
/// `[-abs_tol * scale, 0)` become 0, anything else is returned unchanged.
#[inline]
pub fn clamp_nonnegative<T: Real>(raw: T, scale: T, abs_tol: T) -> T {
    if raw < T::zero() && raw >= -abs_tol * scale {
        T::zero()
    } else {
        raw
    }
}

#[inline]
pub(crate) fn cp_clamped<T: Real>(xi: Complex<T>, eta: Complex<T>, p: T) -> T {
    let t = cp_terms(xi, eta, p);
    clamp_nonnegative(t.raw, t.scale, T::lit(DEFAULT_ABS_TOL))
}

/// `C_p(ξ, η)`, clamped to 0 when within rounding of 0.
pub fn cp_value<T: Real>(xi: Complex<T>, eta: Complex<T>, p: Exponent<T>) -> Result<T> {
    ensure_finite(xi, "xi")?;
    ensure_finite(eta, "eta")?;
    Ok(cp_clamped(xi, eta, p.get()))
}

/// The quotient whose infimum over `(s, t) ≠ (0, 0)` defines `c₁(p)`:
/// `([t² + s² + 2s + 1]^{p/2} - 1 - p s) / (t² + s²)^{p/2}`.
pub fn c1_objective<T: Real>(s: T, t: T, p: T) -> T {
    let r2 = s * s + t * t;
    let half_p = p * T::lit(0.5);
    ((r2 + s + s + T::one()).powf(half_p) - T::one() - p * s) / r2.powf(half_p)
}

/// The `c₁` objective minimized over the angle at fixed radius `r >= 2`.
///
/// With `s = r cos θ`, the numerator is convex in `cos θ` for `p >= 2` and
/// stationary at `cos θ = -r/2`; for `r >= 2` the constrained minimum sits
/// at `cos θ = -1`, giving `((r-1)^p - 1 + p r) / r^p`. For `r <= 2` the
/// minimum `(p/2) r^{2-p}` is non-increasing in `r`, so radii below 2 never
/// beat `r = 2`.
#[inline]
pub fn c1_radial_profile<T: Real>(r: T, p: T) -> T {
    let inv = r.recip();
    (T::one() - inv).powf(p) - inv.powf(p) + p * r.powf(T::one() - p)
}

/// Lower bound of [`c1_radial_profile`] over `[a, b] ⊂ [2, ∞)`:
/// `(1 - 1/r)^p - r^{-p}` increases and `p r^{1-p}` decreases in `r`.
#[inline]
fn radial_cell_lower<T: Real>(a: T, b: T, p: T) -> T {
    let inv = a.recip();
    (T::one() - inv).powf(p) - inv.powf(p) + p * b.powf(T::one() - p)
}

/// Lower bound of the radial profile over `[r, ∞)`.
#[inline]
fn radial_tail_lower<T: Real>(r: T, p: T) -> T {
    let inv = r.recip();
    (T::one() - inv).powf(p) - inv.powf(p)
}

struct Cell<T> {
    a: T,
    b: T,
    lower: T,
}

impl<T: Real> PartialEq for Cell<T> {
    fn eq(&self, other: &Self) -> bool {
        self.lower == other.lower
    }
}
impl<T: Real> Eq for Cell<T> {}
impl<T: Real> PartialOrd for Cell<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Cell<T> {
    // reversed: BinaryHeap pops the smallest lower bound first
    fn cmp(&self, other: &Self) -> Ordering {
        other.lower.partial_cmp(&self.lower).unwrap_or(Ordering::Equal)
    }
}

/// Estimate of `c₁(p)` for `p >= 2` with a bracket of width at most `tol`.
pub fn cp_lower_constant<T: Real>(p: Exponent<T>, tol: T) -> Result<ConstantEstimate<T>> {
    cp_lower_constant_with_budget(p, tol, DEFAULT_C1_BUDGET)
}

pub fn cp_lower_constant_with_budget<T: Real>(
    p: Exponent<T>,
    tol: T,
    max_evaluations: usize,
) -> Result<ConstantEstimate<T>> {
    let p = p.require_at_least_two()?;
    if !(tol > T::zero()) {
        return Err(HardyError::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    if p.is_two() {
        // the numerator reduces to t² + s², so the quotient is identically 1
        return Ok(ConstantEstimate::exact(T::one()));
    }
    radial_bracket(p.get(), tol, max_evaluations)
}

const COARSE_CELLS: usize = 256;
const INITIAL_CUTOFF: f64 = 1.0e3;
const MAX_CUTOFF: f64 = 1.0e15;

/// Branch-and-bound over the radius after the angular minimization has
/// been carried out in closed form (see [`c1_radial_profile`]).
///
/// The radius axis is compactified at a cutoff `R` chosen so that the
/// lower bound on `[R, ∞)` already exceeds the best value found; the
/// profile tends to 1 as `r → ∞`.
pub(crate) fn radial_bracket<T: Real>(p: T, tol: T, max_evaluations: usize) -> Result<ConstantEstimate<T>> {
    let two = T::lit(2.0);
    let mut evaluations = 0usize;
    let mut best = T::infinity();
    let eval = |r: T, best: &mut T, evaluations: &mut usize| {
        *evaluations += 1;
        let h = c1_radial_profile(r, p);
        if h < *best {
            *best = h;
        }
    };

    // coarse log-spaced grid on [2, R0]
    let mut cutoff = T::lit(INITIAL_CUTOFF);
    let ratio = (cutoff / two).powf(T::one() / T::from_index(COARSE_CELLS));
    let mut edges = Vec::with_capacity(COARSE_CELLS + 1);
    let mut r = two;
    for _ in 0..=COARSE_CELLS {
        edges.push(r);
        eval(r, &mut best, &mut evaluations);
        r = r * ratio;
    }
    edges[COARSE_CELLS] = cutoff;

    // push the cutoff out until the tail cannot hold anything better
    let half_tol = tol * T::lit(0.5);
    while radial_tail_lower(cutoff, p) < best - half_tol {
        let next = cutoff * two;
        if next > T::lit(MAX_CUTOFF) {
            return Err(HardyError::Budget {
                lower: radial_tail_lower(cutoff, p).as_f64(),
                upper: best.as_f64(),
                evaluations,
            });
        }
        edges.push(next);
        eval(next, &mut best, &mut evaluations);
        cutoff = next;
    }
    let tail_lower = radial_tail_lower(cutoff, p);

    let mut heap = BinaryHeap::new();
    for w in edges.windows(2) {
        let lower = radial_cell_lower(w[0], w[1], p);
        if lower <= best {
            heap.push(Cell { a: w[0], b: w[1], lower });
        }
    }

    loop {
        let global_lower = match heap.peek() {
            Some(c) => c.lower.min(tail_lower),
            None => tail_lower.min(best),
        };
        if best - global_lower <= tol {
            return Ok(ConstantEstimate {
                value: best,
                lower: global_lower.min(best),
                upper: best,
                method: EstimateMethod::GridRefine,
                evaluations,
            });
        }
        if evaluations >= max_evaluations {
            return Err(HardyError::Budget {
                lower: global_lower.as_f64(),
                upper: best.as_f64(),
                evaluations,
            });
        }
        let cell = heap.pop().expect("non-empty: otherwise global_lower >= best");
        let mid = (cell.a + cell.b) * T::lit(0.5);
        if !(mid > cell.a && mid < cell.b) {
            // cell collapsed to adjacent floats; its bound cannot improve
            return Err(HardyError::Budget {
                lower: global_lower.as_f64(),
                upper: best.as_f64(),
                evaluations,
            });
        }
        eval(mid, &mut best, &mut evaluations);
        for (a, b) in [(cell.a, mid), (mid, cell.b)] {
            let lower = radial_cell_lower(a, b, p);
            if lower <= best {
                heap.push(Cell { a, b, lower });
            }
        }
    }
}

/// Both sides of an identity, with the magnitude of the largest term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck<T> {
    pub lhs: T,
    pub rhs: T,
    pub scale: T,
}

impl<T: Real> IdentityCheck<T> {
    pub fn residual(&self) -> T {
        self.lhs - self.rhs
    }

    /// `|lhs - rhs| / scale`, or the absolute residual when every term is 0.
    pub fn relative(&self) -> T {
        let r = self.residual().abs();
        if self.scale > T::zero() {
            r / self.scale
        } else {
            r
        }
    }
}

/// Checks
/// `|a-t|^p - (1-t)^{p-1}(|a|^p - t) = C_p(a-t, t(a-1)) + t(1-t)^{p-1} C_p(1, 1-a)`.
///
/// Requires `0 <= t <= 1` unless `p = 2`, where the identity holds for all
/// real `t`.
pub fn algebraic_identity_residual<T: Real>(a: Complex<T>, t: T, p: Exponent<T>) -> Result<IdentityCheck<T>> {
    ensure_finite(a, "a")?;
    if !t.is_finite() {
        return Err(HardyError::InvalidInput(format!("t is not finite: {t}")));
    }
    if !p.is_two() && (t < T::zero() || t > T::one()) {
        return Err(HardyError::Domain(format!("t must lie in [0, 1] for p != 2, got {t}")));
    }
    let p = p.get();
    let one = Complex::new(T::one(), T::zero());
    let tc = Complex::new(t, T::zero());
    let pm1 = p - T::one();
    let one_minus_t = T::one() - t;
    // integer power keeps the sign of 1 - t when p = 2 and t > 1
    let damp = if pm1 == T::one() { one_minus_t } else { one_minus_t.powf(pm1) };

    let a_minus_t = (a - tc).norm().powf(p);
    let a_p = a.norm().powf(p);
    let lhs = a_minus_t - damp * (a_p - t);

    let first = cp_terms(a - tc, (a - one) * t, p);
    let second = cp_terms(one, one - a, p);
    let rhs = first.raw + t * damp * second.raw;

    let scale = a_minus_t
        .max((damp * a_p).abs())
        .max((damp * t).abs())
        .max(first.scale)
        .max((t * damp).abs() * second.scale);
    Ok(IdentityCheck { lhs, rhs, scale })
}

/// Checks `|a-t|² - (1-t)(|a|² - t) = t |a-1|²` for any real `t`.
pub fn simplified_p2_residual<T: Real>(a: Complex<T>, t: T) -> Result<IdentityCheck<T>> {
    ensure_finite(a, "a")?;
    if !t.is_finite() {
        return Err(HardyError::InvalidInput(format!("t is not finite: {t}")));
    }
    let one = Complex::new(T::one(), T::zero());
    let first = (a - Complex::new(t, T::zero())).norm_sqr();
    let second = (T::one() - t) * (a.norm_sqr() - t);
    let rhs = t * (a - one).norm_sqr();
    Ok(IdentityCheck {
        lhs: first - second,
        rhs,
        scale: first.max(second.abs()).max(rhs.abs()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn p(x: f64) -> Exponent<f64> {
        Exponent::new(x).unwrap()
    }

    #[test]
    fn exponent_rejects_p_at_most_one() {
        assert!(Exponent::new(1.0f64).is_err());
        assert!(Exponent::new(0.5f64).is_err());
        assert!(Exponent::new(f64::NAN).is_err());
        assert!(Exponent::new(1.0001f64).is_ok());
        assert!(p(1.5).require_at_least_two().is_err());
    }

    #[test]
    fn cp_with_zero_eta_vanishes() {
        for &q in &[1.1, 1.5, 2.0, 3.7] {
            assert_eq!(cp_value(c(1.3, -0.4), c(0.0, 0.0), p(q)).unwrap(), 0.0);
        }
    }

    #[test]
    fn cp_at_p2_is_eta_norm_squared() {
        assert!((cp_value(c(5.0, 0.0), c(3.0, 4.0), p(2.0)).unwrap() - 25.0).abs() < 1e-12);
    }

    #[test]
    fn cp_direct_arithmetic_p3() {
        // 8 - 1 - 3 * 1 * 1
        assert!((cp_value(c(2.0, 0.0), c(1.0, 0.0), p(3.0)).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn cp_xi_equals_eta_below_two() {
        // C_p(ξ, ξ) = |ξ|^p, the cross term is its limit 0
        let z = c(0.6, -0.8);
        assert!((cp_value(z, z, p(1.5)).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cp_rejects_non_finite() {
        assert!(matches!(
            cp_value(c(f64::NAN, 0.0), c(1.0, 0.0), p(2.0)),
            Err(HardyError::InvalidInput(_))
        ));
        assert!(cp_value(c(1.0, 0.0), c(0.0, f64::INFINITY), p(2.0)).is_err());
    }

    #[test]
    fn clamping_only_touches_rounding_noise() {
        assert_eq!(clamp_nonnegative(-1e-15, 1.0, 1e-13), 0.0);
        assert_eq!(clamp_nonnegative(-1e-3, 1.0, 1e-13), -1e-3);
        assert_eq!(clamp_nonnegative(2.0, 1.0, 1e-13), 2.0);
    }

    #[test]
    fn c1_at_two_is_closed_form_one() {
        let e = cp_lower_constant(p(2.0), 1e-8).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.method, EstimateMethod::ClosedForm);
    }

    #[test]
    fn c1_numeric_path_at_two_brackets_one() {
        let e = radial_bracket(2.0f64, 1e-4, 1_000_000).unwrap();
        assert!(e.lower <= 1.0 && (e.upper - 1.0).abs() < 1e-12);
        assert!(e.width() <= 1e-4);
    }

    #[test]
    fn c1_rejects_p_below_two_and_bad_tol() {
        assert!(matches!(cp_lower_constant(p(1.5), 1e-6), Err(HardyError::Domain(_))));
        assert!(cp_lower_constant(p(3.0), 0.0).is_err());
    }

    #[test]
    fn c1_budget_error_carries_bracket() {
        match cp_lower_constant_with_budget(p(3.0), 1e-12, 300) {
            Err(HardyError::Budget { lower, upper, .. }) => assert!(lower <= upper),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn c1_closed_values_for_three_and_four() {
        // stationary points of the radial profile: r = 2 + √2 (p = 3), r = 3 (p = 4)
        let e3 = cp_lower_constant(p(3.0), 1e-10).unwrap();
        let exact3 = 2.0 - 2f64.sqrt();
        assert!((e3.value - exact3).abs() < 1e-10);
        assert!(e3.lower <= exact3 + 1e-15);
        let e4 = cp_lower_constant(p(4.0), 1e-10).unwrap();
        assert!((e4.value - 1.0 / 3.0).abs() < 1e-10);
        assert!(e4.lower <= 1.0 / 3.0 + 1e-15);
    }

    #[test]
    fn radial_profile_matches_objective_at_cos_minus_one() {
        for &(r, q) in &[(2.0f64, 3.0f64), (5.5, 2.5), (40.0, 4.0)] {
            let direct = c1_objective(-r, 0.0, q);
            assert!((c1_radial_profile(r, q) - direct).abs() < 1e-13);
        }
    }

    #[test]
    fn identity_endpoints_vanish() {
        let a = c(0.7, -1.9);
        for &q in &[1.3, 2.0, 4.5] {
            assert!(algebraic_identity_residual(a, 0.0, p(q)).unwrap().relative() < 1e-14);
            assert!(algebraic_identity_residual(a, 1.0, p(q)).unwrap().relative() < 1e-14);
        }
    }

    #[test]
    fn identity_t_outside_unit_interval() {
        assert!(matches!(
            algebraic_identity_residual(c(1.0, 1.0), 1.5, p(3.0)),
            Err(HardyError::Domain(_))
        ));
        // p = 2 is exempt
        let r = algebraic_identity_residual(c(1.0, 1.0), 1.5, p(2.0)).unwrap();
        assert!(r.relative() < 1e-14);
    }

    #[test]
    fn simplified_p2_examples() {
        assert!(simplified_p2_residual(c(1.0, 0.0), 7.3).unwrap().residual().abs() < 1e-13);
        assert!(simplified_p2_residual(c(2.0, 1.0), 3.0).unwrap().residual().abs() < 1e-13);
        assert_eq!(simplified_p2_residual(c(0.0, 0.0), 0.0).unwrap().residual(), 0.0);
    }

    #[test]
    fn works_in_single_precision() {
        let v = cp_value(Complex::new(5.0f32, 0.0), Complex::new(3.0, 4.0), Exponent::new(2.0f32).unwrap()).unwrap();
        assert!((v - 25.0).abs() < 1e-4);
        let e = cp_lower_constant(Exponent::new(3.0f32).unwrap(), 1e-4).unwrap();
        assert!((e.value - 0.585_786_4).abs() < 1e-4);
    }
}
