//! One-dimensional convex minimization over a real shift `c` of
//!
//! ```text
//! f(c) = Σ_k a_k |z_k - c s_k|^p + |c|^p T
//! ```
//!
//! where the finite sum covers the support of the data and `T` is the
//! coefficient collected from the infinite zero tail. `T` is only known
//! up to a bracket, so every result is reported for both ends.

use num_complex::Complex;

use crate::cp::{ConstantEstimate, EstimateMethod};
use crate::error::{HardyError, Result};
use crate::numeric::{log_weight, log_weight_tail, CompensatedSum};
use crate::scalar::Real;

/// Number of explicit tail terms summed before the integral bracket.
pub const EXPLICIT_TAIL_TERMS: usize = 4096;

const MAX_ITERATIONS: usize = 400;

/// Bracket on `Σ_{n > k} 1/(n ln^p n)`.
pub fn log_series_tail<T: Real>(k: usize, p: T) -> (T, T) {
    let start = k.max(1);
    let last = start + EXPLICIT_TAIL_TERMS;
    let mut acc = CompensatedSum::default();
    // smallest terms first
    for n in ((start + 1).max(2)..=last).rev() {
        acc.add(log_weight(T::from_index(n), p));
    }
    let (lo, hi) = log_weight_tail(last, p);
    let explicit = acc.value();
    (explicit + lo, explicit + hi)
}

pub(crate) struct ShiftProblem<T> {
    pub targets: Vec<Complex<T>>,
    pub scales: Vec<T>,
    pub weights: Vec<T>,
    pub p: T,
}

/// Minimizer bracket for one value of the tail coefficient.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Minimum<T> {
    pub lower: T,
    pub upper: T,
    pub argmin: T,
    /// `f(argmin)`, an upper bound on the minimum.
    pub value: T,
    /// Certified lower bound on the minimum from the tangent lines at the
    /// bracket ends.
    pub value_lower: T,
    pub evaluations: usize,
}

impl<T: Real> ShiftProblem<T> {
    pub fn value(&self, c: T, tail: T) -> T {
        let half_p = self.p * T::lit(0.5);
        let mut acc = CompensatedSum::default();
        for ((&z, &s), &a) in self.targets.iter().zip(&self.scales).zip(&self.weights) {
            acc.add(a * (z - Complex::new(c * s, T::zero())).norm_sqr().powf(half_p));
        }
        acc.add(c.abs().powf(self.p) * tail);
        acc.value()
    }

    pub fn derivative(&self, c: T, tail: T) -> T {
        let p = self.p;
        let mut acc = CompensatedSum::default();
        for ((&z, &s), &a) in self.targets.iter().zip(&self.scales).zip(&self.weights) {
            let d = z - Complex::new(c * s, T::zero());
            let m = d.norm();
            if m > T::zero() {
                acc.add(-p * a * s * m.powf(p - T::lit(2.0)) * d.re);
            }
        }
        if c != T::zero() {
            acc.add(p * c.signum() * c.abs().powf(p - T::one()) * tail);
        }
        acc.value()
    }

    /// Bracket `[-R, R]` containing every minimizer: `|c|^p T <= f(c) <= f(0)`.
    fn radius(&self, tail: T) -> T {
        let f0 = self.value(T::zero(), tail);
        (f0 / tail).powf(self.p.recip())
    }

    /// Derivative-sign bracketing with Illinois false-position steps and
    /// periodic bisection. Stops when the bracket width is at most
    /// `tol * max(1, R)`.
    pub fn minimize(&self, tail: T, tol: T) -> Result<Minimum<T>> {
        let radius = self.radius(tail);
        if !radius.is_finite() {
            return Err(HardyError::Overflow(format!("shift search radius is not finite ({radius})")));
        }
        if radius == T::zero() {
            return Ok(Minimum {
                lower: T::zero(),
                upper: T::zero(),
                argmin: T::zero(),
                value: T::zero(),
                value_lower: T::zero(),
                evaluations: 1,
            });
        }
        let target = tol * radius.max(T::one());
        let (mut lo, mut hi) = (-radius, radius);
        let (mut d_lo, mut d_hi) = (self.derivative(lo, tail), self.derivative(hi, tail));
        let mut evaluations = 3;
        // f' may vanish at an end only when the end is the minimizer
        if d_lo >= T::zero() {
            hi = lo;
            d_hi = d_lo;
        } else if d_hi <= T::zero() {
            lo = hi;
            d_lo = d_hi;
        }
        let mut side = 0i8;
        let mut iter = 0;
        while hi - lo > target {
            iter += 1;
            if iter > MAX_ITERATIONS {
                return Err(HardyError::Budget {
                    lower: lo.as_f64(),
                    upper: hi.as_f64(),
                    evaluations,
                });
            }
            let mid = if iter % 4 == 0 {
                lo + (hi - lo) * T::lit(0.5)
            } else {
                let x = lo - d_lo * (hi - lo) / (d_hi - d_lo);
                if x > lo && x < hi {
                    x
                } else {
                    lo + (hi - lo) * T::lit(0.5)
                }
            };
            if mid <= lo || mid >= hi {
                // the bracket is down to adjacent floats
                break;
            }
            let d = self.derivative(mid, tail);
            evaluations += 1;
            if d == T::zero() {
                lo = mid;
                hi = mid;
                break;
            } else if d < T::zero() {
                lo = mid;
                d_lo = d;
                if side == -1 {
                    d_hi = d_hi * T::lit(0.5);
                }
                side = -1;
            } else {
                hi = mid;
                d_hi = d;
                if side == 1 {
                    d_lo = d_lo * T::lit(0.5);
                }
                side = 1;
            }
        }
        // Illinois halving leaves d_lo/d_hi scaled; re-evaluate for the bound
        let d_lo = self.derivative(lo, tail);
        let d_hi = self.derivative(hi, tail);
        let f_lo = self.value(lo, tail);
        let f_hi = self.value(hi, tail);
        let width = hi - lo;
        let tangent_bound = (f_lo + d_lo.min(T::zero()) * width).max(f_hi - d_hi.max(T::zero()) * width);
        let (argmin, value) = if f_lo <= f_hi { (lo, f_lo) } else { (hi, f_hi) };
        Ok(Minimum {
            lower: lo,
            upper: hi,
            argmin,
            value,
            value_lower: tangent_bound.max(T::zero()).min(value),
            evaluations: evaluations + 4,
        })
    }
}

/// Minimizer and minimum value, each as a bracket, of a shift problem
/// whose tail coefficient lies in `[tail.0, tail.1]`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ShiftSolution<T> {
    pub shift: ConstantEstimate<T>,
    pub minimum: ConstantEstimate<T>,
    /// Value of `f` at the reported shift with the upper tail coefficient.
    pub value_at_shift: T,
}

pub(crate) fn solve<T: Real>(problem: &ShiftProblem<T>, tail: (T, T), tol: T) -> Result<ShiftSolution<T>> {
    let low = problem.minimize(tail.0, tol)?;
    let high = problem.minimize(tail.1, tol)?;
    // the minimizer moves monotonically toward 0 as the tail grows
    let c_lower = low.lower.min(high.lower);
    let c_upper = low.upper.max(high.upper);
    let c_value = high.argmin;
    let evaluations = low.evaluations + high.evaluations;
    let minimum_upper = high.value;
    let minimum_lower = low.value_lower.min(minimum_upper);
    Ok(ShiftSolution {
        shift: ConstantEstimate {
            value: c_value,
            lower: c_lower,
            upper: c_upper,
            method: EstimateMethod::Bisection,
            evaluations,
        },
        minimum: ConstantEstimate {
            value: minimum_upper,
            lower: minimum_lower,
            upper: minimum_upper,
            method: EstimateMethod::Bisection,
            evaluations,
        },
        value_at_shift: high.value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_bracket_contains_long_partial_sum() {
        // Σ_{n>10} 1/(n ln² n) with 10⁷ explicit terms plus the bracket
        let (lo, hi) = log_series_tail(10, 2.0f64);
        let mut acc = CompensatedSum::default();
        for n in (11..=10_000_000usize).rev() {
            acc.add(log_weight(n as f64, 2.0));
        }
        let (tlo, thi) = log_weight_tail(10_000_000, 2.0);
        assert!(lo <= acc.value() + thi);
        assert!(hi >= acc.value() + tlo);
        assert!(hi - lo < 1e-8);
    }

    #[test]
    fn quadratic_minimizer() {
        let problem = ShiftProblem {
            targets: vec![Complex::new(3.0f64, 1.0), Complex::new(-1.0, 0.0)],
            scales: vec![1.0, 2.0],
            weights: vec![1.0, 0.5],
            p: 2.0,
        };
        // f(c) = (3-c)² + 1 + 0.5(-1-2c)² + c²: f'(c) = 2(c-3) + 2(1+2c) + 2c = 8c - 4
        let m = problem.minimize(1.0, 1e-14).unwrap();
        assert!((m.argmin - 0.5).abs() < 1e-13);
        let exact = problem.value(0.5, 1.0);
        assert!(m.value_lower <= exact + 1e-14 && exact <= m.value + 1e-14);
    }
}
