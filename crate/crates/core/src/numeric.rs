//! Summation, log-Gamma and series-tail helpers.

use crate::scalar::Real;

const PAIRWISE_BLOCK: usize = 16;

/// Pairwise (cascade) summation.
///
/// Blocks of at most 16 terms are added left to right and the partial
/// results combined as a balanced binary tree, so the reduction order is a
/// function of the slice length only. Error grows like `O(log n)` ulps.
pub fn pairwise_sum<T: Real>(xs: &[T]) -> T {
    if xs.len() <= PAIRWISE_BLOCK {
        return xs.iter().fold(T::zero(), |acc, &x| acc + x);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Neumaier-compensated running sum, for accumulations that are not
/// available as a slice (suffix sums, streamed terms).
#[derive(Debug, Clone, Copy)]
pub struct CompensatedSum<T> {
    sum: T,
    carry: T,
}

impl<T: Real> Default for CompensatedSum<T> {
    fn default() -> Self {
        Self {
            sum: T::zero(),
            carry: T::zero(),
        }
    }
}

impl<T: Real> CompensatedSum<T> {
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry = self.carry + ((self.sum - t) + x);
        } else {
            self.carry = self.carry + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.carry
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Lanczos series `A(z)` such that
/// `Γ(z) = sqrt(2π) (z + g - 1/2)^(z - 1/2) e^-(z + g - 1/2) A(z)`.
fn lanczos_series<T: Real>(z: T) -> T {
    let x = z - T::one();
    let mut acc = T::lit(LANCZOS_COEFFS[0]);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (x + T::from_index(i));
    }
    acc
}

/// Natural log of `|Γ(x)|`. Returns `+inf` at the poles `x = 0, -1, -2, ...`.
pub fn ln_gamma<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        if x == x.floor() {
            return T::infinity();
        }
        // reflection: Γ(x) Γ(1 - x) = π / sin(πx)
        let s = (T::PI() * x).sin().abs();
        return (T::PI() / s).ln() - ln_gamma(T::one() - x);
    }
    let t = x + T::lit(LANCZOS_G) - half;
    half * (T::TAU()).ln() + (x - half) * t.ln() - t + lanczos_series(x).ln()
}

/// `ln Γ(x + delta) - ln Γ(x)` for `x >= 1/2` and `x + delta >= 1/2`,
/// evaluated without forming the two large logarithms separately.
pub fn ln_gamma_ratio<T: Real>(x: T, delta: T) -> T {
    let half = T::lit(0.5);
    debug_assert!(x >= half && x + delta >= half);
    let t0 = x + T::lit(LANCZOS_G) - half;
    let t1 = t0 + delta;
    (x - half) * (delta / t0).ln_1p() + delta * t1.ln() - delta
        + (lanczos_series(x + delta) / lanczos_series(x)).ln()
}

/// `∫_x^∞ dt / (t ln^p t) = ln^{1-p}(x) / (p - 1)` for `x > 1`, `p > 1`.
pub fn log_weight_integral<T: Real>(x: T, p: T) -> T {
    x.ln().powf(T::one() - p) / (p - T::one())
}

/// `1 / (n ln^p n)`.
#[inline]
pub fn log_weight<T: Real>(n: T, p: T) -> T {
    T::one() / (n * n.ln().powf(p))
}

/// Two-sided bound on `Σ_{n > k} 1/(n ln^p n)` for `k >= 1`, `p > 1`.
///
/// `g(x) = 1/(x ln^p x)` is positive, decreasing and convex on `(1, ∞)`,
/// so the trapezoid rule overestimates each `∫_n^{n+1} g` and the midpoint
/// rule underestimates it. That gives
/// `∫_{k+1}^∞ g + g(k+1)/2 <= Σ_{n>k} g(n) <= ∫_{k+1/2}^∞ g`.
pub fn log_weight_tail<T: Real>(k: usize, p: T) -> (T, T) {
    assert!(k >= 1, "tail bracket needs k >= 1");
    let next = T::from_index(k + 1);
    let lower = log_weight_integral(next, p) + T::lit(0.5) * log_weight(next, p);
    let upper = log_weight_integral(T::from_index(k) + T::lit(0.5), p);
    (lower, upper)
}
