//! Fixed-value checks against independent references: dense grids,
//! closed forms, and values frozen from 30–50 digit evaluations.

use hardy_core::stability::muckenhoupt_profile;
use hardy_core::*;

fn p(x: f64) -> Exponent64 {
    Exponent::new(x).unwrap()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex::new(re, im)
}

fn grid_objective(s: f64, t: f64, q: f64) -> f64 {
    let r2 = s * s + t * t;
    ((r2 + 2.0 * s + 1.0).powf(q / 2.0) - 1.0 - q * s) / r2.powf(q / 2.0)
}

/// Polar grid over radius in (0, 100] and angle in [0, π], then a
/// shrinking pattern search around the best node.
fn c1_grid_oracle(q: f64) -> f64 {
    let (nr, na) = (2000, 2000);
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 1..=nr {
        let r = 100.0 * i as f64 / nr as f64;
        for j in 0..=na {
            let th = std::f64::consts::PI * j as f64 / na as f64;
            let v = grid_objective(r * th.cos(), r * th.sin(), q);
            if v < best.0 {
                best = (v, r, th);
            }
        }
    }
    let (mut val, mut r, mut th) = best;
    let (mut hr, mut ht) = (0.05, 1e-3);
    while hr > 1e-12 {
        let mut moved = false;
        for (dr, dt) in [(hr, 0.0), (-hr, 0.0), (0.0, ht), (0.0, -ht)] {
            let (rr, tt) = (r + dr, (th + dt).clamp(0.0, std::f64::consts::PI));
            if rr <= 0.0 {
                continue;
            }
            let v = grid_objective(rr * tt.cos(), rr * tt.sin(), q);
            if v < val {
                (val, r, th) = (v, rr, tt);
                moved = true;
            }
        }
        if !moved {
            hr *= 0.5;
            ht *= 0.5;
        }
    }
    val
}

#[test]
fn c1_matches_polar_grid() {
    for q in [2.5, 3.0, 4.0] {
        let est = cp_lower_constant(p(q), 1e-6).unwrap();
        let oracle = c1_grid_oracle(q);
        assert!((est.value - oracle).abs() < 1e-5, "p={q}: {est:?} vs {oracle}");
        // the grid only ever sees values at or above the infimum
        assert!(est.lower <= oracle + 1e-12, "p={q}");
    }
}

#[test]
fn c1_closed_forms() {
    let three = cp_lower_constant(p(3.0), 1e-9).unwrap();
    assert!(three.contains(2.0 - 2f64.sqrt()) || (three.value - (2.0 - 2f64.sqrt())).abs() < 1e-9);
    let four = cp_lower_constant(p(4.0), 1e-9).unwrap();
    assert!((four.value - 1.0 / 3.0).abs() < 1e-9);
}

#[test]
fn algebraic_identity_frozen_terms() {
    // |a-t|^p, (1-t)^{p-1}(|a|^p - t) and the two C_p terms at 40 digits
    let lhs = 0.420_448_207_626_857_271_5 - 0.049_337_176_810_649_057_93;
    let rhs = 0.165_739_661_031_746_956_1 + 0.205_371_369_784_461_257_5;
    let check = algebraic_identity_residual(c(0.3, 0.7), 0.4, p(2.5)).unwrap();
    assert!((check.lhs - lhs).abs() < 1e-15);
    assert!((check.rhs - rhs).abs() < 1e-15);
    assert!(check.residual().abs() < 1e-12);
}

#[test]
fn simplified_identity_by_expansion() {
    // |2+i-3|² - (1-3)(|2+i|² - 3) - 3|1+i|² = 2 + 4 - 6
    let check = simplified_p2_residual(c(2.0, 1.0), 3.0).unwrap();
    assert!(check.residual().abs() < 1e-13);
}

#[test]
fn cp_value_examples() {
    assert_eq!(cp_value(c(5.0, 0.0), c(3.0, 4.0), p(2.0)).unwrap(), 25.0);
    assert_eq!(cp_value(c(2.0, 0.0), c(1.0, 0.0), p(3.0)).unwrap(), 4.0);
    assert_eq!(cp_value(c(0.7, -2.0), c(0.0, 0.0), p(3.3)).unwrap(), 0.0);
}

#[test]
fn delta_at_one_by_hand() {
    let wp = WeightPair::new(Power::new(0.0), Power::new(0.5), p(2.0));
    let r = verify_identity(&FinSeq::delta(1).unwrap(), &wp).unwrap();
    assert!((r.lhs - 2.0).abs() < 1e-15);
    assert!((r.weight_sum - (2.0 - 2f64.sqrt())).abs() < 1e-15);
    assert!(r.residual.abs() < 1e-12);
}

#[test]
fn generated_weight_at_one_is_fkp() {
    let wp = WeightPair::new(Power::new(0.0), Power::new(0.5), p(2.0));
    let expected = 2.0 - 2f64.sqrt();
    assert!((hardy_weight(&wp, 1).unwrap() - expected).abs() < 1e-15);
    assert!((fkp_weight(p(2.0), 1) - expected).abs() < 1e-15);
}

#[test]
fn fkp_tail_constant() {
    let n = 1_000_000usize;
    assert!(((n as f64).powi(2) * fkp_weight(p(2.0), n) - 0.25).abs() < 1e-5);
}

#[test]
fn remainder_collapses_at_two() {
    let wp = WeightPair::new(Power::new(0.0), Power::new(0.37), p(2.0));
    let u = FinSeq::from_values(&[c(0.2, 1.0), c(-1.3, 0.4), c(2.2, -0.7), c(0.0, 0.5)]).unwrap();
    for n in 2..=5 {
        let (a, b) = (wp.phi(n - 1), wp.phi(n));
        let expected = a * b * (u.get(n) / b - u.get(n - 1) / a).norm_sqr();
        let got = remainder(&u, &wp, n).unwrap();
        assert!((got - expected).abs() <= 1e-13 * expected.max(1.0), "n={n}");
    }
}

#[test]
fn copson_gamma_ratio_by_hand() {
    assert!((copson_phi(p(2.0), -1.0, 2).unwrap() - 2.0).abs() < 1e-14);
    // Γ(3.5)/Γ(3) = 15√π/16
    let expected = 15.0 * std::f64::consts::PI.sqrt() / 16.0;
    assert!((copson_phi(p(2.0), 0.0, 3).unwrap() - expected).abs() < 1e-13);
}

#[test]
fn deficit_delta_at_one() {
    assert!((hardy_deficit(&FinSeq::delta(1).unwrap(), p(2.0)).unwrap() - 1.75).abs() < 1e-15);
}

#[test]
fn muckenhoupt_first_term() {
    // Σ_{m≥2} 1/(m ln^p m) · 2^{1-p}, Euler–Maclaurin at 30 digits
    for (q, value) in [
        (1.5, 2.077_241_879_205_103_5),
        (2.0, 1.054_871_400_618_446),
        (3.0, 0.516_471_634_721_033_8),
    ] {
        let prof = muckenhoupt_profile(p(q), 1, 1_000_000).unwrap();
        let (lo, hi) = prof[0];
        assert!(lo <= value + 1e-12 && value - 1e-12 <= hi, "p={q}: [{lo}, {hi}] vs {value}");
        assert!(hi - lo < 1e-8);
    }
}

/// Least-squares shift at p = 2, with the tail coefficient from the
/// same bracket as the library but an independent sum.
#[test]
fn shift_closed_form_at_two() {
    let u = FinSeq::from_values(&[c(0.0, 0.0), c(1.5, 0.3), c(-0.4, 2.0), c(3.0, 0.0), c(1.0, -1.0)]).unwrap();
    let pe = p(2.0);
    let opt = optimal_shift(&u, pe, 1e-12).unwrap();
    let horizon = u.horizon();
    let mut num = 0.0;
    let mut den = 0.0;
    for n in 2..=horizon {
        let nn = n as f64;
        let a = 1.0 / (nn * nn.ln()).powi(2);
        num += u.get(n).re * nn.sqrt() * a;
        den += nn * a;
    }
    // Σ_{n>N*} 1/(n ln² n) = 1/ln(N*+1/2)-ish; bracket via long explicit sum
    let mut tail = 0.0;
    for n in (horizon + 1..=5_000_000).rev() {
        let nn = n as f64;
        tail += 1.0 / (nn * nn.ln().powi(2));
    }
    tail += 1.0 / (5_000_000.5f64).ln();
    let c_star = num / (den + tail);
    assert!((opt.shift.value - c_star).abs() < 1e-8, "{:?} vs {c_star}", opt.shift);
}

/// Dense grid over the coercivity bracket for a non-quadratic exponent.
#[test]
fn shift_matches_dense_grid() {
    let u = FinSeq::from_values(&[c(0.7, -0.2), c(2.5, 0.0), c(-1.0, 1.0), c(0.3, 0.3), c(4.0, 0.0)]).unwrap();
    for q in [1.5, 3.0] {
        let pe = p(q);
        let tol = 1e-10;
        let opt = optimal_shift(&u, pe, tol).unwrap();
        let horizon = u.horizon();
        let f = |cc: f64| {
            let mut acc = opt.tail_upper * cc.abs().powf(q);
            for n in 2..=horizon {
                let nn = n as f64;
                let d = u.get(n) - Complex::new(cc * nn.powf((q - 1.0) / q), 0.0);
                acc += d.norm().powf(q) / (nn * nn.ln()).powf(q);
            }
            acc
        };
        let radius = (f(0.0) / opt.tail_lower).powf(1.0 / q);
        let steps = 1_000_000;
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..=steps {
            let cc = -radius + 2.0 * radius * i as f64 / steps as f64;
            let v = f(cc);
            if v < best.0 {
                best = (v, cc);
            }
        }
        // golden-section refinement within one grid cell on each side
        let h = 2.0 * radius / steps as f64;
        let (mut a, mut b) = (best.1 - h, best.1 + h);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let (x1, x2) = (b - g * (b - a), a + g * (b - a));
            if f(x1) < f(x2) {
                b = x2;
            } else {
                a = x1;
            }
        }
        // value comparisons stall near sqrt(eps); finish with central
        // difference signs, which stay reliable much closer to the minimum
        let (mut a, mut b) = (a - 1e-6, b + 1e-6);
        let h = 1e-5;
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if f(m + h) > f(m - h) {
                b = m;
            } else {
                a = m;
            }
        }
        let oracle = 0.5 * (a + b);
        assert!((opt.shift.value - oracle).abs() <= 10.0 * tol * radius.max(1.0) + 1e-9, "p={q}: {:?} vs {oracle}", opt.shift);
    }
}
