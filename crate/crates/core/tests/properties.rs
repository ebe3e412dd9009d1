use hardy_core::stability::shift_objective;
use hardy_core::*;
use proptest::prelude::*;

fn p(x: f64) -> Exponent64 {
    Exponent::new(x).unwrap()
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(re, im)| Complex::new(re, im))
}

fn sequence(max_len: usize) -> impl Strategy<Value = FinSeq64> {
    prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 0..max_len)
        .prop_map(|v| FinSeq::from_values(&v.into_iter().map(|(a, b)| Complex::new(a, b)).collect::<Vec<_>>()).unwrap())
}

fn real_sequence(max_len: usize) -> impl Strategy<Value = FinSeq64> {
    prop::collection::vec(-3.0..3.0f64, 0..max_len).prop_map(|v| FinSeq::from_real(&v).unwrap())
}

fn pair(v_exp: f64, phi_exp: f64, q: f64) -> WeightPair64 {
    WeightPair::new(Power::new(v_exp), Power::new(phi_exp), p(q))
}

proptest! {
    #[test]
    fn cp_is_nonnegative(xi in complex(), eta in complex(), q in 1.1..6.0f64) {
        prop_assert!(cp_value(xi, eta, p(q)).unwrap() >= 0.0);
    }

    #[test]
    fn cp_is_homogeneous(xi in complex(), eta in complex(), q in 1.1..6.0f64, lambda in complex()) {
        prop_assume!(lambda.norm() > 1e-3);
        let base = cp_value(xi, eta, p(q)).unwrap();
        let scaled = cp_value(xi * lambda, eta * lambda, p(q)).unwrap();
        let factor = lambda.norm().powf(q);
        // clamping is relative to the cancelled terms, so measure against them
        let scale = cp_terms(xi * lambda, eta * lambda, q).scale;
        prop_assert!((scaled - factor * base).abs() <= 1e-10 * factor * base + 1e-13 * scale.max(1.0));
    }

    #[test]
    fn cp_lower_bound(xi in complex(), eta in complex(), k in 0..4usize) {
        let q = [2.0, 2.5, 3.0, 4.0][k];
        let c1 = stability::c1_cached(p(q)).unwrap();
        let terms = cp_terms(xi, eta, q);
        prop_assert!(cp_value(xi, eta, p(q)).unwrap() >= c1.lower * eta.norm().powf(q) - 1e-13 * terms.scale.max(1.0));
    }

    #[test]
    fn algebraic_identity(a in complex(), t in 0.0..=1.0f64, q in 1.1..6.0f64) {
        let check = algebraic_identity_residual(a, t, p(q)).unwrap();
        prop_assert!(check.relative() <= 1e-10, "{check:?}");
    }

    #[test]
    fn simplified_identity(a in complex(), t in -5.0..5.0f64) {
        prop_assert!(simplified_p2_residual(a, t).unwrap().relative() <= 1e-10);
    }

    #[test]
    fn c1_objective_is_even(s in -50.0..50.0f64, t in -50.0..50.0f64, q in 2.0..6.0f64) {
        prop_assert_eq!(c1_objective(s, t, q), c1_objective(s, -t, q));
    }

    #[test]
    fn identity_is_exact(u in sequence(60), q in 1.2..5.0f64, v_exp in -1.0..2.0f64, phi_exp in 0.0..1.0f64) {
        let r = verify_identity(&u, &pair(v_exp, phi_exp, q)).unwrap();
        prop_assert!(r.relative_residual() <= 1e-9, "{:?}", (r.lhs, r.weight_sum, r.remainder_sum, r.residual));
        prop_assert!(r.remainder_sum >= -1e-13 * r.scale());
    }

    #[test]
    fn remainder_is_nonnegative(u in sequence(30), q in 1.1..6.0f64, phi_exp in 0.0..1.5f64, n in 1..32usize) {
        let wp = pair(0.0, phi_exp, q);
        prop_assert!(remainder(&u, &wp, n).unwrap() >= 0.0);
    }

    #[test]
    fn pointwise_identity(u in sequence(20), q in 1.1..6.0f64, phi_exp in 0.0..1.5f64, n in 1..22usize) {
        let check = pointwise_identity_residual(&u, &pair(0.0, phi_exp, q), n).unwrap();
        prop_assert!(check.relative() <= 1e-11, "{check:?}");
    }

    #[test]
    fn non_monotone_phi_is_rejected(u in sequence(10), drop_at in 2..10usize) {
        let mut values: Vec<f64> = (0..=20).map(|n| n as f64).collect();
        values[drop_at] = values[drop_at - 1] - 0.5;
        let wp = WeightPair::new(Power::new(0.0), Tabulated::new(values), p(2.0));
        let mut u = u;
        u.insert(12, Complex::new(1.0, 0.0)).unwrap();
        let is_rejected = matches!(verify_identity(&u, &wp), Err(HardyError::InvariantViolation { .. }));
        prop_assert!(is_rejected);
    }

    /// The weight sum equals `Σ α(n)(φ(n)|ψ(n)|^p - φ(n-1)|ψ(n-1)|^p)` with
    /// `α(n) = v(n)Δφ(n)^{p-1}` and `ψ = u/φ`, summed before the index shift.
    #[test]
    fn weight_sum_telescopes(u in sequence(40), q in 1.2..5.0f64, v_exp in -1.0..2.0f64, phi_exp in 0.05..1.0f64) {
        let wp = pair(v_exp, phi_exp, q);
        let r = verify_identity(&u, &wp).unwrap();
        let mut terms = Vec::new();
        for n in 1..=u.horizon() {
            let alpha = wp.v(n) * wp.phi_increment(n).powf(q - 1.0);
            let here = wp.phi(n) * (u.get(n) / wp.phi(n)).norm().powf(q);
            let before = if n == 1 { 0.0 } else { wp.phi(n - 1) * (u.get(n - 1) / wp.phi(n - 1)).norm().powf(q) };
            terms.push(alpha * here);
            terms.push(-alpha * before);
        }
        let scale: f64 = terms.iter().map(|t| t.abs()).sum();
        let direct: f64 = terms.iter().sum();
        prop_assert!((direct - r.weight_sum).abs() <= 1e-12 * scale.max(1e-300));
    }

    #[test]
    fn inequality_mode(u in sequence(40), q in 1.2..5.0f64, phi_exp in 0.1..1.0f64, shave in 0.0..0.5f64) {
        let wp = pair(0.0, phi_exp, q);
        let w = |n: usize| hardy_weight(&wp, n).unwrap() * (1.0 - shave);
        let slacks = check_condition(&wp, w, 1, u.horizon()).unwrap();
        prop_assume!(slacks.iter().all(|s| s.slack >= 0.0));
        let r = verify_inequality(&u, &wp, w).unwrap();
        prop_assert!(r.inequality_holds(1e-9));
    }

    #[test]
    fn power_weight_matches_engine(q in 1.2..5.0f64, alpha in -1.0..2.0f64, beta in 0.0..1.5f64, n in 1..1000usize) {
        let fp = FamilyParams::new(p(q), alpha, beta).unwrap();
        let closed = power_weight(&fp, n);
        let engine = hardy_weight(&fp.pair(), n).unwrap();
        let scale = families::power_weight_scale(&fp, n).max(closed.abs());
        prop_assert!((closed - engine).abs() <= 1e-12 * scale.max(engine.abs()));
    }

    #[test]
    fn fkp_dominates_classical(q in 1.1..6.0f64, n in 1..10_000usize) {
        prop_assert!(fkp_weight(p(q), n) > classical_weight(p(q), n));
    }

    #[test]
    fn fkp_is_power_weight(q in 1.1..6.0f64, n in 1..10_000usize) {
        let pe = p(q);
        let fp = FamilyParams::new(pe, 0.0, pe.conjugate_ratio()).unwrap();
        let (a, b) = (power_weight(&fp, n), fkp_weight(pe, n));
        prop_assert!((a - b).abs() <= 1e-14 * b.abs());
    }

    /// The generated Copson weight dominates the closed form, so the
    /// closed form satisfies the supersolution condition for `n >= 2`.
    #[test]
    fn copson_closed_form_is_subsolution(q in 1.2..4.0f64, alpha in -2.0..-0.05f64) {
        let pair = copson_pair(p(q), alpha, 402).unwrap();
        let slacks = check_condition(&pair, |n| copson_weight(p(q), alpha, n), 2, 400).unwrap();
        for s in slacks {
            prop_assert!(s.slack >= -1e-12 * s.scale, "{s:?}");
        }
    }

    #[test]
    fn copson_inequality(tail in sequence(40), k in 0..3usize) {
        let (q, alpha) = [(2.0, -0.5), (3.0, -1.0), (1.5, -0.25)][k];
        let u = FinSeq::from_entries(tail.iter().map(|(n, z)| (n + 1, z))).unwrap();
        let r = copson_verify(&u, p(q), alpha).unwrap();
        prop_assert!(r.residual >= -1e-10 * r.scale().max(1.0));
    }

    #[test]
    fn deficit_is_nonnegative(u in sequence(60), q in 1.1..6.0f64) {
        let d = hardy_deficit(&u, p(q)).unwrap();
        let scale: f64 = u.iter().map(|(_, z)| z.norm().powf(q)).sum();
        prop_assert!(d >= -1e-13 * scale.max(1.0));
    }

    #[test]
    fn stability_margin(u in sequence(60), k in 0..4usize) {
        let q = [2.0, 2.5, 3.0, 4.0][k];
        let r = stability_report(&u, p(q)).unwrap();
        prop_assert!(r.margin >= -1e-10 * (r.deficit + 1.0), "{r:?}");
        prop_assert!(r.infimum_value >= 0.0);
    }

    #[test]
    fn shift_objective_is_convex(u in sequence(20), q in 1.1..5.0f64, a in -5.0..5.0f64, gap1 in 0.01..3.0f64, gap2 in 0.01..3.0f64) {
        let (c1, c2, c3) = (a, a + gap1, a + gap1 + gap2);
        let f = |c| shift_objective(&u, p(q), c);
        let lam = gap2 / (gap1 + gap2);
        let interp = lam * f(c1) + (1.0 - lam) * f(c3);
        prop_assert!(f(c2) <= interp * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn critical_hardy(v in real_sequence(60), k in 0..3usize) {
        let q = [1.5, 2.0, 3.0][k];
        let check = critical_hardy_check(&v, p(q)).unwrap();
        prop_assert!(check.slack >= -1e-10, "{check:?}");
        prop_assert!(check.rhs <= check.rhs_at_v1);
    }

    #[test]
    fn huang_ye_identity(u in sequence(30), v in prop::collection::vec(0.0..3.0f64, 33), phi in prop::collection::vec(0.1..5.0f64, 33)) {
        let mut phi = phi;
        phi[0] = 0.0;
        let (v, phi) = (Tabulated::new(v), Tabulated::new(phi));
        let check = huang_ye_check(&u, &v, &phi).unwrap();
        prop_assert!(check.relative() <= 1e-11, "{check:?}");
    }
}

/// Exact bookkeeping at p = 2: moving `u` by `c₀ n^{1/2}` on the window
/// `2..=N*` moves the least-squares shift by `c₀ · S / (S + T)` where
/// `S = Σ_{n=2}^{N*} 1/(n ln² n)` and `T` is the tail coefficient.
#[test]
fn shift_moves_with_window_at_two() {
    let pe = p(2.0);
    let u = FinSeq::from_values(&[Complex::new(0.4, 0.1), Complex::new(-1.0, 0.0), Complex::new(2.0, 0.5), Complex::new(0.3, 0.0)]).unwrap();
    let c0 = 1.7;
    let horizon = u.horizon();
    let mut moved = u.clone();
    for n in 2..=horizon {
        moved.insert(n, u.get(n) + Complex::new(c0 * (n as f64).sqrt(), 0.0)).unwrap();
    }
    // keep the same window by pinning the horizon
    moved.insert(horizon + 1, Complex::new(0.0, 0.0)).unwrap();
    let mut u_pinned = u.clone();
    u_pinned.insert(horizon + 1, Complex::new(0.0, 0.0)).unwrap();
    let base = optimal_shift(&u_pinned, pe, 1e-13).unwrap();
    let shifted = optimal_shift(&moved, pe, 1e-13).unwrap();
    let s: f64 = (2..=base.truncation).map(|n| 1.0 / (n as f64 * (n as f64).ln().powi(2))).sum();
    let s_window: f64 = (2..=horizon).map(|n| 1.0 / (n as f64 * (n as f64).ln().powi(2))).sum();
    let t = base.tail_upper;
    let expected = c0 * s_window / (s + t);
    assert!((shifted.shift.value - base.shift.value - expected).abs() < 1e-9, "{} vs {expected}", shifted.shift.value - base.shift.value);
}
