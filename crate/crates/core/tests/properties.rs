use l0linf::kcalc::{k_at, k_at_distribution, m_at, optimal_decomposition};
use l0linf::matmodel::TraceMatrix;
use l0linf::orbits::{korbit_norm, pointwise_constant};
use l0linf::sampling::{self, random_matrix, random_unitary};
use l0linf::stepfn::{probe_points, SingularFunction, StepFunction};
use l0linf::symnorm::{e_eval, DeltaNorm};
use num_complex::Complex64;
use proptest::collection::vec;
use proptest::prelude::*;
use rand::Rng;

fn value() -> impl Strategy<Value = f64> {
    prop_oneof![1 => Just(0.0), 8 => -5.0..5.0f64, 1 => Just(1.0)]
}

fn step_fn() -> impl Strategy<Value = StepFunction> {
    (1..8usize)
        .prop_flat_map(|m| (vec(0.1..2.0f64, m), vec(value(), m)))
        .prop_map(|(w, v)| StepFunction::from_widths(&w, v, 0.0).unwrap())
}

fn profile() -> impl Strategy<Value = SingularFunction> {
    step_fn().prop_map(|f| f.rearrange().unwrap())
}

fn nonzero_profile() -> impl Strategy<Value = SingularFunction> {
    profile().prop_filter("nonzero", |m| !m.is_zero())
}

fn matrix() -> impl Strategy<Value = TraceMatrix> {
    any::<u64>().prop_map(|seed| {
        let mut r = sampling::rng(seed);
        let n = r.random_range(1..=6);
        let w = sampling::random_weight(&mut r);
        random_matrix(&mut r, n, w)
    })
}

fn probes(a: &StepFunction, b: &StepFunction) -> Vec<f64> {
    probe_points(a.breakpoints().iter().chain(b.breakpoints()).copied())
}

fn leq(a: f64, b: f64) -> bool {
    a <= b + 1e-12 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn rearrangement_is_equimeasurable(f in step_fn()) {
        let mu = f.rearrange().unwrap();
        let mut levels: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
        levels.extend(levels.clone().iter().map(|v| 0.5 * v));
        levels.push(0.0);
        for s in levels {
            prop_assert!((f.dist(s) - mu.dist(s)).abs() <= 1e-12 * f.dist(0.0).max(1.0));
        }
    }

    #[test]
    fn rearrangement_inverts_distribution(f in step_fn()) {
        let mu = f.rearrange().unwrap();
        let mut levels: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
        levels.push(0.0);
        for t in probes(&f, &mu) {
            let inf = levels.iter().copied().filter(|&s| f.dist(s) <= t).fold(f64::INFINITY, f64::min);
            prop_assert_eq!(mu.evaluate(t).unwrap(), inf);
        }
    }

    #[test]
    fn rearrangement_is_idempotent(f in step_fn()) {
        let mu = f.rearrange().unwrap();
        prop_assert_eq!(mu.rearrange().unwrap(), mu);
    }

    #[test]
    fn sum_is_dominated_by_dilated_sum(f in step_fn(), g in step_fn()) {
        let lhs = f.add_pointwise(&g).rearrange().unwrap();
        let rhs = f.rearrange().unwrap().add(&g.rearrange().unwrap()).dilate(2.0).unwrap();
        for t in probes(&lhs, &rhs) {
            prop_assert!(leq(lhs.evaluate(t).unwrap(), rhs.evaluate(t).unwrap()));
        }
    }

    #[test]
    fn support_is_subadditive(f in step_fn(), g in step_fn()) {
        let l0 = |h: &StepFunction| h.norms().0;
        prop_assert!(leq(l0(&f.add_pointwise(&g)), l0(&f) + l0(&g)));
    }

    #[test]
    fn k_formulas_agree(mu in profile(), e in -3.0..3.0f64) {
        let u = 10f64.powf(e);
        let (a, b) = (k_at(&mu, u), k_at_distribution(&mu, u));
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn k_is_concave_nondecreasing_and_capped(mu in profile(), e in -3.0..3.0f64, r in 1.0..4.0f64) {
        let (u, v) = (10f64.powf(e), 10f64.powf(e) * r);
        let (ku, kv, kmid) = (k_at(&mu, u), k_at(&mu, v), k_at(&mu, 0.5 * (u + v)));
        prop_assert!(leq(ku, kv));
        prop_assert!(leq(0.5 * (ku + kv), kmid));
        let (l0, linf) = mu.norms();
        prop_assert!(leq(ku, (u * linf).min(l0)));
    }

    #[test]
    fn m_and_k_sandwich(mu in profile(), e in -2.0..2.0f64) {
        let t = 10f64.powf(e);
        let (m, k) = (m_at(&mu, t), k_at(&mu, t));
        prop_assert!(leq(m, k) && leq(k, 2.0 * m));
    }

    #[test]
    fn s_norm_bounded_by_distribution(mu in profile(), e in -3.0..1.0f64) {
        let eps = 10f64.powf(e);
        prop_assert!(leq(k_at(&mu, 1.0), eps + mu.dist(eps)));
    }

    #[test]
    fn k_is_monotone_in_the_profile(mu in profile(), nu in profile(), e in -3.0..3.0f64) {
        let u = 10f64.powf(e);
        prop_assert!(leq(k_at(&mu.min(&nu), u), k_at(&mu, u)));
    }

    #[test]
    fn k_commutes_with_dilation(mu in profile(), e in -3.0..3.0f64, s in 0.1..10.0f64) {
        let u = 10f64.powf(e);
        let lhs = k_at(&mu.dilate(s).unwrap(), u);
        let rhs = s * k_at(&mu, u / s);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(1.0));
    }

    #[test]
    fn decomposition_attains_k(f in step_fn(), e in -3.0..3.0f64) {
        let u = 10f64.powf(e);
        let d = optimal_decomposition(&f, u).unwrap();
        prop_assert!(d.g.add_pointwise(&d.h).approx_eq(&f, 1e-12));
        let k = k_at(&f.rearrange().unwrap(), u);
        prop_assert!((d.value - k).abs() <= 1e-9 * k.max(1.0));
    }

    #[test]
    fn norms_are_symmetric_and_monotone(f in step_fn(), nu in profile()) {
        let mu = f.rearrange().unwrap();
        let smaller = mu.min(&nu);
        for e in DeltaNorm::builtins() {
            prop_assert_eq!(e_eval(&e, &f).unwrap(), e_eval(&e, &mu).unwrap());
            prop_assert!(leq(e.eval(&smaller).unwrap(), e.eval(&mu).unwrap()));
        }
    }

    #[test]
    fn korbit_sandwiches_pointwise_constant(x in profile(), a in nonzero_profile()) {
        let ko = korbit_norm(&x, &a).unwrap();
        if let Some(c) = pointwise_constant(&x, &a).unwrap() {
            prop_assert!(ko <= c * (1.0 + 1e-9));
        }
        if ko.is_finite() {
            let c = pointwise_constant(&x, &a).unwrap();
            prop_assert!(c.is_some());
            prop_assert!(c.unwrap() <= (3.0 * ko).max(1.0) * (1.0 + 1e-9));
        }
    }

    #[test]
    fn korbit_reciprocity(x in nonzero_profile(), a in nonzero_profile()) {
        let prod = korbit_norm(&x, &a).unwrap() * korbit_norm(&a, &x).unwrap();
        prop_assert!(prod >= 1.0 - 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn singular_values_are_unitarily_invariant(x in matrix(), seed in any::<u64>()) {
        let mut r = sampling::rng(seed);
        let n = x.n();
        let (u, v) = (random_unitary(&mut r, n), random_unitary(&mut r, n));
        let y = x.with_data(u * x.data() * v);
        prop_assert!(y.mu_of().unwrap().approx_eq(&x.mu_of().unwrap(), 1e-9));
    }

    #[test]
    fn adjoint_and_scaling(x in matrix(), re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let mu = x.mu_of().unwrap();
        prop_assert!(x.adjoint().mu_of().unwrap().approx_eq(&mu, 1e-9));
        let c = Complex64::new(re, im);
        prop_assume!(c.norm() > 1e-3);
        prop_assert!(x.scale(c).mu_of().unwrap().approx_eq(&mu.scale(c.norm()), 1e-9));
    }

    #[test]
    fn k_direct_equals_k_of_mu(x in matrix(), e in -3.0..3.0f64) {
        let u = 10f64.powf(e);
        let direct = x.k_direct(u).unwrap().value;
        let via_mu = k_at(&x.mu_of().unwrap(), u);
        prop_assert!((direct - via_mu).abs() <= 1e-9 * via_mu.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn k_is_an_f_norm_on_matrices(seed in any::<u64>(), e in -2.0..2.0f64) {
        let mut r = sampling::rng(seed);
        let n = r.random_range(1..=6);
        let (x, y) = (random_matrix(&mut r, n, 1.0), random_matrix(&mut r, n, 1.0));
        let u = 10f64.powf(e);
        let k = |m: &TraceMatrix| k_at(&m.mu_of().unwrap(), u);
        prop_assert!(leq(k(&(&x + &y)), k(&x) + k(&y)));
    }

    #[test]
    fn projection_trace_matches_distribution(x in matrix(), s in 0.0..5.0f64) {
        let p = x.spectral_projection(s, f64::INFINITY).unwrap();
        let trace = p.trace().re;
        prop_assert!((trace - x.dist_op(s).unwrap()).abs() <= 1e-9 * x.n() as f64);
    }
}
