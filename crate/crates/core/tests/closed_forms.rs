//! Published closed forms for the K-functional and the two-level counterexample.

use l0linf::kcalc::{k_at, k_curve, log_grid, m_at};
use l0linf::orbits::{counterexample_with_weight, korbit_norm, orbit_necessary_check, CounterexampleSpec};
use l0linf::stepfn::SingularFunction;

fn two_level(k1: f64, l1: f64, k2: f64, l2: f64) -> SingularFunction {
    SingularFunction::from_widths(&[l1, l2], vec![k1, k2], 0.0).unwrap()
}

#[test]
fn indicator_k_is_min_of_line_and_support() {
    for (c, len) in [(1.0, 1.0), (2.0, 3.0), (0.25, 7.5)] {
        let mu = SingularFunction::indicator(c, len).unwrap();
        for u in log_grid(1e-4, 1e4, 200).unwrap() {
            assert!((k_at(&mu, u) - (u * c).min(len)).abs() <= 1e-12 * len);
        }
    }
}

#[test]
fn two_level_k_has_three_candidates() {
    let (k1, t1, k2, t2) = (1.0, 1.0, 0.6, 1.0);
    let mu = two_level(k1, t1, k2, t2);
    for u in log_grid(1e-3, 1e3, 100).unwrap() {
        let want = (u * k1).min(t1 + u * k2).min(t1 + t2);
        assert!((k_at(&mu, u) - want).abs() <= 1e-12);
    }
    assert_eq!(k_at(&mu, 1.0), 1.0);
}

#[test]
fn counterexample_curves_for_several_parameter_sets() {
    let cases = [
        (1.0, 1.0, 1.0, 0.6, None),
        (1.0, 1.0, 1.0, 0.6, Some(0.5)),
        (2.0, 1.0, 3.0, 1.5, None),
        (1.0, 3.0, 1.0, 0.9, None),
        (0.5, 0.25, 4.0, 2.0, None),
    ];
    for (tau1, tau2, k1, k2, w) in cases {
        let spec = CounterexampleSpec::new(tau1, tau2, k1, k2).unwrap();
        let ce = counterexample_with_weight(&spec, w).unwrap();
        let (mu_a, mu_x) = (ce.a.mu_of().unwrap(), ce.x.mu_of().unwrap());
        let scale = (tau1 + tau2) / k1;
        for u in log_grid(1e-3 * scale, 1e3 * scale, 100).unwrap() {
            let kx = (u * k1).min(tau1 + tau2);
            let ka = (u * k1).min(tau1 + u * k2).min(tau1 + tau2);
            assert!((k_at(&mu_x, u) - kx).abs() <= 1e-12 * kx.max(1.0));
            assert!((k_at(&mu_a, u) - ka).abs() <= 1e-12 * ka.max(1.0));
            assert!((kx - ka).abs() <= 1e-12 * kx.max(1.0));
        }
        for i in 0..20 {
            let t = tau1 + tau2 * (i as f64 + 0.5) / 20.0;
            assert_eq!(mu_a.evaluate(t).unwrap(), k2);
            assert_eq!(mu_x.evaluate(t).unwrap(), k1);
        }
        assert!(!orbit_necessary_check(&ce.x, &ce.a, 1.0).unwrap().holds);
        assert_eq!(korbit_norm(&ce.x, &ce.a).unwrap(), 1.0);
        assert!(ce.report.certified(), "{}", ce.report);
    }
}

#[test]
fn counterexample_k_curves_share_kinks() {
    let spec = CounterexampleSpec::new(1.0, 1.0, 1.0, 0.6).unwrap();
    let ce = counterexample_with_weight(&spec, None).unwrap();
    let ka = k_curve(&ce.a.mu_of().unwrap());
    let kx = k_curve(&ce.x.mu_of().unwrap());
    let (a, x): (Vec<f64>, Vec<f64>) = (ka.kinks().collect(), kx.kinks().collect());
    assert_eq!(a, x);
    assert_eq!(x, vec![2.0]);
}

#[test]
fn sandwich_is_tight_on_the_witness() {
    let mu = two_level(2.0, 1.0, 1.0, 1.0);
    assert_eq!(k_at(&mu, 1.0), 2.0);
    assert_eq!(m_at(&mu, 1.0), 1.0);
}

#[test]
fn m_of_indicator() {
    for (c, len) in [(1.0, 1.0), (3.0, 0.5)] {
        let mu = SingularFunction::indicator(c, len).unwrap();
        for t in log_grid(1e-3, 1e3, 50).unwrap() {
            assert!((m_at(&mu, t) - (t * c).min(len)).abs() <= 1e-12 * len);
        }
    }
}
