//! Seeded property battery covering every module.
//!
//! The report contains no timings and no hash-ordered data, so a seed fixes its
//! serialized form byte for byte.

use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::homs::{enorm_bound_check, interpolation_check, PairHom, Term};
use crate::kcalc::{k_at, k_at_distribution, log_grid, m_at};
use crate::orbits::{self, CounterexampleSpec};
use crate::sampling::{self, SampleRng};
use crate::stepfn::{probe_points, SingularFunction, StepFunction};
use crate::symnorm::{delta_axioms_check, dilation_check, e_eval, embedding_check, DeltaNorm};
use crate::transfer;

/// Relative tolerance used by comparisons that are exact up to rounding.
const EXACT: f64 = 1e-12;
const MATRIX: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct CaseResult {
    pub module: &'static str,
    pub name: &'static str,
    pub checked: usize,
    pub failed: usize,
    pub first_failure: Option<String>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub version: &'static str,
    pub cases: Vec<CaseResult>,
    pub passed: usize,
    pub failed: usize,
    pub all_pass: bool,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

struct Case {
    checked: usize,
    failed: usize,
    first_failure: Option<String>,
}

impl Case {
    fn new() -> Self {
        Self {
            checked: 0,
            failed: 0,
            first_failure: None,
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(detail());
            }
        }
    }

    fn check_result<T>(&mut self, r: Result<T>, ok: impl FnOnce(&T) -> bool, detail: impl FnOnce(&T) -> String) {
        match r {
            Ok(v) => {
                let pass = ok(&v);
                self.check(pass, || detail(&v));
            }
            Err(e) => self.check(false, || format!("error: {e}")),
        }
    }
}

fn le(a: f64, b: f64, rtol: f64) -> bool {
    a <= b + rtol * a.abs().max(b.abs()).max(1.0)
}

fn near(a: f64, b: f64, rtol: f64) -> bool {
    (a - b).abs() <= rtol * a.abs().max(b.abs()).max(1.0)
}

/// Probe points covering the breakpoints of every function given.
fn grid_of<'a>(fs: impl IntoIterator<Item = &'a StepFunction>, scale: f64) -> Vec<f64> {
    probe_points(
        fs.into_iter()
            .flat_map(|f| f.breakpoints().iter().map(move |b| b * scale)),
    )
}

fn u_grid() -> Vec<f64> {
    log_grid(1e-3, 1e3, 20).expect("valid grid")
}

type CaseFn = fn(&mut SampleRng, &mut Case);

const CASES: &[(&str, &str, CaseFn)] = &[
    ("stepfn", "rearrangement_preserves_distribution", stepfn_distribution),
    ("stepfn", "rearrangement_inverts_distribution", stepfn_round_trip),
    ("stepfn", "rearrangement_idempotent", stepfn_idempotent),
    ("stepfn", "sum_dominated_by_dilated_sum", stepfn_sum_dilation),
    ("stepfn", "support_subadditive", stepfn_l0_subadditive),
    ("matmodel", "unitary_invariance", matmodel_unitary),
    ("matmodel", "adjoint_and_scaling", matmodel_adjoint_scaling),
    ("matmodel", "distribution_agreement", matmodel_dist),
    ("matmodel", "projection_trace", matmodel_projection_trace),
    ("matmodel", "polar_reconstruction", matmodel_polar),
    ("matmodel", "sum_dominated_by_dilated_sum", matmodel_sum_dilation),
    ("kcalc", "direct_equals_rearranged", kcalc_direct),
    ("kcalc", "formula_agreement", kcalc_formulas),
    ("kcalc", "m_k_sandwich", kcalc_sandwich),
    ("kcalc", "f_norm_triangle", kcalc_triangle),
    ("kcalc", "s_norm_distribution_bound", kcalc_s_bound),
    ("kcalc", "monotonicity", kcalc_monotone),
    ("symnorm", "axioms_for_builtins", symnorm_axioms),
    ("symnorm", "symmetry", symnorm_symmetry),
    ("symnorm", "monotonicity", symnorm_monotone),
    ("symnorm", "dilation_bound", symnorm_dilation),
    ("symnorm", "embedding_bound", symnorm_embedding),
    ("homs", "sampled_bounds", homs_sampling),
    ("homs", "homomorphism_laws", homs_laws),
    ("homs", "interpolation_inequality", homs_interpolation),
    ("homs", "enorm_bound", homs_enorm),
    ("orbits", "counterexample", orbits_counterexample),
    ("orbits", "pointwise_korbit_equivalence", orbits_round_trip),
    ("orbits", "korbit_reciprocity", orbits_reciprocity),
    ("orbits", "korbit_scale_equivariance", orbits_scaling),
    ("transfer", "pipeline", transfer_pipeline),
];

pub fn run_suite(seed: u64) -> SuiteReport {
    let mut cases = Vec::with_capacity(CASES.len());
    for (i, &(module, name, f)) in CASES.iter().enumerate() {
        let mut rng = sampling::rng(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64));
        let mut case = Case::new();
        f(&mut rng, &mut case);
        cases.push(CaseResult {
            module,
            name,
            checked: case.checked,
            failed: case.failed,
            pass: case.failed == 0 && case.checked > 0,
            first_failure: case.first_failure,
        });
    }
    let passed = cases.iter().filter(|c| c.pass).count();
    SuiteReport {
        seed,
        version: env!("CARGO_PKG_VERSION"),
        failed: cases.len() - passed,
        all_pass: passed == cases.len(),
        passed,
        cases,
    }
}

fn stepfn_distribution(rng: &mut SampleRng, case: &mut Case) {
    for _ in 0..200 {
        let f = sampling::random_step_function(rng, 8);
        let mu = f.rearrange().expect("zero tail");
        let mut levels: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
        levels.extend(levels.clone().iter().map(|v| v * 0.5));
        levels.push(0.0);
        for s in levels {
            case.check(near(f.dist(s), mu.dist(s), EXACT), || format!("d({s}) differs for {f}"));
        }
    }
}

fn stepfn_round_trip(rng: &mut SampleRng, case: &mut Case) {
    for _ in 0..200 {
        let f = sampling::random_step_function(rng, 8);
        let mu = f.rearrange().expect("zero tail");
        let mut levels: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
        levels.push(0.0);
        for t in grid_of([&f, mu.as_step()], 1.0) {
            // inf{s : d(s) <= t} is attained at a level of |f|
            let inf = levels
                .iter()
                .copied()
                .filter(|&s| f.dist(s) <= t)
                .fold(f64::INFINITY, f64::min);
            case.check(near(mu.value_at(t), inf, EXACT), || format!("mu({t}) != {inf} for {f}"));
        }
    }
}

fn stepfn_idempotent(rng: &mut SampleRng, case: &mut Case) {
    for _ in 0..200 {
        let mu = sampling::random_singular_function(rng, 8);
        let again = mu.rearrange().expect("singular function");
        case.check(again == mu, || format!("rearrange changed {}", mu.as_step()));
    }
}

fn stepfn_sum_dilation(rng: &mut SampleRng, case: &mut Case) {
    for _ in 0..200 {
        let f = sampling::random_step_function(rng, 6);
        let g = sampling::random_step_function(rng, 6);
        let lhs = f.add_pointwise(&g).rearrange().expect("zero tail");
        let rhs = f.rearrange().unwrap().add(&g.rearrange().unwrap()).dilate(2.0).unwrap();
        for t in grid_of([lhs.as_step(), rhs.as_step()], 1.0) {
            case.check(le(lhs.value_at(t), rhs.value_at(t), EXACT), || {
                format!("t = {t}: {f} + {g}")
            });
        }
    }
}

fn stepfn_l0_subadditive(rng: &mut SampleRng, case: &mut Case) {
    for _ in 0..300 {
        let f = sampling::random_step_function(rng, 6);
        let g = sampling::random_step_function(rng, 6);
        let sum = f.add_pointwise(&g).norms().0;
        case.check(le(sum, f.norms().0 + g.norms().0, EXACT), || format!("{f} + {g}"));
    }
}

fn random_n(rng: &mut SampleRng) -> usize {
    rng.random_range(1..=8)
}

fn matmodel_unitary(rng: &mut SampleRng, case: &mut Case) {
    for _ in 0..60 {
        let n = random_n(rng);
        let w = sampling::random_weight(rng);
        let x = sampling::random_matrix(rng, n, w);
        let u = x.with_data(sampling::random_unitary(rng, n));
        let v = x.with_data(sampling::random_unitary(rng, n));
        let y = &(&u * &x) * &v;
        let (a, b) = (x.mu_of().unwrap(), y.mu_of().unwrap());
        case.check(a.approx_eq(&b, MATRIX), || {
            format!("n = {n}: {} vs {}", a.as_step(), b.as_step())
        });
    }
}

fn matmodel_adjoint_scaling(rng: &mut SampleRng, case: &mut Case) {
    for _ in 0..60 {
        let n = random_n(rng);
        let x = sampling::random_matrix(rng, n, 1.0);
        let mu = x.mu_of().unwrap();
        case.check(x.adjoint().mu_of().unwrap().approx_eq(&mu, MATRIX), || "adjoint".into());
        let c = num_complex::Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let scaled = x.scale(c).mu_of().unwrap();
        case.check(scaled.approx_eq(&mu.scale(c.norm()), MATRIX), || {
            format!("scale by {c}")
        });
    }
}

fn matmodel_dist(rng: &mut SampleRng, case: &mut Case) {
    for _ in 0..60 {
        let n = random_n(rng);
        let w = sampling::random_weight(rng);
        let x = sampling::random_matrix(rng, n, w);
        let mu = x.mu_of().unwrap();
        for s in [0.0, 0.05, 0.5, 1.0, 2.0, 4.0, 10.0] {
            let d = x.dist_op(s).unwrap();
            case.check(near(d, mu.dist(s), EXACT), || format!("dist_op({s}) = {d}"));
        }
    }
}

fn matmodel_projection_trace(rng: &mut SampleRng, case: &mut Case) {
    for _ in 0..60 {
        let n = random_n(rng);
        let w = sampling::random_weight(rng);
        let x = sampling::random_matrix(rng, n, w);
        let sigma = x.spectral().unwrap().singular_values;
        for s in sigma.iter().map(|v| v * 0.999).chain([0.0]) {
            let p = x.spectral_projection(s, f64::INFINITY).unwrap();
            let tr = p.trace().re;
            let d = x.dist_op(s).unwrap();
            case.check(near(tr, d, MATRIX), || format!("trace {tr} vs dist {d}"));
            let idem = (&(&p * &p) - &p).max_abs().max((&p.adjoint() - &p).max_abs());
            case.check(idem <= MATRIX, || format!("projection defect {idem:e}"));
        }
    }
}

fn matmodel_polar(rng: &mut SampleRng, case: &mut Case) {
    for _ in 0..60 {
        let n = random_n(rng);
        let x = sampling::random_matrix(rng, n, 1.0);
        let (u, abs) = x.polar().unwrap();
        let err = (&(&u * &abs) - &x).op_norm();
        case.check(err <= MATRIX * x.op_norm(), || format!("polar residual {err:e}"));
    }
}

fn matmodel_sum_dilation(rng: &mut SampleRng, case: &mut Case) {
    for _ in 0..60 {
        let n = random_n(rng);
        let x = sampling::random_matrix(rng, n, 1.0);
        let y = sampling::random_matrix(rng, n, 1.0);
        let lhs = (&x + &y).mu_of().unwrap();
        let rhs = x.mu_of().unwrap().add(&y.mu_of().unwrap()).dilate(2.0).unwrap();
        for t in grid_of([lhs.as_step(), rhs.as_step()], 1.0) {
            case.check(le(lhs.value_at(t), rhs.value_at(t), MATRIX), || format!("t = {t}"));
        }
    }
}

fn kcalc_direct(rng: &mut SampleRng, case: &mut Case) {
    for _ in 0..200 {
        let n = rng.random_range(1..=12);
        let w = sampling::random_weight(rng);
        let x = sampling::random_matrix(rng, n, w);
        let mu = x.mu_of().unwrap();
        for u in u_grid() {
            let direct = x.k_direct(u).unwrap().value;
            let via_mu = k_at(&mu, u);
            case.check(near(direct, via_mu, MATRIX), || {
                format!("n = {n}, u = {u}: {direct} vs {via_mu}")
            });
        }
    }
}

fn kcalc_formulas(rng: &mut SampleRng, case: &mut Case) {
    for _ in 0..500 {
        let mu = sampling::random_step_function(rng, 8).rearrange().unwrap();
        for u in u_grid() {
            let (a, b) = (k_at(&mu, u), k_at_distribution(&mu, u));
            case.check(near(a, b, EXACT), || format!("u = {u}: {a} vs {b}"));
        }
    }
}

fn kcalc_sandwich(rng: &mut SampleRng, case: &mut Case) {
    for _ in 0..500 {
        let mu = sampling::random_step_function(rng, 8).rearrange().unwrap();
        for t in u_grid() {
            let (m, k) = (m_at(&mu, t), k_at(&mu, t));
            case.check(le(m, k, EXACT) && le(k, 2.0 * m, EXACT), || {
                format!("t = {t}: M = {m}, K = {k}")
            });
        }
    }
    let witness = SingularFunction::from_widths(&[1.0, 1.0], vec![2.0, 1.0], 0.0).unwrap();
    let (m, k) = (m_at(&witness, 1.0), k_at(&witness, 1.0));
    case.check(k == 2.0 * m, || format!("tightness witness: K = {k}, M = {m}"));
}

fn kcalc_triangle(rng: &mut SampleRng, case: &mut Case) {
    for _ in 0..500 {
        let n = rng.random_range(1..=8);
        let x = sampling::random_matrix(rng, n, 1.0);
        let y = sampling::random_matrix(rng, n, 1.0);
        let lhs = k_at(&(&x + &y).mu_of().unwrap(), 1.0);
        let rhs = k_at(&x.mu_of().unwrap(), 1.0) + k_at(&y.mu_of().unwrap(), 1.0);
        case.check(le(lhs, rhs, MATRIX), || format!("{lhs} > {rhs}"));
    }
}

fn kcalc_s_bound(rng: &mut SampleRng, case: &mut Case) {
    for _ in 0..200 {
        let mu = sampling::random_singular_function(rng, 8);
        for eps in log_grid(1e-3, 10.0, 15).unwrap() {
            let bound = eps + mu.dist(eps);
            let s = k_at(&mu, 1.0);
            case.check(le(s, bound, EXACT), || format!("eps = {eps}: {s} > {bound}"));
        }
    }
}

fn kcalc_monotone(rng: &mut SampleRng, case: &mut Case) {
    for _ in 0..200 {
        let a = sampling::random_singular_function(rng, 6);
        let b = sampling::random_singular_function(rng, 6);
        let small = a.min(&b);
        for u in u_grid() {
            let (ks, ka) = (k_at(&small, u), k_at(&a, u));
            case.check(le(ks, ka, EXACT), || format!("u = {u}: {ks} > {ka}"));
        }
    }
}

fn symnorm_axioms(rng: &mut SampleRng, case: &mut Case) {
    let samples: Vec<SingularFunction> = (0..500).map(|_| sampling::random_singular_function(rng, 6)).collect();
    for e in DeltaNorm::builtins() {
        case.check_result(delta_axioms_check(&e, &samples), |r| r.all_pass(), |r| format!("{r:?}"));
    }
}

fn symnorm_symmetry(rng: &mut SampleRng, case: &mut Case) {
    for _ in 0..100 {
        let f = sampling::random_step_function(rng, 6);
        let mu = f.rearrange().unwrap();
        for e in DeltaNorm::builtins() {
            let same = match (e_eval(&e, &f), e_eval(&e, &mu)) {
                (Ok(a), Ok(b)) => near(a, b, EXACT),
                _ => false,
            };
            case.check(same, || format!("{}: {f}", e.name()));
        }
    }
}

fn symnorm_monotone(rng: &mut SampleRng, case: &mut Case) {
    for _ in 0..100 {
        let a = sampling::random_singular_function(rng, 6);
        let small = a.min(&sampling::random_singular_function(rng, 6));
        for e in DeltaNorm::builtins() {
            let (x, y) = (e.eval(&small).unwrap(), e.eval(&a).unwrap());
            case.check(le(x, y, EXACT), || format!("{}: {x} > {y}", e.name()));
        }
    }
}

fn symnorm_dilation(rng: &mut SampleRng, case: &mut Case) {
    for _ in 0..100 {
        let mu = sampling::random_singular_function(rng, 6);
        for e in DeltaNorm::builtins() {
            for k in 0..4 {
                case.check_result(
                    dilation_check(&e, &mu, k),
                    |r| r.holds,
                    |r| format!("{} k = {k}: {} > {}", e.name(), r.lhs, r.rhs),
                );
            }
        }
    }
}

fn symnorm_embedding(rng: &mut SampleRng, case: &mut Case) {
    for _ in 0..60 {
        let n = random_n(rng);
        let rank = rng.random_range(1..=n);
        let x = sampling::random_matrix_with_rank(rng, n, rank, 1.0 / (n as f64 * 2.0));
        let eps = rng.random_range(0.01..1.0);
        // rank·w ≤ 1/2, so rescaling the operator norm keeps ‖X‖_F ≤ 1
        let x = x.scale((eps / x.op_norm()).into());
        for e in DeltaNorm::builtins() {
            case.check_result(
                embedding_check(&e, &x),
                |r| r.bound.holds,
                |r| format!("{}: {r:?}", e.name()),
            );
        }
    }
}

/// Three random terms with norms below 1.
fn random_hom(rng: &mut SampleRng, n: usize, w: f64) -> PairHom {
    let terms = (0..3)
        .map(|_| {
            let a = sampling::random_matrix(rng, n, w);
            let b = sampling::random_matrix(rng, n, w);
            let (na, nb) = (a.op_norm(), b.op_norm());
            Term {
                a: a.scale((rng.random_range(0.2..1.0) / na).into()),
                b: b.scale((1.0 / nb).into()),
            }
        })
        .collect();
    PairHom::new(terms, false).expect("compatible terms")
}

fn homs_sampling(rng: &mut SampleRng, case: &mut Case) {
    for _ in 0..20 {
        let n = rng.random_range(2..=6);
        let t = random_hom(rng, n, 1.0);
        let (m0, m1) = t.certified_bounds().unwrap();
        for _ in 0..10 {
            let rank = rng.random_range(1..=n);
            let z = sampling::random_matrix_with_rank(rng, n, rank, 1.0);
            let (z0, z1) = z.trace_norms().unwrap();
            let (y0, y1) = t.apply(&z).unwrap().trace_norms().unwrap();
            case.check(le(y0, m0 * z0, EXACT) && le(y1, m1 * z1, MATRIX), || {
                format!("({y0}, {y1}) vs ({}, {})", m0 * z0, m1 * z1)
            });
        }
    }
}

fn homs_laws(rng: &mut SampleRng, case: &mut Case) {
    for _ in 0..50 {
        let n = rng.random_range(1..=6);
        let t = random_hom(rng, n, 1.0);
        let z1 = sampling::random_matrix(rng, n, 1.0);
        let z2 = sampling::random_matrix(rng, n, 1.0);
        let sum = t.apply(&(&z1 + &z2)).unwrap();
        let parts = &t.apply(&z1).unwrap() + &t.apply(&z2).unwrap();
        let scale = sum.max_abs().max(1.0);
        case.check((&sum - &parts).max_abs() <= EXACT * 10.0 * scale, || {
            "additivity".into()
        });
        let neg = t.apply(&z1.scale((-1.0).into())).unwrap();
        let odd = (&neg + &t.apply(&z1).unwrap()).max_abs();
        case.check(odd <= EXACT * scale, || format!("oddness defect {odd:e}"));
    }
}

fn homs_interpolation(rng: &mut SampleRng, case: &mut Case) {
    for _ in 0..100 {
        let n = rng.random_range(1..=8);
        let w = sampling::random_weight(rng);
        let t = random_hom(rng, n, w);
        let x = sampling::random_matrix(rng, n, w);
        case.check_result(interpolation_check(&t, &x), |r| r.holds, |r| format!("{r:?}"));
    }
}

fn homs_enorm(rng: &mut SampleRng, case: &mut Case) {
    for _ in 0..30 {
        let n = rng.random_range(1..=6);
        let t = random_hom(rng, n, 1.0);
        let x = sampling::random_matrix(rng, n, 1.0);
        for e in DeltaNorm::builtins() {
            case.check_result(enorm_bound_check(&t, &x, &e), |r| r.holds, |r| format!("{r:?}"));
        }
    }
}

fn orbits_counterexample(_: &mut SampleRng, case: &mut Case) {
    let spec = CounterexampleSpec::new(1.0, 1.0, 1.0, 0.6).expect("valid spec");
    case.check_result(
        orbits::counterexample(&spec),
        |c| c.report.certified(),
        |c| c.report.to_string(),
    );
    let half = orbits::counterexample_with_weight(&spec, Some(0.5));
    case.check_result(half, |c| c.report.certified(), |c| c.report.to_string());
    case.check(CounterexampleSpec::new(1.0, 1.0, 1.0, 0.4).is_err(), || {
        "constraint not enforced".into()
    });
}

/// `μ(t; X) ≤ C μ(t/C; A)` by construction: `X` is `C σ_C μ_A` cut down by a
/// random nonincreasing factor profile.
pub(crate) fn planted_pair(rng: &mut SampleRng) -> (SingularFunction, SingularFunction, f64) {
    let a = sampling::random_singular_function(rng, 6);
    let c = rng.random_range(1.0..4.0);
    let cap = a.dilate(c).unwrap().scale(c);
    let x = cap.min(&sampling::random_singular_function(rng, 8));
    (a, x, c)
}

fn orbits_round_trip(rng: &mut SampleRng, case: &mut Case) {
    for _ in 0..100 {
        let (a, x, c) = planted_pair(rng);
        let ko = orbits::korbit_norm(&x, &a);
        case.check_result(ko, |&k| le(k, c, 1e-9), |k| format!("korbit {k} > planted {c}"));
        let ko = orbits::korbit_norm(&x, &a).unwrap();
        let pc = orbits::pointwise_constant(&x, &a).unwrap();
        case.check(pc.is_some_and(|p| le(p, (3.0 * ko).max(1.0), 1e-9)), || {
            format!("pointwise {pc:?} > 3 * {ko}")
        });
    }
}

fn orbits_reciprocity(rng: &mut SampleRng, case: &mut Case) {
    for _ in 0..100 {
        let a = sampling::random_singular_function(rng, 6);
        let x = sampling::random_singular_function(rng, 6);
        let p = orbits::korbit_norm(&x, &a).unwrap() * orbits::korbit_norm(&a, &x).unwrap();
        case.check(p >= 1.0 - EXACT, || format!("product {p}"));
    }
}

fn orbits_scaling(rng: &mut SampleRng, case: &mut Case) {
    for _ in 0..100 {
        let n = random_n(rng);
        let a = sampling::random_matrix(rng, n, 1.0);
        let x = sampling::random_matrix(rng, n, 1.0);
        let c = num_complex::Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let lhs = orbits::korbit_norm(&x.scale(c), &a).unwrap();
        let rhs = orbits::korbit_norm(&x.mu_of().unwrap().scale(c.norm()), &a.mu_of().unwrap()).unwrap();
        case.check(near(lhs, rhs, MATRIX), || format!("{lhs} vs {rhs}"));
    }
}

fn transfer_pipeline(rng: &mut SampleRng, case: &mut Case) {
    for i in 0..50 {
        let n = rng.random_range(1..=8);
        let w = sampling::random_weight(rng);
        let (a, x, c) = sampling::random_transfer_pair(rng, n, w);
        let run = transfer::plan(&a, &x).and_then(|p| {
            let t = transfer::build(&p, &a, &x)?;
            transfer::verify_with_seed(&t, &a, &x, &p, i)
        });
        case.check_result(
            run,
            |r| r.all_pass && r.c <= c,
            |r| {
                let failing: Vec<&str> = r.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
                format!("C = {} (planted {c}), failing: {failing:?}", r.c)
            },
        );
    }
}
