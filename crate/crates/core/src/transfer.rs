//! Constructive orbit transfer on the matrix model.
//!
//! Given `A`, `X` with `μ(t; X) ≤ C μ(t/C; A)`, [`plan`] fixes an integer `C`, a
//! rounding step `ε` and index maps; [`build`] turns them into a homomorphism
//!
//! ```text
//! T Z = U_X B_Δ (Σ_{j<2C} U_j* (A_Δ U_A* Z) U_j)
//! ```
//!
//! with `T A = X` and both pair bounds at most `2C`. The algebra is atomic with
//! atoms of trace `w`, so every trace-matching condition is an equality of index
//! counts.
//!
//! Rounding uses `⌊λ/ε⌋ε` on `[nε, (n+1)ε)`; eigenvalues of `|A|` below `ε` are
//! sent to zero and carry no level.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homs::{PairHom, Term};
use crate::matmodel::{CMatrix, TraceMatrix};
use crate::orbits::{dominance_margin, dominated, pointwise_constant_mu};
use crate::sampling;
use crate::stepfn::{probe_points, SingularFunction};

/// Largest integer `C` tried by [`plan`].
pub const MAX_C: u64 = 1_000_000;
const FACTOR_RTOL: f64 = 1e-9;
const SAMPLED_Z: usize = 100;

/// One rounding level: eigenvalues of `|A|` in `[nε, (n+1)ε)`, occupying the
/// index block `[start, end)` of the descending frame, i.e. `[a, b)` in trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub n: u64,
    pub value: f64,
    pub start: usize,
    pub end: usize,
    pub a: f64,
    pub b: f64,
}

/// Copy `j` of a level, placed at `[2C·start + j·len, 2C·start + (j+1)·len)`.
///
/// `kept_end` truncates the copy at the support of `X`; a copy starting past it
/// is empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftedInterval {
    pub level: usize,
    pub j: usize,
    pub start: usize,
    pub end: usize,
    pub kept_end: usize,
    pub a: f64,
    pub b: f64,
}

/// `U_j = Σ_{(x, a) ∈ pairs} v^A_a (v^X_x)*`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexMap {
    pub j: usize,
    /// `[x_index, a_index]`
    pub pairs: Vec<[usize; 2]>,
}

/// Everything needed to assemble the transfer homomorphism.
///
/// Diagonal data (`sigma_*`, `a_delta`, `b1`, `b2`, `b_delta`) is expressed in
/// the descending singular frames `frame_a`, `frame_x` (right singular vectors).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransferPlan {
    pub c: u64,
    pub pointwise_constant: f64,
    pub epsilon: f64,
    /// `min_{t < τ(s(X))} [2C μ(t/2C; A) − μ(t; X)]`
    pub delta: f64,
    pub delta_witness: f64,
    /// `C μ(τ(s(X))/2C; A)`, a lower bound for `delta`.
    pub margin_bound: f64,
    pub n: usize,
    pub w: f64,
    pub rank_a: usize,
    pub rank_x: usize,
    pub sigma_a: Vec<f64>,
    pub sigma_x: Vec<f64>,
    pub levels: Vec<Level>,
    pub shifted: Vec<ShiftedInterval>,
    pub index_maps: Vec<IndexMap>,
    pub a_delta: Vec<f64>,
    pub b1: Vec<f64>,
    pub b2: Vec<f64>,
    pub b_delta: Vec<f64>,
    pub frame_a: TraceMatrix,
    pub frame_x: TraceMatrix,
    pub polar_a: TraceMatrix,
    pub polar_x: TraceMatrix,
}

impl TransferPlan {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plan serializes")
    }

    pub fn two_c(&self) -> usize {
        2 * self.c as usize
    }
}

/// `min_{t < support} [2C μ(t/2C; A) − μ(t; X)]` over exact probe points.
fn margin(mu_x: &SingularFunction, mu_a: &SingularFunction, c: u64, support_x: f64) -> (f64, f64) {
    let two_c = 2.0 * c as f64;
    let grid = probe_points(
        mu_x.breakpoints()
            .iter()
            .copied()
            .chain(mu_a.breakpoints().iter().map(|b| b * two_c)),
    );
    let mut worst = (f64::INFINITY, f64::NAN);
    for t in grid.into_iter().filter(|&t| t < support_x) {
        let m = two_c * mu_a.value_at(t / two_c) - mu_x.value_at(t);
        if m < worst.0 {
            worst = (m, t);
        }
    }
    worst
}

fn search_c(mu_x: &SingularFunction, mu_a: &SingularFunction, support_x: f64) -> Result<(u64, f64, (f64, f64))> {
    let fail = |c: u64| {
        let (m, t) = dominance_margin(mu_x, mu_a, c as f64);
        Error::Plan(format!(
            "no integer C <= {MAX_C} satisfies the pointwise condition; at C = {c} the margin is {m:.6e} at t = {t}"
        ))
    };
    let pc = pointwise_constant_mu(mu_x, mu_a).ok_or_else(|| fail(MAX_C))?;
    if pc > MAX_C as f64 {
        return Err(fail(MAX_C));
    }
    // floor, not ceil: the bisection result may overshoot an integer by its tolerance
    let mut c = (pc.floor() as u64).max(1);
    while c <= MAX_C {
        if dominated(mu_x, mu_a, c as f64) {
            let m = margin(mu_x, mu_a, c, support_x);
            if m.0 > 0.0 {
                return Ok((c, pc, m));
            }
        }
        c += 1;
    }
    Err(fail(MAX_C))
}

fn diag_in(frame: &CMatrix, d: &[f64]) -> CMatrix {
    let n = d.len();
    let mut out = CMatrix::zeros(n, n);
    for (i, &v) in d.iter().enumerate().filter(|(_, v)| **v != 0.0) {
        out += frame.column(i) * frame.column(i).adjoint() * num_complex::Complex64::from(v);
    }
    out
}

/// Plans the transfer of `A` onto `X`.
pub fn plan(a: &TraceMatrix, x: &TraceMatrix) -> Result<TransferPlan> {
    a.compatible(x)?;
    let (sa, sx) = (a.spectral()?, x.spectral()?);
    let (n, w) = (a.n(), a.w());
    let (rank_a, rank_x) = (sa.rank(), sx.rank());
    if rank_a == 0 || rank_x == 0 {
        return Err(Error::InvalidInput("transfer needs A != 0 and X != 0".into()));
    }
    let (mu_a, mu_x) = (sa.singular_function(), sx.singular_function());
    let support_x = rank_x as f64 * w;
    let (c, pc, (delta, delta_witness)) = search_c(&mu_x, &mu_a, support_x)?;
    let two_c = 2 * c as usize;
    let margin_bound = c as f64 * mu_a.value_at(support_x / two_c as f64);
    let epsilon = delta.min(1.0) / (4.0 * c as f64);

    let sigma_a = sa.singular_values.clone();
    let sigma_x = sx.singular_values.clone();
    let level_of = |s: f64| (s / epsilon).floor() as u64;

    let mut levels = Vec::new();
    let mut i = 0;
    while i < rank_a {
        let lv = level_of(sigma_a[i]);
        let start = i;
        while i < rank_a && level_of(sigma_a[i]) == lv {
            i += 1;
        }
        if lv > 0 {
            levels.push(Level {
                n: lv,
                value: lv as f64 * epsilon,
                start,
                end: i,
                a: start as f64 * w,
                b: i as f64 * w,
            });
        }
    }

    let mut shifted = Vec::new();
    let mut index_maps: Vec<IndexMap> = (0..two_c).map(|j| IndexMap { j, pairs: Vec::new() }).collect();
    for (li, lv) in levels.iter().enumerate() {
        let len = lv.end - lv.start;
        for (j, map) in index_maps.iter_mut().enumerate() {
            let start = two_c * lv.start + j * len;
            let end = start + len;
            let kept_end = end.min(rank_x).max(start.min(rank_x));
            shifted.push(ShiftedInterval {
                level: li,
                j,
                start,
                end,
                kept_end,
                a: start as f64 * w,
                b: end as f64 * w,
            });
            for k in 0..kept_end.saturating_sub(start) {
                map.pairs.push([start + k, lv.start + k]);
            }
        }
    }

    let mut b1 = vec![0.0; n];
    for lv in &levels {
        b1[lv.start..lv.end].fill(lv.value);
    }
    let a_delta: Vec<f64> = (0..n)
        .map(|i| if b1[i] > 0.0 { b1[i] / sigma_a[i] } else { 0.0 })
        .collect();
    // μ(t; B₂) = μ(t/2C; B₁) on the support of X
    let b2: Vec<f64> = (0..n).map(|i| if i < rank_x { b1[i / two_c] } else { 0.0 }).collect();
    if let Some(i) = (0..rank_x).find(|&i| b2[i] <= 0.0) {
        return Err(Error::Plan(format!(
            "rounded profile vanishes at index {i} inside the support of X (epsilon = {epsilon:e})"
        )));
    }
    let b_delta: Vec<f64> = (0..n)
        .map(|i| if i < rank_x { sigma_x[i] / b2[i] } else { 0.0 })
        .collect();

    Ok(TransferPlan {
        c,
        pointwise_constant: pc,
        epsilon,
        delta,
        delta_witness,
        margin_bound,
        n,
        w,
        rank_a,
        rank_x,
        sigma_a,
        sigma_x,
        levels,
        shifted,
        index_maps,
        a_delta,
        b1,
        b2,
        b_delta,
        frame_a: TraceMatrix::new(sa.right.clone(), w)?,
        frame_x: TraceMatrix::new(sx.right.clone(), w)?,
        polar_a: sa.polar_isometry(),
        polar_x: sx.polar_isometry(),
    })
}

/// Matrices assembled from a plan.
struct Parts {
    u: Vec<CMatrix>,
    a_delta: CMatrix,
    b1: CMatrix,
    b2: CMatrix,
    b_delta: CMatrix,
    abs_x: CMatrix,
}

fn parts(p: &TransferPlan) -> Result<Parts> {
    let (va, vx) = (p.frame_a.data(), p.frame_x.data());
    let n = p.n;
    let mut u = Vec::with_capacity(p.index_maps.len());
    for map in &p.index_maps {
        let mut m = CMatrix::zeros(n, n);
        for &[xi, ai] in &map.pairs {
            if xi >= n || ai >= n {
                return Err(Error::Plan(format!("index pair ({xi}, {ai}) out of range for n = {n}")));
            }
            m += va.column(ai) * vx.column(xi).adjoint();
        }
        u.push(m);
    }
    Ok(Parts {
        u,
        a_delta: diag_in(va, &p.a_delta),
        b1: diag_in(va, &p.b1),
        b2: diag_in(vx, &p.b2),
        b_delta: diag_in(vx, &p.b_delta),
        abs_x: diag_in(vx, &p.sigma_x),
    })
}

fn reconstruction_error(polar: &TraceMatrix, frame: &TraceMatrix, sigma: &[f64], target: &TraceMatrix) -> f64 {
    let m = polar.data() * diag_in(frame.data(), sigma);
    target.with_data(m - target.data()).op_norm()
}

fn check_operands(p: &TransferPlan, a: &TraceMatrix, x: &TraceMatrix) -> Result<()> {
    a.compatible(x)?;
    if a.n() != p.n || a.w() != p.w || p.frame_a.n() != p.n || p.frame_x.n() != p.n {
        return Err(Error::Plan(format!(
            "plan is for n = {}, w = {} but operands have n = {}, w = {}",
            p.n,
            p.w,
            a.n(),
            a.w()
        )));
    }
    for (name, polar, frame, sigma, target) in [
        ("A", &p.polar_a, &p.frame_a, &p.sigma_a, a),
        ("X", &p.polar_x, &p.frame_x, &p.sigma_x, x),
    ] {
        let err = reconstruction_error(polar, frame, sigma, target);
        if err > FACTOR_RTOL * target.op_norm().max(f64::MIN_POSITIVE) {
            return Err(Error::Plan(format!(
                "plan does not describe {name} (residual {err:.3e})"
            )));
        }
    }
    Ok(())
}

/// Assembles `T` with terms `(U_X B_Δ U_j* A_Δ U_A*, U_j)`, `j < 2C`.
pub fn build(p: &TransferPlan, a: &TraceMatrix, x: &TraceMatrix) -> Result<PairHom> {
    check_operands(p, a, x)?;
    let parts = parts(p)?;
    let left = p.polar_x.data() * &parts.b_delta;
    let right = &parts.a_delta * p.polar_a.data().adjoint();
    let terms = parts
        .u
        .iter()
        .map(|u| Term {
            a: a.with_data(&left * u.adjoint() * &right),
            b: a.with_data(u.clone()),
        })
        .collect();
    PairHom::new(terms, true)
}

#[derive(Clone, Debug, Serialize)]
pub struct TransferCheck {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransferReport {
    pub c: u64,
    pub pointwise_constant: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub m0: f64,
    pub m1: f64,
    pub checks: Vec<TransferCheck>,
    pub all_pass: bool,
}

impl TransferReport {
    pub fn check(&self, name: &str) -> Option<&TransferCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Checks(Vec<TransferCheck>);

impl Checks {
    fn at_most(&mut self, name: &str, value: f64, tolerance: f64) {
        self.push(name, value, tolerance, value <= tolerance);
    }

    fn below(&mut self, name: &str, value: f64, bound: f64) {
        self.push(name, value, bound, value < bound);
    }

    fn push(&mut self, name: &str, value: f64, tolerance: f64, pass: bool) {
        self.0.push(TransferCheck {
            name: name.into(),
            value,
            tolerance,
            pass,
        });
    }
}

fn op_norm(x: &TraceMatrix, m: CMatrix) -> f64 {
    x.with_data(m).op_norm()
}

fn is_projection_err(x: &TraceMatrix, p: &CMatrix) -> f64 {
    op_norm(x, p * p - p).max(op_norm(x, p.adjoint() - p))
}

pub fn verify(t: &PairHom, a: &TraceMatrix, x: &TraceMatrix, p: &TransferPlan) -> Result<TransferReport> {
    verify_with_seed(t, a, x, p, 0)
}

/// Full verification; `seed` drives the sampled bound check.
pub fn verify_with_seed(
    t: &PairHom,
    a: &TraceMatrix,
    x: &TraceMatrix,
    p: &TransferPlan,
    seed: u64,
) -> Result<TransferReport> {
    a.compatible(x)?;
    t.terms()[0].a.compatible(x)?;
    let parts = parts(p)?;
    let two_c = 2.0 * p.c as f64;
    let (norm_a, norm_x) = (a.op_norm(), x.op_norm());
    let mut ck = Checks(Vec::new());

    let tx = t.apply(a)?;
    ck.at_most("reconstruction", op_norm(x, tx.data() - x.data()), FACTOR_RTOL * norm_x);

    let (m0, m1) = match t.certified_bounds() {
        Ok(b) => b,
        Err(_) => (t.terms().len() as f64, f64::INFINITY),
    };
    ck.at_most("certified_m0", m0, two_c);
    ck.at_most("certified_m1", m1, two_c * (1.0 + FACTOR_RTOL));

    let mut rng = sampling::rng(seed);
    let mut worst_ratio = 0.0_f64;
    for _ in 0..SAMPLED_Z {
        let rank = rng.random_range(1..=p.n);
        let z = sampling::random_matrix_with_rank(&mut rng, p.n, rank, p.w);
        let (z0, z1) = z.trace_norms()?;
        let (y0, y1) = t.apply(&z)?.trace_norms()?;
        worst_ratio = worst_ratio.max(y0 / (m0 * z0)).max(y1 / (m1 * z1));
    }
    ck.at_most("sampled_bounds", worst_ratio, 1.0 + FACTOR_RTOL);

    // A_Δ |A| = B₁ with |A| = U_A* A
    let abs_a = p.polar_a.data().adjoint() * a.data();
    ck.at_most(
        "factor_rounding",
        op_norm(a, &parts.a_delta * abs_a - &parts.b1),
        FACTOR_RTOL * norm_a,
    );
    let mut avg = CMatrix::zeros(p.n, p.n);
    for u in &parts.u {
        avg += u.adjoint() * &parts.b1 * u;
    }
    ck.at_most("factor_averaging", op_norm(a, avg - &parts.b2), FACTOR_RTOL * norm_a);
    ck.at_most(
        "factor_correction",
        op_norm(x, &parts.b_delta * &parts.b2 - &parts.abs_x),
        FACTOR_RTOL * norm_x,
    );
    ck.at_most(
        "factor_polar",
        op_norm(x, p.polar_x.data() * &parts.abs_x - x.data()),
        FACTOR_RTOL * norm_x,
    );

    let mu_b1 = SingularFunction::new((1..=p.n).map(|i| i as f64 * p.w).collect(), p.b1.clone(), 0.0)?;
    let b2_matrix = x.with_data(parts.b2.clone());
    let mu_b2 = b2_matrix.mu_of()?;
    let support_x = p.rank_x as f64 * p.w;
    let grid = probe_points(
        mu_b2
            .breakpoints()
            .iter()
            .copied()
            .chain(mu_b1.breakpoints().iter().map(|b| b * two_c)),
    );
    let profile_gap = grid
        .iter()
        .filter(|&&t| t < support_x)
        .map(|&t| (mu_b2.value_at(t) - mu_b1.value_at(t / two_c)).abs())
        .fold(0.0, f64::max);
    ck.at_most("dilation_profile", profile_gap, FACTOR_RTOL * norm_a);

    let rounding_gap = p.sigma_a.iter().zip(&p.b1).map(|(s, b)| s - b).fold(0.0, f64::max);
    let rounding_negative = p.sigma_a.iter().zip(&p.b1).any(|(s, b)| b - s > FACTOR_RTOL * norm_a);
    ck.push(
        "rounding_gap",
        rounding_gap,
        p.epsilon,
        rounding_gap < p.epsilon && !rounding_negative,
    );

    let mut iso_err = 0.0_f64;
    for u in &parts.u {
        iso_err = iso_err
            .max(is_projection_err(x, &(u.adjoint() * u)))
            .max(is_projection_err(x, &(u * u.adjoint())));
    }
    ck.at_most("partial_isometries", iso_err, FACTOR_RTOL);
    let mut overlap = 0.0_f64;
    for i in 0..parts.u.len() {
        for j in (i + 1)..parts.u.len() {
            let pi = parts.u[i].adjoint() * &parts.u[i];
            let pj = parts.u[j].adjoint() * &parts.u[j];
            overlap = overlap.max(op_norm(x, pi * pj));
        }
    }
    ck.at_most("initial_projections_orthogonal", overlap, FACTOR_RTOL);

    ck.below("epsilon_below_inverse_2c", p.epsilon, 1.0 / two_c);
    ck.at_most("epsilon_margin", 4.0 * p.c as f64 * p.epsilon, p.delta);
    ck.at_most("margin_bound", p.margin_bound, p.delta * (1.0 + FACTOR_RTOL));
    ck.at_most("a_delta_norm", op_norm(a, parts.a_delta.clone()), 1.0 + FACTOR_RTOL);
    ck.at_most("b_delta_norm", op_norm(x, parts.b_delta.clone()), two_c);

    let mismatched = p
        .shifted
        .iter()
        .filter(|s| s.kept_end == s.end)
        .filter(|s| {
            let lv = &p.levels[s.level];
            (lv.end - lv.start) != (s.end - s.start)
        })
        .count();
    ck.at_most("trace_matching", mismatched as f64, 0.0);

    let all_pass = ck.0.iter().all(|c| c.pass);
    Ok(TransferReport {
        c: p.c,
        pointwise_constant: p.pointwise_constant,
        epsilon: p.epsilon,
        delta: p.delta,
        m0,
        m1,
        checks: ck.0,
        all_pass,
    })
}

/// Plan, build and verify in one call.
pub fn transfer(a: &TraceMatrix, x: &TraceMatrix) -> Result<(TransferPlan, PairHom, TransferReport)> {
    let p = plan(a, x)?;
    let t = build(&p, a, x)?;
    let report = verify(&t, a, x, &p)?;
    Ok((p, t, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[f64]) -> TraceMatrix {
        TraceMatrix::diag(v, 1.0).unwrap()
    }

    #[test]
    fn identity_transfer() {
        let a = diag(&[1.0, 1.0, 0.0]);
        let (p, t, r) = transfer(&a, &a).unwrap();
        assert_eq!(p.c, 1);
        assert_eq!(p.delta, 1.0);
        assert!(r.all_pass, "{r:#?}");
        let ta = t.apply(&a).unwrap();
        assert!((&ta - &a).max_abs() < 1e-12);
    }

    #[test]
    fn diag_example_needs_c_two() {
        let a = diag(&[4.0, 2.0, 0.0, 0.0]);
        let x = diag(&[4.0, 4.0, 2.0, 2.0]);
        let (p, _, r) = transfer(&a, &x).unwrap();
        assert_eq!(p.c, 2);
        assert!(p.margin_bound >= 4.0 && p.delta >= p.margin_bound);
        assert!(r.all_pass, "{r:#?}");
        assert!(r.m0 <= 4.0 && r.m1 <= 4.0 + 1e-9);
    }

    #[test]
    fn polar_parts_are_absorbed() {
        let mut r = sampling::rng(9);
        let a = sampling::random_matrix_with_spectrum(&mut r, &[3.0, 1.0, 0.5], 1.0);
        let x = sampling::random_matrix_with_spectrum(&mut r, &[2.0, 2.0, 0.7], 1.0);
        let (_, t, rep) = transfer(&a, &x).unwrap();
        assert!(rep.all_pass, "{rep:#?}");
        assert!((&t.apply(&a).unwrap() - &x).op_norm() <= 1e-9 * x.op_norm());
    }

    #[test]
    fn unreachable_constant_is_reported() {
        let a = diag(&[1e-7, 0.0]);
        let x = diag(&[1.0, 0.0]);
        assert!(matches!(plan(&a, &x), Err(Error::Plan(_))));
    }

    #[test]
    fn zero_operands_rejected() {
        let z = TraceMatrix::zeros(2, 1.0).unwrap();
        assert!(plan(&z, &diag(&[1.0, 0.0])).is_err());
        assert!(plan(&diag(&[1.0, 0.0]), &z).is_err());
    }

    #[test]
    fn corrupted_index_breaks_reconstruction() {
        let a = diag(&[4.0, 2.0, 0.0, 0.0]);
        let x = diag(&[4.0, 4.0, 2.0, 2.0]);
        let mut p = plan(&a, &x).unwrap();
        // route the largest singular direction of X through the smaller level of A
        let pair = p.index_maps[0].pairs.iter_mut().find(|pr| pr[0] == 0).unwrap();
        pair[1] = 1;
        let t = build(&p, &a, &x).unwrap();
        let r = verify(&t, &a, &x, &p).unwrap();
        assert!(!r.check("reconstruction").unwrap().pass);
        assert!(!r.all_pass);
    }

    #[test]
    fn plan_operand_mismatch() {
        let a = diag(&[4.0, 2.0, 0.0, 0.0]);
        let x = diag(&[4.0, 4.0, 2.0, 2.0]);
        let p = plan(&a, &x).unwrap();
        assert!(matches!(build(&p, &x, &a), Err(Error::Plan(_))));
        let small = diag(&[1.0]);
        assert!(build(&p, &small, &small).is_err());
    }

    #[test]
    fn plan_json_round_trip() {
        let a = diag(&[4.0, 2.0, 0.0, 0.0]);
        let x = diag(&[4.0, 4.0, 2.0, 2.0]);
        let p = plan(&a, &x).unwrap();
        let back: TransferPlan = serde_json::from_str(&p.to_json()).unwrap();
        assert_eq!(back.index_maps, p.index_maps);
        assert_eq!(back.levels, p.levels);
        let t = build(&back, &a, &x).unwrap();
        assert!(verify(&t, &a, &x, &back).unwrap().all_pass);
    }
}
