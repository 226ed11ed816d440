//! Orbits and K-orbits of the pair `(L₀, L∞)`.
//!
//! Membership of `Y` in the orbit ball of radius `c` around `X` forces
//! `μ(t; Y) ≤ c μ(t/c; X)`; the K-orbit norm is `sup_u K_u(Y)/K_u(X)`. The two are
//! equivalent up to a factor 3, yet the unit balls differ: [`counterexample`]
//! builds a pair with identical K-curves where the orbit condition with `c = 1`
//! fails.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kcalc::{k_at, k_curve, log_grid, KCurve};
use crate::matmodel::TraceMatrix;
use crate::stepfn::{close, probe_points, Rearrange, SingularFunction};

const CHECK_RTOL: f64 = 1e-12;
const BISECTION_RTOL: f64 = 1e-9;
const BISECTION_MAX_ITER: usize = 200;
/// Largest pointwise constant searched by [`pointwise_constant`].
pub const POINTWISE_CAP: f64 = 1e12;

#[derive(Clone, Debug, Serialize)]
pub struct OrbitReport {
    pub c: f64,
    /// `min_t [c μ(t/c; X) − μ(t; Y)]`; negative means the condition fails.
    pub worst_margin: f64,
    pub witness_t: f64,
    pub holds: bool,
}

pub(crate) fn dominance_margin(y: &SingularFunction, x: &SingularFunction, c: f64) -> (f64, f64) {
    let grid = probe_points(
        y.breakpoints()
            .iter()
            .copied()
            .chain(x.breakpoints().iter().map(|b| b * c)),
    );
    let mut worst = (f64::INFINITY, f64::NAN);
    let tail_margin = c * x.tail() - y.tail();
    if tail_margin < 0.0 {
        worst = (tail_margin, f64::INFINITY);
    }
    for &t in &grid {
        let margin = c * x.value_at(t / c) - y.value_at(t);
        if margin < worst.0 {
            worst = (margin, t);
        }
    }
    worst
}

pub(crate) fn dominated(y: &SingularFunction, x: &SingularFunction, c: f64) -> bool {
    if y.tail() > c * x.tail() * (1.0 + CHECK_RTOL) {
        return false;
    }
    let (margin, _) = dominance_margin(y, x, c);
    margin >= -CHECK_RTOL * (c * x.initial_value()).max(y.initial_value())
}

/// Necessary condition for `Y` to lie in the orbit ball of radius `c` around `X`:
/// `μ(t; Y) ≤ c μ(t/c; X)` for all `t > 0`.
pub fn orbit_necessary_check(y: &impl Rearrange, x: &impl Rearrange, c: f64) -> Result<OrbitReport> {
    crate::error::require_positive("c", c)?;
    let (mu_y, mu_x) = (y.singular_function()?, x.singular_function()?);
    let (worst_margin, witness_t) = dominance_margin(&mu_y, &mu_x, c);
    Ok(OrbitReport {
        c,
        worst_margin,
        witness_t,
        holds: dominated(&mu_y, &mu_x, c),
    })
}

/// Minimal `C ≥ 1` with `μ(t; X) ≤ C μ(t/C; A)` for all `t`, to relative `1e-9`.
///
/// `C ↦ C μ(t/C; A)` is nondecreasing because `μ` is nonincreasing, so the
/// admissible set is a ray and bisection applies. `None` when no `C ≤ 1e12` works.
pub fn pointwise_constant(x: &impl Rearrange, a: &impl Rearrange) -> Result<Option<f64>> {
    let (mu_x, mu_a) = (x.singular_function()?, a.singular_function()?);
    Ok(pointwise_constant_mu(&mu_x, &mu_a))
}

pub(crate) fn pointwise_constant_mu(mu_x: &SingularFunction, mu_a: &SingularFunction) -> Option<f64> {
    if dominated(mu_x, mu_a, 1.0) {
        return Some(1.0);
    }
    if !dominated(mu_x, mu_a, POINTWISE_CAP) {
        return None;
    }
    let (mut lo, mut hi) = (1.0_f64, POINTWISE_CAP);
    for _ in 0..BISECTION_MAX_ITER {
        if hi - lo <= BISECTION_RTOL * hi {
            break;
        }
        // geometric steps while the bracket spans orders of magnitude
        let mid = if hi / lo > 4.0 {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        if dominated(mu_x, mu_a, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// `lim (a₁ + b₁u)/(a₂ + b₂u)` as `u → 0⁺`.
fn ratio_at_zero(num: (f64, f64), den: (f64, f64)) -> f64 {
    if den.0 > 0.0 {
        num.0 / den.0
    } else if num.0 > 0.0 {
        f64::INFINITY
    } else {
        num.1 / den.1
    }
}

/// `lim (a₁ + b₁u)/(a₂ + b₂u)` as `u → ∞`.
fn ratio_at_infinity(num: (f64, f64), den: (f64, f64)) -> f64 {
    if den.1 > 0.0 {
        num.1 / den.1
    } else if num.1 > 0.0 {
        f64::INFINITY
    } else {
        num.0 / den.0
    }
}

/// `sup_{u>0} K_u(X) / K_u(A)`.
///
/// On every interval where both curves are affine the ratio is a Möbius function
/// of `u`, hence monotone, so the supremum is attained at a shared kink or in one
/// of the limits `u → 0⁺`, `u → ∞`.
pub fn korbit_norm(x: &impl Rearrange, a: &impl Rearrange) -> Result<f64> {
    let (mu_x, mu_a) = (x.singular_function()?, a.singular_function()?);
    korbit_norm_mu(&mu_x, &mu_a)
}

pub(crate) fn korbit_norm_mu(mu_x: &SingularFunction, mu_a: &SingularFunction) -> Result<f64> {
    if mu_a.is_zero() {
        return Err(Error::InvalidInput("K-orbit of the zero element".into()));
    }
    let (kx, ka) = (k_curve(mu_x), k_curve(mu_a));
    Ok(korbit_norm_curves(&kx, &ka))
}

fn korbit_norm_curves(kx: &KCurve, ka: &KCurve) -> f64 {
    let line = |c: &KCurve, first: bool| {
        let p = if first {
            c.pieces()[0]
        } else {
            *c.pieces().last().unwrap()
        };
        (p.intercept, p.slope)
    };
    let mut sup =
        ratio_at_zero(line(kx, true), line(ka, true)).max(ratio_at_infinity(line(kx, false), line(ka, false)));
    for u in kx.kinks().chain(ka.kinks()) {
        sup = sup.max(kx.eval(u) / ka.eval(u));
    }
    sup
}

/// Parameters of the pair with equal K-functionals but no orbit domination.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CounterexampleSpec {
    pub tau1: f64,
    pub tau2: f64,
    pub k1: f64,
    pub k2: f64,
}

impl CounterexampleSpec {
    pub fn new(tau1: f64, tau2: f64, k1: f64, k2: f64) -> Result<Self> {
        let spec = Self { tau1, tau2, k1, k2 };
        spec.validate()?;
        Ok(spec)
    }

    /// `k₁ > k₂ > τ₂ k₁ / (τ₁ + τ₂)` with all parameters positive.
    pub fn validate(&self) -> Result<()> {
        let Self { tau1, tau2, k1, k2 } = *self;
        for (name, v) in [("tau1", tau1), ("tau2", tau2), ("k1", k1), ("k2", k2)] {
            crate::error::require_positive(name, v)?;
        }
        let lower = tau2 * k1 / (tau1 + tau2);
        if !(k1 > k2 && k2 > lower) {
            return Err(Error::Constraint(format!(
                "need k1 > k2 > tau2*k1/(tau1+tau2) = {lower}, got k1 = {k1}, k2 = {k2}"
            )));
        }
        Ok(())
    }

    /// Trace weight making `τ₁/w` and `τ₂/w` integers, with the smallest dimension.
    pub fn default_weight(&self) -> Result<f64> {
        let (p, _) = rational_ratio(self.tau1 / self.tau2, 10_000).ok_or_else(|| {
            Error::Constraint(format!(
                "tau1 = {} and tau2 = {} are not commensurable at denominators <= 10000",
                self.tau1, self.tau2
            ))
        })?;
        Ok(self.tau1 / p as f64)
    }

    fn ranks(&self, w: f64) -> Result<(usize, usize)> {
        let rank = |tau: f64| -> Result<usize> {
            let r = (tau / w).round();
            if r >= 1.0 && close(r * w, tau, 1e-9) {
                Ok(r as usize)
            } else {
                Err(Error::Constraint(format!(
                    "trace value {tau} is not a multiple of w = {w}"
                )))
            }
        };
        Ok((rank(self.tau1)?, rank(self.tau2)?))
    }

    /// `A = k₁P₁ + k₂P₂`, `X = k₁(P₁ + P₂)` with `τ(P_i) = τ_i` at weight `w`.
    pub fn realize(&self, w: Option<f64>) -> Result<(TraceMatrix, TraceMatrix)> {
        self.validate()?;
        let w = match w {
            Some(w) => w,
            None => self.default_weight()?,
        };
        let (r1, r2) = self.ranks(w)?;
        let mut a = vec![self.k1; r1];
        a.extend(std::iter::repeat_n(self.k2, r2));
        let x = vec![self.k1; r1 + r2];
        Ok((TraceMatrix::diag(&a, w)?, TraceMatrix::diag(&x, w)?))
    }

    /// Closed form `K_t(X) = min{t k₁, τ₁ + τ₂}`.
    pub fn k_closed_form_x(&self, t: f64) -> f64 {
        (t * self.k1).min(self.tau1 + self.tau2)
    }

    /// Closed form `K_t(A) = min{t k₁, τ₁ + t k₂, τ₁ + τ₂}`.
    pub fn k_closed_form_a(&self, t: f64) -> f64 {
        (t * self.k1).min(self.tau1 + t * self.k2).min(self.tau1 + self.tau2)
    }
}

/// Best rational approximation `p/q` of `r` with `q ≤ max_den`, exact to `1e-12`.
fn rational_ratio(r: f64, max_den: u64) -> Option<(u64, u64)> {
    let (mut h0, mut h1, mut k0, mut k1) = (0u64, 1u64, 1u64, 0u64);
    let mut x = r;
    for _ in 0..64 {
        let a = x.floor();
        if a > u32::MAX as f64 {
            break;
        }
        let a = a as u64;
        let (h2, k2) = (a * h1 + h0, a * k1 + k0);
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if close(h1 as f64 / k1 as f64, r, 1e-12) {
            return Some((h1, k1));
        }
        let frac = x - a as f64;
        if frac == 0.0 {
            break;
        }
        x = 1.0 / frac;
    }
    None
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleReport {
    pub spec: CounterexampleSpec,
    pub w: f64,
    /// Largest `|K_u(A) − K_u(X)|` over the kinks and a log grid.
    pub k_curve_gap: f64,
    /// Largest deviation of either curve from the closed forms on the grid.
    pub closed_form_gap: f64,
    pub k_curves_identical: bool,
    /// `μ(t; A) < μ(t; X)` throughout `[τ₁, τ₁ + τ₂)`.
    pub strict_gap_on_interval: bool,
    pub orbit_check: OrbitReport,
    pub korbit_norm: f64,
}

impl CounterexampleReport {
    /// X is in the K-orbit unit ball of A but violates the orbit-ball condition.
    pub fn certified(&self) -> bool {
        self.k_curves_identical
            && self.strict_gap_on_interval
            && !self.orbit_check.holds
            && close(self.korbit_norm, 1.0, 1e-12)
    }
}

impl fmt::Display for CounterexampleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.spec;
        writeln!(f, "Counterexample certificate")?;
        writeln!(
            f,
            "  tau1 = {}, tau2 = {}, k1 = {}, k2 = {}, w = {}",
            s.tau1, s.tau2, s.k1, s.k2, self.w
        )?;
        writeln!(
            f,
            "  constraint k1 > k2 > tau2*k1/(tau1+tau2) = {}: ok",
            s.tau2 * s.k1 / (s.tau1 + s.tau2)
        )?;
        writeln!(f, "  A = k1*P1 + k2*P2,  X = k1*(P1 + P2)")?;
        writeln!(
            f,
            "  K_u(X) = min(u*k1, tau1+tau2); K_u(A) = min(u*k1, tau1+u*k2, tau1+tau2)"
        )?;
        writeln!(
            f,
            "  (a) K-curves identical: {} (max gap {:.3e}, closed-form gap {:.3e})",
            self.k_curves_identical, self.k_curve_gap, self.closed_form_gap
        )?;
        writeln!(
            f,
            "  (b) mu(t;A) = {} < {} = mu(t;X) on [{}, {}): {}",
            s.k2,
            s.k1,
            s.tau1,
            s.tau1 + s.tau2,
            self.strict_gap_on_interval
        )?;
        writeln!(
            f,
            "  (c) orbit condition mu(t;X) <= mu(t;A) fails: {} (margin {} at t = {})",
            !self.orbit_check.holds, self.orbit_check.worst_margin, self.orbit_check.witness_t
        )?;
        writeln!(f, "  K-orbit norm of X w.r.t. A: {}", self.korbit_norm)?;
        write!(
            f,
            "  verdict: {}",
            if self.certified() {
                "X lies in the K-orbit unit ball of A but not in its orbit unit ball"
            } else {
                "NOT CERTIFIED"
            }
        )
    }
}

#[derive(Clone, Debug)]
pub struct Counterexample {
    pub a: TraceMatrix,
    pub x: TraceMatrix,
    pub report: CounterexampleReport,
}

pub fn counterexample(spec: &CounterexampleSpec) -> Result<Counterexample> {
    counterexample_with_weight(spec, None)
}

pub fn counterexample_with_weight(spec: &CounterexampleSpec, w: Option<f64>) -> Result<Counterexample> {
    let (a, x) = spec.realize(w)?;
    let w = a.w();
    let (mu_a, mu_x) = (a.mu_of()?, x.mu_of()?);
    let (ka, kx) = (k_curve(&mu_a), k_curve(&mu_x));

    let total = spec.tau1 + spec.tau2;
    let mut grid = log_grid(1e-3 * total / spec.k1, 1e3 * total / spec.k1, 100)?;
    grid.extend(ka.kinks().chain(kx.kinks()));
    let mut k_curve_gap = 0.0_f64;
    let mut closed_form_gap = 0.0_f64;
    for &u in &grid {
        let (va, vx) = (k_at(&mu_a, u), k_at(&mu_x, u));
        k_curve_gap = k_curve_gap.max((va - vx).abs());
        closed_form_gap = closed_form_gap
            .max((va - spec.k_closed_form_a(u)).abs())
            .max((vx - spec.k_closed_form_x(u)).abs());
    }
    let scale = total.max(1.0);

    let inside = probe_points([spec.tau1, total, spec.tau1 + 0.5 * spec.tau2])
        .into_iter()
        .filter(|&t| t >= spec.tau1 && t < total);
    let mut strict = true;
    for t in inside.chain([spec.tau1]) {
        strict &= mu_a.value_at(t) < mu_x.value_at(t);
    }

    let report = CounterexampleReport {
        spec: *spec,
        w,
        k_curve_gap,
        closed_form_gap,
        k_curves_identical: k_curve_gap <= 1e-12 * scale,
        strict_gap_on_interval: strict,
        orbit_check: orbit_necessary_check(&mu_x, &mu_a, 1.0)?,
        korbit_norm: korbit_norm_mu(&mu_x, &mu_a)?,
    };
    Ok(Counterexample { a, x, report })
}
