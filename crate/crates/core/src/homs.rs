//! Homomorphisms `Z ↦ Σ_i A_i Z B_i` on the matrix model, bounded on the pair
//! `(L₀, L∞)` with bounds certified from their structure.
//!
//! `rank(A Z B) ≤ rank Z`, so a sum of `k` terms satisfies `‖TZ‖₀ ≤ k‖Z‖₀`. The
//! operator norm is bounded by `Σ‖A_i‖‖B_i‖`, or by `max_i ‖A_i‖‖B_i‖` when the
//! terms have pairwise orthogonal left ranges (`A_i* A_j = 0`) and pairwise
//! orthogonal right ranges (`B_i B_j* = 0`): the images are then blocks of a
//! block-diagonal operator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matmodel::TraceMatrix;
use crate::stepfn::probe_points;
use crate::symnorm::{e_eval, DeltaNorm};

const ORTHOGONALITY_TOL: f64 = 1e-9;
const CHECK_RTOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Term {
    #[serde(rename = "A")]
    pub a: TraceMatrix,
    #[serde(rename = "B")]
    pub b: TraceMatrix,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawHom")]
pub struct PairHom {
    terms: Vec<Term>,
    orthogonal: bool,
}

#[derive(Deserialize)]
struct RawHom {
    terms: Vec<Term>,
    #[serde(default)]
    orthogonal: bool,
}

impl TryFrom<RawHom> for PairHom {
    type Error = Error;

    fn try_from(raw: RawHom) -> Result<Self> {
        PairHom::new(raw.terms, raw.orthogonal)
    }
}

impl PairHom {
    pub fn new(terms: Vec<Term>, orthogonal: bool) -> Result<Self> {
        let Some(first) = terms.first() else {
            return Err(Error::InvalidInput("a homomorphism needs at least one term".into()));
        };
        for t in &terms {
            first.a.compatible(&t.a)?;
            first.a.compatible(&t.b)?;
        }
        Ok(Self { terms, orthogonal })
    }

    pub fn single(a: TraceMatrix, b: TraceMatrix) -> Result<Self> {
        Self::new(vec![Term { a, b }], false)
    }

    pub fn identity(n: usize, w: f64) -> Result<Self> {
        let i = TraceMatrix::identity(n, w)?;
        Self::single(i.clone(), i)
    }

    /// `Z ↦ U Z U*`.
    pub fn conjugation(u: &TraceMatrix) -> Result<Self> {
        Self::single(u.clone(), u.adjoint())
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_orthogonal(&self) -> bool {
        self.orthogonal
    }

    pub fn n(&self) -> usize {
        self.terms[0].a.n()
    }

    pub fn w(&self) -> f64 {
        self.terms[0].a.w()
    }

    pub fn apply(&self, z: &TraceMatrix) -> Result<TraceMatrix> {
        self.terms[0].a.compatible(z)?;
        let mut acc = nalgebra::DMatrix::zeros(z.n(), z.n());
        for t in &self.terms {
            acc += t.a.data() * z.data() * t.b.data();
        }
        Ok(z.with_data(acc))
    }

    /// Verifies `A_i* A_j = 0` and `B_i B_j* = 0` for `i ≠ j` (relative `1e-9`).
    pub fn check_orthogonality(&self) -> Result<()> {
        let norms: Vec<(f64, f64)> = self.terms.iter().map(|t| (t.a.op_norm(), t.b.op_norm())).collect();
        for i in 0..self.terms.len() {
            for j in (i + 1)..self.terms.len() {
                let (ti, tj) = (&self.terms[i], &self.terms[j]);
                let left = (ti.a.data().adjoint() * tj.a.data()).norm();
                let right = (ti.b.data() * tj.b.data().adjoint()).norm();
                if left > ORTHOGONALITY_TOL * norms[i].0 * norms[j].0
                    || right > ORTHOGONALITY_TOL * norms[i].1 * norms[j].1
                {
                    return Err(Error::Constraint(format!(
                        "terms {i} and {j} are not orthogonal (left {left:.3e}, right {right:.3e})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `(M₀, M₁)` with `‖TZ‖₀ ≤ M₀‖Z‖₀` and `‖TZ‖_∞ ≤ M₁‖Z‖_∞`.
    pub fn certified_bounds(&self) -> Result<(f64, f64)> {
        let m0 = self.terms.len() as f64;
        let products = self.terms.iter().map(|t| t.a.op_norm() * t.b.op_norm());
        let m1 = if self.orthogonal {
            self.check_orthogonality()?;
            products.fold(0.0, f64::max)
        } else {
            products.sum()
        };
        Ok((m0, m1))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("homomorphism serializes")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InterpolationReport {
    pub m0: f64,
    pub m1: f64,
    /// `min_t [M₁ μ(t; X) − μ(M₀ t; TX)]` over the probe grid.
    pub worst_margin: f64,
    pub witness_t: f64,
    pub points_checked: usize,
    pub holds: bool,
}

/// Checks `μ(M₀ t; TX) ≤ M₁ μ(t; X)` on every constancy interval of both sides.
pub fn interpolation_check(t: &PairHom, x: &TraceMatrix) -> Result<InterpolationReport> {
    interpolation_check_with_tol(t, x, CHECK_RTOL)
}

/// [`interpolation_check`] accepting violations up to `rtol · M₁ ‖X‖_∞`.
pub fn interpolation_check_with_tol(t: &PairHom, x: &TraceMatrix, rtol: f64) -> Result<InterpolationReport> {
    let (m0, m1) = t.certified_bounds()?;
    let tx = t.apply(x)?;
    let (mu_tx, mu_x) = (tx.mu_of()?, x.mu_of()?);
    let grid = probe_points(
        mu_tx
            .breakpoints()
            .iter()
            .map(|b| b / m0)
            .chain(mu_x.breakpoints().iter().copied()),
    );
    let scale = m1 * mu_x.initial_value();
    let mut worst_margin = f64::INFINITY;
    let mut witness_t = f64::NAN;
    for &s in &grid {
        let margin = m1 * mu_x.value_at(s) - mu_tx.value_at(m0 * s);
        if margin < worst_margin {
            worst_margin = margin;
            witness_t = s;
        }
    }
    Ok(InterpolationReport {
        m0,
        m1,
        worst_margin,
        witness_t,
        points_checked: grid.len(),
        holds: worst_margin >= -rtol * scale.max(f64::MIN_POSITIVE),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ENormBoundReport {
    pub norm: String,
    /// Smallest `k` with `2^k ≥ M₀`.
    pub k: u32,
    /// `(2C_E)^k Σ_{i=1}^{⌊M₁⌋+1} C_E^i`.
    pub factor: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `‖TX‖_E ≤ (2C_E)^k Σ_{i=1}^{⌊M₁⌋+1} C_E^i ‖X‖_E`.
pub fn enorm_bound_check(t: &PairHom, x: &TraceMatrix, e: &DeltaNorm) -> Result<ENormBoundReport> {
    let (m0, m1) = t.certified_bounds()?;
    let mut k = 0u32;
    while (2.0_f64).powi(k as i32) < m0 {
        k += 1;
    }
    let c = e.c_e();
    let series: f64 = (1..=(m1.floor() as i32 + 1)).map(|i| c.powi(i)).sum();
    let factor = (2.0 * c).powi(k as i32) * series;
    let lhs = e_eval(e, &t.apply(x)?)?;
    let rhs = factor * e_eval(e, x)?;
    Ok(ENormBoundReport {
        norm: e.name().to_string(),
        k,
        factor,
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + CHECK_RTOL) + f64::MIN_POSITIVE,
    })
}
