//! Finite model of a semifinite algebra with trace: `n × n` complex matrices with
//! the trace `τ = w · Tr`.
//!
//! Singular value decompositions are computed with nalgebra's SVD, re-sorted into
//! descending order with ties kept in the order nalgebra returns them, and checked
//! for orthonormality and reconstruction before use.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::stepfn::{close, Rearrange, SingularFunction};
use crate::svd::{jacobi_svd, Svd};

pub type CMatrix = DMatrix<Complex64>;

/// Singular values below `RANK_RTOL · σ₁` count as zero.
pub const RANK_RTOL: f64 = 1e-8;
const RANK_ATOL: f64 = 1e-12;
const FRAME_TOL: f64 = 1e-10;
const RECONSTRUCTION_RTOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct TraceMatrix {
    w: f64,
    data: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    n: usize,
    w: f64,
    re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Vec<Vec<f64>>>,
}

impl TryFrom<RawMatrix> for TraceMatrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        let n = raw.n;
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !shape_ok(&raw.re) || raw.im.as_ref().is_some_and(|im| !shape_ok(im)) {
            return Err(Error::InvalidInput(format!("matrix rows must be {n} x {n}")));
        }
        let data = CMatrix::from_fn(n, n, |i, j| {
            let im = raw.im.as_ref().map_or(0.0, |im| im[i][j]);
            Complex64::new(raw.re[i][j], im)
        });
        TraceMatrix::new(data, raw.w)
    }
}

impl From<TraceMatrix> for RawMatrix {
    fn from(m: TraceMatrix) -> Self {
        let n = m.n();
        let rows = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..n).map(|i| (0..n).map(|j| f(&m.data[(i, j)])).collect()).collect()
        };
        let is_real = m.data.iter().all(|z| z.im == 0.0);
        RawMatrix {
            n,
            w: m.w,
            re: rows(|z| z.re),
            im: (!is_real).then(|| rows(|z| z.im)),
        }
    }
}

impl TraceMatrix {
    pub fn new(data: CMatrix, w: f64) -> Result<Self> {
        require_positive("trace weight", w)?;
        if data.nrows() != data.ncols() || data.nrows() == 0 {
            return Err(Error::InvalidInput(format!(
                "expected a nonempty square matrix, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(Self { w, data })
    }

    pub fn from_real_rows(rows: &[&[f64]], w: f64) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("rows must form a square matrix".into()));
        }
        Self::new(CMatrix::from_fn(n, n, |i, j| rows[i][j].into()), w)
    }

    pub fn diag(values: &[f64], w: f64) -> Result<Self> {
        let n = values.len();
        Self::new(
            CMatrix::from_fn(n, n, |i, j| if i == j { values[i].into() } else { 0.0.into() }),
            w,
        )
    }

    pub fn identity(n: usize, w: f64) -> Result<Self> {
        Self::new(CMatrix::identity(n, n), w)
    }

    pub fn zeros(n: usize, w: f64) -> Result<Self> {
        Self::new(CMatrix::zeros(n, n), w)
    }

    /// Same model (dimension and weight) with different entries.
    pub fn with_data(&self, data: CMatrix) -> Self {
        assert_eq!(data.shape(), self.data.shape(), "shape must be preserved");
        Self { w: self.w, data }
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn compatible(&self, other: &Self) -> Result<()> {
        if self.n() == other.n() && self.w == other.w {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "(n={}, w={}) vs (n={}, w={})",
                self.n(),
                self.w,
                other.n(),
                other.w
            )))
        }
    }

    pub fn adjoint(&self) -> Self {
        self.with_data(self.data.adjoint())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.with_data(self.data.map(|z| z * c))
    }

    /// Trace value `τ(X) = w · Tr X`.
    pub fn trace(&self) -> Complex64 {
        self.data.trace() * self.w
    }

    /// Operator norm `‖X‖_∞` (largest singular value).
    pub fn op_norm(&self) -> f64 {
        let gram = self.data.adjoint() * &self.data;
        gram.symmetric_eigenvalues().max().max(0.0).sqrt()
    }

    /// Largest absolute entry; cheap proxy used for approximate-zero tests.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn spectral(&self) -> Result<SpectralData> {
        SpectralData::compute(self)
    }

    /// Singular value function: `σ_i` on `[w(i−1), wi)`.
    pub fn mu_of(&self) -> Result<SingularFunction> {
        Ok(self.spectral()?.singular_function())
    }

    /// `τ(E^{|X|}(s, ∞)) = w · #{i : σ_i > s}`.
    pub fn dist_op(&self, s: f64) -> Result<f64> {
        Ok(self.spectral()?.dist(s))
    }

    /// Projection onto the span of right singular vectors with `σ ∈ (a, b]`.
    pub fn spectral_projection(&self, a: f64, b: f64) -> Result<Self> {
        self.spectral()?.projection(a, b)
    }

    /// Polar decomposition `X = U|X|`; `U` is the partial isometry with initial
    /// space the support of `|X|`.
    pub fn polar(&self) -> Result<(Self, Self)> {
        let sd = self.spectral()?;
        Ok((sd.polar_isometry(), sd.modulus()))
    }

    /// `(‖X‖₀, ‖X‖_∞) = (w · rank, σ₁)`.
    pub fn trace_norms(&self) -> Result<(f64, f64)> {
        let sd = self.spectral()?;
        Ok((sd.rank() as f64 * self.w, sd.singular_values[0]))
    }

    /// `K_u(X)` computed directly from spectral cuts `X = X·E(s,∞) + X·E(0,s]`,
    /// measuring each witness pair with its own decomposition.
    pub fn k_direct(&self, u: f64) -> Result<KDirect> {
        require_positive("u", u)?;
        let sd = self.spectral()?;
        let mut cuts = vec![0.0];
        for &s in &sd.singular_values {
            if s > 0.0 && cuts.last() != Some(&s) {
                cuts.push(s);
            }
        }
        let mut best: Option<KDirect> = None;
        for s in cuts {
            let g = self * &sd.projection(s, f64::INFINITY)?;
            let h = self - &g;
            let value = g.trace_norms()?.0 + u * h.trace_norms()?.1;
            if best.as_ref().is_none_or(|b| value < b.value) {
                best = Some(KDirect { value, cut: s, g, h });
            }
        }
        Ok(best.expect("at least one cut"))
    }
}

/// Minimizing decomposition found by [`TraceMatrix::k_direct`].
#[derive(Clone, Debug)]
pub struct KDirect {
    pub value: f64,
    /// Spectral level `s`; `g = X·E^{|X|}(s, ∞)`. Zero stands for the `0⁺` cut.
    pub cut: f64,
    pub g: TraceMatrix,
    pub h: TraceMatrix,
}

impl Rearrange for TraceMatrix {
    fn singular_function(&self) -> Result<SingularFunction> {
        self.mu_of()
    }
}

impl Mul for &TraceMatrix {
    type Output = TraceMatrix;

    /// # Panics
    /// If the operands are not in the same model.
    fn mul(self, rhs: &TraceMatrix) -> TraceMatrix {
        self.compatible(rhs).unwrap();
        self.with_data(&self.data * &rhs.data)
    }
}

impl Add for &TraceMatrix {
    type Output = TraceMatrix;

    fn add(self, rhs: &TraceMatrix) -> TraceMatrix {
        self.compatible(rhs).unwrap();
        self.with_data(&self.data + &rhs.data)
    }
}

impl Sub for &TraceMatrix {
    type Output = TraceMatrix;

    fn sub(self, rhs: &TraceMatrix) -> TraceMatrix {
        self.compatible(rhs).unwrap();
        self.with_data(&self.data - &rhs.data)
    }
}

/// Sorted singular values and the matching singular frames.
///
/// Column `i` of `left`/`right` is the left/right singular vector for
/// `singular_values[i]`; the right vectors are the eigenvectors of `|X|`.
#[derive(Clone, Debug)]
pub struct SpectralData {
    pub singular_values: Vec<f64>,
    pub left: CMatrix,
    pub right: CMatrix,
    pub rank_tol: f64,
    w: f64,
}

impl SpectralData {
    fn compute(x: &TraceMatrix) -> Result<Self> {
        let n = x.n();
        let Svd {
            sigma: raw_sorted,
            u: left,
            v: right,
        } = jacobi_svd(&x.data);

        let sigma1 = raw_sorted[0];
        let eye = CMatrix::identity(n, n);
        let frame_err = |m: &CMatrix| (m.adjoint() * m - &eye).iter().fold(0.0_f64, |a, z| a.max(z.norm()));
        let (eu, ev) = (frame_err(&left), frame_err(&right));
        if eu > FRAME_TOL || ev > FRAME_TOL {
            return Err(Error::Decomposition(format!(
                "singular frames not orthonormal (errors {eu:.3e}, {ev:.3e})"
            )));
        }
        let sigma = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            raw_sorted.iter().map(|&s| Complex64::from(s)),
        ));
        let residual = (&left * sigma * right.adjoint() - &x.data).norm();
        if residual > RECONSTRUCTION_RTOL * sigma1.max(f64::MIN_POSITIVE) && residual > 0.0 {
            return Err(Error::Decomposition(format!(
                "reconstruction residual {residual:.3e} exceeds tolerance for ‖X‖ = {sigma1:.3e}"
            )));
        }

        let rank_tol = if sigma1 > 0.0 { RANK_RTOL * sigma1 } else { RANK_ATOL };
        let mut singular_values = Vec::with_capacity(n);
        let mut leader = f64::NAN;
        for s in raw_sorted {
            let s = if s <= rank_tol { 0.0 } else { s };
            // snap rounding-level splits of a repeated singular value
            if close(s, leader, 1e-12) {
                singular_values.push(leader);
            } else {
                leader = s;
                singular_values.push(s);
            }
        }
        Ok(Self {
            singular_values,
            left,
            right,
            rank_tol,
            w: x.w,
        })
    }

    pub fn n(&self) -> usize {
        self.singular_values.len()
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn rank(&self) -> usize {
        self.singular_values.iter().filter(|&&s| s > 0.0).count()
    }

    pub fn singular_function(&self) -> SingularFunction {
        let bps = (1..=self.n()).map(|i| i as f64 * self.w).collect();
        SingularFunction::new(bps, self.singular_values.clone(), 0.0).expect("sorted nonnegative singular values")
    }

    pub fn dist(&self, s: f64) -> f64 {
        self.singular_values.iter().filter(|&&x| x > s).count() as f64 * self.w
    }

    fn model(&self, data: CMatrix) -> TraceMatrix {
        TraceMatrix { w: self.w, data }
    }

    /// `Σ_{i ∈ idx} coeff_i · a_i b_i*` for columns of two frames.
    fn outer_sum(&self, a: &CMatrix, b: &CMatrix, terms: impl Iterator<Item = (usize, f64)>) -> CMatrix {
        let n = self.n();
        let mut out = CMatrix::zeros(n, n);
        for (i, c) in terms {
            out += a.column(i) * b.column(i).adjoint() * Complex64::from(c);
        }
        out
    }

    pub fn projection(&self, a: f64, b: f64) -> Result<TraceMatrix> {
        if !(a >= 0.0 && a < b) {
            return Err(Error::InvalidInput(format!(
                "spectral interval ({a}, {b}] needs 0 <= a < b"
            )));
        }
        let idx = self
            .singular_values
            .iter()
            .enumerate()
            .filter(|&(_, &s)| s > a && s <= b)
            .map(|(i, _)| (i, 1.0));
        Ok(self.model(self.outer_sum(&self.right, &self.right, idx)))
    }

    /// `|X| = Σ σ_i v_i v_i*`.
    pub fn modulus(&self) -> TraceMatrix {
        let terms = self.singular_values.iter().copied().enumerate();
        self.model(self.outer_sum(&self.right, &self.right, terms))
    }

    /// `U = Σ_{σ_i > 0} u_i v_i*`.
    pub fn polar_isometry(&self) -> TraceMatrix {
        let terms = (0..self.rank()).map(|i| (i, 1.0));
        self.model(self.outer_sum(&self.left, &self.right, terms))
    }

    /// `f(|X|) = Σ f(σ_i) v_i v_i*`.
    pub fn functional_calculus(&self, f: impl Fn(f64) -> f64) -> TraceMatrix {
        let terms = self.singular_values.iter().map(|&s| f(s)).enumerate();
        self.model(self.outer_sum(&self.right, &self.right, terms))
    }
}
