//! Right-continuous step functions on `(0, ∞)` and their decreasing rearrangements.
//!
//! A [`StepFunction`] is described by strictly increasing positive breakpoints
//! `t_1 < … < t_m`, one value per interval `[t_{i-1}, t_i)` (with `t_0 = 0`) and a
//! `tail` value held on `[t_m, ∞)`. Every constructor and every operation returns
//! the canonical form: adjacent equal values are merged and trailing intervals
//! equal to the tail are absorbed into it.
//!
//! A [`SingularFunction`] is a nonnegative nonincreasing step function, the shape of
//! a singular value function `μ(t; X)` or of a decreasing rearrangement.

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};

/// Relative tolerance used for canonical merging and for equality of step functions.
pub const CANONICAL_RTOL: f64 = 1e-12;

/// Relative tolerance under which two grid points are treated as one when probing.
const PROBE_RTOL: f64 = 1e-9;

pub(crate) fn close(a: f64, b: f64, rtol: f64) -> bool {
    a == b || (a - b).abs() <= rtol * a.abs().max(b.abs())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawStep", into = "RawStep")]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    tail: f64,
}

#[derive(Serialize, Deserialize)]
struct RawStep {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    #[serde(default)]
    tail: f64,
}

impl TryFrom<RawStep> for StepFunction {
    type Error = Error;

    fn try_from(raw: RawStep) -> Result<Self> {
        StepFunction::new(raw.breakpoints, raw.values, raw.tail)
    }
}

impl From<StepFunction> for RawStep {
    fn from(f: StepFunction) -> Self {
        RawStep {
            breakpoints: f.breakpoints,
            values: f.values,
            tail: f.tail,
        }
    }
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>, tail: f64) -> Result<Self> {
        if breakpoints.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "{} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        let mut prev = 0.0;
        for &b in &breakpoints {
            if !b.is_finite() || b <= prev {
                return Err(Error::InvalidInput(format!(
                    "breakpoints must be finite, positive and strictly increasing (found {b} after {prev})"
                )));
            }
            prev = b;
        }
        if values.iter().any(|v| !v.is_finite()) || !tail.is_finite() {
            return Err(Error::InvalidInput("values and tail must be finite".into()));
        }
        Ok(Self::canonical(breakpoints, values, tail))
    }

    /// Builds a function from consecutive interval widths instead of breakpoints.
    pub fn from_widths(widths: &[f64], values: Vec<f64>, tail: f64) -> Result<Self> {
        if widths.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidInput("widths must be finite and positive".into()));
        }
        let breakpoints = widths
            .iter()
            .scan(0.0, |acc, w| {
                *acc += w;
                Some(*acc)
            })
            .collect();
        Self::new(breakpoints, values, tail)
    }

    pub fn zero() -> Self {
        Self {
            breakpoints: Vec::new(),
            values: Vec::new(),
            tail: 0.0,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::canonical(Vec::new(), Vec::new(), c)
    }

    /// `c · χ_{[0, len)}`.
    pub fn indicator(c: f64, len: f64) -> Result<Self> {
        Self::new(vec![len], vec![c], 0.0)
    }

    // Inputs are assumed validated; merges runs of (nearly) equal values.
    fn canonical(breakpoints: Vec<f64>, values: Vec<f64>, tail: f64) -> Self {
        let mut bps: Vec<f64> = Vec::with_capacity(breakpoints.len());
        let mut vals: Vec<f64> = Vec::with_capacity(values.len());
        for (b, v) in breakpoints.into_iter().zip(values) {
            match vals.last() {
                Some(&last) if close(last, v, CANONICAL_RTOL) => *bps.last_mut().unwrap() = b,
                _ => {
                    bps.push(b);
                    vals.push(v);
                }
            }
        }
        while matches!(vals.last(), Some(&last) if close(last, tail, CANONICAL_RTOL)) {
            vals.pop();
            bps.pop();
        }
        Self {
            breakpoints: bps,
            values: vals,
            tail,
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty() && self.tail == 0.0
    }

    /// Finite intervals as `(left, right, value)`.
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let lefts = std::iter::once(0.0).chain(self.breakpoints.iter().copied());
        lefts
            .zip(self.breakpoints.iter().copied())
            .zip(self.values.iter().copied())
            .map(|((l, r), v)| (l, r, v))
    }

    pub fn last_breakpoint(&self) -> f64 {
        self.breakpoints.last().copied().unwrap_or(0.0)
    }

    /// Value of the interval containing `t` (right-continuous).
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        require_positive("t", t)?;
        Ok(self.value_at(t))
    }

    pub(crate) fn value_at(&self, t: f64) -> f64 {
        let i = self.breakpoints.partition_point(|&b| b <= t);
        self.values.get(i).copied().unwrap_or(self.tail)
    }

    /// Value on the interval immediately to the left of `t`, i.e. `f(t⁻)`.
    pub fn left_limit(&self, t: f64) -> f64 {
        let i = self.breakpoints.partition_point(|&b| b < t);
        self.values.get(i).copied().unwrap_or(self.tail)
    }

    /// `f(0⁺)`.
    pub fn initial_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(self.tail)
    }

    /// Lebesgue measure of `{t : |f(t)| > s}`; `+∞` when `|tail| > s`.
    pub fn dist(&self, s: f64) -> f64 {
        if self.tail.abs() > s {
            return f64::INFINITY;
        }
        self.intervals()
            .filter(|&(_, _, v)| v.abs() > s)
            .map(|(l, r, _)| r - l)
            .sum()
    }

    /// `(‖f‖_{L0}, ‖f‖_{L∞})`: support measure (`+∞` for a nonzero tail) and essential sup.
    pub fn norms(&self) -> (f64, f64) {
        let linf = self.values.iter().fold(self.tail.abs(), |m, v| m.max(v.abs()));
        (self.dist(0.0), linf)
    }

    /// `σ_s f : t ↦ f(t/s)`.
    pub fn dilate(&self, s: f64) -> Result<Self> {
        require_positive("dilation factor", s)?;
        let bps: Vec<f64> = self.breakpoints.iter().map(|b| b * s).collect();
        Self::new(bps, self.values.clone(), self.tail)
    }

    pub fn scale(&self, c: f64) -> Self {
        let vals = self.values.iter().map(|v| v * c).collect();
        Self::canonical(self.breakpoints.clone(), vals, self.tail * c)
    }

    pub fn abs(&self) -> Self {
        let vals = self.values.iter().map(|v| v.abs()).collect();
        Self::canonical(self.breakpoints.clone(), vals, self.tail.abs())
    }

    /// Applies `op` pointwise on the common refinement of both breakpoint grids.
    pub fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        let grid = merge_grids(&self.breakpoints, &other.breakpoints, CANONICAL_RTOL);
        let mut left = 0.0;
        let mut vals = Vec::with_capacity(grid.len());
        for &b in &grid {
            let mid = 0.5 * (left + b);
            vals.push(op(self.value_at(mid), other.value_at(mid)));
            left = b;
        }
        Self::canonical(grid, vals, op(self.tail, other.tail))
    }

    pub fn add_pointwise(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    /// Restriction `f · χ_{ {t : pred(f(t))} }`.
    pub fn mask(&self, pred: impl Fn(f64) -> bool) -> Self {
        let keep = |v: f64| if pred(v) { v } else { 0.0 };
        let vals = self.values.iter().map(|&v| keep(v)).collect();
        Self::canonical(self.breakpoints.clone(), vals, keep(self.tail))
    }

    /// `∫_0^∞ |f|^p`, `+∞` for a nonzero tail.
    pub fn integral_pow(&self, p: f64) -> f64 {
        if self.tail != 0.0 {
            return f64::INFINITY;
        }
        self.intervals().map(|(l, r, v)| (r - l) * v.abs().powf(p)).sum()
    }

    /// Nonincreasing rearrangement of `|f|`.
    ///
    /// A nonzero tail is accepted only when no interior value lies strictly below
    /// it in magnitude; otherwise the level set `{|f| > |tail| - η}` has infinite
    /// measure above an interior level and the result leaves the finite class.
    pub fn rearrange(&self) -> Result<SingularFunction> {
        let tail = self.tail.abs();
        if tail > 0.0 {
            if let Some(v) = self
                .values
                .iter()
                .map(|v| v.abs())
                .find(|&v| v < tail && !close(v, tail, CANONICAL_RTOL))
            {
                return Err(Error::Undefined(format!(
                    "level {v} lies below the tail magnitude {tail}; rearrangement has infinite-measure level set"
                )));
            }
        }
        let mut pieces: Vec<(f64, f64)> = self
            .intervals()
            .map(|(l, r, v)| (v.abs(), r - l))
            .filter(|&(v, _)| v > tail)
            .collect();
        pieces.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut acc = 0.0;
        let mut bps = Vec::with_capacity(pieces.len());
        let mut vals = Vec::with_capacity(pieces.len());
        for (v, w) in pieces {
            acc += w;
            bps.push(acc);
            vals.push(v);
        }
        Ok(SingularFunction(Self::canonical(bps, vals, tail)))
    }

    /// Equality of canonical forms up to relative tolerance `rtol`.
    pub fn approx_eq(&self, other: &Self, rtol: f64) -> bool {
        self.breakpoints.len() == other.breakpoints.len()
            && close(self.tail, other.tail, rtol)
            && self
                .breakpoints
                .iter()
                .zip(&other.breakpoints)
                .all(|(a, b)| close(*a, *b, rtol))
            && self.values.iter().zip(&other.values).all(|(a, b)| close(*a, *b, rtol))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("step function serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

impl PartialEq for StepFunction {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other, CANONICAL_RTOL)
    }
}

impl fmt::Display for StepFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (l, r, v) in self.intervals() {
            write!(f, "[{l}, {r}) -> {v}; ")?;
        }
        write!(f, "[{}, inf) -> {}", self.last_breakpoint(), self.tail)
    }
}

/// Sorted union of two grids with near-duplicates (relative `rtol`) dropped.
fn merge_grids(a: &[f64], b: &[f64], rtol: f64) -> Vec<f64> {
    let mut all: Vec<f64> = a.iter().chain(b).copied().collect();
    all.sort_by(f64::total_cmp);
    all.dedup_by(|x, y| close(*x, *y, rtol));
    all
}

/// One representative point per constancy interval of a family of right-continuous
/// step functions whose breakpoints are `points`.
///
/// Points closer than a relative `1e-9` are identified, then the midpoint of each
/// interval, a point inside `(0, p_1)` and a point beyond the last breakpoint are
/// returned. Checking a step-function inequality at these points is equivalent to
/// checking it everywhere, and avoids evaluating exactly on a breakpoint that two
/// operands place a rounding error apart.
pub fn probe_points(points: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut grid: Vec<f64> = points.into_iter().filter(|p| p.is_finite() && *p > 0.0).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|x, y| close(*x, *y, PROBE_RTOL));
    let Some(&last) = grid.last() else {
        return vec![1.0];
    };
    let mut out = Vec::with_capacity(grid.len() + 1);
    out.push(0.5 * grid[0]);
    out.extend(grid.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    out.push(last + last.max(1.0));
    out
}

/// Nonnegative, nonincreasing, right-continuous step function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStep", into = "RawStep")]
pub struct SingularFunction(StepFunction);

impl TryFrom<RawStep> for SingularFunction {
    type Error = Error;

    fn try_from(raw: RawStep) -> Result<Self> {
        SingularFunction::new(raw.breakpoints, raw.values, raw.tail)
    }
}

impl From<SingularFunction> for RawStep {
    fn from(f: SingularFunction) -> Self {
        f.0.into()
    }
}

impl SingularFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>, tail: f64) -> Result<Self> {
        Self::try_from_step(StepFunction::new(breakpoints, values, tail)?)
    }

    pub fn from_widths(widths: &[f64], values: Vec<f64>, tail: f64) -> Result<Self> {
        Self::try_from_step(StepFunction::from_widths(widths, values, tail)?)
    }

    pub fn zero() -> Self {
        Self(StepFunction::zero())
    }

    pub fn indicator(c: f64, len: f64) -> Result<Self> {
        Self::try_from_step(StepFunction::indicator(c, len)?)
    }

    pub fn try_from_step(f: StepFunction) -> Result<Self> {
        let mut prev = f64::INFINITY;
        for &v in f.values.iter().chain(std::iter::once(&f.tail)) {
            if v < 0.0 || v > prev {
                return Err(Error::InvalidInput(format!(
                    "singular function must be nonnegative and nonincreasing (value {v} after {prev})"
                )));
            }
            prev = v;
        }
        Ok(Self(f))
    }

    pub fn as_step(&self) -> &StepFunction {
        &self.0
    }

    pub fn into_step(self) -> StepFunction {
        self.0
    }

    /// Measure of the support; `+∞` when the tail is positive.
    pub fn support_measure(&self) -> f64 {
        if self.0.tail > 0.0 {
            f64::INFINITY
        } else {
            self.0.last_breakpoint()
        }
    }

    pub fn dilate(&self, s: f64) -> Result<Self> {
        Ok(Self(self.0.dilate(s)?))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self(self.0.scale(c.abs()))
    }

    /// Pointwise sum; the sum of two nonincreasing functions is nonincreasing.
    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.add_pointwise(&other.0))
    }

    /// Pointwise minimum with another singular function.
    pub fn min(&self, other: &Self) -> Self {
        Self(self.0.zip_with(&other.0, f64::min))
    }

    /// `∫_0^t μ(s) ds`.
    pub fn running_integral(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (l, r, v) in self.0.intervals() {
            if t <= l {
                return acc;
            }
            acc += (r.min(t) - l) * v;
        }
        let last = self.0.last_breakpoint();
        if t > last {
            acc += (t - last) * self.0.tail;
        }
        acc
    }

    /// `self ≥ other` pointwise (up to a relative slack `rtol`).
    pub fn dominates(&self, other: &Self, rtol: f64) -> bool {
        let pts = probe_points(self.breakpoints().iter().chain(other.breakpoints()).copied());
        pts.iter().all(|&t| {
            let (a, b) = (self.value_at(t), other.value_at(t));
            b <= a + rtol * a.abs().max(b.abs())
        })
    }
}

impl Deref for SingularFunction {
    type Target = StepFunction;

    fn deref(&self) -> &StepFunction {
        &self.0
    }
}

impl fmt::Display for SingularFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Returns true when `x` is submajorized by `y`: `∫_0^t μ_x ≤ ∫_0^t μ_y` for all `t`.
///
/// Both running integrals are piecewise affine with vertices on the union of the
/// breakpoints, so the inequality is checked exactly at those vertices plus the
/// asymptotic slope (the tails).
pub fn submajorizes(y: &SingularFunction, x: &SingularFunction) -> bool {
    let slack = |a: f64, b: f64| 1e-12 * a.abs().max(b.abs()).max(1e-300);
    let grid = merge_grids(x.breakpoints(), y.breakpoints(), 0.0);
    let ok_vertices = grid.iter().all(|&t| {
        let (ix, iy) = (x.running_integral(t), y.running_integral(t));
        ix <= iy + slack(ix, iy)
    });
    ok_vertices && x.tail() <= y.tail() + slack(x.tail(), y.tail())
}

/// Anything with a singular value function.
pub trait Rearrange {
    fn singular_function(&self) -> Result<SingularFunction>;
}

impl Rearrange for StepFunction {
    fn singular_function(&self) -> Result<SingularFunction> {
        self.rearrange()
    }
}

impl Rearrange for SingularFunction {
    fn singular_function(&self) -> Result<SingularFunction> {
        Ok(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sf(widths: &[f64], values: &[f64]) -> StepFunction {
        StepFunction::from_widths(widths, values.to_vec(), 0.0).unwrap()
    }

    #[test]
    fn evaluate_is_right_continuous() {
        let f = StepFunction::indicator(2.0, 3.0).unwrap();
        assert_eq!(f.evaluate(1.0).unwrap(), 2.0);
        assert_eq!(f.evaluate(3.0).unwrap(), 0.0);
        let g = sf(&[1.0, 1.0], &[3.0, 1.0]);
        assert_eq!(g.evaluate(1.5).unwrap(), 1.0);
        assert_eq!(g.evaluate(1.0).unwrap(), 1.0);
        assert!(g.evaluate(0.0).is_err());
        assert!(g.evaluate(-1.0).is_err());
    }

    #[test]
    fn constructor_rejects_bad_grids() {
        assert!(StepFunction::new(vec![2.0, 1.0], vec![1.0, 1.0], 0.0).is_err());
        assert!(StepFunction::new(vec![1.0, 1.0], vec![1.0, 2.0], 0.0).is_err());
        assert!(StepFunction::new(vec![0.0], vec![1.0], 0.0).is_err());
        assert!(StepFunction::new(vec![1.0], vec![f64::NAN], 0.0).is_err());
        assert!(StepFunction::new(vec![1.0], vec![], 0.0).is_err());
    }

    #[test]
    fn canonical_form_merges_and_absorbs() {
        let f = StepFunction::new(vec![1.0, 2.0, 3.0, 4.0], vec![2.0, 2.0, 1.0, 1.0], 1.0).unwrap();
        assert_eq!(f.breakpoints(), &[2.0]);
        assert_eq!(f.values(), &[2.0]);
        assert_eq!(f.tail(), 1.0);
        let z = StepFunction::new(vec![1.0, 2.0], vec![0.0, 0.0], 0.0).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn rearrange_examples() {
        let f = sf(&[1.0, 1.0, 1.0], &[1.0, 3.0, 2.0]);
        let mu = f.rearrange().unwrap();
        assert_eq!(*mu.as_step(), sf(&[1.0, 1.0, 1.0], &[3.0, 2.0, 1.0]));

        let g = StepFunction::indicator(-2.0, 3.0).unwrap();
        assert_eq!(
            *g.rearrange().unwrap().as_step(),
            StepFunction::indicator(2.0, 3.0).unwrap()
        );

        let h = sf(&[1.0, 2.0, 1.0], &[1.0, 3.0, 1.0]);
        assert_eq!(*h.rearrange().unwrap().as_step(), sf(&[2.0, 2.0], &[3.0, 1.0]));
    }

    #[test]
    fn rearrange_with_tail() {
        let f = StepFunction::new(vec![1.0, 2.0], vec![-1.0, 3.0], 1.0).unwrap();
        let mu = f.rearrange().unwrap();
        assert_eq!(mu.breakpoints(), &[1.0]);
        assert_eq!(mu.values(), &[3.0]);
        assert_eq!(mu.tail(), 1.0);

        let bad = StepFunction::new(vec![1.0], vec![0.5], 1.0).unwrap();
        assert!(matches!(bad.rearrange(), Err(Error::Undefined(_))));
    }

    #[test]
    fn dist_examples() {
        let f = StepFunction::indicator(2.0, 3.0).unwrap();
        assert_eq!(f.dist(1.5), 3.0);
        assert_eq!(f.dist(2.0), 0.0);
        let mu = sf(&[1.0, 1.0, 1.0], &[3.0, 2.0, 1.0]);
        assert_eq!(mu.dist(1.5), 2.0);
        assert_eq!(StepFunction::constant(1.0).dist(0.5), f64::INFINITY);
    }

    #[test]
    fn dilate_examples() {
        let chi = StepFunction::indicator(1.0, 1.0).unwrap();
        assert_eq!(chi.dilate(2.0).unwrap(), StepFunction::indicator(1.0, 2.0).unwrap());
        assert_eq!(chi.dilate(1.0).unwrap(), chi);
        let f = sf(&[2.0, 2.0], &[3.0, 1.0]);
        assert_eq!(f.dilate(0.5).unwrap(), sf(&[1.0, 1.0], &[3.0, 1.0]));
        assert!(f.dilate(0.0).is_err());
    }

    #[test]
    fn norms_examples() {
        assert_eq!(StepFunction::indicator(2.0, 3.0).unwrap().norms(), (3.0, 2.0));
        assert_eq!(StepFunction::zero().norms(), (0.0, 0.0));
        assert_eq!(sf(&[1.0, 1.0, 1.0], &[1.0, 0.0, 2.0]).norms(), (2.0, 2.0));
        assert_eq!(StepFunction::constant(-3.0).norms(), (f64::INFINITY, 3.0));
    }

    #[test]
    fn add_examples() {
        let chi = StepFunction::indicator(1.0, 1.0).unwrap();
        assert_eq!(chi.add_pointwise(&chi), StepFunction::indicator(2.0, 1.0).unwrap());
        assert_eq!(chi.add_pointwise(&StepFunction::zero()), chi);
        let f = sf(&[1.0, 1.0], &[2.0, 1.0]);
        let g = StepFunction::indicator(1.0, 2.0).unwrap();
        assert_eq!(f.add_pointwise(&g), sf(&[1.0, 1.0], &[3.0, 2.0]));
    }

    #[test]
    fn submajorization_examples() {
        let flat = SingularFunction::from_widths(&[2.0], vec![1.0], 0.0).unwrap();
        let peaked = SingularFunction::from_widths(&[1.0], vec![2.0], 0.0).unwrap();
        assert!(submajorizes(&peaked, &flat));
        assert!(!submajorizes(&flat, &peaked));
        assert!(submajorizes(&flat, &flat));
    }

    #[test]
    fn singular_function_validation() {
        assert!(SingularFunction::new(vec![1.0, 2.0], vec![1.0, 2.0], 0.0).is_err());
        assert!(SingularFunction::new(vec![1.0], vec![-1.0], 0.0).is_err());
        assert!(SingularFunction::new(vec![1.0], vec![1.0], 2.0).is_err());
        assert!(SingularFunction::new(vec![1.0], vec![2.0], 1.0).is_ok());
    }

    #[test]
    fn left_limit_and_running_integral() {
        let mu = SingularFunction::from_widths(&[1.0, 1.0], vec![3.0, 1.0], 0.0).unwrap();
        assert_eq!(mu.left_limit(1.0), 3.0);
        assert_eq!(mu.value_at(1.0), 1.0);
        assert_eq!(mu.left_limit(0.5), 3.0);
        assert_eq!(mu.left_limit(5.0), 0.0);
        assert_eq!(mu.running_integral(1.5), 3.5);
        assert_eq!(mu.running_integral(10.0), 4.0);
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let f = StepFunction::new(vec![1.0, 3.0], vec![2.0, -1.0], 0.5).unwrap();
        let s = f.to_json();
        assert_eq!(StepFunction::from_json(&s).unwrap(), f);
        assert!(StepFunction::from_json(r#"{"breakpoints":[2,1],"values":[1,2],"tail":0}"#).is_err());
        // non-canonical input is accepted and written back canonically
        let g = StepFunction::from_json(r#"{"breakpoints":[1,2],"values":[1,1],"tail":0}"#).unwrap();
        assert_eq!(g.to_json(), r#"{"breakpoints":[2.0],"values":[1.0],"tail":0.0}"#);
    }

    #[test]
    fn probe_points_cover_each_interval() {
        let p = probe_points([1.0, 2.0, 2.0 + 1e-15]);
        assert_eq!(p, vec![0.5, 1.5, 4.0]);
        assert_eq!(probe_points(std::iter::empty()), vec![1.0]);
    }
}
