//! K-functional and M-functional of the pair `(L₀, L∞)`, computed exactly.
//!
//! For a singular function `μ` with intervals `[t_{j}, t_{j+1})` and values `v_{j+1}`,
//! `t + u·μ(t)` increases on each interval, so `inf_{t>0} [t + u μ(t)]` is the
//! minimum over the left endpoints, with `t → 0⁺` contributing `u·μ(0⁺)` and the
//! tail interval contributing `t_m + u·tail` (the support measure when the tail
//! is zero). Symmetrically `s·u + d_μ(s)` increases on each constancy interval of
//! the distribution function, whose left endpoints are the values of `μ`.
//! Both infima are therefore minima over finite candidate sets.

use std::fmt::Write as _;

use crate::error::{require_positive, Result};
use crate::matmodel::{KDirect, TraceMatrix};
use crate::stepfn::{Rearrange, SingularFunction, StepFunction};

/// `(t_j, μ(t_j))` candidates: `(0, μ(0⁺))`, then every breakpoint with the value
/// to its right.
fn candidates(mu: &SingularFunction) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(mu.values().len() + 1);
    out.push((0.0, mu.initial_value()));
    for (i, &b) in mu.breakpoints().iter().enumerate() {
        out.push((b, mu.values().get(i + 1).copied().unwrap_or(mu.tail())));
    }
    out
}

/// `K_u(μ) = inf_{t>0} [t + u μ(t)]`.
///
/// # Panics
/// If `u` is not positive.
pub fn k_at(mu: &SingularFunction, u: f64) -> f64 {
    assert!(u > 0.0, "u must be positive, got {u}");
    candidates(mu)
        .into_iter()
        .map(|(t, v)| t + u * v)
        .fold(f64::INFINITY, f64::min)
}

/// `K_u(μ) = inf_{s>0} [s u + d_μ(s)]`, evaluated through the distribution function.
///
/// # Panics
/// If `u` is not positive.
pub fn k_at_distribution(mu: &SingularFunction, u: f64) -> f64 {
    assert!(u > 0.0, "u must be positive, got {u}");
    let mut levels: Vec<f64> = mu.values().to_vec();
    // s → 0⁺ when the tail vanishes, s = tail otherwise (d = ∞ below it).
    levels.push(mu.tail());
    levels
        .into_iter()
        .map(|s| s * u + mu.dist(s))
        .fold(f64::INFINITY, f64::min)
}

/// `‖μ‖_S = K_1(μ)`.
pub fn s_norm(mu: &SingularFunction) -> f64 {
    k_at(mu, 1.0)
}

/// `M_t(μ) = inf_s max{s, t μ(s)}`.
///
/// On `[t_{j}, t_{j+1})` the infimum of `max{s, t v}` is `max{t_j, t v}`: either
/// the crossing point `s = t v` lies in the interval or the left endpoint wins.
///
/// # Panics
/// If `t` is not positive.
pub fn m_at(mu: &SingularFunction, t: f64) -> f64 {
    assert!(t > 0.0, "t must be positive, got {t}");
    candidates(mu)
        .into_iter()
        .map(|(left, v)| left.max(t * v))
        .fold(f64::INFINITY, f64::min)
}

/// One affine piece `K_u = intercept + slope·u` on `[start, end]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub intercept: f64,
    pub slope: f64,
}

impl Piece {
    pub fn eval(&self, u: f64) -> f64 {
        self.intercept + self.slope * u
    }
}

/// The concave piecewise-affine curve `u ↦ K_u(μ)`.
#[derive(Clone, Debug)]
pub struct KCurve {
    candidates: Vec<(f64, f64)>,
    pieces: Vec<Piece>,
}

impl KCurve {
    pub fn new(mu: &SingularFunction) -> Self {
        let candidates = candidates(mu);
        // Lines t_j + v_j u have increasing intercepts and decreasing slopes, so the
        // lower envelope visits them in order; drop lines that never attain the min.
        let mut hull: Vec<(f64, f64)> = Vec::new();
        let cross = |p: (f64, f64), q: (f64, f64)| (q.0 - p.0) / (p.1 - q.1);
        for &line in &candidates {
            if let Some(&top) = hull.last() {
                if line.1 >= top.1 {
                    // never below `top` for u > 0
                    continue;
                }
            }
            while hull.len() >= 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                if cross(a, line) <= cross(a, b) {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(line);
        }
        let mut pieces = Vec::with_capacity(hull.len());
        let mut start = 0.0;
        for (i, &(t, v)) in hull.iter().enumerate() {
            let end = hull.get(i + 1).map_or(f64::INFINITY, |&next| cross((t, v), next));
            pieces.push(Piece {
                start,
                end,
                intercept: t,
                slope: v,
            });
            start = end;
        }
        Self { candidates, pieces }
    }

    pub fn candidates(&self) -> &[(f64, f64)] {
        &self.candidates
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Interior kinks of the curve.
    pub fn kinks(&self) -> impl Iterator<Item = f64> + '_ {
        self.pieces.iter().map(|p| p.end).filter(|e| e.is_finite())
    }

    pub fn eval(&self, u: f64) -> f64 {
        assert!(u > 0.0, "u must be positive, got {u}");
        self.candidates
            .iter()
            .map(|&(t, v)| t + u * v)
            .fold(f64::INFINITY, f64::min)
    }

    /// Piece containing `u` (the left one at a kink).
    pub fn piece_at(&self, u: f64) -> &Piece {
        let i = self.pieces.partition_point(|p| p.end < u);
        &self.pieces[i.min(self.pieces.len() - 1)]
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.intercept == 0.0 && p.slope == 0.0)
    }
}

pub fn k_curve(mu: &SingularFunction) -> KCurve {
    KCurve::new(mu)
}

/// `L₀ + L∞` splitting attaining `K_u`.
#[derive(Clone, Debug)]
pub struct Decomposition<T> {
    pub g: T,
    pub h: T,
    /// `‖g‖₀ + u‖h‖_∞`, measured on the returned parts.
    pub value: f64,
}

/// Optimal decomposition of a step function: `g = f·χ{|f| > s}`, `h = f − g`, with
/// the cut level `s` taken from the minimizing candidate of [`k_at`].
pub fn optimal_decomposition(f: &StepFunction, u: f64) -> Result<Decomposition<StepFunction>> {
    require_positive("u", u)?;
    let mu = f.rearrange()?;
    let (_, level) = candidates(&mu)
        .into_iter()
        .min_by(|a, b| (a.0 + u * a.1).total_cmp(&(b.0 + u * b.1)))
        .expect("candidate set is never empty");
    let g = f.mask(|v| v.abs() > level);
    let h = f.mask(|v| v.abs() <= level);
    let value = g.norms().0 + u * h.norms().1;
    Ok(Decomposition { g, h, value })
}

/// Optimal decomposition of a matrix through its spectral cut.
pub fn optimal_decomposition_matrix(x: &TraceMatrix, u: f64) -> Result<Decomposition<TraceMatrix>> {
    let KDirect { value, g, h, .. } = x.k_direct(u)?;
    Ok(Decomposition { g, h, value })
}

/// `K_u` of anything with a singular value function.
pub fn k_of(x: &impl Rearrange, u: f64) -> Result<f64> {
    require_positive("u", u)?;
    Ok(k_at(&x.singular_function()?, u))
}

/// `n ≥ 2` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    require_positive("grid lower end", lo)?;
    require_positive("grid upper end", hi)?;
    if n < 2 || hi <= lo {
        return Err(crate::Error::InvalidInput(format!(
            "log grid needs at least 2 points and lo < hi (got n={n}, [{lo}, {hi}])"
        )));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| match i {
            0 => lo,
            i if i == n - 1 => hi,
            i => (a + step * i as f64).exp(),
        })
        .collect())
}

/// CSV of `(u, K_u)` rows with 17 significant digits.
pub fn k_curve_csv(mu: &SingularFunction, grid: &[f64]) -> String {
    curve_csv("u,K_u", grid, |u| k_at(mu, u))
}

/// CSV of `(t, M_t)` rows with 17 significant digits.
pub fn m_curve_csv(mu: &SingularFunction, grid: &[f64]) -> String {
    curve_csv("t,M_t", grid, |t| m_at(mu, t))
}

fn curve_csv(header: &str, grid: &[f64], f: impl Fn(f64) -> f64) -> String {
    let mut out = String::with_capacity(40 * (grid.len() + 1));
    out.push_str(header);
    out.push('\n');
    for &x in grid {
        let _ = writeln!(out, "{x:.16e},{:.16e}", f(x));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mu(widths: &[f64], values: &[f64]) -> SingularFunction {
        SingularFunction::from_widths(widths, values.to_vec(), 0.0).unwrap()
    }

    #[test]
    fn k_of_indicator_is_min_of_line_and_support() {
        let m = SingularFunction::indicator(1.5, 2.0).unwrap();
        for u in [0.1, 1.0, 4.0 / 3.0, 2.0, 10.0] {
            assert_eq!(k_at(&m, u), (1.5 * u).min(2.0));
        }
    }

    #[test]
    fn k_two_level_example() {
        let m = mu(&[1.0, 1.0], &[1.0, 0.6]);
        assert_eq!(k_at(&m, 1.0), 1.0);
        assert!((k_at_distribution(&m, 1.0) - 1.0).abs() < 1e-15);
        assert_eq!(k_at(&SingularFunction::zero(), 3.0), 0.0);
        assert_eq!(k_at_distribution(&SingularFunction::zero(), 3.0), 0.0);
    }

    #[test]
    fn k_with_positive_tail_is_not_capped() {
        let m = SingularFunction::new(vec![1.0], vec![2.0], 0.5).unwrap();
        // candidates: 2u, 1 + 0.5u
        assert_eq!(k_at(&m, 10.0), 6.0);
        assert_eq!(k_at_distribution(&m, 10.0), 6.0);
    }

    #[test]
    fn k_curve_pieces() {
        let c = k_curve(&SingularFunction::indicator(1.0, 1.0).unwrap());
        assert_eq!(c.pieces().len(), 2);
        assert_eq!(
            c.pieces()[0],
            Piece {
                start: 0.0,
                end: 1.0,
                intercept: 0.0,
                slope: 1.0
            }
        );
        assert_eq!(c.pieces()[1].intercept, 1.0);
        assert_eq!(c.pieces()[1].slope, 0.0);

        let m = SingularFunction::indicator(2.0, 3.0).unwrap();
        let c = k_curve(&m);
        assert_eq!(c.kinks().collect::<Vec<_>>(), vec![1.5]);
        for u in log_grid(1e-3, 1e3, 50).unwrap() {
            assert_eq!(c.eval(u), (2.0 * u).min(3.0));
            assert!((c.piece_at(u).eval(u) - c.eval(u)).abs() < 1e-12);
        }
        assert!(k_curve(&SingularFunction::zero()).is_zero());
    }

    #[test]
    fn k_curve_skips_dominated_lines() {
        // two-level profile whose middle line never touches the envelope
        let m = mu(&[1.0, 1.0], &[1.0, 0.6]);
        let c = k_curve(&m);
        assert_eq!(c.pieces().len(), 2);
        assert_eq!(c.kinks().collect::<Vec<_>>(), vec![2.0]);
    }

    #[test]
    fn m_examples() {
        let m = SingularFunction::indicator(3.0, 2.0).unwrap();
        for t in [0.1, 0.5, 2.0 / 3.0, 1.0, 7.0] {
            assert_eq!(m_at(&m, t), (3.0 * t).min(2.0));
        }
        let tight = mu(&[1.0, 1.0], &[2.0, 1.0]);
        assert_eq!(m_at(&tight, 1.0), 1.0);
        assert_eq!(k_at(&tight, 1.0), 2.0);
        assert_eq!(m_at(&SingularFunction::zero(), 1.0), 0.0);
    }

    #[test]
    fn m_matches_grid_oracle() {
        let m = mu(&[0.5, 1.5, 2.0], &[4.0, 1.0, 0.25]);
        for t in [0.05, 0.3, 1.0, 2.5, 9.0] {
            let mut best = f64::INFINITY;
            for i in 1..=200_000 {
                let s = i as f64 * 5e-5;
                best = best.min(s.max(t * m.value_at(s)));
            }
            assert!((m_at(&m, t) - best).abs() < 1e-4, "t={t}");
        }
    }

    #[test]
    fn decomposition_of_step_function() {
        let f = StepFunction::from_widths(&[1.0, 1.0, 1.0], vec![-3.0, 0.5, 0.0], 0.0).unwrap();
        let d = optimal_decomposition(&f, 1.0).unwrap();
        assert_eq!(d.value, 1.5);
        assert_eq!(d.g.add_pointwise(&d.h), f);
        assert_eq!(d.g.norms().0, 1.0);

        let small = optimal_decomposition(&f, 1e-3).unwrap();
        assert!(small.g.is_zero());
        assert_eq!(small.h, f);
        let large = optimal_decomposition(&f, 1e3).unwrap();
        assert!(large.h.is_zero());
        assert_eq!(large.g, f);
    }

    #[test]
    fn decomposition_of_matrix() {
        let x = TraceMatrix::diag(&[3.0, 0.5], 1.0).unwrap();
        let d = optimal_decomposition_matrix(&x, 1.0).unwrap();
        assert!((d.value - 1.5).abs() < 1e-12);
        assert!((&(&d.g + &d.h) - &x).max_abs() < 1e-12);
        assert!((d.h.op_norm() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn csv_rendering() {
        let m = SingularFunction::indicator(2.0, 3.0).unwrap();
        let csv = k_curve_csv(&m, &[1.0, 2.0]);
        assert_eq!(
            csv,
            "u,K_u\n1.0000000000000000e0,2.0000000000000000e0\n2.0000000000000000e0,3.0000000000000000e0\n"
        );
        assert!(m_curve_csv(&m, &[1.0, 2.0]).starts_with("t,M_t\n"));
    }

    #[test]
    fn log_grid_shape() {
        let g = log_grid(1e-2, 1e2, 5).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g[0], 1e-2);
        assert_eq!(g[4], 1e2);
        assert!((g[2] - 1.0).abs() < 1e-12);
        assert!(log_grid(1.0, 2.0, 1).is_err());
        assert!(log_grid(0.0, 2.0, 3).is_err());
    }
}
