//! Seeded random generators for step functions and matrix models.
//!
//! Everything draws from a caller-supplied [`ChaCha8Rng`], so a seed fixes every
//! sample exactly.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matmodel::{CMatrix, TraceMatrix};
use crate::stepfn::{SingularFunction, StepFunction};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Widths in `[0.1, 2)` with a chance of unit widths, so coincident breakpoints
/// and rational arithmetic both get exercised.
fn random_widths(rng: &mut SampleRng, m: usize) -> Vec<f64> {
    let unit = rng.random_bool(0.3);
    (0..m)
        .map(|_| if unit { 1.0 } else { rng.random_range(0.1..2.0) })
        .collect()
}

/// Step function with up to `max_pieces` intervals, signed values and zero tail.
pub fn random_step_function(rng: &mut SampleRng, max_pieces: usize) -> StepFunction {
    let m = rng.random_range(1..=max_pieces.max(1));
    let widths = random_widths(rng, m);
    let values = (0..m)
        .map(|_| {
            if rng.random_bool(0.1) {
                0.0
            } else {
                let v: f64 = rng.random_range(0.05..5.0);
                if rng.random_bool(0.5) {
                    v
                } else {
                    -v
                }
            }
        })
        .collect();
    StepFunction::from_widths(&widths, values, 0.0).expect("valid random step function")
}

/// Nonincreasing, nonnegative profile with up to `max_pieces` intervals.
///
/// Values repeat with positive probability so that merged plateaus occur.
pub fn random_singular_function(rng: &mut SampleRng, max_pieces: usize) -> SingularFunction {
    let m = rng.random_range(1..=max_pieces.max(1));
    let widths = random_widths(rng, m);
    let mut values: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..5.0)).collect();
    for i in 1..m {
        if rng.random_bool(0.15) {
            values[i] = values[i - 1];
        }
    }
    values.sort_by(|a, b| b.total_cmp(a));
    SingularFunction::from_widths(&widths, values, 0.0).expect("valid random profile")
}

fn gaussian(rng: &mut SampleRng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_gaussian(rng: &mut SampleRng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| gaussian(rng))
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases of
/// `diag(R)` absorbed into `Q`.
pub fn random_unitary(rng: &mut SampleRng, n: usize) -> CMatrix {
    let qr = random_gaussian(rng, n).qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DVector::from_iterator(
        n,
        (0..n).map(|i| {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                Complex64::from(1.0)
            }
        }),
    );
    q * CMatrix::from_diagonal(&phases)
}

/// `U diag(σ) V*` with independent Haar unitaries; `σ` is used as given.
pub fn random_matrix_with_spectrum(rng: &mut SampleRng, sigma: &[f64], w: f64) -> TraceMatrix {
    let n = sigma.len();
    let u = random_unitary(rng, n);
    let v = random_unitary(rng, n);
    let d = CMatrix::from_diagonal(&DVector::from_iterator(n, sigma.iter().map(|&s| Complex64::from(s))));
    TraceMatrix::new(u * d * v.adjoint(), w).expect("finite random matrix")
}

/// Random singular values in `[0.1, 5)` with the given rank, some repeated.
pub fn random_spectrum(rng: &mut SampleRng, n: usize, rank: usize) -> Vec<f64> {
    let mut sigma: Vec<f64> = (0..rank).map(|_| rng.random_range(0.1..5.0)).collect();
    for i in 1..rank {
        if rng.random_bool(0.2) {
            sigma[i] = sigma[i - 1];
        }
    }
    sigma.sort_by(|a, b| b.total_cmp(a));
    sigma.resize(n, 0.0);
    sigma
}

pub fn random_matrix_with_rank(rng: &mut SampleRng, n: usize, rank: usize, w: f64) -> TraceMatrix {
    let sigma = random_spectrum(rng, n, rank.min(n));
    random_matrix_with_spectrum(rng, &sigma, w)
}

/// Random `n × n` matrix of uniformly random rank in `1..=n`.
pub fn random_matrix(rng: &mut SampleRng, n: usize, w: f64) -> TraceMatrix {
    let rank = rng.random_range(1..=n);
    random_matrix_with_rank(rng, n, rank, w)
}

/// Random weight from a small set of exact binary fractions.
pub fn random_weight(rng: &mut SampleRng) -> f64 {
    [0.25, 0.5, 1.0, 2.0][rng.random_range(0..4)]
}

/// Pair `(A, X)` with `μ(t; X) ≤ C μ(t/C; A)` for the returned integer `C`, with
/// strict inequality on the support of `X`.
///
/// `X` is built entrywise below the bound `C a_{⌊i/C⌋}` and then sorted, which
/// preserves domination because the bound is nonincreasing.
pub fn random_transfer_pair(rng: &mut SampleRng, n: usize, w: f64) -> (TraceMatrix, TraceMatrix, u64) {
    let c = rng.random_range(1..=3u64);
    let rank_a = rng.random_range(1..=n);
    let sigma_a = random_spectrum(rng, n, rank_a);
    let max_rank_x = (c as usize * rank_a).min(n);
    let rank_x = rng.random_range(1..=max_rank_x);
    let mut sigma_x: Vec<f64> = (0..rank_x)
        .map(|i| c as f64 * sigma_a[i / c as usize] * rng.random_range(0.3..0.95))
        .collect();
    sigma_x.sort_by(|a, b| b.total_cmp(a));
    sigma_x.resize(n, 0.0);
    let a = random_matrix_with_spectrum(rng, &sigma_a, w);
    let x = random_matrix_with_spectrum(rng, &sigma_x, w);
    (a, x, c)
}
