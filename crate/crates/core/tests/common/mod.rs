#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use soqo::environments::{IncrementFamily, IncrementSpec, TraceMode, TraceSpec};
use soqo::{Matrix, SpectralMatrix};

pub fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Random orthonormal basis from the eigenvectors of a random symmetric matrix.
pub fn random_basis(rng: &mut impl Rng, d: usize) -> Matrix<f64> {
    let mut m = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..=i {
            let x: f64 = rng.random_range(-1.0..1.0);
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
    SpectralMatrix::decompose(&m.add(&Matrix::identity(d).scale(4.0 * d as f64)))
        .expect("diagonally dominant")
        .eigvecs()
        .clone()
}

/// SPD matrix with log-uniform eigenvalues in `[lo, hi]` and a random basis.
pub fn random_spd(rng: &mut impl Rng, d: usize, lo: f64, hi: f64) -> SpectralMatrix<f64> {
    let eig: Vec<f64> = (0..d).map(|_| (rng.random_range(lo.ln()..=hi.ln())).exp()).collect();
    let basis = random_basis(rng, d);
    let a = SpectralMatrix::from_parts(basis, eig).expect("valid parts");
    SpectralMatrix::decompose(&a.reconstruct()).expect("spd")
}

pub fn gaussian(dim: usize, horizon: usize, variance: f64, seed: u64) -> TraceSpec {
    TraceSpec::new(
        dim,
        horizon,
        TraceMode::Martingale {
            increments: IncrementSpec::new(IncrementFamily::Normal, variance),
            correlation: None,
        },
        seed,
    )
}

/// Weighted least-squares slope of `y` against `x` with standard errors `se`.
/// Returns `(slope, slope_se)`.
pub fn wls_slope(x: &[f64], y: &[f64], se: &[f64]) -> (f64, f64) {
    let w: Vec<f64> = se.iter().map(|s| 1.0 / (s * s)).collect();
    let sw: f64 = w.iter().sum();
    let xm = x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let ym = y.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(&w).map(|(a, b)| b * (a - xm) * (a - xm)).sum();
    let sxy: f64 = x.iter().zip(y).zip(&w).map(|((a, c), b)| b * (a - xm) * (c - ym)).sum();
    (sxy / sxx, sxx.recip().sqrt())
}

pub fn max_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
