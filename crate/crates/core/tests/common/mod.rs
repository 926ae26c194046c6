#![allow(dead_code)]

use aqst::qcore::{CMatrix, Complex64, DenseOperator};
use rand::Rng;

/// `exp(-i H t)` by truncated Taylor series with scaling and squaring.
pub fn expm_taylor(h: &CMatrix, t: f64) -> CMatrix {
    let n = h.nrows();
    let a = h.map(|z| z * Complex64::new(0.0, -t));
    let norm: f64 = a.iter().map(|z| z.norm()).sum::<f64>().max(1e-300);
    let squarings = (norm / 0.25).log2().ceil().max(0.0) as u32;
    let a = a.unscale(2f64.powi(squarings as i32));
    let mut sum = CMatrix::identity(n, n);
    let mut term = CMatrix::identity(n, n);
    for k in 1..=30 {
        term = &term * &a / Complex64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `exp(-i Γ t σˣ)` in closed form.
pub fn rabi_oracle(gamma: f64, t: f64) -> CMatrix {
    let (s, c) = (gamma * t).sin_cos();
    CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(c, 0.0),
            Complex64::new(0.0, -s),
            Complex64::new(0.0, -s),
            Complex64::new(c, 0.0),
        ],
    )
}

/// Hermitian matrix from `2 n²` raw values in `[-1, 1]`, scaled by `scale`.
pub fn hermitian_from(n: usize, raw: &[f64], scale: f64) -> DenseOperator {
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let k = 2 * (i * n + j);
            m[(i, j)] = Complex64::new(raw[k], raw[k + 1]) * scale;
        }
    }
    let h = (&m + m.adjoint()).unscale(2.0);
    DenseOperator::new(h).expect("hermitian by construction")
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize, scale: f64) -> DenseOperator {
    let raw: Vec<f64> = (0..2 * n * n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    hermitian_from(n, &raw, scale)
}
