#![allow(dead_code)]

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sla_esprit::{CMatrix, Complex64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in [0, 1).
pub fn unif(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Uniform in [-1, 1) for both parts.
pub fn cunif(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(2.0 * unif(rng) - 1.0, 2.0 * unif(rng) - 1.0)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| cunif(rng))
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let a = random_matrix(rng, n, n);
    let mut h = a.add(&a.adjoint()).unwrap().scale(0.5);
    h.symmetrize();
    h
}

/// Random `K` distinct frequencies with minimum wrap-around gap `min_gap`.
pub fn random_freqs(rng: &mut ChaCha8Rng, k: usize, min_gap: f64) -> Vec<f64> {
    loop {
        let f: Vec<f64> = (0..k).map(|_| unif(rng)).collect();
        let ok = f.iter().enumerate().all(|(i, &a)| {
            f[i + 1..].iter().all(|&b| {
                let d = (a - b).abs();
                d.min(1.0 - d) >= min_gap
            })
        });
        if ok {
            return f;
        }
    }
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.sub(b).unwrap().max_abs()
}
