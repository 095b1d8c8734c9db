//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Jacobi is slower than tridiagonal QR but gives eigenvectors that are
//! orthonormal to working precision and small relative residuals, which is
//! what the perturbation tests lean on. Matrices here stay below a few
//! hundred rows.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{CMatrix, TOL_EIG, TOL_HERM};
use crate::error::{Error, Result};
use crate::fmath;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues sorted descending with matching unit-norm eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl HermitianEig {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Columns `0..k` of the eigenvector matrix.
    pub fn leading_vectors(&self, k: usize) -> CMatrix {
        self.eigenvectors.leading_columns(k)
    }

    /// `V·diag(λ)·Vᴴ`.
    pub fn reconstruct(&self) -> CMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        CMatrix::from_fn(n, n, |i, j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, &lam) in self.eigenvalues.iter().enumerate() {
                acc += v[(i, k)] * v[(j, k)].conj() * lam;
            }
            acc
        })
    }
}

/// 2x2 unitary acting on coordinates `(p, q)`, stored row-major.
#[derive(Clone, Copy)]
pub(crate) struct PlaneRotation {
    g: [Complex64; 4],
}

impl PlaneRotation {
    /// Rotation `G` such that `Gᴴ [[app, apq], [conj(apq), aqq]] G` is diagonal.
    ///
    /// Returns `None` when `apq` is already zero.
    pub(crate) fn annihilating(app: f64, aqq: f64, apq: Complex64) -> Option<Self> {
        let mag = apq.norm();
        if mag == 0.0 {
            return None;
        }
        let phase = apq / mag;
        let tau = (aqq - app) / (2.0 * mag);
        let t = if tau >= 0.0 {
            1.0 / (tau + fmath::hypot(1.0, tau))
        } else {
            -1.0 / (-tau + fmath::hypot(1.0, tau))
        };
        let c = 1.0 / fmath::hypot(1.0, t);
        let s = t * c;
        let pc = phase.conj();
        Some(Self {
            g: [
                Complex64::new(c, 0.0),
                Complex64::new(s, 0.0),
                -pc * s,
                pc * c,
            ],
        })
    }

    /// `A ← A·G` on columns `p, q`.
    #[inline]
    pub(crate) fn apply_right(&self, a: &mut CMatrix, p: usize, q: usize) {
        let [g00, g01, g10, g11] = self.g;
        for k in 0..a.rows() {
            let x = a[(k, p)];
            let y = a[(k, q)];
            a[(k, p)] = x * g00 + y * g10;
            a[(k, q)] = x * g01 + y * g11;
        }
    }

    /// `A ← Gᴴ·A` on rows `p, q`.
    #[inline]
    fn apply_left_adjoint(&self, a: &mut CMatrix, p: usize, q: usize) {
        let [g00, g01, g10, g11] = self.g;
        for k in 0..a.cols() {
            let x = a[(p, k)];
            let y = a[(q, k)];
            a[(p, k)] = g00.conj() * x + g10.conj() * y;
            a[(q, k)] = g01.conj() * x + g11.conj() * y;
        }
    }
}

fn off_diagonal_norm_sqr(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            acc += a[(i, j)].norm_sqr();
        }
    }
    2.0 * acc
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized as `(H + Hᴴ)/2` before factoring. Eigenvalues come
/// back in descending order; ties keep the order in which Jacobi left them,
/// which is a deterministic function of the input bits. Each eigenvector is
/// scaled so that its largest-magnitude component is real and positive.
pub fn hermitian_eig(h: &CMatrix) -> Result<HermitianEig> {
    if !h.is_square() {
        return Err(Error::Dimension(format!(
            "hermitian_eig needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let n = h.rows();
    let scale = h.frobenius_norm();
    if h.hermitian_defect() > TOL_HERM * scale {
        return Err(Error::Precondition(format!(
            "matrix is not Hermitian (defect {:e}, norm {:e})",
            h.hermitian_defect(),
            scale
        )));
    }

    let mut a = h.clone();
    a.symmetrize();
    let mut v = CMatrix::identity(n);

    let target = (f64::EPSILON * scale) * (f64::EPSILON * scale);
    let loose = target * (100.0 * n as f64) * (100.0 * n as f64);
    let mut prev_off = f64::INFINITY;
    let mut converged = n <= 1 || scale == 0.0;
    let mut sweep = 0;
    while !converged {
        if sweep == MAX_SWEEPS {
            return Err(Error::Numerical(format!(
                "Jacobi eigensolver did not converge for a {n}x{n} matrix after {MAX_SWEEPS} sweeps"
            )));
        }
        sweep += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                // skip entries already negligible next to both diagonal terms
                let small = f64::EPSILON * 0.5 * (a[(p, p)].re.abs() + a[(q, q)].re.abs());
                if apq.norm() <= small * 1e-3 {
                    a[(p, q)] = Complex64::new(0.0, 0.0);
                    a[(q, p)] = Complex64::new(0.0, 0.0);
                    continue;
                }
                if let Some(rot) = PlaneRotation::annihilating(a[(p, p)].re, a[(q, q)].re, apq) {
                    rot.apply_right(&mut a, p, q);
                    rot.apply_left_adjoint(&mut a, p, q);
                    a[(p, q)] = Complex64::new(0.0, 0.0);
                    a[(q, p)] = Complex64::new(0.0, 0.0);
                    a[(p, p)].im = 0.0;
                    a[(q, q)].im = 0.0;
                    rot.apply_right(&mut v, p, q);
                }
            }
        }
        let off = off_diagonal_norm_sqr(&a);
        // rounding can stall the off-diagonal mass just above the strict target
        converged = off <= target || (off <= loose && off >= prev_off);
        prev_off = off;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));

    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src);
        normalize_phase(&mut col);
        eigenvectors.set_column(dst, &col);
    }

    let out = HermitianEig {
        eigenvalues,
        eigenvectors,
    };
    debug_assert!(orthonormality_defect(&out.eigenvectors) <= TOL_EIG * (n as f64).max(1.0));
    Ok(out)
}

/// Rotates `v` so its largest-magnitude entry (first one on ties) is real
/// positive.
pub(crate) fn normalize_phase(v: &mut [Complex64]) {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm_sqr();
        if m > best_mag {
            best_mag = m;
            best = i;
        }
    }
    if best_mag <= 0.0 {
        return;
    }
    let pivot = v[best];
    let rot = pivot.conj() / pivot.norm();
    for z in v.iter_mut() {
        *z *= rot;
    }
    v[best] = Complex64::new(v[best].re, 0.0);
}

/// `‖VᴴV − I‖_F`.
pub fn orthonormality_defect(v: &CMatrix) -> f64 {
    let g = v.adjoint_mul(v).expect("VᴴV shape");
    let k = g.rows();
    g.sub(&CMatrix::identity(k)).map(|d| d.frobenius_norm()).unwrap_or(f64::INFINITY)
}
