//! Dense complex linear algebra sized for covariance matrices of a few
//! hundred rows at most.

mod eig;
mod eigh;
mod matrix;
mod svd;

use alloc::format;

#[cfg(test)]
use num_complex::Complex64;

pub use eig::{eig_general, MAX_GENERAL_DIM};
pub use eigh::{hermitian_eig, orthonormality_defect, HermitianEig};
pub use matrix::CMatrix;
pub use svd::{svd, Svd};

use crate::error::{Error, Result};

/// Relative accuracy contract for eigen and singular decompositions.
pub const TOL_EIG: f64 = 1e-10;
/// Relative Hermitian defect tolerated by [`hermitian_eig`].
pub const TOL_HERM: f64 = 1e-8;

/// Largest singular value.
pub fn spectral_norm(a: &CMatrix) -> Result<f64> {
    Ok(svd(a)?.singular_values.first().copied().unwrap_or(0.0))
}

/// Singular values in descending order.
pub fn singular_values(a: &CMatrix) -> Result<alloc::vec::Vec<f64>> {
    Ok(svd(a)?.singular_values)
}

/// Default truncation threshold `max(m, n)·ε·σ₁(A)`.
pub fn default_rank_tol(a: &CMatrix, sigma_max: f64) -> f64 {
    a.rows().max(a.cols()) as f64 * f64::EPSILON * sigma_max
}

/// Moore-Penrose pseudo-inverse by truncated SVD.
///
/// Singular values at or below `rank_tol` are dropped; `None` uses
/// [`default_rank_tol`].
pub fn pseudo_inverse(a: &CMatrix, rank_tol: Option<f64>) -> Result<CMatrix> {
    let d = svd(a)?;
    let s_max = d.singular_values.first().copied().unwrap_or(0.0);
    let tol = rank_tol.unwrap_or_else(|| default_rank_tol(a, s_max));
    let (m, n) = (a.rows(), a.cols());
    let mut out = CMatrix::zeros(n, m);
    for (k, &s) in d.singular_values.iter().enumerate() {
        if s <= tol {
            continue;
        }
        let inv = 1.0 / s;
        for i in 0..n {
            let vi = d.v[(i, k)] * inv;
            for j in 0..m {
                out[(i, j)] += vi * d.u[(j, k)].conj();
            }
        }
    }
    Ok(out)
}

/// Sine of the largest canonical angle between the column spaces of two
/// isometric `p×r` matrices.
///
/// Computed as `‖(I − UUᴴ)V‖`, which stays accurate for nearly aligned
/// subspaces where `√(1 − σ_min²)` would lose half the digits.
pub fn subspace_dist(u: &CMatrix, v: &CMatrix) -> Result<f64> {
    if u.rows() != v.rows() || u.cols() != v.cols() {
        return Err(Error::Dimension(format!(
            "subspace_dist shapes {}x{} and {}x{}",
            u.rows(),
            u.cols(),
            v.rows(),
            v.cols()
        )));
    }
    let tol = TOL_EIG * u.cols().max(1) as f64;
    for (name, m) in [("U", u), ("V", v)] {
        let defect = orthonormality_defect(m);
        if defect > tol {
            return Err(Error::Precondition(format!(
                "{name} is not isometric (‖{name}ᴴ{name} − I‖ = {defect:e})"
            )));
        }
    }
    let proj = u.matmul(&u.adjoint_mul(v)?)?;
    let resid = v.sub(&proj)?;
    let s = spectral_norm(&resid)?;
    Ok(s.clamp(0.0, 1.0))
}

/// Orthonormal basis for the column space of a full-column-rank matrix.
pub fn orthonormal_basis(a: &CMatrix) -> Result<CMatrix> {
    let d = svd(a)?;
    let s_max = d.singular_values.first().copied().unwrap_or(0.0);
    let tol = default_rank_tol(a, s_max);
    let rank = d.singular_values.iter().filter(|&&s| s > tol).count();
    if rank < a.cols() {
        return Err(Error::Precondition(format!(
            "matrix has rank {rank} < {} columns",
            a.cols()
        )));
    }
    Ok(d.u.leading_columns(a.cols()))
}

#[cfg(test)]
pub(crate) fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
