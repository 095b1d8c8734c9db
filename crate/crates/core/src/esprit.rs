//! ESPRIT frequency recovery from an augmented covariance estimate.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;

use crate::covariance::CovarianceSet;
use crate::error::{Error, Result};
use crate::fmath;
use crate::linalg::{default_rank_tol, eig_general, hermitian_eig, svd, CMatrix, HermitianEig};
use crate::signal_sim::SnapshotMatrix;

/// ESPRIT eigenvalues below this modulus carry no usable phase.
pub const MIN_EIGENVALUE_MODULUS: f64 = 1e-12;

/// Which covariance the subspace is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// Direct augmentation: `R̂_DA`.
    Da,
    /// Spatial smoothing: `R̂_DA²/M`.
    Ss,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Da => "DA",
            Variant::Ss => "SS",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "da" => Ok(Variant::Da),
            "ss" => Ok(Variant::Ss),
            other => Err(Error::Precondition(format!("unknown variant {other:?}"))),
        }
    }
}

/// Unordered frequency estimates and the ESPRIT eigenvalues behind them.
#[derive(Debug, Clone)]
pub struct FrequencyEstimate {
    pub freqs: Vec<f64>,
    pub esprit_eigs: Vec<Complex64>,
    /// The isometric `M×K` signal subspace that was used.
    pub subspace: CMatrix,
}

/// Eigenvectors of the `k` algebraically largest eigenvalues.
///
/// The ordering is by signed value, not magnitude, so large negative
/// eigenvalues of an indefinite DA estimate stay out of the signal subspace.
pub fn signal_subspace(r_hat: &CMatrix, k: usize) -> Result<CMatrix> {
    Ok(signal_subspace_with_eig(r_hat, k)?.0)
}

pub fn signal_subspace_with_eig(r_hat: &CMatrix, k: usize) -> Result<(CMatrix, HermitianEig)> {
    if k == 0 || k >= r_hat.rows() {
        return Err(Error::Dimension(format!(
            "signal subspace dimension K = {k} must satisfy 1 <= K < {}",
            r_hat.rows()
        )));
    }
    let eig = hermitian_eig(r_hat)?;
    Ok((eig.leading_vectors(k), eig))
}

/// Shift-invariance step: eigenvalues of `Û₁†Û₂` where `Û₁`/`Û₂` drop the
/// last/first row of `u`.
pub fn esprit_freqs(u: &CMatrix) -> Result<FrequencyEstimate> {
    let (p, k) = (u.rows(), u.cols());
    if p < k + 1 {
        return Err(Error::Dimension(format!(
            "ESPRIT needs at least K + 1 = {} rows, got {p}",
            k + 1
        )));
    }
    let u1 = u.row_range(0, p - 1);
    let u2 = u.row_range(1, p);

    let d = svd(&u1)?;
    let s_max = d.singular_values.first().copied().unwrap_or(0.0);
    let tol = default_rank_tol(&u1, s_max);
    let rank = d.singular_values.iter().filter(|&&s| s > tol).count();
    if rank < k {
        return Err(Error::RankDeficient { rank, k });
    }
    // Û₁† = V·Σ⁻¹·Uᴴ, applied to Û₂ without forming the pseudo-inverse
    let uh_u2 = d.u.adjoint_mul(&u2)?;
    let scaled = CMatrix::from_fn(k, k, |i, j| uh_u2[(i, j)] / d.singular_values[i]);
    let phi = d.v.matmul(&scaled)?;

    let z = eig_general(&phi)?;
    if let Some(bad) = z.iter().find(|z| z.norm() < MIN_EIGENVALUE_MODULUS) {
        return Err(Error::DegenerateEigenvalue { modulus: bad.norm() });
    }
    let freqs = z
        .iter()
        .map(|z| fmath::wrap_unit(fmath::atan2(z.im, z.re) / (2.0 * PI)))
        .collect();
    Ok(FrequencyEstimate {
        freqs,
        esprit_eigs: z,
        subspace: u.clone(),
    })
}

/// ESPRIT on an already-augmented covariance.
pub fn estimate_from_covariance(cov: &CovarianceSet, k: usize, variant: Variant) -> Result<FrequencyEstimate> {
    if k + 1 > cov.m {
        return Err(Error::Capability { k, m: cov.m });
    }
    let r = match variant {
        Variant::Da => &cov.r_da_hat,
        Variant::Ss => &cov.r_ss_hat,
    };
    esprit_freqs(&signal_subspace(r, k)?)
}

/// Full DA-/SS-ESPRIT pipeline from raw snapshots.
pub fn estimate(y: &SnapshotMatrix, k: usize, variant: Variant) -> Result<FrequencyEstimate> {
    let m = y.geometry.coarray().m_contig;
    if k + 1 > m {
        return Err(Error::Capability { k, m });
    }
    let cov = CovarianceSet::from_snapshots(y)?;
    estimate_from_covariance(&cov, k, variant)
}

/// Whether the `K` largest DA eigenvalues are also the `K` largest in
/// magnitude (`λ_K > |λ_M|`), in which case DA and SS select the same
/// subspace.
pub fn da_ss_share_subspace(da_eig: &HermitianEig, k: usize) -> bool {
    let lam = &da_eig.eigenvalues;
    if k == 0 || k > lam.len() {
        return false;
    }
    lam[k - 1] > lam[lam.len() - 1].abs()
}
