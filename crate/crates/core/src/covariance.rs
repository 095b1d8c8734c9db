//! Sample covariance, direct augmentation over the coarray, and the
//! spatially smoothed covariance.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::array_model::SlaGeometry;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::signal_sim::SnapshotMatrix;

/// Averaged covariance lags `r̂_0 … r̂_{M−1}` with the number of sensor pairs
/// behind each.
#[derive(Debug, Clone, PartialEq)]
pub struct LagVector {
    pub lags: Vec<Complex64>,
    pub counts: Vec<usize>,
}

impl LagVector {
    pub fn len(&self) -> usize {
        self.lags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lags.is_empty()
    }
}

/// The covariance chain of one trial.
#[derive(Debug, Clone)]
pub struct CovarianceSet {
    /// `N_S×N_S` sample covariance.
    pub r_omega_hat: CMatrix,
    /// `M×M` Toeplitz DA estimate; Hermitian but possibly indefinite.
    pub r_da_hat: CMatrix,
    /// `R̂_DA²/M`, always PSD.
    pub r_ss_hat: CMatrix,
    pub m: usize,
}

impl CovarianceSet {
    /// Runs the full chain on a snapshot block, augmenting to the geometry's
    /// contiguous aperture.
    pub fn from_snapshots(y: &SnapshotMatrix) -> Result<Self> {
        let r = sample_covariance(y)?;
        Self::from_sample_covariance(r, &y.geometry)
    }

    pub fn from_sample_covariance(r_omega_hat: CMatrix, geom: &SlaGeometry) -> Result<Self> {
        let m = geom.coarray().m_contig;
        let lags = da_lags(&r_omega_hat, geom, m)?;
        let r_da_hat = da_toeplitz(&lags);
        let r_ss_hat = ss_covariance(&r_da_hat)?;
        Ok(Self {
            r_omega_hat,
            r_da_hat,
            r_ss_hat,
            m,
        })
    }
}

/// `Y·Yᴴ / L`, with the lower triangle mirrored so the result is exactly
/// Hermitian.
pub fn sample_covariance(y: &SnapshotMatrix) -> Result<CMatrix> {
    sample_covariance_of(&y.data)
}

pub fn sample_covariance_of(y: &CMatrix) -> Result<CMatrix> {
    let (n, l) = (y.rows(), y.cols());
    if n == 0 || l == 0 {
        return Err(Error::Dimension("empty snapshot matrix".into()));
    }
    let inv = 1.0 / l as f64;
    let mut r = CMatrix::zeros(n, n);
    for i in 0..n {
        let yi = y.row(i);
        for j in 0..=i {
            let yj = y.row(j);
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, b) in yi.iter().zip(yj) {
                acc += a * b.conj();
            }
            acc *= inv;
            if i == j {
                r[(i, i)] = Complex64::new(acc.re, 0.0);
            } else {
                r[(i, j)] = acc;
                r[(j, i)] = acc.conj();
            }
        }
    }
    Ok(r)
}

/// Averages the entries `[R̂_Ω]_{jl}` with `Ω_j − Ω_l = μ` for each
/// `μ = 0..m−1`.
pub fn da_lags(r_hat: &CMatrix, geom: &SlaGeometry, m: usize) -> Result<LagVector> {
    let omega = geom.positions();
    let ns = omega.len();
    if r_hat.rows() != ns || r_hat.cols() != ns {
        return Err(Error::Dimension(format!(
            "sample covariance is {}x{} but the geometry has {ns} sensors",
            r_hat.rows(),
            r_hat.cols()
        )));
    }
    let mut sums = vec![Complex64::new(0.0, 0.0); m];
    let mut counts = vec![0usize; m];
    for j in 0..ns {
        for l in 0..=j {
            let mu = omega[j] - omega[l];
            if mu < m {
                sums[mu] += r_hat[(j, l)];
                counts[mu] += 1;
            }
        }
    }
    if let Some(missing) = counts.iter().position(|&c| c == 0) {
        return Err(Error::Geometry(format!(
            "lag {missing} is missing from the coarray of {{{geom}}}; cannot augment to M = {m}"
        )));
    }
    let mut lags: Vec<Complex64> = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| s / c as f64)
        .collect();
    if let Some(r0) = lags.first_mut() {
        r0.im = 0.0;
    }
    Ok(LagVector { lags, counts })
}

/// Hermitian Toeplitz matrix with first column `r̂` and conjugate first row.
pub fn da_toeplitz(lags: &LagVector) -> CMatrix {
    let r = &lags.lags;
    let m = r.len();
    CMatrix::from_fn(m, m, |j, l| if j >= l { r[j - l] } else { r[l - j].conj() })
}

/// `R̂_DA² / M`.
pub fn ss_covariance(r_da: &CMatrix) -> Result<CMatrix> {
    if !r_da.is_square() {
        return Err(Error::Dimension(format!(
            "DA covariance must be square, got {}x{}",
            r_da.rows(),
            r_da.cols()
        )));
    }
    let m = r_da.rows();
    // R is Hermitian so R² = Rᴴ·R
    let mut sq = r_da.adjoint_mul(r_da)?.scale(1.0 / m as f64);
    sq.symmetrize();
    Ok(sq)
}
