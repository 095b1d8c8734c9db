//! Synthetic snapshots for uncorrelated Gaussian sources in white Gaussian
//! noise, plus the exact covariances they are drawn from.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::array_model::{canonical_freq, first_duplicate, steering_matrix, unit_phasor, SlaGeometry};
use crate::error::{Error, Result};
use crate::fmath;
use crate::linalg::CMatrix;

/// RNG stream for [`complex_gaussian_matrix`].
pub const STREAM_PLAIN: u64 = 0;
/// RNG stream for source waveforms.
pub const STREAM_SIGNAL: u64 = 1;
/// RNG stream for sensor noise.
pub const STREAM_NOISE: u64 = 2;

/// Frequencies, powers and noise power of `K` uncorrelated sources.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceScene {
    freqs: Vec<f64>,
    powers: Vec<f64>,
    noise_power: f64,
}

impl SourceScene {
    pub fn new(freqs: Vec<f64>, powers: Vec<f64>, noise_power: f64) -> Result<Self> {
        if freqs.is_empty() {
            return Err(Error::Precondition("scene needs at least one source".into()));
        }
        if freqs.len() != powers.len() {
            return Err(Error::Dimension(format!(
                "{} frequencies but {} powers",
                freqs.len(),
                powers.len()
            )));
        }
        if let Some(p) = powers.iter().find(|&&p| !(p > 0.0 && p.is_finite())) {
            return Err(Error::Precondition(format!("source power {p} must be positive")));
        }
        if !(noise_power >= 0.0 && noise_power.is_finite()) {
            return Err(Error::Precondition(format!(
                "noise power {noise_power} must be non-negative"
            )));
        }
        if freqs.iter().any(|f| !f.is_finite()) {
            return Err(Error::Precondition("non-finite frequency".into()));
        }
        let freqs: Vec<f64> = freqs.into_iter().map(canonical_freq).collect();
        if let Some(dup) = first_duplicate(&freqs) {
            return Err(Error::Precondition(format!("duplicate frequency {dup}")));
        }
        Ok(Self {
            freqs,
            powers,
            noise_power,
        })
    }

    /// Unit-power scene with the given frequencies.
    pub fn unit_power(freqs: Vec<f64>, noise_power: f64) -> Result<Self> {
        let k = freqs.len();
        Self::new(freqs, alloc::vec![1.0; k], noise_power)
    }

    /// Eight unit-power sources at `{0.1, 0.25, 0.35, 0.45, 0.6, 0.7, 0.8, 0.9}`.
    pub fn reference(noise_power: f64) -> Self {
        Self::unit_power(REFERENCE_FREQS.to_vec(), noise_power).expect("valid preset")
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    pub fn num_sources(&self) -> usize {
        self.freqs.len()
    }

    pub fn p_min(&self) -> f64 {
        self.powers.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn p_max(&self) -> f64 {
        self.powers.iter().copied().fold(0.0, f64::max)
    }

    pub fn with_noise_power(&self, noise_power: f64) -> Result<Self> {
        Self::new(self.freqs.clone(), self.powers.clone(), noise_power)
    }

    /// Replaces the last frequency with `previous + delta`, the closely
    /// spaced pair used in resolution sweeps.
    pub fn with_trailing_separation(&self, delta: f64) -> Result<Self> {
        let k = self.freqs.len();
        if k < 2 {
            return Err(Error::Precondition(
                "separation sweep needs at least two sources".into(),
            ));
        }
        let mut freqs = self.freqs.clone();
        freqs[k - 1] = freqs[k - 2] + delta;
        Self::new(freqs, self.powers.clone(), self.noise_power)
    }
}

pub const REFERENCE_FREQS: [f64; 8] = [0.1, 0.25, 0.35, 0.45, 0.6, 0.7, 0.8, 0.9];

/// Array output `Y_Ω` with one snapshot per column.
#[derive(Debug, Clone)]
pub struct SnapshotMatrix {
    pub data: CMatrix,
    pub geometry: SlaGeometry,
    pub seed: u64,
}

impl SnapshotMatrix {
    pub fn num_snapshots(&self) -> usize {
        self.data.cols()
    }
}

/// ChaCha8 generator keyed by `seed` on an independent stream.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Per-trial seed that depends only on the base seed and trial index.
pub fn derive_trial_seed(base_seed: u64, trial_index: u64) -> u64 {
    splitmix64(base_seed ^ splitmix64(trial_index.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draws i.i.d. CN(0, 1) entries, filling column by column so that the
/// leading columns do not depend on `cols`.
fn fill_standard_complex(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    let scale = fmath::sqrt(0.5);
    let mut m = CMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            m[(i, j)] = Complex64::new(re * scale, im * scale);
        }
    }
    m
}

/// Matrix of i.i.d. circularly symmetric complex Gaussians with unit
/// variance (real and imaginary parts each N(0, ½)).
pub fn complex_gaussian_matrix(rows: usize, cols: usize, seed: u64) -> Result<CMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::Dimension(format!("empty {rows}x{cols} Gaussian matrix")));
    }
    Ok(fill_standard_complex(&mut stream_rng(seed, STREAM_PLAIN), rows, cols))
}

/// `Y_Ω = A_Ω·S + E_Ω` with `S` columns CN(0, diag(p)) and `E` entries
/// CN(0, σ²), each from its own stream of `seed`.
pub fn sample_snapshots(
    geom: &SlaGeometry,
    scene: &SourceScene,
    snapshots: usize,
    seed: u64,
) -> Result<SnapshotMatrix> {
    if snapshots == 0 {
        return Err(Error::Precondition("need at least one snapshot".into()));
    }
    let a = steering_matrix(geom.positions(), scene.freqs())?;
    let mut s = fill_standard_complex(&mut stream_rng(seed, STREAM_SIGNAL), scene.num_sources(), snapshots);
    for (k, &p) in scene.powers().iter().enumerate() {
        let amp = fmath::sqrt(p);
        for j in 0..snapshots {
            s[(k, j)] *= amp;
        }
    }
    let mut y = a.matmul(&s)?;
    if scene.noise_power() > 0.0 {
        let sigma = fmath::sqrt(scene.noise_power());
        let e = fill_standard_complex(&mut stream_rng(seed, STREAM_NOISE), geom.num_sensors(), snapshots);
        y = y.add(&e.scale(sigma))?;
    }
    Ok(SnapshotMatrix {
        data: y,
        geometry: geom.clone(),
        seed,
    })
}

/// Exact lags `r_0, …, r_{m−1}` of the virtual-ULA covariance.
pub fn true_lags(scene: &SourceScene, m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|j| {
            let mut r = Complex64::new(0.0, 0.0);
            for (&f, &p) in scene.freqs().iter().zip(scene.powers()) {
                r += unit_phasor(j as f64 * f) * p;
            }
            if j == 0 {
                Complex64::new(r.re + scene.noise_power(), 0.0)
            } else {
                r
            }
        })
        .collect()
}

/// `m×m` Hermitian Toeplitz covariance `A_m·diag(p)·A_mᴴ + σ²I` of the
/// first `m` virtual-ULA elements.
pub fn true_covariance_ula(scene: &SourceScene, m: usize) -> Result<CMatrix> {
    if m == 0 {
        return Err(Error::Dimension("covariance order must be >= 1".into()));
    }
    let r = true_lags(scene, m);
    Ok(CMatrix::from_fn(m, m, |j, l| {
        if j >= l {
            r[j - l]
        } else {
            r[l - j].conj()
        }
    }))
}

/// Principal submatrix of `r` on the rows and columns listed in `geom`.
pub fn restrict_covariance(r: &CMatrix, geom: &SlaGeometry) -> Result<CMatrix> {
    let omega = geom.positions();
    let need = omega[omega.len() - 1] + 1;
    if !r.is_square() || r.rows() < need {
        return Err(Error::Dimension(format!(
            "need a square covariance of order >= {need}, got {}x{}",
            r.rows(),
            r.cols()
        )));
    }
    Ok(CMatrix::from_fn(omega.len(), omega.len(), |i, j| r[(omega[i], omega[j])]))
}

/// Exact sensor covariance `R_Ω`.
pub fn true_covariance_sla(scene: &SourceScene, geom: &SlaGeometry) -> Result<CMatrix> {
    let omega = geom.positions();
    restrict_covariance(&true_covariance_ula(scene, omega[omega.len() - 1] + 1)?, geom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn scene_validation() {
        assert!(SourceScene::new(vec![], vec![], 0.0).is_err());
        assert!(SourceScene::new(vec![0.1], vec![0.0], 0.0).is_err());
        assert!(SourceScene::new(vec![0.1], vec![1.0], -1.0).is_err());
        assert!(SourceScene::new(vec![0.1, 1.1], vec![1.0, 1.0], 0.0).is_err());
        let s = SourceScene::new(vec![-0.25], vec![2.0], 0.0).unwrap();
        assert_eq!(s.freqs(), &[0.75]);
    }

    #[test]
    fn trailing_separation() {
        let s = SourceScene::reference(1.0).with_trailing_separation(0.018).unwrap();
        assert!((s.freqs()[7] - 0.818).abs() < 1e-15);
    }

    #[test]
    fn ula_covariance_small_cases() {
        let s = SourceScene::new(vec![0.25], vec![1.0], 0.0).unwrap();
        let r = true_covariance_ula(&s, 2).unwrap();
        let want = [[(1.0, 0.0), (0.0, -1.0)], [(0.0, 1.0), (1.0, 0.0)]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((r[(i, j)] - Complex64::new(want[i][j].0, want[i][j].1)).norm() < 1e-15);
            }
        }
        let s = SourceScene::new(vec![0.1, 0.4], vec![1.5, 0.5], 0.3).unwrap();
        let r = true_covariance_ula(&s, 1).unwrap();
        assert!((r[(0, 0)].re - 2.3).abs() < 1e-15);
    }

    #[test]
    fn restriction_bookkeeping() {
        let s = SourceScene::new(vec![0.1, 0.33], vec![1.0, 2.0], 0.5).unwrap();
        let r = true_covariance_ula(&s, 3).unwrap();
        let g = SlaGeometry::new(vec![0, 2], None).unwrap();
        let sub = restrict_covariance(&r, &g).unwrap();
        let lags = true_lags(&s, 3);
        assert_eq!(sub[(0, 0)], lags[0]);
        assert_eq!(sub[(1, 0)], lags[2]);
        assert_eq!(sub[(0, 1)], lags[2].conj());
        let g = SlaGeometry::new(vec![0, 1, 2], None).unwrap();
        assert_eq!(restrict_covariance(&r, &g).unwrap(), r);
        let g = SlaGeometry::new(vec![0, 5], None).unwrap();
        assert!(restrict_covariance(&r, &g).is_err());
    }

    #[test]
    fn deterministic_draws() {
        let a = complex_gaussian_matrix(3, 4, 7).unwrap();
        let b = complex_gaussian_matrix(3, 4, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, complex_gaussian_matrix(3, 4, 8).unwrap());
        // leading columns are independent of the requested width
        let c = complex_gaussian_matrix(3, 9, 7).unwrap();
        assert_eq!(c.leading_columns(4), a);
    }

    #[test]
    fn trial_seeds_differ() {
        let s: Vec<u64> = (0..100).map(|i| derive_trial_seed(42, i)).collect();
        for i in 0..s.len() {
            assert!(!s[i + 1..].contains(&s[i]));
        }
        assert_ne!(derive_trial_seed(1, 0), derive_trial_seed(2, 0));
    }
}
