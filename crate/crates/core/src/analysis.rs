//! Error metrics and the finite-snapshot error bounds for DA-/SS-ESPRIT.
//!
//! All bounds are evaluated in log space; the power-of-two prefactors reach
//! `2^{4K+20}` and overflow `f64` for moderate `K`. A bound that genuinely
//! exceeds `f64::MAX` comes back as `+∞`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::LN_2;

use crate::array_model::{canonical_freq, steering_matrix, SlaGeometry};
use crate::error::{Error, Result};
use crate::fmath;
use crate::linalg::{singular_values, spectral_norm};
use crate::signal_sim::SourceScene;

/// Largest `K` handled by exhaustive permutation search in
/// [`matched_distance`].
pub const EXHAUSTIVE_MAX_K: usize = 9;

/// `min(|f − g|, 1 − |f − g|)` after reducing both onto `[0, 1)`.
pub fn wraparound_dist(f: f64, g: f64) -> f64 {
    let d = (canonical_freq(f) - canonical_freq(g)).abs();
    d.min(1.0 - d)
}

/// Smallest achievable worst-case wrap-around error over all pairings of
/// `estimate` with `truth`.
pub fn matched_distance(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    check_sizes(estimate, truth)?;
    if estimate.len() <= EXHAUSTIVE_MAX_K {
        matched_distance_exhaustive(estimate, truth)
    } else {
        matched_distance_cyclic(estimate, truth)
    }
}

fn check_sizes(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!(
            "matched distance needs equal set sizes, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// Exact minimum over all `K!` pairings, found by depth-first search that
/// abandons partial pairings already worse than the best complete one.
pub fn matched_distance_exhaustive(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    check_sizes(estimate, truth)?;
    let k = truth.len();
    if k == 0 {
        return Ok(0.0);
    }
    let cost: Vec<f64> = (0..k)
        .flat_map(|i| truth.iter().map(move |&t| (i, t)))
        .map(|(i, t)| wraparound_dist(estimate[i], t))
        .collect();
    let mut used = alloc::vec![false; k];
    let mut best = f64::INFINITY;
    search(&cost, k, 0, 0.0, &mut used, &mut best);
    Ok(best)
}

fn search(cost: &[f64], k: usize, row: usize, worst: f64, used: &mut [bool], best: &mut f64) {
    if row == k {
        if worst < *best {
            *best = worst;
        }
        return;
    }
    for col in 0..k {
        if used[col] {
            continue;
        }
        let w = worst.max(cost[row * k + col]);
        if w >= *best {
            continue;
        }
        used[col] = true;
        search(cost, k, row + 1, w, used, best);
        used[col] = false;
    }
}

/// Sorts both sets around the circle and tries the `K` cyclic alignments.
pub fn matched_distance_cyclic(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    check_sizes(estimate, truth)?;
    let k = truth.len();
    if k == 0 {
        return Ok(0.0);
    }
    let mut a: Vec<f64> = estimate.iter().map(|&f| canonical_freq(f)).collect();
    let mut b: Vec<f64> = truth.iter().map(|&f| canonical_freq(f)).collect();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let best = (0..k)
        .map(|shift| {
            (0..k)
                .map(|i| wraparound_dist(a[(i + shift) % k], b[i]))
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min);
    Ok(best)
}

/// Minimum pairwise wrap-around separation.
pub fn min_separation(freqs: &[f64]) -> Result<f64> {
    if freqs.len() < 2 {
        return Err(Error::Precondition(
            "separation needs at least two frequencies".into(),
        ));
    }
    let mut best = f64::INFINITY;
    for (i, &f) in freqs.iter().enumerate() {
        for &g in &freqs[i + 1..] {
            best = best.min(wraparound_dist(f, g));
        }
    }
    Ok(best)
}

/// Problem constants entering the error bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundIngredients {
    /// `σ_K(A_M)`, K-th singular value of the `M×K` virtual-ULA steering matrix.
    pub sigma_k_am: f64,
    /// `‖A_Ω‖`.
    pub norm_a_omega: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub num_sensors: usize,
    pub m: usize,
    pub k: usize,
    /// Snapshot count; real-valued so threshold computations can be fed back.
    pub snapshots: f64,
    pub noise_power: f64,
}

impl BoundIngredients {
    /// Computes the steering-matrix constants numerically by SVD.
    pub fn compute(geom: &SlaGeometry, scene: &SourceScene, snapshots: f64) -> Result<Self> {
        let m = geom.coarray().m_contig;
        let k = scene.num_sources();
        let virtual_idx: Vec<usize> = (0..m).collect();
        let a_m = steering_matrix(&virtual_idx, scene.freqs())?;
        let sv = singular_values(&a_m)?;
        // K > M leaves A_M rank-deficient: σ_K = 0
        let sigma_k_am = sv.get(k - 1).copied().unwrap_or(0.0);
        let a_omega = steering_matrix(geom.positions(), scene.freqs())?;
        Ok(Self {
            sigma_k_am,
            norm_a_omega: spectral_norm(&a_omega)?,
            p_min: scene.p_min(),
            p_max: scene.p_max(),
            num_sensors: geom.num_sensors(),
            m,
            k,
            snapshots,
            noise_power: scene.noise_power(),
        })
    }

    pub fn with_snapshots(mut self, snapshots: f64) -> Self {
        self.snapshots = snapshots;
        self
    }

    /// `p_max·‖A_Ω‖²`, the source contribution to `‖R_Ω‖`.
    pub fn signal_scale(&self) -> f64 {
        self.p_max * self.norm_a_omega * self.norm_a_omega
    }

    fn require_positive(&self) -> Result<()> {
        let named = [
            ("sigma_K(A_M)", self.sigma_k_am),
            ("||A_Omega||", self.norm_a_omega),
            ("p_min", self.p_min),
            ("p_max", self.p_max),
            ("L", self.snapshots),
        ];
        if let Some((name, v)) = named.iter().find(|(_, v)| v.partial_cmp(&0.0) != Some(core::cmp::Ordering::Greater)) {
            return Err(Error::Precondition(format!("{name} = {v} must be positive")));
        }
        Ok(())
    }
}

/// Upper bound on the subspace distance of the DA (and SS) signal subspace:
/// `16·N_S·√M / (p_min·σ_K²(A_M)) · (p_max‖A_Ω‖² + σ²)/√L`.
///
/// Requires `L ≥ N_S` and `M ≥ K + 1`.
pub fn subspace_error_bound(ing: &BoundIngredients) -> Result<f64> {
    if ing.snapshots < ing.num_sensors as f64 {
        return Err(Error::Precondition(format!(
            "subspace bound needs L >= N_S = {}, got L = {}",
            ing.num_sensors, ing.snapshots
        )));
    }
    if ing.m < ing.k + 1 {
        return Err(Error::Capability { k: ing.k, m: ing.m });
    }
    ing.require_positive()?;
    let log = fmath::ln(16.0) + fmath::ln(ing.num_sensors as f64) + 0.5 * fmath::ln(ing.m as f64)
        - fmath::ln(ing.p_min)
        - 2.0 * fmath::ln(ing.sigma_k_am)
        + fmath::ln(ing.signal_scale() + ing.noise_power)
        - 0.5 * fmath::ln(ing.snapshots);
    Ok(fmath::exp(log))
}

/// The matched-distance bound before clamping at 1:
/// `2^{2K+9}·N_S·M·√K³ / (p_min·σ_K³(A_M)) · max{σ², p_max‖A_Ω‖²}/√L`.
pub fn md_bound_unclamped(ing: &BoundIngredients) -> f64 {
    if ing.m < ing.k + 1 || ing.require_positive().is_err() {
        return f64::INFINITY;
    }
    let k = ing.k as f64;
    let log = (2.0 * k + 9.0) * LN_2
        + fmath::ln(ing.num_sensors as f64)
        + fmath::ln(ing.m as f64)
        + 1.5 * fmath::ln(k)
        - fmath::ln(ing.p_min)
        - 3.0 * fmath::ln(ing.sigma_k_am)
        + fmath::ln(ing.noise_power.max(ing.signal_scale()))
        - 0.5 * fmath::ln(ing.snapshots);
    fmath::exp(log)
}

/// High-probability matched-distance bound for DA-/SS-ESPRIT, clamped to 1.
pub fn md_bound(ing: &BoundIngredients) -> f64 {
    md_bound_unclamped(ing).min(1.0)
}

/// Snapshot count above which the matched-distance bound drops below `Δ/2`:
/// `2^{4K+20}·N_S²·M²·K³ / (p_min²·σ_K⁶(A_M)·Δ²) · max{σ⁴, p_max²‖A_Ω‖⁴}`.
pub fn resolution_snapshots(ing: &BoundIngredients, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::Precondition(format!(
            "separation {delta} must lie in (0, 0.5]"
        )));
    }
    if ing.m < ing.k + 1 {
        return Err(Error::Capability { k: ing.k, m: ing.m });
    }
    let k = ing.k as f64;
    let scale = ing.noise_power.max(ing.signal_scale());
    let log = (4.0 * k + 20.0) * LN_2
        + 2.0 * fmath::ln(ing.num_sensors as f64)
        + 2.0 * fmath::ln(ing.m as f64)
        + 3.0 * fmath::ln(k)
        - 2.0 * fmath::ln(ing.p_min)
        - 6.0 * fmath::ln(ing.sigma_k_am)
        - 2.0 * fmath::ln(delta)
        + 2.0 * fmath::ln(scale);
    Ok(fmath::exp(log))
}

/// Gaussian sample-covariance deviation bound
/// `(2(√(p/n) + u) + (√(p/n) + u)²)·‖Σ‖`, holding with probability at least
/// [`gauss_cov_confidence`]`(n, u)`.
pub fn gauss_cov_bound(p: usize, n: usize, u: f64, sigma_norm: f64) -> f64 {
    let x = fmath::sqrt(p as f64 / n as f64) + u;
    (2.0 * x + x * x) * sigma_norm
}

/// `1 − 2·exp(−n·u²/2)`.
pub fn gauss_cov_confidence(n: usize, u: f64) -> f64 {
    1.0 - 2.0 * fmath::exp(-0.5 * n as f64 * u * u)
}

/// `8·√(N_S/L)·(p_max‖A_Ω‖² + σ²)`, the sample covariance error bound for
/// `L ≥ N_S`.
pub fn sample_covariance_bound(ing: &BoundIngredients) -> f64 {
    8.0 * fmath::sqrt(ing.num_sensors as f64 / ing.snapshots) * (ing.signal_scale() + ing.noise_power)
}

/// `√(M·N_S)`: worst-case amplification from the sensor covariance error to
/// the augmented Toeplitz error.
pub fn da_error_amplification(m: usize, num_sensors: usize) -> f64 {
    fmath::sqrt((m * num_sensors) as f64)
}

/// Factor `2^{2K+4}·√(K³N)/σ_K(A)` converting a subspace distance into a
/// matched-distance bound for ESPRIT on an `N`-element ULA.
pub fn md_per_subspace_dist(k: usize, n: usize, sigma_k_a: f64) -> f64 {
    let kf = k as f64;
    fmath::exp(
        (2.0 * kf + 4.0) * LN_2 + 0.5 * (3.0 * fmath::ln(kf) + fmath::ln(n as f64)) - fmath::ln(sigma_k_a),
    )
}

/// `1 − 2·exp(−N_S/2)`.
pub fn probability_floor(num_sensors: usize) -> f64 {
    1.0 - 2.0 * fmath::exp(-0.5 * num_sensors as f64)
}

/// Every bound for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub subspace_bound: f64,
    pub md_bound: f64,
    pub md_bound_unclamped: f64,
    pub probability_floor: f64,
    /// Snapshot threshold for resolving `delta`, when one was requested.
    pub resolution: Option<(f64, f64)>,
    pub ingredients: BoundIngredients,
}

impl BoundReport {
    pub fn new(ing: BoundIngredients, delta: Option<f64>) -> Result<Self> {
        let resolution = match delta {
            Some(d) => Some((d, resolution_snapshots(&ing, d)?)),
            None => None,
        };
        Ok(Self {
            subspace_bound: subspace_error_bound(&ing)?,
            md_bound: md_bound(&ing),
            md_bound_unclamped: md_bound_unclamped(&ing),
            probability_floor: probability_floor(ing.num_sensors),
            resolution,
            ingredients: ing,
        })
    }

    /// Flat `(key, value)` view in a fixed order.
    pub fn fields(&self) -> Vec<(&'static str, f64)> {
        let ing = &self.ingredients;
        let mut out = alloc::vec![
            ("subspace_bound", self.subspace_bound),
            ("md_bound", self.md_bound),
            ("md_bound_unclamped", self.md_bound_unclamped),
            ("probability_floor", self.probability_floor),
            ("sigma_K_A_M", ing.sigma_k_am),
            ("norm_A_Omega", ing.norm_a_omega),
            ("p_min", ing.p_min),
            ("p_max", ing.p_max),
            ("N_S", ing.num_sensors as f64),
            ("M", ing.m as f64),
            ("K", ing.k as f64),
            ("L", ing.snapshots),
            ("sigma2", ing.noise_power),
        ];
        if let Some((d, l)) = self.resolution {
            out.push(("delta", d));
            out.push(("resolution_snapshots", l));
        }
        out
    }
}
