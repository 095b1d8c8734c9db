//! One Monte Carlo trial at one grid point.

use std::time::Instant;

use sla_esprit::analysis::{matched_distance, md_bound, md_bound_unclamped, BoundIngredients};
use sla_esprit::esprit::{da_ss_share_subspace, esprit_freqs, estimate_from_covariance, signal_subspace_with_eig};
use sla_esprit::signal_sim::{derive_trial_seed, sample_snapshots};
use sla_esprit::{CovarianceSet, SourceScene, Variant};

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::format::fmt_g;

/// Matched distance recorded for a trial whose estimator failed.
pub const FAILED_TRIAL_MD: f64 = 0.5;

/// Column names of the per-trial CSV, in order.
pub const CSV_HEADER: [&str; 12] = [
    "experiment_id",
    "variant",
    "L",
    "sigma2",
    "delta",
    "trial",
    "seed",
    "md",
    "md_bound",
    "da_ss_equal",
    "error_flag",
    "elapsed_ms",
];

/// A single `(L, σ, Δ)` combination with its scene and bound precomputed.
#[derive(Debug, Clone)]
pub struct GridPoint {
    pub index: usize,
    pub snapshots: usize,
    pub sigma: f64,
    pub delta: Option<f64>,
    pub scene: SourceScene,
    pub md_bound: f64,
    pub md_bound_unclamped: f64,
}

impl GridPoint {
    pub fn new(
        config: &ExperimentConfig,
        index: usize,
        snapshots: usize,
        sigma: f64,
        delta: Option<f64>,
    ) -> Result<Self> {
        let mut scene = config.scene.with_noise_power(sigma * sigma)?;
        if let Some(d) = delta {
            scene = scene.with_trailing_separation(d)?;
        }
        let ing = BoundIngredients::compute(&config.geometry, &scene, snapshots as f64)?;
        Ok(Self {
            index,
            snapshots,
            sigma,
            delta,
            scene,
            md_bound: md_bound(&ing),
            md_bound_unclamped: md_bound_unclamped(&ing),
        })
    }

    pub fn sigma2(&self) -> f64 {
        self.scene.noise_power()
    }
}

/// One row of the per-trial CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub experiment_id: String,
    pub variant: Variant,
    pub point: usize,
    pub snapshots: usize,
    pub sigma2: f64,
    pub delta: Option<f64>,
    pub trial: usize,
    pub seed: u64,
    pub md: f64,
    pub md_bound: f64,
    /// Whether `λ_K > |λ_M|` held for the DA estimate of this trial.
    pub da_ss_equal: bool,
    pub error: bool,
    pub elapsed_ms: f64,
}

impl TrialResult {
    pub fn csv_record(&self) -> [String; 12] {
        [
            self.experiment_id.clone(),
            self.variant.as_str().into(),
            self.snapshots.to_string(),
            fmt_g(self.sigma2),
            fmt_g(self.delta.unwrap_or(f64::NAN)),
            self.trial.to_string(),
            self.seed.to_string(),
            fmt_g(self.md),
            fmt_g(self.md_bound),
            u8::from(self.da_ss_equal).to_string(),
            u8::from(self.error).to_string(),
            fmt_g(self.elapsed_ms),
        ]
    }
}

fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Simulates one snapshot block and evaluates every configured variant on
/// it. The seed depends only on the base seed and `trial_index`, so the
/// same noise realisation is reused across grid points.
pub fn run_trial(config: &ExperimentConfig, point: &GridPoint, trial_index: usize) -> Vec<TrialResult> {
    let seed = derive_trial_seed(config.base_seed, trial_index as u64);
    let k = point.scene.num_sources();
    let truth = point.scene.freqs();
    let start = Instant::now();
    let cov = sample_snapshots(&config.geometry, &point.scene, point.snapshots, seed)
        .and_then(|y| CovarianceSet::from_snapshots(&y));
    let da = cov.as_ref().ok().and_then(|c| signal_subspace_with_eig(&c.r_da_hat, k).ok());
    let da_ss_equal = da.as_ref().is_some_and(|(_, eig)| da_ss_share_subspace(eig, k));
    let shared_ms = millis(start);

    config
        .variant
        .variants()
        .iter()
        .map(|&variant| {
            let start = Instant::now();
            let est = match (&cov, variant, &da) {
                (Ok(_), Variant::Da, Some((u, _))) => esprit_freqs(u),
                (Ok(c), _, _) => estimate_from_covariance(c, k, variant),
                (Err(e), _, _) => Err(e.clone()),
            };
            let md = est.and_then(|e| matched_distance(&e.freqs, truth));
            let elapsed = if config.record_timing { shared_ms + millis(start) } else { 0.0 };
            TrialResult {
                experiment_id: config.experiment_id.clone(),
                variant,
                point: point.index,
                snapshots: point.snapshots,
                sigma2: point.sigma2(),
                delta: point.delta,
                trial: trial_index,
                seed,
                md: md.as_ref().copied().unwrap_or(FAILED_TRIAL_MD),
                md_bound: point.md_bound,
                da_ss_equal,
                error: md.is_err(),
                elapsed_ms: elapsed,
            }
        })
        .collect()
}
