//! Flat `key = value` experiment configuration.
//!
//! Keys may be written with `_` or `-`. Lists are comma-separated. Lines
//! starting with `#` are comments.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sla_esprit::signal_sim::REFERENCE_FREQS;
use sla_esprit::{SlaGeometry, SourceScene, Variant};

use crate::error::ConfigError;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "SLA_ESPRIT_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "results";
pub const DEFAULT_TRIALS: usize = 200;
pub const DEFAULT_SEED: u64 = 20_240_501;

/// Every recognised key in canonical (underscore) spelling.
pub const KEYS: &[&str] = &[
    "experiment_id",
    "omega",
    "n_virtual",
    "freqs",
    "powers",
    "variant",
    "l_grid",
    "sigma_grid",
    "sigma2_grid",
    "delta_grid",
    "trials",
    "base_seed",
    "output_path",
    "threads",
    "record_timing",
    "emit_plot_data",
    "plot_x",
];

/// Which estimators a sweep runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariantSelection {
    Da,
    Ss,
    Both,
}

impl VariantSelection {
    pub fn variants(self) -> &'static [Variant] {
        match self {
            VariantSelection::Da => &[Variant::Da],
            VariantSelection::Ss => &[Variant::Ss],
            VariantSelection::Both => &[Variant::Da, Variant::Ss],
        }
    }
}

impl FromStr for VariantSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "da" => Ok(VariantSelection::Da),
            "ss" => Ok(VariantSelection::Ss),
            "both" => Ok(VariantSelection::Both),
            other => Err(format!("expected DA, SS or both, got `{other}`")),
        }
    }
}

impl fmt::Display for VariantSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VariantSelection::Da => "DA",
            VariantSelection::Ss => "SS",
            VariantSelection::Both => "both",
        })
    }
}

/// Abscissa of the plot-data files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotAxis {
    Snapshots,
    Sigma2,
    Delta,
}

impl FromStr for PlotAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "l" | "snapshots" => Ok(PlotAxis::Snapshots),
            "sigma2" => Ok(PlotAxis::Sigma2),
            "delta" => Ok(PlotAxis::Delta),
            other => Err(format!("expected L, sigma2 or delta, got `{other}`")),
        }
    }
}

/// A validated sweep description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment_id: String,
    pub geometry: SlaGeometry,
    /// Source template; its noise power is replaced at each grid point.
    pub scene: SourceScene,
    pub variant: VariantSelection,
    pub l_grid: Vec<usize>,
    /// Noise standard deviations σ.
    pub sigma_grid: Vec<f64>,
    /// Separations for resolution sweeps; each replaces the last frequency.
    pub delta_grid: Option<Vec<f64>>,
    pub trials: usize,
    pub base_seed: u64,
    pub output_path: PathBuf,
    /// Worker count; `None` uses all available cores.
    pub threads: Option<usize>,
    /// When false, `elapsed_ms` is written as 0 so reruns are byte-identical.
    pub record_timing: bool,
    pub emit_plot_data: bool,
    pub plot_x: PlotAxis,
}

impl ExperimentConfig {
    pub fn num_sources(&self) -> usize {
        self.scene.num_sources()
    }
}

/// Accumulates settings from presets, files and flags before validation.
#[derive(Debug, Clone)]
pub struct ConfigBuilder {
    experiment_id: String,
    omega: Vec<usize>,
    n_virtual: Option<usize>,
    freqs: Vec<f64>,
    powers: Option<Vec<f64>>,
    variant: VariantSelection,
    l_grid: Vec<usize>,
    sigma_grid: Vec<f64>,
    delta_grid: Option<Vec<f64>>,
    trials: usize,
    base_seed: u64,
    output_path: Option<PathBuf>,
    threads: Option<usize>,
    record_timing: bool,
    emit_plot_data: bool,
    plot_x: PlotAxis,
}

impl Default for ConfigBuilder {
    fn default() -> Self {
        Self {
            experiment_id: "sweep".into(),
            omega: SlaGeometry::mra6().positions().to_vec(),
            n_virtual: None,
            freqs: REFERENCE_FREQS.to_vec(),
            powers: None,
            variant: VariantSelection::Da,
            l_grid: vec![1000],
            sigma_grid: vec![1.0],
            delta_grid: None,
            trials: DEFAULT_TRIALS,
            base_seed: DEFAULT_SEED,
            output_path: None,
            threads: None,
            record_timing: true,
            emit_plot_data: false,
            plot_x: PlotAxis::Snapshots,
        }
    }
}

/// Maps `l-grid` and `L_grid` to `l_grid`.
pub fn canonical_key(key: &str) -> String {
    key.trim().replace('-', "_").to_ascii_lowercase()
}

fn invalid(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.into(),
        value: value.into(),
        reason: reason.into(),
    }
}

fn parse_one<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.trim().parse::<T>().map_err(|e| invalid(key, value, e.to_string()))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: fmt::Display,
{
    if value.trim().is_empty() {
        return Err(invalid(key, value, "list is empty"));
    }
    value.split(',').map(|tok| parse_one(key, tok)).collect()
}

/// Snapshot counts accept real notation (`1e4`) but must be whole.
fn parse_counts(key: &str, value: &str) -> Result<Vec<usize>, ConfigError> {
    parse_list::<f64>(key, value)?
        .into_iter()
        .map(|x| {
            if x >= 1.0 && x.fract() == 0.0 && x < u32::MAX as f64 {
                Ok(x as usize)
            } else {
                Err(invalid(key, value, format!("{x} is not a positive whole number")))
            }
        })
        .collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(invalid(key, value, "expected true or false")),
    }
}

impl ConfigBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<&mut Self, ConfigError> {
        let key = canonical_key(key);
        let k = key.as_str();
        match k {
            "experiment_id" => {
                let id = value.trim();
                if id.is_empty() || id.contains(['/', '\\']) {
                    return Err(invalid(k, value, "must be a non-empty name without path separators"));
                }
                self.experiment_id = id.into();
            }
            "omega" => self.omega = parse_list(k, value)?,
            "n_virtual" => self.n_virtual = Some(parse_one(k, value)?),
            "freqs" => self.freqs = parse_list(k, value)?,
            "powers" => self.powers = Some(parse_list(k, value)?),
            "variant" => self.variant = parse_one(k, value)?,
            "l_grid" => self.l_grid = parse_counts(k, value)?,
            "sigma_grid" => self.sigma_grid = parse_list(k, value)?,
            "sigma2_grid" => {
                let s2: Vec<f64> = parse_list(k, value)?;
                if let Some(bad) = s2.iter().find(|v| v.is_nan() || **v < 0.0) {
                    return Err(invalid(k, value, format!("noise power {bad} is negative")));
                }
                self.sigma_grid = s2.into_iter().map(f64::sqrt).collect();
            }
            "delta_grid" => {
                self.delta_grid = match value.trim().to_ascii_lowercase().as_str() {
                    "" | "none" => None,
                    _ => Some(parse_list(k, value)?),
                }
            }
            "trials" => self.trials = parse_one(k, value)?,
            "base_seed" => self.base_seed = parse_one(k, value)?,
            "output_path" => self.output_path = Some(PathBuf::from(value.trim())),
            "threads" => {
                let n: usize = parse_one(k, value)?;
                self.threads = if n == 0 { None } else { Some(n) };
            }
            "record_timing" => self.record_timing = parse_bool(k, value)?,
            "emit_plot_data" => self.emit_plot_data = parse_bool(k, value)?,
            "plot_x" => self.plot_x = parse_one(k, value)?,
            _ => return Err(ConfigError::UnknownKey(key)),
        }
        Ok(self)
    }

    /// Applies every setting in a config text.
    pub fn load_str(&mut self, text: &str) -> Result<&mut Self, ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            if key.trim().is_empty() {
                return Err(ConfigError::Syntax {
                    line: i + 1,
                    message: "missing key".into(),
                });
            }
            self.set(key, value).map_err(|e| match e {
                ConfigError::UnknownKey(_) | ConfigError::InvalidValue { .. } => ConfigError::Syntax {
                    line: i + 1,
                    message: e.to_string(),
                },
                other => other,
            })?;
        }
        Ok(self)
    }

    pub fn load_file(&mut self, path: &Path) -> Result<&mut Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        self.load_str(&text)
    }

    /// Validates the accumulated settings.
    pub fn build(&self) -> Result<ExperimentConfig, ConfigError> {
        let geometry = SlaGeometry::new(self.omega.clone(), self.n_virtual).map_err(ConfigError::Geometry)?;
        let powers = self.powers.clone().unwrap_or_else(|| vec![1.0; self.freqs.len()]);
        let scene = SourceScene::new(self.freqs.clone(), powers, 0.0)
            .map_err(|e| ConfigError::Invalid(format!("source scene: {e}")))?;
        let m = geometry.coarray().m_contig;
        if scene.num_sources() + 1 > m {
            return Err(ConfigError::Invalid(format!(
                "{} sources need a contiguous aperture of at least {}, the geometry has M = {m}",
                scene.num_sources(),
                scene.num_sources() + 1
            )));
        }
        if self.trials == 0 {
            return Err(ConfigError::Invalid("trials must be at least 1".into()));
        }
        if self.l_grid.is_empty() || self.sigma_grid.is_empty() {
            return Err(ConfigError::Invalid("grids must be non-empty".into()));
        }
        if let Some(s) = self.sigma_grid.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
            return Err(ConfigError::Invalid(format!("noise level {s} must be finite and non-negative")));
        }
        if let Some(grid) = &self.delta_grid {
            if grid.is_empty() {
                return Err(ConfigError::Invalid("delta grid is empty".into()));
            }
            for &d in grid {
                if !(d > 0.0 && d <= 0.5) {
                    return Err(ConfigError::Invalid(format!("separation {d} outside (0, 0.5]")));
                }
                scene
                    .with_trailing_separation(d)
                    .map_err(|e| ConfigError::Invalid(format!("separation {d}: {e}")))?;
            }
        }
        if self.plot_x == PlotAxis::Delta && self.delta_grid.is_none() {
            return Err(ConfigError::Invalid("plot_x = delta needs a delta grid".into()));
        }
        let output_path = self.output_path.clone().unwrap_or_else(|| {
            let dir = std::env::var_os(OUT_DIR_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
            dir.join(format!("{}.csv", self.experiment_id))
        });
        Ok(ExperimentConfig {
            experiment_id: self.experiment_id.clone(),
            geometry,
            scene,
            variant: self.variant,
            l_grid: self.l_grid.clone(),
            sigma_grid: self.sigma_grid.clone(),
            delta_grid: self.delta_grid.clone(),
            trials: self.trials,
            base_seed: self.base_seed,
            output_path,
            threads: self.threads,
            record_timing: self.record_timing,
            emit_plot_data: self.emit_plot_data,
            plot_x: self.plot_x,
        })
    }
}

/// Half-decade snapshot grid `round(10^(k/2))` from `10^lo` to `10^hi`.
pub fn half_decade_grid(lo: u32, hi: u32) -> Vec<usize> {
    (2 * lo..=2 * hi)
        .map(|k| 10f64.powf(k as f64 / 2.0).round() as usize)
        .collect()
}

/// Snapshot-sweep preset: four noise levels, L from 10 (or 1) to 10⁴.
pub fn exp1_preset(full_range: bool) -> ConfigBuilder {
    ConfigBuilder {
        experiment_id: "exp1".into(),
        l_grid: half_decade_grid(if full_range { 0 } else { 1 }, 4),
        sigma_grid: vec![0.0, 0.3, 1.0, 3.0],
        ..ConfigBuilder::default()
    }
}

/// Noise sweep preset: σ² from 10⁻² to 10² at L ∈ {10², 10³, 10⁴}.
pub fn exp2_preset() -> ConfigBuilder {
    ConfigBuilder {
        experiment_id: "exp2".into(),
        l_grid: vec![100, 1000, 10_000],
        sigma_grid: (-4..=4).map(|k| 10f64.powf(k as f64 / 4.0)).collect(),
        plot_x: PlotAxis::Sigma2,
        ..ConfigBuilder::default()
    }
}

/// Separation sweep preset: σ = 1, last frequency moved to `0.8 + Δ`.
pub fn exp3_preset() -> ConfigBuilder {
    ConfigBuilder {
        experiment_id: "exp3".into(),
        l_grid: half_decade_grid(1, 4),
        sigma_grid: vec![1.0],
        delta_grid: Some(vec![0.018, 0.036, 0.071, 0.143]),
        ..ConfigBuilder::default()
    }
}
