//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use sla_esprit::analysis::{matched_distance, md_bound, BoundIngredients, BoundReport};
use sla_esprit::esprit::{da_ss_share_subspace, estimate_from_covariance, signal_subspace_with_eig};
use sla_esprit::signal_sim::{sample_snapshots, REFERENCE_FREQS};
use sla_esprit::{CovarianceSet, SlaGeometry, SourceScene};

use crate::config::{self, ConfigBuilder, ExperimentConfig, PlotAxis, VariantSelection};
use crate::error::{ConfigError, HarnessError, Result};
use crate::fit::fit_loglog_slope;
use crate::format::{fmt_g, fmt_list, write_bound_report, write_complex_matrix};
use crate::sweep::{plot_curves, run_sweep};

#[derive(Debug, Parser)]
#[command(name = "sla-esprit", version, about = "DA-/SS-ESPRIT on sparse linear arrays")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the coarray, contiguous aperture and steering-matrix norms.
    Geometry(SceneArgs),
    /// Run one trial and print the estimates next to the truth.
    Simulate(SimulateArgs),
    /// Run a Monte Carlo sweep described by a config file and flags.
    Sweep(SweepArgs),
    /// Print every error bound for one configuration.
    Bound(BoundArgs),
    /// Snapshot sweep at four noise levels.
    Exp1(Exp1Args),
    /// Noise sweep at three snapshot counts.
    Exp2(Overrides),
    /// Frequency-separation sweep at unit noise.
    Exp3(Overrides),
}

#[derive(Debug, Args)]
pub struct SceneArgs {
    /// Sensor positions, comma-separated.
    #[arg(long, default_value = "0,1,6,9,11,13")]
    pub omega: String,
    #[arg(long, alias = "n_virtual")]
    pub n_virtual: Option<usize>,
    /// Normalised frequencies in [0, 1).
    #[arg(long)]
    pub freqs: Option<String>,
    /// Source powers, unit by default.
    #[arg(long)]
    pub powers: Option<String>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scene: SceneArgs,
    /// Snapshot count.
    #[arg(long = "snapshots", short = 'L', default_value_t = 1000)]
    pub snapshots: usize,
    /// Noise standard deviation.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = config::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value = "both")]
    pub variant: VariantSelection,
    /// Also write the DA covariance estimate to this file.
    #[arg(long)]
    pub dump_cov: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub scene: SceneArgs,
    #[arg(long = "snapshots", short = 'L', default_value_t = 1e4)]
    pub snapshots: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Separation for the resolution threshold.
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Args)]
pub struct Exp1Args {
    /// Start the snapshot grid at L = 1 instead of 10.
    #[arg(long)]
    pub full_range: bool,
    #[command(flatten)]
    pub overrides: Overrides,
}

/// One flag per config key; each replaces the file or preset value.
#[derive(Debug, Args, Default)]
pub struct Overrides {
    #[arg(long, alias = "experiment_id")]
    pub experiment_id: Option<String>,
    #[arg(long)]
    pub omega: Option<String>,
    #[arg(long, alias = "n_virtual")]
    pub n_virtual: Option<String>,
    #[arg(long)]
    pub freqs: Option<String>,
    #[arg(long)]
    pub powers: Option<String>,
    #[arg(long)]
    pub variant: Option<String>,
    #[arg(long, alias = "l_grid")]
    pub l_grid: Option<String>,
    #[arg(long, alias = "sigma_grid")]
    pub sigma_grid: Option<String>,
    #[arg(long, alias = "sigma2_grid")]
    pub sigma2_grid: Option<String>,
    #[arg(long, alias = "delta_grid")]
    pub delta_grid: Option<String>,
    #[arg(long)]
    pub trials: Option<String>,
    #[arg(long, alias = "base_seed")]
    pub base_seed: Option<String>,
    #[arg(long, alias = "output_path")]
    pub output_path: Option<String>,
    #[arg(long)]
    pub threads: Option<String>,
    #[arg(long, alias = "record_timing")]
    pub record_timing: Option<String>,
    #[arg(long, alias = "emit_plot_data", num_args = 0..=1, default_missing_value = "true")]
    pub emit_plot_data: Option<String>,
    #[arg(long, alias = "plot_x")]
    pub plot_x: Option<String>,
}

impl Overrides {
    pub fn apply(&self, b: &mut ConfigBuilder) -> std::result::Result<(), ConfigError> {
        let pairs = [
            ("experiment_id", &self.experiment_id),
            ("omega", &self.omega),
            ("n_virtual", &self.n_virtual),
            ("freqs", &self.freqs),
            ("powers", &self.powers),
            ("variant", &self.variant),
            ("l_grid", &self.l_grid),
            ("sigma_grid", &self.sigma_grid),
            ("sigma2_grid", &self.sigma2_grid),
            ("delta_grid", &self.delta_grid),
            ("trials", &self.trials),
            ("base_seed", &self.base_seed),
            ("output_path", &self.output_path),
            ("threads", &self.threads),
            ("record_timing", &self.record_timing),
            ("emit_plot_data", &self.emit_plot_data),
            ("plot_x", &self.plot_x),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                b.set(key, v)?;
            }
        }
        Ok(())
    }
}

fn parse_reals(key: &str, text: &str) -> std::result::Result<Vec<f64>, ConfigError> {
    text.split(',')
        .map(|t| {
            t.trim().parse::<f64>().map_err(|e| ConfigError::InvalidValue {
                key: key.into(),
                value: text.into(),
                reason: e.to_string(),
            })
        })
        .collect()
}

impl SceneArgs {
    fn build(&self, noise_power: f64) -> Result<(SlaGeometry, SourceScene)> {
        let geom = SlaGeometry::parse(&self.omega, self.n_virtual).map_err(ConfigError::Geometry)?;
        let freqs = match &self.freqs {
            Some(f) => parse_reals("freqs", f)?,
            None => REFERENCE_FREQS.to_vec(),
        };
        let powers = match &self.powers {
            Some(p) => parse_reals("powers", p)?,
            None => vec![1.0; freqs.len()],
        };
        let scene = SourceScene::new(freqs, powers, noise_power)
            .map_err(|e| ConfigError::Invalid(format!("source scene: {e}")))?;
        Ok((geom, scene))
    }
}

fn io(e: std::io::Error) -> HarnessError {
    HarnessError::Output {
        path: PathBuf::from("<stdout>"),
        source: e,
    }
}

fn geometry(args: &SceneArgs, out: &mut dyn Write) -> Result<()> {
    let (geom, scene) = args.build(0.0)?;
    let ca = geom.coarray();
    let diffs: Vec<String> = ca.differences.iter().map(|d| d.to_string()).collect();
    writeln!(out, "positions = {geom}").map_err(io)?;
    writeln!(out, "N_S = {}", geom.num_sensors()).map_err(io)?;
    writeln!(out, "n_virtual = {}", geom.n_virtual()).map_err(io)?;
    writeln!(out, "coarray = {}", diffs.join(",")).map_err(io)?;
    writeln!(out, "M = {}", ca.m_contig).map_err(io)?;
    writeln!(out, "K = {}", scene.num_sources()).map_err(io)?;
    if scene.num_sources() < ca.m_contig {
        let ing = BoundIngredients::compute(&geom, &scene, 1.0)?;
        writeln!(out, "sigma_K_A_M = {}", fmt_g(ing.sigma_k_am)).map_err(io)?;
        writeln!(out, "norm_A_Omega = {}", fmt_g(ing.norm_a_omega)).map_err(io)?;
    } else {
        writeln!(out, "# K >= M: these sources cannot be resolved by this array").map_err(io)?;
    }
    Ok(())
}

fn simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    if !(args.sigma >= 0.0 && args.sigma.is_finite()) {
        return Err(ConfigError::Invalid(format!("sigma {} must be non-negative", args.sigma)).into());
    }
    let (geom, scene) = args.scene.build(args.sigma * args.sigma)?;
    let k = scene.num_sources();
    let y = sample_snapshots(&geom, &scene, args.snapshots, args.seed)?;
    let cov = CovarianceSet::from_snapshots(&y)?;
    if let Some(path) = &args.dump_cov {
        let mut f = std::fs::File::create(path).map_err(|source| HarnessError::Output {
            path: path.clone(),
            source,
        })?;
        write_complex_matrix(&mut f, &cov.r_da_hat).map_err(|source| HarnessError::Output {
            path: path.clone(),
            source,
        })?;
    }
    let ing = BoundIngredients::compute(&geom, &scene, args.snapshots as f64)?;
    let mut truth = scene.freqs().to_vec();
    truth.sort_by(f64::total_cmp);
    writeln!(out, "truth = {}", fmt_list(&truth)).map_err(io)?;
    writeln!(out, "md_bound = {}", fmt_g(md_bound(&ing))).map_err(io)?;
    let (_, eig) = signal_subspace_with_eig(&cov.r_da_hat, k)?;
    writeln!(out, "da_ss_equal = {}", u8::from(da_ss_share_subspace(&eig, k))).map_err(io)?;
    for &variant in args.variant.variants() {
        let est = estimate_from_covariance(&cov, k, variant)?;
        let mut freqs = est.freqs.clone();
        freqs.sort_by(f64::total_cmp);
        writeln!(out, "{}.estimates = {}", variant, fmt_list(&freqs)).map_err(io)?;
        writeln!(out, "{}.md = {}", variant, fmt_g(matched_distance(&est.freqs, scene.freqs())?)).map_err(io)?;
    }
    Ok(())
}

fn bound(args: &BoundArgs, out: &mut dyn Write) -> Result<()> {
    if !(args.sigma >= 0.0 && args.sigma.is_finite()) {
        return Err(ConfigError::Invalid(format!("sigma {} must be non-negative", args.sigma)).into());
    }
    let (geom, scene) = args.scene.build(args.sigma * args.sigma)?;
    let ing = BoundIngredients::compute(&geom, &scene, args.snapshots)?;
    let report = BoundReport::new(ing, args.delta)?;
    write_bound_report(out, &report).map_err(io)
}

fn sweep(config: &ExperimentConfig, out: &mut dyn Write) -> Result<()> {
    let (outcome, files) = run_sweep(config)?;
    writeln!(
        out,
        "# {}: {} grid points x {} trials, variant {}",
        config.experiment_id,
        outcome.points.len(),
        config.trials,
        config.variant
    )
    .map_err(io)?;
    writeln!(out, "variant L sigma2 delta mean_md median_md md_bound errors").map_err(io)?;
    for a in &outcome.aggregates {
        writeln!(
            out,
            "{} {} {} {} {} {} {} {}",
            a.variant,
            a.snapshots,
            fmt_g(a.sigma2),
            fmt_g(a.delta.unwrap_or(f64::NAN)),
            fmt_g(a.mean_md),
            fmt_g(a.median_md),
            fmt_g(a.md_bound),
            a.errors
        )
        .map_err(io)?;
    }
    if config.plot_x == PlotAxis::Snapshots {
        for curve in plot_curves(PlotAxis::Snapshots, &outcome.aggregates) {
            if let Ok(slope) = fit_loglog_slope(&curve.points) {
                writeln!(out, "slope[{}] = {}", curve.label, fmt_g(slope)).map_err(io)?;
            }
        }
    }
    writeln!(out, "trials_csv = {}", files.trials.display()).map_err(io)?;
    writeln!(out, "summary_csv = {}", files.summary.display()).map_err(io)?;
    for p in &files.plots {
        writeln!(out, "plot_data = {}", p.display()).map_err(io)?;
    }
    Ok(())
}

fn preset_sweep(mut builder: ConfigBuilder, overrides: &Overrides, out: &mut dyn Write) -> Result<()> {
    overrides.apply(&mut builder)?;
    sweep(&builder.build()?, out)
}

/// Executes a parsed command.
pub fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Geometry(a) => geometry(a, out),
        Command::Simulate(a) => simulate(a, out),
        Command::Bound(a) => bound(a, out),
        Command::Sweep(a) => {
            let mut b = ConfigBuilder::new();
            if let Some(path) = &a.config {
                b.load_file(path)?;
            }
            preset_sweep(b, &a.overrides, out)
        }
        Command::Exp1(a) => preset_sweep(config::exp1_preset(a.full_range), &a.overrides, out),
        Command::Exp2(o) => preset_sweep(config::exp2_preset(), o, out),
        Command::Exp3(o) => preset_sweep(config::exp3_preset(), o, out),
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
