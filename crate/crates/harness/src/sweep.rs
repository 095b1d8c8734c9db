//! Parallel grid sweeps, aggregation and file output.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sla_esprit::Variant;

use crate::config::{ExperimentConfig, PlotAxis};
use crate::error::{HarnessError, Result};
use crate::format::fmt_g;
use crate::trial::{run_trial, GridPoint, TrialResult, CSV_HEADER};

/// Summary of all trials of one variant at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub point: usize,
    pub variant: Variant,
    pub snapshots: usize,
    pub sigma2: f64,
    pub delta: Option<f64>,
    pub count: usize,
    pub errors: usize,
    pub mean_md: f64,
    pub median_md: f64,
    pub md_bound: f64,
    pub md_bound_unclamped: f64,
    /// Fraction of trials in which DA and SS share a subspace.
    pub da_ss_equal_rate: f64,
}

pub const SUMMARY_HEADER: [&str; 12] = [
    "experiment_id",
    "variant",
    "L",
    "sigma2",
    "delta",
    "trials",
    "errors",
    "mean_md",
    "median_md",
    "md_bound",
    "md_bound_unclamped",
    "da_ss_equal_rate",
];

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub points: Vec<GridPoint>,
    /// Sorted by grid point, trial index, then variant.
    pub rows: Vec<TrialResult>,
    pub aggregates: Vec<Aggregate>,
}

impl SweepOutcome {
    pub fn aggregate(&self, variant: Variant, snapshots: usize, sigma2: f64, delta: Option<f64>) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.variant == variant && a.snapshots == snapshots && a.sigma2 == sigma2 && a.delta == delta)
    }
}

/// Files written by [`run_sweep`].
#[derive(Debug, Clone, Default)]
pub struct SweepFiles {
    pub trials: PathBuf,
    pub summary: PathBuf,
    pub plots: Vec<PathBuf>,
}

/// Grid points in `(Δ, σ, L)` nesting order.
pub fn grid_points(config: &ExperimentConfig) -> Result<Vec<GridPoint>> {
    let deltas: Vec<Option<f64>> = match &config.delta_grid {
        Some(d) => d.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let mut points = Vec::new();
    for &delta in &deltas {
        for &sigma in &config.sigma_grid {
            for &l in &config.l_grid {
                points.push(GridPoint::new(config, points.len(), l, sigma, delta)?);
            }
        }
    }
    Ok(points)
}

fn variant_rank(v: Variant) -> u8 {
    match v {
        Variant::Da => 0,
        Variant::Ss => 1,
    }
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Per-(point, variant) summaries of sorted rows.
pub fn aggregate(points: &[GridPoint], rows: &[TrialResult]) -> Vec<Aggregate> {
    let mut groups: BTreeMap<(usize, u8), Vec<&TrialResult>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.point, variant_rank(r.variant))).or_default().push(r);
    }
    groups
        .into_values()
        .map(|group| {
            let first = group[0];
            let point = &points[first.point];
            let count = group.len();
            let mut mds: Vec<f64> = group.iter().map(|r| r.md).collect();
            let mean_md = mds.iter().sum::<f64>() / count as f64;
            mds.sort_by(f64::total_cmp);
            Aggregate {
                point: first.point,
                variant: first.variant,
                snapshots: first.snapshots,
                sigma2: first.sigma2,
                delta: first.delta,
                count,
                errors: group.iter().filter(|r| r.error).count(),
                mean_md,
                median_md: median(&mds),
                md_bound: point.md_bound,
                md_bound_unclamped: point.md_bound_unclamped,
                da_ss_equal_rate: group.iter().filter(|r| r.da_ss_equal).count() as f64 / count as f64,
            }
        })
        .collect()
}

/// Runs every trial of every grid point and aggregates, without touching
/// the filesystem.
pub fn execute(config: &ExperimentConfig) -> Result<SweepOutcome> {
    let points = grid_points(config)?;
    let tasks: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..config.trials).map(move |t| (p, t)))
        .collect();
    let work = || -> Vec<TrialResult> {
        tasks
            .par_iter()
            .flat_map_iter(|&(p, t)| run_trial(config, &points[p], t))
            .collect()
    };
    let mut rows = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| HarnessError::ThreadPool(e.to_string()))?
            .install(work),
        None => work(),
    };
    rows.sort_by_key(|r| (r.point, r.trial, variant_rank(r.variant)));
    let aggregates = aggregate(&points, &rows);
    Ok(SweepOutcome {
        points,
        rows,
        aggregates,
    })
}

/// Runs the sweep and writes the per-trial CSV, the summary CSV next to it
/// and, when enabled, the plot-data files.
pub fn run_sweep(config: &ExperimentConfig) -> Result<(SweepOutcome, SweepFiles)> {
    let outcome = execute(config)?;
    let files = write_outputs(config, &outcome)?;
    Ok((outcome, files))
}

fn output_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Output {
        path: path.to_path_buf(),
        source,
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

pub fn summary_path(trials_path: &Path) -> PathBuf {
    sibling(trials_path, "_summary.csv")
}

pub fn write_trials_csv<W: Write>(out: W, rows: &[TrialResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(r.csv_record())?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(out: W, experiment_id: &str, aggregates: &[Aggregate]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for a in aggregates {
        w.write_record([
            experiment_id.to_string(),
            a.variant.as_str().into(),
            a.snapshots.to_string(),
            fmt_g(a.sigma2),
            fmt_g(a.delta.unwrap_or(f64::NAN)),
            a.count.to_string(),
            a.errors.to_string(),
            fmt_g(a.mean_md),
            fmt_g(a.median_md),
            fmt_g(a.md_bound),
            fmt_g(a.md_bound_unclamped),
            fmt_g(a.da_ss_equal_rate),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn write_file(path: &Path, write: impl FnOnce(fs::File) -> Result<()>) -> Result<()> {
    let file = fs::File::create(path).map_err(output_err(path))?;
    write(file)
}

pub fn write_outputs(config: &ExperimentConfig, outcome: &SweepOutcome) -> Result<SweepFiles> {
    let trials = config.output_path.clone();
    if let Some(dir) = trials.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(output_err(dir))?;
    }
    write_file(&trials, |f| write_trials_csv(f, &outcome.rows))?;
    let summary = summary_path(&trials);
    write_file(&summary, |f| write_summary_csv(f, &config.experiment_id, &outcome.aggregates))?;
    let plots = if config.emit_plot_data {
        write_plot_data(config, &outcome.aggregates)?
    } else {
        Vec::new()
    };
    Ok(SweepFiles { trials, summary, plots })
}

/// One plot curve: the aggregates sharing every parameter except the
/// abscissa.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

pub fn plot_curves(axis: PlotAxis, aggregates: &[Aggregate]) -> Vec<Curve> {
    let mut curves: Vec<Curve> = Vec::new();
    for a in aggregates {
        let (x, label) = match axis {
            PlotAxis::Snapshots => (
                a.snapshots as f64,
                format!("sigma2_{}_delta_{}", fmt_g(a.sigma2), fmt_g(a.delta.unwrap_or(f64::NAN))),
            ),
            PlotAxis::Sigma2 => (
                a.sigma2,
                format!("L_{}_delta_{}", a.snapshots, fmt_g(a.delta.unwrap_or(f64::NAN))),
            ),
            PlotAxis::Delta => (
                a.delta.unwrap_or(f64::NAN),
                format!("L_{}_sigma2_{}", a.snapshots, fmt_g(a.sigma2)),
            ),
        };
        let label = format!("{}_{}", a.variant.as_str(), label.replace("_delta_nan", ""));
        match curves.iter_mut().find(|c| c.label == label) {
            Some(c) => c.points.push((x, a.mean_md)),
            None => curves.push(Curve {
                label,
                points: vec![(x, a.mean_md)],
            }),
        }
    }
    for c in &mut curves {
        c.points.sort_by(|p, q| p.0.total_cmp(&q.0));
    }
    curves
}

fn write_plot_data(config: &ExperimentConfig, aggregates: &[Aggregate]) -> Result<Vec<PathBuf>> {
    let axis = match config.plot_x {
        PlotAxis::Snapshots => "L",
        PlotAxis::Sigma2 => "sigma2",
        PlotAxis::Delta => "delta",
    };
    let mut paths = Vec::new();
    for curve in plot_curves(config.plot_x, aggregates) {
        let path = sibling(&config.output_path, &format!("_{}.dat", curve.label));
        let mut text = format!("# {axis} mean_md\n");
        for (x, y) in &curve.points {
            text.push_str(&format!("{} {}\n", fmt_g(*x), fmt_g(*y)));
        }
        fs::write(&path, text).map_err(output_err(&path))?;
        paths.push(path);
    }
    Ok(paths)
}
