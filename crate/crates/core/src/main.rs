//! `rkm` — command-line front end for the radius-guided k-means toolkit.
//!
//! Exit codes: 0 on success, 1 for data/runtime errors, 2 for usage errors
//! (the latter come from clap's argument validation).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use radius_kmeans::eval::{run_experiment, success_score, ExperimentReport, PipelineSpec};
use radius_kmeans::io::{
    load_csv, write_dataset_csv, write_labels_csv, write_report_csv, LabeledDataset,
};
use radius_kmeans::kmeans::{fit_kmeans, KMeansConfig};
use radius_kmeans::merge::{k_sweep, merge_clusters, MergedPartition};
use radius_kmeans::model::ClusterModel;
use radius_kmeans::svg::render_svg;
use radius_kmeans::synth;
use radius_kmeans::tiling::tiled_pipeline;
use radius_kmeans::{Error, Result};

#[derive(Parser)]
#[command(name = "rkm", version, about = "k-means with radius-based cluster merging")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run plain k-means and write per-point labels.
    Fit(FitArgs),
    /// Run k-means, then merge overlapping radius circles.
    Merge(MergeArgs),
    /// Cluster axis-aligned tiles independently, then merge across tiles.
    Tile(TileArgs),
    /// Sweep over k values and report component-count stability.
    Sweep(SweepArgs),
    /// Run a benchmark suite described by a TOML config.
    Bench(BenchArgs),
    /// Write a synthetic dataset to CSV (label in the last column).
    Gen(GenArgs),
}

/// Exactly one input source: a CSV file or a named generator.
#[derive(Args)]
struct InputArgs {
    /// Input CSV file of coordinates (one point per row).
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    input: Option<PathBuf>,
    /// Synthetic dataset name (e.g. two-circles, two-moons, atom, lsun).
    #[arg(long)]
    gen: Option<String>,
    /// Treat the first CSV row as a header.
    #[arg(long)]
    has_header: bool,
    /// 0-based index of a ground-truth label column in the CSV.
    #[arg(long)]
    label_col: Option<usize>,
    /// RNG seed; every random choice in a command flows from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl InputArgs {
    fn load(&self) -> Result<LabeledDataset> {
        match (&self.input, &self.gen) {
            (Some(path), None) => load_csv(path, self.has_header, self.label_col),
            (None, Some(name)) => synth::by_name(name, self.seed),
            _ => Err(Error::invalid("exactly one of --input/--gen is required")),
        }
    }
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Number of clusters.
    #[arg(long)]
    k: usize,
    /// Where to write the per-point labels CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MergeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Number of clusters before merging (deliberately oversized).
    #[arg(long)]
    k: usize,
    /// Drop zero-radius singleton clusters as outliers before merging.
    #[arg(long)]
    filter_outliers: bool,
    /// Where to write the merged per-point labels CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base path for a pre/post SVG pair (writes -pre.svg and -post.svg).
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct TileArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Tiles per axis, comma-separated (e.g. 2,2).
    #[arg(long, value_delimiter = ',', required = true)]
    splits: Vec<usize>,
    /// Local k as a percentage of each tile's point count.
    #[arg(long)]
    pct: f64,
    /// Where to write the global per-point labels CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    input: InputArgs,
    /// k values to sweep, comma-separated (e.g. 2,4,8,16,32).
    #[arg(long, value_delimiter = ',', required = true)]
    ks: Vec<usize>,
    /// Fit+merge repetitions per k.
    #[arg(long, default_value_t = 5)]
    runs_per_k: usize,
}

#[derive(Args)]
struct BenchArgs {
    /// TOML suite config (see configs/ for the table reproductions).
    #[arg(long)]
    config: PathBuf,
    /// Where to write the report CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// Synthetic dataset name.
    #[arg(long)]
    gen: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

/// Declarative benchmark suite: shared protocol plus one entry per cell.
#[derive(Deserialize)]
struct SuiteConfig {
    trials: usize,
    runs_per_trial: usize,
    seed: u64,
    #[serde(default)]
    experiments: Vec<SuiteEntry>,
}

#[derive(Deserialize)]
struct SuiteEntry {
    input: PathBuf,
    /// 0-based truth column; defaults to the last column.
    label_col: Option<usize>,
    /// Flat k (plain or merged pipeline).
    k: Option<usize>,
    /// Merge after k-means (defaults to false → plain k-means).
    #[serde(default)]
    merge: bool,
    #[serde(default)]
    filter_outliers: bool,
    /// Tiled pipeline: tiles per axis plus local-k percentage.
    splits: Option<Vec<usize>>,
    pct: Option<f64>,
}

impl SuiteEntry {
    fn spec(&self) -> Result<PipelineSpec> {
        match (self.k, &self.splits, self.pct) {
            (Some(k), None, None) if !self.merge => Ok(PipelineSpec::Kmeans { k }),
            (Some(k), None, None) => Ok(PipelineSpec::Merged {
                k,
                filter_outliers: self.filter_outliers,
            }),
            (None, Some(splits), Some(pct)) => Ok(PipelineSpec::Tiled {
                splits: splits.clone(),
                pct,
            }),
            _ => Err(Error::invalid(format!(
                "experiment '{}' must set either k (flat) or splits+pct (tiled)",
                self.input.display()
            ))),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Fit(args) => cmd_fit(args),
        Command::Merge(args) => cmd_merge(args),
        Command::Tile(args) => cmd_tile(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Gen(args) => cmd_gen(args),
    }
}

fn cmd_fit(args: FitArgs) -> Result<()> {
    let data = args.input.load()?;
    let model = fit_kmeans(&data.dataset, &KMeansConfig::new(args.k, args.input.seed))?;
    print_model_summary(&data, &model);
    if let Some(truth) = &data.truth {
        println!("success = {:.4}", success_score(truth, &model.labels)?);
    }
    if let Some(out) = &args.out {
        write_labels_csv(out, &model.labels)?;
        println!("labels -> {}", out.display());
    }
    Ok(())
}

fn cmd_merge(args: MergeArgs) -> Result<()> {
    let data = args.input.load()?;
    let model = fit_kmeans(&data.dataset, &KMeansConfig::new(args.k, args.input.seed))?;
    let merged = merge_clusters(&model, args.filter_outliers);
    print_model_summary(&data, &model);
    print_merge_summary(&merged);
    if let Some(truth) = &data.truth {
        println!("success = {:.4}", success_score(truth, &merged.final_labels)?);
    }
    if let Some(out) = &args.out {
        write_labels_csv(out, &merged.final_labels)?;
        println!("labels -> {}", out.display());
    }
    if let Some(plot) = &args.plot {
        let circles: Vec<(Vec<f64>, f64)> = model
            .centers
            .iter()
            .zip(&model.radii)
            .map(|(c, &r)| (c.clone(), r))
            .collect();
        let pre = plot_path(plot, "pre");
        let post = plot_path(plot, "post");
        render_svg(&data.dataset, &model.labels, &circles, &pre)?;
        render_svg(&data.dataset, &merged.final_labels, &circles, &post)?;
        println!("plots -> {} / {}", pre.display(), post.display());
    }
    Ok(())
}

fn cmd_tile(args: TileArgs) -> Result<()> {
    let data = args.input.load()?;
    let base = KMeansConfig::new(1, args.input.seed);
    let merged = tiled_pipeline(&data.dataset, &args.splits, args.pct, &base)?;
    println!(
        "dataset '{}': n = {}, d = {}",
        data.name,
        data.dataset.n(),
        data.dataset.dim()
    );
    print_merge_summary(&merged);
    if let Some(truth) = &data.truth {
        println!("success = {:.4}", success_score(truth, &merged.final_labels)?);
    }
    if let Some(out) = &args.out {
        write_labels_csv(out, &merged.final_labels)?;
        println!("labels -> {}", out.display());
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let data = args.input.load()?;
    let base = KMeansConfig::new(1, args.input.seed);
    let report = k_sweep(&data.dataset, &args.ks, args.runs_per_k, &base)?;
    println!("{:>6} {:>12} {:>12}", "k", "components", "agreement");
    for e in &report.entries {
        println!("{:>6} {:>12} {:>12.4}", e.k, e.modal_components, e.mean_agreement);
    }
    let stable = report.stable_ks();
    if let (Some(first), Some(last)) = (stable.first(), stable.last()) {
        println!(
            "stable phase: k = {}..={} at {} component(s)",
            first.k, last.k, first.modal_components
        );
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.config).map_err(|source| Error::Io {
        path: args.config.clone(),
        source,
    })?;
    let suite: SuiteConfig = toml::from_str(&text)
        .map_err(|e| Error::invalid(format!("bad suite config {}: {}", args.config.display(), e)))?;
    let mut reports: Vec<ExperimentReport> = Vec::new();
    println!(
        "{:<14} {:<20} {:>8} {:>8} {:>7}",
        "dataset", "spec", "median", "iqr", "trials"
    );
    for entry in &suite.experiments {
        let label_col = match entry.label_col {
            Some(c) => c,
            None => last_column(&entry.input)?,
        };
        let data = load_csv(&entry.input, false, Some(label_col))?;
        let spec = entry.spec()?;
        let report = run_experiment(
            &data.dataset,
            data.truth()?,
            &spec,
            &data.name,
            suite.trials,
            suite.runs_per_trial,
            suite.seed,
        )?;
        println!(
            "{:<14} {:<20} {:>8.4} {:>8.4} {:>7}",
            report.dataset, report.spec, report.median, report.iqr, report.trials
        );
        reports.push(report);
    }
    if let Some(out) = &args.out {
        write_report_csv(out, &reports)?;
        println!("report -> {}", out.display());
    }
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let data = synth::by_name(&args.gen, args.seed)?;
    write_dataset_csv(&args.out, &data)?;
    println!(
        "{} -> {} ({} points, {} dims + label)",
        data.name,
        args.out.display(),
        data.dataset.n(),
        data.dataset.dim()
    );
    Ok(())
}

fn print_model_summary(data: &LabeledDataset, model: &ClusterModel) {
    println!(
        "dataset '{}': n = {}, d = {}",
        data.name,
        data.dataset.n(),
        data.dataset.dim()
    );
    println!(
        "fit: k = {}, inertia = {:.4}, radii = [{}]",
        model.centers.len(),
        model.inertia,
        model
            .radii
            .iter()
            .map(|r| format!("{:.3}", r))
            .collect::<Vec<_>>()
            .join(", ")
    );
}

fn print_merge_summary(merged: &MergedPartition) {
    println!(
        "merge: {} component(s), sizes = [{}]",
        merged.component_count,
        component_sizes(merged)
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    );
    if !merged.outliers.is_empty() {
        println!("outliers: {:?}", merged.outliers);
    }
}

fn component_sizes(merged: &MergedPartition) -> Vec<usize> {
    let mut sizes = vec![0usize; merged.component_count];
    for &l in &merged.final_labels {
        if l != radius_kmeans::OUTLIER_LABEL {
            sizes[l] += 1;
        }
    }
    sizes
}

fn plot_path(base: &Path, suffix: &str) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned());
    let stem = stem.unwrap_or_else(|| "plot".to_string());
    base.with_file_name(format!("{}-{}.svg", stem, suffix))
}

/// Index of the last column of a headerless CSV (the bench truth default).
fn last_column(path: &Path) -> Result<usize> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let first = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| Error::invalid(format!("{} is empty", path.display())))?;
    Ok(first.split(',').count() - 1)
}
