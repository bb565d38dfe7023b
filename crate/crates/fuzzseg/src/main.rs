//! Command-line entry point: single-image segmentation, benchmark
//! experiments, and histogram export.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O error, 3 internal error.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rand::Rng;
use serde::Serialize;

use fuzzseg::baselines::BaselineTuning;
use fuzzseg::error::Error;
use fuzzseg::fuzzy_entropy::HedgeConfig;
use fuzzseg::harness::{emit_reports, execute_run, run_experiment, ExperimentConfig};
use fuzzseg::imageio::{
    compute_histogram, load_gray_image, render_segmented, save_gray_image, write_histogram_csv,
};
use fuzzseg::optimize::Algorithm;

#[derive(Parser)]
#[command(
    name = "fuzzseg",
    version,
    about = "Multi-level grayscale image thresholding by type-II fuzzy entropy maximization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segment one image and write the result plus a JSON sidecar.
    Segment(SegmentArgs),
    /// Compare optimizers over images x threshold counts x runs.
    Benchmark(BenchmarkArgs),
    /// Export an image's normalized histogram as level,frequency CSV.
    Histogram(HistogramArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum BoundsMode {
    /// Search within the gray range present in the image.
    Auto,
    /// Search the full [0, 255] range.
    Full,
}

#[derive(Args)]
struct CommonOpts {
    /// Generations per run.
    #[arg(long, default_value_t = 100)]
    generations: usize,

    /// Population size (default: 10x the search dimension).
    #[arg(long)]
    population: Option<usize>,

    /// Maximum runners per plant (APPA).
    #[arg(long = "n-max", default_value_t = 3)]
    n_max: usize,

    /// Generations without improvement before an individual is replaced (APPA).
    #[arg(long, default_value_t = 10)]
    stagnation_limit: u32,

    /// Linguistic-hedge exponent for the upper/lower membership bounds (> 1).
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,

    /// Random seed as an integer, or "random" for system entropy.
    #[arg(long, default_value = "42")]
    seed: String,

    /// Search bounds: the gray range present, or the full level range.
    #[arg(long, value_enum, default_value_t = BoundsMode::Auto)]
    bounds: BoundsMode,

    /// Optional JSON file overriding PSO/GA/GSA hyperparameters.
    #[arg(long)]
    tuning: Option<PathBuf>,

    /// Output directory.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SegmentArgs {
    /// Input image (PGM P2/P5 or 8-bit PNG).
    #[arg(long)]
    input: PathBuf,

    /// Number of thresholds (LV).
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=32))]
    thresholds: u32,

    /// Optimizer: appa, pso, ga, or gsa.
    #[arg(long, default_value = "appa")]
    algorithm: Algorithm,

    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Input images (at least one).
    #[arg(long, num_args = 1.., required = true)]
    input: Vec<PathBuf>,

    /// Threshold counts, comma separated (e.g. 2,3,4).
    #[arg(long, value_delimiter = ',', default_value = "2")]
    thresholds: Vec<u32>,

    /// Algorithms to compare, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "appa,pso,ga,gsa")]
    algorithms: Vec<Algorithm>,

    /// Runs per (image, thresholds, algorithm) cell.
    #[arg(long, default_value_t = 10)]
    runs: usize,

    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct HistogramArgs {
    /// Input image.
    #[arg(long)]
    input: PathBuf,

    /// Output directory.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let result = match cli.command {
        Command::Segment(args) => cmd_segment(args),
        Command::Benchmark(args) => cmd_benchmark(args),
        Command::Histogram(args) => cmd_histogram(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidConfig(_) => 1,
        Error::Io { .. }
        | Error::UnsupportedFormat { .. }
        | Error::CorruptHeader { .. }
        | Error::TruncatedData { .. }
        | Error::Png(..)
        | Error::InvalidImage(_) => 2,
        _ => 3,
    }
}

fn parse_seed(text: &str) -> Result<u64, Error> {
    if text.eq_ignore_ascii_case("random") {
        return Ok(rand::rng().random());
    }
    u64::from_str(text)
        .map_err(|_| Error::InvalidConfig(format!("seed must be an integer or \"random\", got {text:?}")))
}

fn load_tuning(path: Option<&Path>) -> Result<BaselineTuning, Error> {
    let Some(path) = path else {
        return Ok(BaselineTuning::default());
    };
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text)
        .map_err(|e| Error::InvalidConfig(format!("{}: invalid tuning file: {e}", path.display())))
}

fn experiment_config(
    common: &CommonOpts,
    lv_list: Vec<usize>,
    algorithms: Vec<Algorithm>,
    runs_per_cell: usize,
) -> Result<ExperimentConfig, Error> {
    if common.generations == 0 {
        return Err(Error::InvalidConfig("generations must be >= 1".into()));
    }
    if matches!(common.population, Some(0)) {
        return Err(Error::InvalidConfig("population must be >= 1".into()));
    }
    HedgeConfig::new(common.alpha)
        .map_err(|_| Error::InvalidConfig(format!("alpha must be > 1, got {}", common.alpha)))?;
    Ok(ExperimentConfig {
        lv_list,
        algorithms,
        runs_per_cell,
        base_seed: parse_seed(&common.seed)?,
        generations: common.generations,
        population: common.population,
        max_runners: common.n_max,
        stagnation_limit: common.stagnation_limit,
        alpha: common.alpha,
        full_range_bounds: common.bounds == BoundsMode::Full,
        tuning: load_tuning(common.tuning.as_deref())?,
        threads: None,
    })
}

/// Tracks written artifacts so a failed command leaves nothing behind.
struct OutputTracker {
    written: Vec<PathBuf>,
}

impl OutputTracker {
    fn new() -> Self {
        Self { written: Vec::new() }
    }

    fn record(&mut self, path: PathBuf) {
        self.written.push(path);
    }

    fn discard_all(&self) {
        for path in &self.written {
            let _ = fs::remove_file(path);
        }
    }
}

#[derive(Serialize)]
struct SegmentSidecar<'a> {
    image: String,
    lv: usize,
    algorithm: &'a str,
    seed: u64,
    alpha: f64,
    fitness: f64,
    fuzzy_params: &'a fuzzseg::fuzzy_entropy::FuzzyParams,
    thresholds: &'a [u32],
}

fn cmd_segment(args: SegmentArgs) -> Result<(), Error> {
    let lv = args.thresholds as usize;
    let config = experiment_config(&args.common, vec![lv], vec![args.algorithm], 1)?;

    let img = load_gray_image(&args.input)?;
    let hist = compute_histogram(&img);
    let stem = args
        .input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".into());

    let record = execute_run(&hist, &stem, lv, args.algorithm, config.base_seed, &config)?;
    let segmented = render_segmented(&img, &record.thresholds)?;

    fs::create_dir_all(&args.common.out_dir).map_err(|source| Error::Io {
        path: args.common.out_dir.clone(),
        source,
    })?;
    let png_input = args
        .input
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("png"));
    let image_ext = if png_input { "png" } else { "pgm" };
    let image_path = args.common.out_dir.join(format!("{stem}_segmented.{image_ext}"));
    let sidecar_path = args.common.out_dir.join(format!("{stem}_result.json"));
    let trace_path = args.common.out_dir.join(format!("{stem}_convergence.csv"));

    let mut tracker = OutputTracker::new();
    let outcome = (|| {
        save_gray_image(&segmented, &image_path)?;
        tracker.record(image_path.clone());

        let sidecar = SegmentSidecar {
            image: stem.clone(),
            lv,
            algorithm: args.algorithm.name(),
            seed: record.seed,
            alpha: config.alpha,
            fitness: record.best_fitness,
            fuzzy_params: &record.best_params,
            thresholds: record.thresholds.values(),
        };
        let json = serde_json::to_vec_pretty(&sidecar).expect("sidecar serializes");
        fs::write(&sidecar_path, json).map_err(|source| Error::Io {
            path: sidecar_path.clone(),
            source,
        })?;
        tracker.record(sidecar_path.clone());

        let mut trace = String::from("generation,best_fitness\n");
        for (g, value) in record.trace.iter().enumerate() {
            trace += &format!("{},{}\n", g + 1, value);
        }
        fs::write(&trace_path, trace).map_err(|source| Error::Io {
            path: trace_path.clone(),
            source,
        })?;
        tracker.record(trace_path.clone());
        Ok(())
    })();

    if let Err(e) = outcome {
        tracker.discard_all();
        return Err(e);
    }

    let thresholds: Vec<String> = record.thresholds.values().iter().map(u32::to_string).collect();
    println!(
        "thresholds [{}]  fitness {}  wrote {}, {}, {}",
        thresholds.join(", "),
        record.best_fitness,
        image_path.display(),
        sidecar_path.display(),
        trace_path.display()
    );
    Ok(())
}

fn cmd_benchmark(args: BenchmarkArgs) -> Result<(), Error> {
    if args.thresholds.is_empty() || args.thresholds.contains(&0) {
        return Err(Error::InvalidConfig("thresholds must all be >= 1".into()));
    }
    if args.runs == 0 {
        return Err(Error::InvalidConfig("runs must be >= 1".into()));
    }
    if args.algorithms.is_empty() {
        return Err(Error::InvalidConfig("at least one algorithm required".into()));
    }
    let lv_list = args.thresholds.iter().map(|&t| t as usize).collect();
    let config = experiment_config(&args.common, lv_list, args.algorithms.clone(), args.runs)?;

    let output = run_experiment(&args.input, &config)?;
    for failure in &output.failures {
        eprintln!("warning: {}: {}", failure.image, failure.message);
    }
    if output.summary.cells.is_empty() {
        return Err(Error::InvalidImage("no image produced any results".into()));
    }

    let written = emit_reports(&output, &config, &args.common.out_dir)?;
    for path in &written {
        println!("wrote {}", path.display());
    }
    if !output.failures.is_empty() {
        eprintln!("{} cell(s) failed; reports cover the rest", output.failures.len());
        std::process::exit(2);
    }
    Ok(())
}

fn cmd_histogram(args: HistogramArgs) -> Result<(), Error> {
    let img = load_gray_image(&args.input)?;
    let hist = compute_histogram(&img);
    let stem = args
        .input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".into());
    fs::create_dir_all(&args.out_dir).map_err(|source| Error::Io {
        path: args.out_dir.clone(),
        source,
    })?;
    let path = args.out_dir.join(format!("{stem}_histogram.csv"));
    let mut buffer = Vec::new();
    write_histogram_csv(&hist, &mut buffer).expect("vec write cannot fail");
    fs::write(&path, buffer).map_err(|source| Error::Io { path: path.clone(), source })?;
    println!("wrote {}", path.display());
    Ok(())
}
