//! Experiment orchestration: runs (image x threshold-count x algorithm x run)
//! cells, aggregates mean/std statistics, and writes CSV/JSON reports.
//!
//! Cells are independent and execute on a small worker pool; the pool size
//! comes from the config, the `FUZZSEG_THREADS` environment variable, or the
//! machine parallelism, in that order. All outputs are deterministic for a
//! fixed base seed except wall-time fields.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use serde::Serialize;

use crate::appa::{appa_optimize, AppaConfig};
use crate::baselines::{baseline_optimize, BaselineConfig, BaselineTuning};
use crate::error::{Error, Result};
use crate::fuzzy_entropy::{
    thresholds_from_params, EntropyObjective, FuzzyParams, HedgeConfig, ThresholdSet,
};
use crate::imageio::{compute_histogram, load_gray_image, Histogram};
use crate::optimize::{Algorithm, Bounds};

/// Outcome of one optimizer run on one image cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub algorithm: Algorithm,
    pub image_id: String,
    pub lv: usize,
    pub seed: u64,
    pub best_fitness: f64,
    pub best_params: FuzzyParams,
    pub thresholds: ThresholdSet,
    pub trace: Vec<f64>,
    /// Seconds; excluded from determinism guarantees.
    pub wall_time: f64,
}

/// Aggregated statistics for one (image, lv, algorithm) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub image_id: String,
    pub lv: usize,
    pub algorithm: Algorithm,
    pub f_mean: f64,
    /// Population standard deviation (divide by n) over the cell's runs.
    pub f_std: f64,
    pub mean_wall_time: f64,
    pub runs: usize,
}

/// All cell summaries, ordered by (image, lv, algorithm).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub cells: Vec<CellSummary>,
}

/// A cell or image that could not be processed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellFailure {
    pub image: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub summary: ExperimentSummary,
    pub records: Vec<RunRecord>,
    pub failures: Vec<CellFailure>,
}

/// Experiment-wide knobs shared by every cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub lv_list: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    pub runs_per_cell: usize,
    pub base_seed: u64,
    pub generations: usize,
    /// `None` selects ten times the search dimension.
    pub population: Option<usize>,
    pub max_runners: usize,
    pub stagnation_limit: u32,
    pub alpha: f64,
    /// Search the full `[0, L-1]` box instead of the gray range present.
    pub full_range_bounds: bool,
    pub tuning: BaselineTuning,
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            lv_list: vec![2],
            algorithms: Algorithm::ALL.to_vec(),
            runs_per_cell: 10,
            base_seed: 42,
            generations: 100,
            population: None,
            max_runners: 3,
            stagnation_limit: 10,
            alpha: 2.0,
            full_range_bounds: false,
            tuning: BaselineTuning::default(),
            threads: None,
        }
    }
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        if self.lv_list.is_empty() || self.lv_list.contains(&0) {
            return Err(Error::InvalidConfig("threshold counts must be >= 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidConfig("at least one algorithm required".into()));
        }
        if self.runs_per_cell == 0 || self.generations == 0 {
            return Err(Error::InvalidConfig("runs and generations must be >= 1".into()));
        }
        HedgeConfig::new(self.alpha)?;
        Ok(())
    }

    fn hedge(&self) -> HedgeConfig {
        HedgeConfig::new(self.alpha).expect("validated")
    }
}

/// Search box for a histogram: the gray range present in the image
/// (or the full level range when `full_range` is set), replicated over
/// `2 * lv` dimensions.
pub fn search_bounds(hist: &Histogram, lv: usize, full_range: bool) -> Result<Bounds> {
    let (lo, hi) = if full_range {
        (0, hist.levels() - 1)
    } else {
        let nonzero: Vec<usize> = hist
            .bins()
            .iter()
            .enumerate()
            .filter(|(_, &b)| b > 0.0)
            .map(|(i, _)| i)
            .collect();
        match (nonzero.first(), nonzero.last()) {
            (Some(&lo), Some(&hi)) if lo < hi => (lo as u32, hi as u32),
            _ => {
                return Err(Error::InvalidImage(
                    "image has a single gray level; nothing to threshold".into(),
                ))
            }
        }
    };
    Bounds::uniform(f64::from(lo), f64::from(hi), 2 * lv)
}

/// Runs one optimizer on one histogram and packages the result.
pub fn execute_run(
    hist: &Histogram,
    image_id: &str,
    lv: usize,
    algorithm: Algorithm,
    seed: u64,
    config: &ExperimentConfig,
) -> Result<RunRecord> {
    let bounds = search_bounds(hist, lv, config.full_range_bounds)?;
    let population = config.population.unwrap_or(10 * bounds.dims());
    let objective = EntropyObjective::new(hist, config.hedge());
    let started = Instant::now();
    let result = match algorithm {
        Algorithm::Appa => {
            let appa = AppaConfig {
                population,
                max_generations: config.generations,
                max_runners: config.max_runners,
                stagnation_limit: config.stagnation_limit,
                bounds,
                seed,
            };
            appa_optimize(|p| objective.fitness(p), &appa)?
        }
        baseline => {
            let cfg = BaselineConfig {
                algorithm: baseline,
                population,
                max_generations: config.generations,
                bounds,
                seed,
                tuning: config.tuning,
            };
            baseline_optimize(|p| objective.fitness(p), &cfg)?
        }
    };
    let wall_time = started.elapsed().as_secs_f64();

    if !result.best_fitness.is_finite() {
        return Err(Error::InvalidParams(format!(
            "{algorithm} found no candidate with valid thresholds on {image_id} (lv {lv})"
        )));
    }
    let best_params = FuzzyParams::from_raw(&result.best_position, hist.levels())?;
    let thresholds = thresholds_from_params(&best_params)?;
    Ok(RunRecord {
        algorithm,
        image_id: image_id.to_string(),
        lv,
        seed,
        best_fitness: result.best_fitness,
        best_params,
        thresholds,
        trace: result.trace,
        wall_time,
    })
}

fn worker_count(config: &ExperimentConfig) -> usize {
    config
        .threads
        .or_else(|| {
            std::env::var("FUZZSEG_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Executes every (image, lv, algorithm, run) cell and aggregates statistics.
///
/// Images that fail to load (or that defeat bound construction) abort only
/// their own cells; the failure is reported alongside the results.
pub fn run_experiment(images: &[PathBuf], config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;

    let mut failures = Vec::new();
    let mut loaded: Vec<(String, Histogram)> = Vec::new();
    for path in images {
        match load_gray_image(path) {
            Ok(img) => {
                let id = image_id_for(path);
                loaded.push((id, compute_histogram(&img)));
            }
            Err(e) => failures.push(CellFailure {
                image: path.display().to_string(),
                message: e.to_string(),
            }),
        }
    }

    struct Task<'a> {
        hist: &'a Histogram,
        image_id: &'a str,
        lv: usize,
        algorithm: Algorithm,
        seed: u64,
    }

    let mut tasks = Vec::new();
    for (id, hist) in &loaded {
        for &lv in &config.lv_list {
            for &algorithm in &config.algorithms {
                for run in 0..config.runs_per_cell {
                    tasks.push(Task {
                        hist,
                        image_id: id,
                        lv,
                        algorithm,
                        seed: config.base_seed + run as u64,
                    });
                }
            }
        }
    }

    let threads = worker_count(config).min(tasks.len().max(1));
    let cursor = AtomicUsize::new(0);
    let mut results: Vec<Option<Result<RunRecord>>> = (0..tasks.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let (tx, rx) = mpsc::channel();
        for _ in 0..threads {
            let tx = tx.clone();
            let cursor = &cursor;
            let tasks = &tasks;
            scope.spawn(move || loop {
                let i = cursor.fetch_add(1, Ordering::Relaxed);
                if i >= tasks.len() {
                    break;
                }
                let t = &tasks[i];
                let record = execute_run(t.hist, t.image_id, t.lv, t.algorithm, t.seed, config);
                if tx.send((i, record)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for (i, record) in rx {
            results[i] = Some(record);
        }
    });

    let mut records = Vec::new();
    for (task, result) in tasks.iter().zip(results) {
        match result.expect("every task completes") {
            Ok(record) => records.push(record),
            Err(e) => failures.push(CellFailure {
                image: task.image_id.to_string(),
                message: format!("lv {} {} seed {}: {e}", task.lv, task.algorithm, task.seed),
            }),
        }
    }

    records.sort_by(|a, b| {
        (&a.image_id, a.lv, a.algorithm, a.seed).cmp(&(&b.image_id, b.lv, b.algorithm, b.seed))
    });
    let summary = summarize(&records);
    Ok(ExperimentOutput { summary, records, failures })
}

/// Groups records into cells and computes mean/std; ingestion order does not
/// matter because runs are re-sorted by seed before aggregation.
pub fn summarize(records: &[RunRecord]) -> ExperimentSummary {
    let mut cells: BTreeMap<(String, usize, Algorithm), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        cells
            .entry((r.image_id.clone(), r.lv, r.algorithm))
            .or_default()
            .push(r);
    }
    let cells = cells
        .into_iter()
        .map(|((image_id, lv, algorithm), mut runs)| {
            runs.sort_by_key(|r| r.seed);
            let fitness: Vec<f64> = runs.iter().map(|r| r.best_fitness).collect();
            let f_mean = mean(&fitness);
            let f_std = population_std(&fitness);
            let walls: Vec<f64> = runs.iter().map(|r| r.wall_time).collect();
            CellSummary {
                image_id,
                lv,
                algorithm,
                f_mean,
                f_std,
                mean_wall_time: mean(&walls),
                runs: runs.len(),
            }
        })
        .collect();
    ExperimentSummary { cells }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn population_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

fn image_id_for(path: &Path) -> String {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    stem.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
        .collect()
}

#[derive(Serialize)]
struct SummaryDoc<'a> {
    base_seed: u64,
    runs_per_cell: usize,
    generations: usize,
    population: Option<usize>,
    max_runners: usize,
    stagnation_limit: u32,
    alpha: f64,
    bounds: &'a str,
    algorithms: Vec<String>,
    tuning: &'a BaselineTuning,
    cells: &'a [CellSummary],
    failures: &'a [CellFailure],
    run_seeds: BTreeMap<String, Vec<u64>>,
}

/// Writes `comparison.csv`, `params_thresholds.csv`, one convergence CSV per
/// cell (the best run's trace), and `summary.json`. Returns the paths written.
pub fn emit_reports(
    output: &ExperimentOutput,
    config: &ExperimentConfig,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    if output.summary.cells.is_empty() {
        return Err(Error::InvalidConfig("nothing to report: no successful cells".into()));
    }
    fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();

    let comparison = out_dir.join("comparison.csv");
    {
        let mut text = String::from("image,lv,algorithm,f_mean,f_std_population,mean_wall_time_s,runs\n");
        for c in &output.summary.cells {
            text += &format!(
                "{},{},{},{},{},{},{}\n",
                c.image_id, c.lv, c.algorithm, c.f_mean, c.f_std, c.mean_wall_time, c.runs
            );
        }
        write_file(&comparison, text.as_bytes())?;
        written.push(comparison);
    }

    let params_path = out_dir.join("params_thresholds.csv");
    {
        let mut text = String::from("image,lv,algorithm,best_fitness,fuzzy_params,thresholds\n");
        for (record, _) in best_runs(output) {
            let params = join_values(record.best_params.values().iter());
            let thresholds = join_values(record.thresholds.values().iter());
            text += &format!(
                "{},{},{},{},{},{}\n",
                record.image_id, record.lv, record.algorithm, record.best_fitness, params, thresholds
            );
        }
        write_file(&params_path, text.as_bytes())?;
        written.push(params_path);
    }

    for (record, _) in best_runs(output) {
        let name = format!(
            "convergence_{}_lv{}_{}.csv",
            record.image_id, record.lv, record.algorithm
        );
        let path = out_dir.join(name);
        let mut text = String::from("generation,best_fitness\n");
        for (g, value) in record.trace.iter().enumerate() {
            text += &format!("{},{}\n", g + 1, value);
        }
        write_file(&path, text.as_bytes())?;
        written.push(path);
    }

    let mut run_seeds = BTreeMap::new();
    for c in &output.summary.cells {
        let key = format!("{}/lv{}/{}", c.image_id, c.lv, c.algorithm);
        let seeds = output
            .records
            .iter()
            .filter(|r| r.image_id == c.image_id && r.lv == c.lv && r.algorithm == c.algorithm)
            .map(|r| r.seed)
            .collect();
        run_seeds.insert(key, seeds);
    }
    let doc = SummaryDoc {
        base_seed: config.base_seed,
        runs_per_cell: config.runs_per_cell,
        generations: config.generations,
        population: config.population,
        max_runners: config.max_runners,
        stagnation_limit: config.stagnation_limit,
        alpha: config.alpha,
        bounds: if config.full_range_bounds { "full" } else { "gray-range-present" },
        algorithms: config.algorithms.iter().map(|a| a.to_string()).collect(),
        tuning: &config.tuning,
        cells: &output.summary.cells,
        failures: &output.failures,
        run_seeds,
    };
    let summary_path = out_dir.join("summary.json");
    let json = serde_json::to_vec_pretty(&doc).expect("summary serializes");
    write_file(&summary_path, &json)?;
    written.push(summary_path);

    Ok(written)
}

/// The highest-fitness run of each cell (ties resolved by lowest seed).
fn best_runs(output: &ExperimentOutput) -> Vec<(&RunRecord, usize)> {
    let mut best: BTreeMap<(&str, usize, Algorithm), (&RunRecord, usize)> = BTreeMap::new();
    for (i, r) in output.records.iter().enumerate() {
        let key = (r.image_id.as_str(), r.lv, r.algorithm);
        match best.get(&key) {
            Some((incumbent, _)) if incumbent.best_fitness >= r.best_fitness => {}
            _ => {
                best.insert(key, (r, i));
            }
        }
    }
    best.into_values().collect()
}

fn join_values<T: std::fmt::Display>(values: impl Iterator<Item = T>) -> String {
    values
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let io_err = |source| Error::Io { path: path.to_path_buf(), source };
    let mut file = fs::File::create(path).map_err(io_err)?;
    file.write_all(bytes).map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn population_std_matches_definition() {
        assert_eq!(population_std(&[5.0]), 0.0);
        let xs = [2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0];
        assert!((population_std(&xs) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn image_ids_are_sanitized() {
        assert_eq!(image_id_for(Path::new("/tmp/x y/img 01.pgm")), "img_01");
        assert_eq!(image_id_for(Path::new("a.b.pgm")), "a.b");
    }

    #[test]
    fn bounds_follow_gray_range_present() {
        let mut bins = vec![0.0; 256];
        bins[17] = 0.5;
        bins[200] = 0.5;
        let hist = Histogram::from_bins(bins, 100).unwrap();
        let bounds = search_bounds(&hist, 2, false).unwrap();
        assert_eq!(bounds.dims(), 4);
        assert_eq!((bounds.lower(0), bounds.upper(0)), (17.0, 200.0));

        let full = search_bounds(&hist, 1, true).unwrap();
        assert_eq!((full.lower(0), full.upper(0)), (0.0, 255.0));
    }

    #[test]
    fn single_level_image_has_no_bounds() {
        let mut bins = vec![0.0; 256];
        bins[9] = 1.0;
        let hist = Histogram::from_bins(bins, 100).unwrap();
        assert!(search_bounds(&hist, 1, false).is_err());
    }
}
