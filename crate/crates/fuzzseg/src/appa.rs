//! Adaptive plant propagation: a population metaheuristic maximizing a
//! bounded-box objective.
//!
//! Each generation every plant sends between 1 and `max_runners` runners.
//! Fit plants send many short runners (exploitation), weak plants send few
//! long ones (exploration). Parents and runners are merged, the best
//! `population` survive, and individuals that fail to improve for
//! `stagnation_limit` consecutive generations are replaced by fresh random
//! candidates, the incumbent best excepted.

use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::optimize::{sort_desc_by_fitness, Bounds, OptimizeResult, RunRng};

/// Upper end of the sigmoid's reachable output band, `e / (1 + e)`.
pub const SIGMOID_AT_MAX: f64 = std::f64::consts::E / (1.0 + std::f64::consts::E);

/// One plant: a position, its objective value, and how many consecutive
/// generations it has gone without improvement.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub position: Vec<f64>,
    pub fitness: f64,
    pub stagnation: u32,
}

/// Run parameters. `population` defaults to ten times the dimension count.
#[derive(Debug, Clone, PartialEq)]
pub struct AppaConfig {
    pub population: usize,
    pub max_generations: usize,
    pub max_runners: usize,
    pub stagnation_limit: u32,
    pub bounds: Bounds,
    pub seed: u64,
}

impl AppaConfig {
    pub fn new(bounds: Bounds, seed: u64) -> Self {
        Self {
            population: 10 * bounds.dims(),
            max_generations: 100,
            max_runners: 3,
            stagnation_limit: 10,
            bounds,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::InvalidConfig(format!(
                "population must be >= 2, got {}",
                self.population
            )));
        }
        if self.max_runners < 1 {
            return Err(Error::InvalidConfig("max_runners must be >= 1".into()));
        }
        if self.max_generations < 1 {
            return Err(Error::InvalidConfig("max_generations must be >= 1".into()));
        }
        Ok(())
    }
}

/// Sigmoid-normalized fitness values plus a flag marking generations whose
/// raw maximum was not positive (everything degenerate or equal).
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedFitness {
    pub values: Vec<f64>,
    pub degenerate: bool,
}

/// Maps raw fitness onto `(0, 1)` via `exp(f/max_f) / (1 + exp(f/max_f))`.
///
/// Non-negative inputs land in `[1/2, e/(1+e)]`. A non-positive maximum
/// leaves nothing to scale by; the whole generation is flagged degenerate
/// and normalized uniformly to 0.5 so the loop proceeds.
pub fn normalize_fitness(raw: &[f64]) -> NormalizedFitness {
    assert!(!raw.is_empty(), "at least one individual required");
    let max_f = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max_f.is_nan() || max_f <= 0.0 {
        return NormalizedFitness {
            values: vec![0.5; raw.len()],
            degenerate: true,
        };
    }
    let values = raw
        .iter()
        .map(|&f| {
            let e = (f / max_f).exp();
            e / (1.0 + e)
        })
        .collect();
    NormalizedFitness { values, degenerate: false }
}

/// Number of runners for one plant: `ceil(max_runners * normalized * r)`,
/// at least 1.
pub fn runner_count(normalized: f64, max_runners: usize, r: f64) -> usize {
    let n = (max_runners as f64 * normalized * r).ceil() as usize;
    n.clamp(1, max_runners)
}

/// Single-coordinate runner length `(1 - normalized) * (r - 0.5)`.
pub fn runner_offset(normalized: f64, r: f64) -> f64 {
    (1.0 - normalized) * (r - 0.5)
}

/// Per-dimension runner lengths, each drawn fresh; every value lies in
/// `[-0.5, 0.5]`.
pub fn runner_offsets(normalized: f64, dims: usize, rng: &mut RunRng) -> Vec<f64> {
    (0..dims)
        .map(|_| runner_offset(normalized, rng.random::<f64>()))
        .collect()
}

/// Longest runner scale, as a fraction of the box: the weakest plants probe
/// at basin-hopping range rather than re-randomizing wholesale.
const EXPLORATION_SCALE: f64 = 0.35;

/// Shortest exploitation anchor; keeps polishing moves meaningful on the
/// gray-level grid even after the population has fully collapsed.
const COLLAPSE_FLOOR: f64 = 0.03;

/// Fraction of the box the population's fitter half still occupies, clamped
/// between the polish floor and the exploration scale.
///
/// Raw sigmoid values keep every runner at least a quarter of the box long,
/// which explores well but can never refine a basin. Anchoring runner
/// lengths to the occupied extent makes steps contract as the population
/// converges and re-expand when restarts scatter it, at every fitness scale
/// alike.
pub fn population_extent(positions: &[&[f64]], bounds: &Bounds) -> f64 {
    let top = (positions.len() / 2).max(1);
    let mut ratio: f64 = 0.0;
    for j in 0..bounds.dims() {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for pos in &positions[..top] {
            lo = lo.min(pos[j]);
            hi = hi.max(pos[j]);
        }
        ratio = ratio.max((hi - lo) / bounds.span(j));
    }
    ratio.clamp(COLLAPSE_FLOOR, EXPLORATION_SCALE)
}

/// Step intensity for the plant ranked `rank` (0 = fittest) of `population`,
/// fed to [`runner_offsets`].
///
/// Runner length scales form a geometric ladder across ranks, from the
/// occupied extent at the top (exploitation: polishing the incumbent basin)
/// up to about a third of the box at the bottom (exploration: weak plants
/// and fresh restarts probe their neighborhood at basin-hopping range).
/// Every scale between the two is covered each generation, and no plant
/// sends a zero-length runner.
pub fn step_intensity(rank: usize, population: usize, extent: f64) -> f64 {
    let u = (rank + 1) as f64 / population as f64;
    let scale = extent.powf(1.0 - u) * EXPLORATION_SCALE.powf(u);
    1.0 - scale
}

/// Zeroes each offset with probability one half, keeping at least one alive.
///
/// A runner that moves every coordinate at once can never relocate one
/// breakpoint pair while leaving the rest in place, which is exactly the
/// move that escapes a mediocre segmentation. Sparse runners make such
/// coordinate-selective hops routine at every length scale.
fn sparsify_offsets(offsets: &mut [f64], rng: &mut RunRng) {
    let alive: Vec<bool> = offsets.iter().map(|_| rng.random::<f64>() < 0.5).collect();
    if alive.iter().any(|&keep| keep) {
        for (offset, &keep) in offsets.iter_mut().zip(&alive) {
            if !keep {
                *offset = 0.0;
            }
        }
    } else {
        let keep = rng.random_range(0..offsets.len());
        for (j, offset) in offsets.iter_mut().enumerate() {
            if j != keep {
                *offset = 0.0;
            }
        }
    }
}

/// Places one runner at `parent + span * offsets`, clamped into the box,
/// and evaluates it.
pub fn spawn_runner(
    parent: &Individual,
    offsets: &[f64],
    bounds: &Bounds,
    objective: impl Fn(&[f64]) -> f64,
) -> Individual {
    let mut position: Vec<f64> = parent
        .position
        .iter()
        .enumerate()
        .map(|(j, &y)| y + bounds.span(j) * offsets[j])
        .collect();
    bounds.clamp(&mut position);
    let fitness = objective(&position);
    Individual { position, fitness, stagnation: 0 }
}

enum Origin {
    Parent(usize),
    Runner(usize),
}

/// Runs the full optimization loop and returns the best individual ever
/// seen plus the per-generation best-so-far trace.
///
/// Fitness values are shifted by the generation minimum before sigmoid
/// normalization whenever negatives are present, since the ratio `f / max_f`
/// is only meaningful for non-negative objectives; the entropy objective is
/// unaffected.
pub fn appa_optimize(
    objective: impl Fn(&[f64]) -> f64,
    config: &AppaConfig,
) -> Result<OptimizeResult> {
    config.validate()?;
    let bounds = &config.bounds;
    let dims = bounds.dims();
    let mut rng = RunRng::seed_from_u64(config.seed);
    let mut evaluations: u64 = 0;

    let evaluate = |position: &[f64], evals: &mut u64| -> f64 {
        *evals += 1;
        objective(position)
    };

    let mut pop: Vec<Individual> = (0..config.population)
        .map(|_| {
            let position = bounds.sample(&mut rng);
            let fitness = evaluate(&position, &mut evaluations);
            Individual { position, fitness, stagnation: 0 }
        })
        .collect();

    sort_desc_by_fitness(&mut pop, |ind| ind.fitness);
    let mut best = pop[0].clone();
    let mut trace = Vec::with_capacity(config.max_generations);

    for _ in 0..config.max_generations {
        sort_desc_by_fitness(&mut pop, |ind| ind.fitness);

        let raw: Vec<f64> = pop.iter().map(|ind| ind.fitness).collect();
        let min_finite = raw
            .iter()
            .copied()
            .filter(|f| f.is_finite())
            .fold(f64::INFINITY, f64::min);
        let shift = if min_finite.is_finite() && min_finite < 0.0 {
            -min_finite
        } else {
            0.0
        };
        let shifted: Vec<f64> = raw.iter().map(|&f| f + shift).collect();
        let normalized = normalize_fitness(&shifted);

        let extent = {
            let positions: Vec<&[f64]> = pop.iter().map(|ind| ind.position.as_slice()).collect();
            population_extent(&positions, bounds)
        };

        // All random draws happen here, in population order.
        let mut merged: Vec<(Origin, Individual)> = pop
            .drain(..)
            .enumerate()
            .map(|(i, ind)| (Origin::Parent(i), ind))
            .collect();
        let parent_count = merged.len();
        for i in 0..parent_count {
            let n_i = normalized.values[i];
            let r = rng.random::<f64>();
            let count = runner_count(n_i, config.max_runners, r);
            let intensity = step_intensity(i, parent_count, extent);
            let polishing = 4 * (i + 1) <= parent_count;
            for k in 0..count {
                // Each further runner of a top-quarter plant probes five
                // times finer, polishing at several depths at once; the
                // rest keep exploring at their rank's scale.
                let depth = if polishing {
                    1.0 - (1.0 - intensity) * 0.2f64.powi(k as i32)
                } else {
                    intensity
                };
                let mut offsets = runner_offsets(depth, dims, &mut rng);
                sparsify_offsets(&mut offsets, &mut rng);
                let parent = &merged[i].1;
                let mut child_pos: Vec<f64> = parent
                    .position
                    .iter()
                    .enumerate()
                    .map(|(j, &y)| y + bounds.span(j) * offsets[j])
                    .collect();
                bounds.clamp(&mut child_pos);
                let fitness = evaluate(&child_pos, &mut evaluations);
                merged.push((
                    Origin::Runner(i),
                    Individual { position: child_pos, fitness, stagnation: 0 },
                ));
            }
        }

        sort_desc_by_fitness(&mut merged, |(_, ind)| ind.fitness);
        merged.truncate(config.population);

        let mut runner_survived = vec![false; parent_count];
        for (origin, _) in &merged {
            if let Origin::Runner(parent_idx) = origin {
                runner_survived[*parent_idx] = true;
            }
        }
        pop = merged
            .into_iter()
            .map(|(origin, mut ind)| {
                match origin {
                    Origin::Parent(i) => {
                        if runner_survived[i] {
                            ind.stagnation = 0;
                        } else {
                            ind.stagnation += 1;
                        }
                    }
                    Origin::Runner(_) => ind.stagnation = 0,
                }
                ind
            })
            .collect();

        if pop[0].fitness > best.fitness {
            best = pop[0].clone();
        }

        // pop[0] carries the incumbent best fitness and is exempt from restart.
        for ind in pop.iter_mut().skip(1) {
            if ind.stagnation > config.stagnation_limit {
                let position = bounds.sample(&mut rng);
                let fitness = evaluate(&position, &mut evaluations);
                *ind = Individual { position, fitness, stagnation: 0 };
                if ind.fitness > best.fitness {
                    best = ind.clone();
                }
            }
        }

        trace.push(best.fitness);
    }

    Ok(OptimizeResult {
        best_position: best.position,
        best_fitness: best.fitness,
        trace,
        evaluations,
    })
}
