//! Real-coded genetic algorithm maximizer.

use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal};

use crate::error::Result;
use crate::optimize::{OptimizeResult, RunRng};

use super::BaselineConfig;

/// Tournament selection, blend crossover (BLX-0.5), per-gene Gaussian
/// mutation, and elitism of one: the incumbent best replaces the worst
/// child whenever no child matches it.
///
/// Mutation is non-uniform: the standard deviation starts at
/// `mutation_scale * range` and anneals quadratically to zero over the run,
/// so late generations refine instead of rescattering.
pub fn ga_optimize(
    objective: impl Fn(&[f64]) -> f64,
    config: &BaselineConfig,
) -> Result<OptimizeResult> {
    config.validate()?;
    let bounds = &config.bounds;
    let dims = bounds.dims();
    let g = config.tuning.ga;
    let mutation_rate = g.mutation_rate.unwrap_or(1.0 / dims as f64);
    let tournament = g.tournament_size.max(1);
    let mut rng = RunRng::seed_from_u64(config.seed);
    let mut evaluations: u64 = 0;

    let mut population: Vec<Vec<f64>> = (0..config.population)
        .map(|_| bounds.sample(&mut rng))
        .collect();
    let mut fitness: Vec<f64> = population
        .iter()
        .map(|x| {
            evaluations += 1;
            objective(x)
        })
        .collect();

    let mut best_idx = argmax(&fitness);
    let mut best = population[best_idx].clone();
    let mut best_fit = fitness[best_idx];

    let mut trace = Vec::with_capacity(config.max_generations);
    for generation in 0..config.max_generations {
        let remaining = 1.0 - generation as f64 / config.max_generations as f64;
        let anneal = remaining * remaining;
        let mut children = Vec::with_capacity(config.population);
        let mut child_fit = Vec::with_capacity(config.population);
        for _ in 0..config.population {
            let a = select(&fitness, tournament, &mut rng);
            let b = select(&fitness, tournament, &mut rng);
            let mut child = if rng.random::<f64>() < g.crossover_rate {
                blend(&population[a], &population[b], &mut rng)
            } else {
                population[a].clone()
            };
            for (j, gene) in child.iter_mut().enumerate() {
                if rng.random::<f64>() < mutation_rate {
                    let sd = g.mutation_scale * bounds.span(j) * anneal;
                    if sd > 0.0 {
                        let normal = Normal::new(0.0, sd).expect("positive std dev");
                        *gene += normal.sample(&mut rng);
                    }
                }
            }
            bounds.clamp(&mut child);
            evaluations += 1;
            child_fit.push(objective(&child));
            children.push(child);
        }

        // Elitism of one: keep the incumbent if every child falls short.
        let child_best = argmax(&child_fit);
        if child_fit[child_best] < best_fit {
            let worst = argmin(&child_fit);
            children[worst].clone_from(&best);
            child_fit[worst] = best_fit;
        }

        population = children;
        fitness = child_fit;
        best_idx = argmax(&fitness);
        if fitness[best_idx] > best_fit {
            best_fit = fitness[best_idx];
            best.clone_from(&population[best_idx]);
        }
        trace.push(best_fit);
    }

    Ok(OptimizeResult {
        best_position: best,
        best_fitness: best_fit,
        trace,
        evaluations,
    })
}

/// Index of the best of `tournament` uniformly drawn contestants.
fn select(fitness: &[f64], tournament: usize, rng: &mut RunRng) -> usize {
    let mut winner = rng.random_range(0..fitness.len());
    for _ in 1..tournament {
        let contender = rng.random_range(0..fitness.len());
        if fitness[contender] > fitness[winner] {
            winner = contender;
        }
    }
    winner
}

/// BLX-0.5: each gene uniform over the parent interval widened by half its
/// width on both sides.
fn blend(a: &[f64], b: &[f64], rng: &mut RunRng) -> Vec<f64> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
            let width = hi - lo;
            if width == 0.0 {
                x
            } else {
                rng.random_range(lo - 0.5 * width..hi + 0.5 * width)
            }
        })
        .collect()
}

fn argmax(values: &[f64]) -> usize {
    let mut idx = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[idx] {
            idx = i;
        }
    }
    idx
}

fn argmin(values: &[f64]) -> usize {
    let mut idx = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[idx] {
            idx = i;
        }
    }
    idx
}
