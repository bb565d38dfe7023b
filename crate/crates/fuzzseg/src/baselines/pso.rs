//! Global-best particle swarm maximizer.

use rand::{Rng, SeedableRng};

use crate::error::Result;
use crate::optimize::{OptimizeResult, RunRng};

use super::BaselineConfig;

/// Standard global-best PSO: inertia plus cognitive and social pulls, with
/// velocities clamped to a fraction of each dimension's range and positions
/// clamped into the box. Velocities start at zero.
pub fn pso_optimize(
    objective: impl Fn(&[f64]) -> f64,
    config: &BaselineConfig,
) -> Result<OptimizeResult> {
    config.validate()?;
    let bounds = &config.bounds;
    let dims = bounds.dims();
    let p = config.tuning.pso;
    let mut rng = RunRng::seed_from_u64(config.seed);
    let mut evaluations: u64 = 0;

    let mut positions: Vec<Vec<f64>> = (0..config.population)
        .map(|_| bounds.sample(&mut rng))
        .collect();
    let mut velocities = vec![vec![0.0; dims]; config.population];
    let mut fitness: Vec<f64> = positions
        .iter()
        .map(|x| {
            evaluations += 1;
            objective(x)
        })
        .collect();

    let mut pbest = positions.clone();
    let mut pbest_fit = fitness.clone();
    let mut gbest_idx = best_index(&fitness);
    let mut gbest = positions[gbest_idx].clone();
    let mut gbest_fit = fitness[gbest_idx];

    let mut trace = Vec::with_capacity(config.max_generations);
    for _ in 0..config.max_generations {
        for i in 0..config.population {
            for j in 0..dims {
                let r1 = rng.random::<f64>();
                let r2 = rng.random::<f64>();
                let v = p.inertia * velocities[i][j]
                    + p.cognitive * r1 * (pbest[i][j] - positions[i][j])
                    + p.social * r2 * (gbest[j] - positions[i][j]);
                let v_max = p.velocity_clamp * bounds.span(j);
                velocities[i][j] = v.clamp(-v_max, v_max);
                positions[i][j] =
                    (positions[i][j] + velocities[i][j]).clamp(bounds.lower(j), bounds.upper(j));
            }
            evaluations += 1;
            fitness[i] = objective(&positions[i]);
            if fitness[i] > pbest_fit[i] {
                pbest_fit[i] = fitness[i];
                pbest[i].clone_from(&positions[i]);
            }
        }
        gbest_idx = best_index(&pbest_fit);
        if pbest_fit[gbest_idx] > gbest_fit {
            gbest_fit = pbest_fit[gbest_idx];
            gbest.clone_from(&pbest[gbest_idx]);
        }
        trace.push(gbest_fit);
    }

    Ok(OptimizeResult {
        best_position: gbest,
        best_fitness: gbest_fit,
        trace,
        evaluations,
    })
}

fn best_index(fitness: &[f64]) -> usize {
    let mut idx = 0;
    for (i, &f) in fitness.iter().enumerate() {
        if f > fitness[idx] {
            idx = i;
        }
    }
    idx
}
