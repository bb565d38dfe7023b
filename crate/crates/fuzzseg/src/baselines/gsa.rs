//! Gravitational search maximizer.

use rand::{Rng, SeedableRng};

use crate::error::Result;
use crate::optimize::{OptimizeResult, RunRng};

use super::{normalized_masses, BaselineConfig};

const DISTANCE_EPS: f64 = 1e-10;

/// Standard GSA: agents attract each other in proportion to fitness-derived
/// masses under a decaying gravitational constant, with only the `k_best`
/// heaviest agents exerting force; `k_best` shrinks linearly from the whole
/// population to one.
pub fn gsa_optimize(
    objective: impl Fn(&[f64]) -> f64,
    config: &BaselineConfig,
) -> Result<OptimizeResult> {
    config.validate()?;
    let bounds = &config.bounds;
    let dims = bounds.dims();
    let params = config.tuning.gsa;
    let n = config.population;
    let mut rng = RunRng::seed_from_u64(config.seed);
    let mut evaluations: u64 = 0;

    let mut positions: Vec<Vec<f64>> = (0..n).map(|_| bounds.sample(&mut rng)).collect();
    let mut velocities = vec![vec![0.0; dims]; n];
    let mut fitness: Vec<f64> = positions
        .iter()
        .map(|x| {
            evaluations += 1;
            objective(x)
        })
        .collect();

    let mut best_idx = argmax(&fitness);
    let mut best = positions[best_idx].clone();
    let mut best_fit = fitness[best_idx];

    let g_max = config.max_generations;
    let mut trace = Vec::with_capacity(g_max);
    for t in 0..g_max {
        let g = params.g0 * (-params.decay * t as f64 / g_max as f64).exp();
        let masses = normalized_masses(&fitness);

        // Indices of the k heaviest agents, shrinking linearly to one.
        let k_best = if g_max > 1 {
            let span = (n - 1) as f64;
            (n as f64 - span * t as f64 / (g_max - 1) as f64).round() as usize
        } else {
            n
        }
        .clamp(1, n);
        let mut ranked: Vec<usize> = (0..n).collect();
        ranked.sort_by(|&a, &b| masses[b].total_cmp(&masses[a]));
        ranked.truncate(k_best);

        for i in 0..n {
            let mut acceleration = vec![0.0; dims];
            for &j in &ranked {
                if j == i {
                    continue;
                }
                let distance: f64 = positions[i]
                    .iter()
                    .zip(&positions[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                let pull = rng.random::<f64>() * g * masses[j] / (distance + DISTANCE_EPS);
                for d in 0..dims {
                    acceleration[d] += pull * (positions[j][d] - positions[i][d]);
                }
            }
            for d in 0..dims {
                velocities[i][d] = rng.random::<f64>() * velocities[i][d] + acceleration[d];
                positions[i][d] = (positions[i][d] + velocities[i][d])
                    .clamp(bounds.lower(d), bounds.upper(d));
            }
            evaluations += 1;
            fitness[i] = objective(&positions[i]);
        }

        best_idx = argmax(&fitness);
        if fitness[best_idx] > best_fit {
            best_fit = fitness[best_idx];
            best.clone_from(&positions[best_idx]);
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

fn argmax(values: &[f64]) -> usize {
    let mut idx = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[idx] {
            idx = i;
        }
    }
    idx
}
