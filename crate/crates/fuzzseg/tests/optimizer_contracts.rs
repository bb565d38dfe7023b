//! Behavioral contracts shared by the four optimizers: convergence on a
//! known analytic optimum, determinism under seeds, bound respect,
//! non-decreasing traces, and the evaluation budget.

mod common;

use std::sync::Mutex;

use fuzzseg::appa::{appa_optimize, AppaConfig};
use fuzzseg::baselines::{baseline_optimize, ga_optimize, gsa_optimize, pso_optimize, BaselineConfig};
use fuzzseg::optimize::{Algorithm, Bounds, OptimizeResult};

const SPHERE_CENTER: [f64; 4] = [60.0, 120.0, 33.5, 200.0];

fn sphere(x: &[f64]) -> f64 {
    -x.iter()
        .zip(&SPHERE_CENTER)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
}

fn run(algorithm: Algorithm, seed: u64, generations: usize, bounds: Bounds) -> OptimizeResult {
    match algorithm {
        Algorithm::Appa => {
            let mut config = AppaConfig::new(bounds, seed);
            config.max_generations = generations;
            appa_optimize(sphere, &config).unwrap()
        }
        baseline => {
            let mut config = BaselineConfig::new(baseline, bounds, seed);
            config.max_generations = generations;
            baseline_optimize(sphere, &config).unwrap()
        }
    }
}

fn worst_coordinate_error(position: &[f64]) -> f64 {
    position
        .iter()
        .zip(&SPHERE_CENTER)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

#[test]
fn appa_locates_the_sphere_optimum_every_seed() {
    let bounds = Bounds::uniform(0.0, 255.0, 4).unwrap();
    for seed in 0..10 {
        let result = run(Algorithm::Appa, seed, 100, bounds.clone());
        let err = worst_coordinate_error(&result.best_position);
        assert!(err <= 0.5, "seed {seed}: worst coordinate error {err}");
    }
}

#[test]
fn pso_locates_the_sphere_optimum_every_seed() {
    let bounds = Bounds::uniform(0.0, 255.0, 4).unwrap();
    for seed in 0..10 {
        let result = run(Algorithm::Pso, seed, 100, bounds.clone());
        let err = worst_coordinate_error(&result.best_position);
        assert!(err <= 0.5, "seed {seed}: worst coordinate error {err}");
    }
}

#[test]
fn ga_gets_close_on_most_seeds() {
    let bounds = Bounds::uniform(0.0, 255.0, 4).unwrap();
    let hits = (0..10)
        .filter(|&seed| {
            let result = run(Algorithm::Ga, seed, 100, bounds.clone());
            worst_coordinate_error(&result.best_position) <= 1.0
        })
        .count();
    assert!(hits >= 8, "only {hits}/10 GA runs within 1.0 per coordinate");
}

#[test]
fn gsa_improves_well_past_random_sampling() {
    // The decaying gravitational constant freezes the swarm early at this
    // budget, so GSA localizes the optimum coarsely rather than finely;
    // a quarter of the box is what it reliably delivers in 100 generations.
    let bounds = Bounds::uniform(0.0, 255.0, 4).unwrap();
    let hits = (0..10)
        .filter(|&seed| {
            let result = run(Algorithm::Gsa, seed, 100, bounds.clone());
            worst_coordinate_error(&result.best_position) <= 64.0
        })
        .count();
    assert!(hits >= 8, "only {hits}/10 GSA runs within a quarter box");
}

#[test]
fn appa_reaches_the_exhaustive_grid_floor_on_a_small_histogram() {
    // 8 gray levels, one threshold: a quarter-step exhaustive scan
    // certifies a fitness floor the optimizer must reach (it may exceed it,
    // since the continuous optimum usually sits between grid points).
    use fuzzseg::fuzzy_entropy::{EntropyObjective, HedgeConfig};

    let hist = common::synthetic_hist_l8(0);
    let (grid_max, _) = common::oracle::lv1_grid_max(hist.bins(), 0.25, 2.0);
    let objective = EntropyObjective::new(&hist, HedgeConfig::default());
    let bounds = Bounds::uniform(0.0, 7.0, 2).unwrap();
    for seed in 0..5u64 {
        let config = AppaConfig::new(bounds.clone(), seed);
        let result = appa_optimize(|p| objective.fitness(p), &config).unwrap();
        assert!(
            result.best_fitness >= grid_max - 1e-9,
            "seed {seed}: {} below grid floor {grid_max}",
            result.best_fitness
        );
    }
}

#[test]
fn identical_seeds_reproduce_identical_results() {
    let bounds = Bounds::uniform(0.0, 255.0, 4).unwrap();
    for algorithm in Algorithm::ALL {
        let a = run(algorithm, 99, 40, bounds.clone());
        let b = run(algorithm, 99, 40, bounds.clone());
        assert_eq!(a, b, "{algorithm} differs across identical runs");
        let c = run(algorithm, 100, 40, bounds.clone());
        assert_ne!(a.best_position, c.best_position, "{algorithm} ignores the seed");
    }
}

#[test]
fn traces_are_non_decreasing_and_sized() {
    let bounds = Bounds::uniform(0.0, 255.0, 4).unwrap();
    for algorithm in Algorithm::ALL {
        for seed in [7, 8, 9] {
            let result = run(algorithm, seed, 60, bounds.clone());
            assert_eq!(result.trace.len(), 60);
            assert!(
                result.trace.windows(2).all(|w| w[1] >= w[0]),
                "{algorithm} trace decreased"
            );
            assert_eq!(*result.trace.last().unwrap(), result.best_fitness);
        }
    }
}

#[test]
fn every_evaluated_position_stays_in_bounds() {
    let bounds = Bounds::new(vec![(10.0, 50.0), (-5.0, 5.0), (100.0, 101.0)]).unwrap();
    for algorithm in Algorithm::ALL {
        let seen = Mutex::new(Vec::new());
        let objective = |x: &[f64]| {
            seen.lock().unwrap().push(x.to_vec());
            -x.iter().map(|v| v * v).sum::<f64>()
        };
        match algorithm {
            Algorithm::Appa => {
                let mut config = AppaConfig::new(bounds.clone(), 5);
                config.max_generations = 30;
                appa_optimize(objective, &config).unwrap();
            }
            baseline => {
                let mut config = BaselineConfig::new(baseline, bounds.clone(), 5);
                config.max_generations = 30;
                baseline_optimize(objective, &config).unwrap();
            }
        }
        let seen = seen.into_inner().unwrap();
        assert!(!seen.is_empty());
        for position in seen {
            assert!(
                bounds.contains(&position),
                "{algorithm} evaluated out-of-bounds {position:?}"
            );
        }
    }
}

#[test]
fn appa_best_equals_the_best_evaluation_seen() {
    let bounds = Bounds::uniform(0.0, 255.0, 4).unwrap();
    let best_seen = Mutex::new(f64::NEG_INFINITY);
    let objective = |x: &[f64]| {
        let f = sphere(x);
        let mut guard = best_seen.lock().unwrap();
        if f > *guard {
            *guard = f;
        }
        f
    };
    let mut config = AppaConfig::new(bounds, 11);
    config.max_generations = 50;
    let result = appa_optimize(objective, &config).unwrap();
    assert_eq!(result.best_fitness, best_seen.into_inner().unwrap());
    assert_eq!(result.best_fitness, sphere(&result.best_position));
}

#[test]
fn baselines_respect_the_evaluation_budget() {
    let bounds = Bounds::uniform(0.0, 255.0, 3).unwrap();
    for algorithm in [Algorithm::Pso, Algorithm::Ga, Algorithm::Gsa] {
        let mut config = BaselineConfig::new(algorithm, bounds.clone(), 21);
        config.max_generations = 50;
        let result = baseline_optimize(sphere, &config).unwrap();
        let budget = (config.population * config.max_generations) as i64;
        let used = result.evaluations as i64;
        assert!(
            (used - budget).abs() <= config.population as i64,
            "{algorithm}: {used} evaluations vs budget {budget}"
        );
    }
}

#[test]
fn pso_with_zero_coefficients_is_a_fixed_point() {
    // Zero cognitive/social pull and zero initial velocity: every particle
    // re-evaluates its starting position forever.
    let bounds = Bounds::uniform(0.0, 100.0, 3).unwrap();
    let mut config = BaselineConfig::new(Algorithm::Pso, bounds, 3);
    config.max_generations = 10;
    config.tuning.pso.cognitive = 0.0;
    config.tuning.pso.social = 0.0;

    let seen = Mutex::new(Vec::new());
    let result = pso_optimize(
        |x: &[f64]| {
            seen.lock().unwrap().push(x.to_vec());
            -x.iter().map(|v| v * v).sum::<f64>()
        },
        &config,
    )
    .unwrap();
    let seen = seen.into_inner().unwrap();
    let n = config.population;
    let initial = &seen[..n];
    for (i, position) in seen[n..].iter().enumerate() {
        assert_eq!(position, &initial[i % n], "particle drifted");
    }
    assert!(result.trace.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn ga_selection_only_never_worsens_the_population() {
    // No crossover, no mutation: every child is a tournament winner copied
    // verbatim, so the worst evaluated fitness can only rise, and elitism
    // keeps the best-so-far trace non-decreasing.
    let bounds = Bounds::uniform(0.0, 100.0, 3).unwrap();
    let mut config = BaselineConfig::new(Algorithm::Ga, bounds, 13);
    config.max_generations = 15;
    config.tuning.ga.crossover_rate = 0.0;
    config.tuning.ga.mutation_rate = Some(0.0);

    let seen = Mutex::new(Vec::new());
    let result = ga_optimize(
        |x: &[f64]| {
            let f = -(x[0] - 50.0) * (x[0] - 50.0) - x[1] - x[2];
            seen.lock().unwrap().push(f);
            f
        },
        &config,
    )
    .unwrap();
    let seen = seen.into_inner().unwrap();
    let n = config.population;
    let minima: Vec<f64> = seen
        .chunks(n)
        .map(|batch| batch.iter().copied().fold(f64::INFINITY, f64::min))
        .collect();
    for pair in minima.windows(2) {
        assert!(pair[1] >= pair[0], "population minimum worsened: {minima:?}");
    }
    assert!(result.trace.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn gsa_single_agent_never_moves() {
    let bounds = Bounds::uniform(0.0, 100.0, 3).unwrap();
    let mut config = BaselineConfig::new(Algorithm::Gsa, bounds, 17);
    config.population = 1;
    config.max_generations = 12;

    let seen = Mutex::new(Vec::new());
    gsa_optimize(
        |x: &[f64]| {
            seen.lock().unwrap().push(x.to_vec());
            -x.iter().map(|v| v * v).sum::<f64>()
        },
        &config,
    )
    .unwrap();
    let seen = seen.into_inner().unwrap();
    for position in &seen[1..] {
        assert_eq!(position, &seen[0], "lone agent moved with no force on it");
    }
}
