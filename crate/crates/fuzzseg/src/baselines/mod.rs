//! Rudimentary PSO, GA, and GSA maximizers sharing the APPA objective,
//! bounds, budget, and result shape. Hyperparameters are textbook defaults
//! and can be overridden through a tuning file.

mod ga;
mod gsa;
mod pso;

pub use ga::ga_optimize;
pub use gsa::gsa_optimize;
pub use pso::pso_optimize;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::{Algorithm, Bounds, OptimizeResult};

/// Global-best PSO constants (constriction-equivalent inertia weights).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsoParams {
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Velocity clamp as a fraction of each dimension's range.
    pub velocity_clamp: f64,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self { inertia: 0.729, cognitive: 1.494, social: 1.494, velocity_clamp: 0.2 }
    }
}

/// Real-coded GA with tournament selection, blend crossover, Gaussian
/// mutation, and elitism of one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaParams {
    pub crossover_rate: f64,
    /// Per-gene mutation probability; `None` means `1 / D`.
    pub mutation_rate: Option<f64>,
    pub tournament_size: usize,
    /// Gaussian mutation standard deviation as a fraction of each range.
    pub mutation_scale: f64,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            crossover_rate: 0.9,
            mutation_rate: None,
            tournament_size: 2,
            mutation_scale: 0.1,
        }
    }
}

/// Gravitational search constants: `G(t) = g0 * exp(-decay * t / g_max)`,
/// with the attracting set shrinking linearly from the whole population to
/// a single agent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GsaParams {
    pub g0: f64,
    pub decay: f64,
}

impl Default for GsaParams {
    fn default() -> Self {
        Self { g0: 100.0, decay: 20.0 }
    }
}

/// Hyperparameter overrides for all three baselines.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct BaselineTuning {
    pub pso: PsoParams,
    pub ga: GaParams,
    pub gsa: GsaParams,
}

/// Shared baseline run configuration; budget semantics match APPA
/// (`population * max_generations` evaluations, within one population).
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineConfig {
    pub algorithm: Algorithm,
    pub population: usize,
    pub max_generations: usize,
    pub bounds: Bounds,
    pub seed: u64,
    pub tuning: BaselineTuning,
}

impl BaselineConfig {
    pub fn new(algorithm: Algorithm, bounds: Bounds, seed: u64) -> Self {
        Self {
            algorithm,
            population: 10 * bounds.dims(),
            max_generations: 100,
            bounds,
            seed,
            tuning: BaselineTuning::default(),
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.algorithm == Algorithm::Appa {
            return Err(Error::InvalidConfig(
                "baseline config cannot select appa; call appa_optimize".into(),
            ));
        }
        if self.population < 1 {
            return Err(Error::InvalidConfig("population must be >= 1".into()));
        }
        if self.max_generations < 1 {
            return Err(Error::InvalidConfig("max_generations must be >= 1".into()));
        }
        Ok(())
    }
}

/// Dispatches to the optimizer selected in the config.
pub fn baseline_optimize(
    objective: impl Fn(&[f64]) -> f64,
    config: &BaselineConfig,
) -> Result<OptimizeResult> {
    match config.algorithm {
        Algorithm::Pso => pso_optimize(objective, config),
        Algorithm::Ga => ga_optimize(objective, config),
        Algorithm::Gsa => gsa_optimize(objective, config),
        Algorithm::Appa => Err(Error::InvalidConfig(
            "baseline config cannot select appa; call appa_optimize".into(),
        )),
    }
}

/// Mass weights for maximization: worst finite fitness gets 0, best gets 1.
/// Invalid (non-finite) candidates get zero mass.
pub(crate) fn normalized_masses(fitness: &[f64]) -> Vec<f64> {
    let finite: Vec<f64> = fitness.iter().copied().filter(|f| f.is_finite()).collect();
    let n = fitness.len();
    if finite.is_empty() {
        return vec![1.0 / n as f64; n];
    }
    let best = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let worst = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = if best == worst {
        fitness
            .iter()
            .map(|f| if f.is_finite() { 1.0 } else { 0.0 })
            .collect()
    } else {
        fitness
            .iter()
            .map(|&f| {
                if f.is_finite() {
                    (f - worst) / (best - worst)
                } else {
                    0.0
                }
            })
            .collect()
    };
    let total: f64 = raw.iter().sum();
    if total <= 0.0 {
        return vec![1.0 / n as f64; n];
    }
    raw.iter().map(|m| m / total).collect()
}
