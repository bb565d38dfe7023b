//! Shared optimizer plumbing: search-space bounds, the per-run result shape,
//! and the seeded random stream all optimizers consume.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The random stream owned by a single optimizer run.
pub type RunRng = ChaCha8Rng;

/// Optimizer identifiers shared by the harness and CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Appa,
    Pso,
    Ga,
    Gsa,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Appa, Algorithm::Pso, Algorithm::Ga, Algorithm::Gsa];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Appa => "appa",
            Algorithm::Pso => "pso",
            Algorithm::Ga => "ga",
            Algorithm::Gsa => "gsa",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "appa" => Ok(Algorithm::Appa),
            "pso" => Ok(Algorithm::Pso),
            "ga" => Ok(Algorithm::Ga),
            "gsa" => Ok(Algorithm::Gsa),
            other => Err(Error::InvalidConfig(format!(
                "unknown algorithm {other:?}, expected one of appa, pso, ga, gsa"
            ))),
        }
    }
}

/// Per-dimension box constraints `lower_j < upper_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    dims: Vec<(f64, f64)>,
}

impl Bounds {
    pub fn new(dims: Vec<(f64, f64)>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidConfig("bounds must have at least one dimension".into()));
        }
        for (j, &(lo, hi)) in dims.iter().enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(Error::InvalidConfig(format!(
                    "dimension {j}: lower bound {lo} must be below upper bound {hi}"
                )));
            }
        }
        Ok(Self { dims })
    }

    /// The same `[lo, hi]` interval replicated over `dims` dimensions.
    pub fn uniform(lo: f64, hi: f64, dims: usize) -> Result<Self> {
        Self::new(vec![(lo, hi); dims])
    }

    pub fn dims(&self) -> usize {
        self.dims.len()
    }

    pub fn lower(&self, j: usize) -> f64 {
        self.dims[j].0
    }

    pub fn upper(&self, j: usize) -> f64 {
        self.dims[j].1
    }

    pub fn span(&self, j: usize) -> f64 {
        self.dims[j].1 - self.dims[j].0
    }

    pub fn clamp(&self, position: &mut [f64]) {
        for (x, &(lo, hi)) in position.iter_mut().zip(&self.dims) {
            *x = x.clamp(lo, hi);
        }
    }

    pub fn contains(&self, position: &[f64]) -> bool {
        position.len() == self.dims.len()
            && position
                .iter()
                .zip(&self.dims)
                .all(|(&x, &(lo, hi))| x >= lo && x <= hi)
    }

    /// Uniform random point in the box.
    pub fn sample(&self, rng: &mut RunRng) -> Vec<f64> {
        self.dims
            .iter()
            .map(|&(lo, hi)| rng.random_range(lo..hi))
            .collect()
    }
}

/// Outcome of one optimizer run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    /// Position of the best individual ever seen.
    pub best_position: Vec<f64>,
    /// Objective value at `best_position`.
    pub best_fitness: f64,
    /// Best-so-far fitness after each generation (length `max_generations`).
    pub trace: Vec<f64>,
    /// Number of objective evaluations consumed.
    pub evaluations: u64,
}

/// Stable descending sort key for fitness values (ties keep insertion order).
pub(crate) fn sort_desc_by_fitness<T>(items: &mut [T], fitness: impl Fn(&T) -> f64) {
    items.sort_by(|a, b| fitness(b).total_cmp(&fitness(a)));
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn bounds_reject_inverted_intervals() {
        assert!(Bounds::new(vec![(0.0, 1.0), (5.0, 5.0)]).is_err());
        assert!(Bounds::new(vec![(3.0, 2.0)]).is_err());
        assert!(Bounds::new(vec![]).is_err());
        assert!(Bounds::uniform(0.0, 255.0, 4).is_ok());
    }

    #[test]
    fn sampling_stays_inside() {
        let bounds = Bounds::new(vec![(0.0, 1.0), (-5.0, 5.0), (100.0, 255.0)]).unwrap();
        let mut rng = RunRng::seed_from_u64(7);
        for _ in 0..200 {
            let p = bounds.sample(&mut rng);
            assert!(bounds.contains(&p));
        }
    }

    #[test]
    fn algorithm_names_round_trip() {
        for alg in Algorithm::ALL {
            assert_eq!(alg.name().parse::<Algorithm>().unwrap(), alg);
        }
        assert!("annealing".parse::<Algorithm>().is_err());
    }

    #[test]
    fn stable_sort_is_descending() {
        let mut v = vec![(1.0, 'a'), (3.0, 'b'), (3.0, 'c'), (2.0, 'd')];
        sort_desc_by_fitness(&mut v, |x| x.0);
        let order: String = v.iter().map(|x| x.1).collect();
        assert_eq!(order, "bcda");
    }
}
