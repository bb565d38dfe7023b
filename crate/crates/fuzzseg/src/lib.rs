//! Multi-level grayscale image thresholding by type-II fuzzy entropy
//! maximization.
//!
//! The pipeline: load an image ([`imageio`]), reduce it to a normalized
//! histogram, maximize the type-II fuzzy entropy of a candidate breakpoint
//! vector ([`fuzzy_entropy`]) with the plant propagation optimizer ([`appa`])
//! or one of the PSO/GA/GSA baselines ([`baselines`]), turn the best
//! breakpoints into integer thresholds, and render or report the result
//! ([`harness`]).

pub mod appa;
pub mod baselines;
pub mod error;
pub mod fuzzy_entropy;
pub mod harness;
pub mod imageio;
pub mod optimize;

pub use error::{Error, Result};
