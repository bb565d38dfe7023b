//! Shared fixtures and independent oracles for the integration suites.
#![allow(dead_code)]

use std::path::PathBuf;

use fuzzseg::imageio::{GrayImage, Histogram};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Straight-loop reimplementation of the type-II fuzzy entropy objective,
/// written independently of the library code paths it cross-checks.
pub mod oracle {
    /// Trapezoid membership evaluated exactly as the piecewise definition.
    fn mu(x: f64, a_prev: f64, c_prev: f64, a_k: f64, c_k: f64) -> f64 {
        if x <= a_prev {
            return 0.0;
        }
        if x <= c_prev {
            return (x - a_prev) / (c_prev - a_prev);
        }
        if x <= a_k {
            return 1.0;
        }
        if x <= c_k {
            return (c_k - x) / (c_k - a_k);
        }
        0.0
    }

    /// Total entropy over all `LV + 1` levels for canonical (ascending)
    /// breakpoint pairs.
    pub fn total_entropy(bins: &[f64], pairs: &[(f64, f64)], alpha: f64) -> f64 {
        let levels = bins.len();
        let lv = pairs.len();
        let top = (levels - 1) as f64;
        let mut total = 0.0;
        for k in 1..=lv + 1 {
            let (a_prev, c_prev) = if k == 1 { (0.0, 0.0) } else { pairs[k - 2] };
            let (a_k, c_k) = if k == lv + 1 { (top, top) } else { pairs[k - 1] };

            let mut weights = Vec::with_capacity(levels);
            let mut p_k = 0.0;
            for (i, &h) in bins.iter().enumerate() {
                let m = mu(i as f64, a_prev, c_prev, a_k, c_k);
                let band = m.powf(1.0 / alpha) - m.powf(alpha);
                let w = h * band;
                weights.push(w);
                p_k += w;
            }
            if p_k <= 0.0 {
                continue;
            }
            let mut h_k = 0.0;
            for w in weights {
                let q = w / p_k;
                if q > 0.0 {
                    h_k -= q * q.ln();
                }
            }
            total += h_k;
        }
        total
    }

    /// Exhaustive maximum of `total_entropy` over the `(a, c)` grid with the
    /// given step, constrained to `a <= c`.
    pub fn lv1_grid_max(bins: &[f64], step: f64, alpha: f64) -> (f64, (f64, f64)) {
        let top = (bins.len() - 1) as f64;
        let n = (top / step).round() as usize;
        let mut best = f64::NEG_INFINITY;
        let mut best_pair = (0.0, 0.0);
        for ai in 0..=n {
            let a = ai as f64 * step;
            for ci in ai..=n {
                let c = ci as f64 * step;
                let value = total_entropy(bins, &[(a, c)], alpha);
                if value > best {
                    best = value;
                    best_pair = (a, c);
                }
            }
        }
        (best, best_pair)
    }
}

/// Two-pass population standard deviation, kept separate from the library's.
pub fn two_pass_population_std(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let mut acc = 0.0;
    for &x in xs {
        acc += (x - mean) * (x - mean);
    }
    (acc / n).sqrt()
}

/// Small multi-modal histograms with 8 gray levels, deterministic per seed.
pub fn synthetic_hist_l8(seed: u64) -> Histogram {
    let mut raw = [0.0f64; 8];
    let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for (i, r) in raw.iter_mut().enumerate() {
        let d1 = (i as f64 - 2.0) / 1.2;
        let d2 = (i as f64 - 6.0) / 0.9;
        *r = 0.6 * (-0.5 * d1 * d1).exp() + 0.4 * (-0.5 * d2 * d2).exp() + 0.05 * next();
    }
    let sum: f64 = raw.iter().sum();
    let mut bins: Vec<f64> = raw.iter().map(|v| v / sum).collect();
    let correction = 1.0 - bins.iter().sum::<f64>();
    bins[0] += correction;
    Histogram::from_bins(bins, 4096).unwrap()
}

/// 256-level image sampled from a Gaussian mixture; realistic histogram noise.
pub fn mixture_image(modes: &[(f64, f64, f64)], seed: u64, pixels: usize) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(pixels);
    for _ in 0..pixels {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut chosen = *modes.last().unwrap();
        for &mode in modes {
            acc += mode.2;
            if u < acc {
                chosen = mode;
                break;
            }
        }
        let value: f64 = Normal::new(chosen.0, chosen.1).unwrap().sample(&mut rng);
        data.push(value.round().clamp(0.0, 255.0) as u8);
    }
    let width = (pixels as f64).sqrt() as u32;
    let height = pixels as u32 / width;
    GrayImage::new(width, height, 256, data[..(width * height) as usize].to_vec()).unwrap()
}

/// Path of a bundled synthetic corpus image.
pub fn asset(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("assets/synthetic")
        .join(name)
}
