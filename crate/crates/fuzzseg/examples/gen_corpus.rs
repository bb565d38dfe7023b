//! Regenerates the bundled synthetic test images under `assets/synthetic/`.
//!
//! Each image is 256x256 with pixels drawn from a seeded Gaussian mixture,
//! giving multi-modal histograms with realistic sampling noise. Run with
//! `cargo run --example gen_corpus` from the crate root.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use fuzzseg::imageio::{save_pgm, GrayImage};

const SIZE: u32 = 256;

/// (mean, std dev, weight) per mode; weights must sum to 1.
fn sample_mixture(modes: &[(f64, f64, f64)], seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pixels = Vec::with_capacity((SIZE * SIZE) as usize);
    for _ in 0..SIZE * SIZE {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut chosen = *modes.last().expect("at least one mode");
        for &mode in modes {
            acc += mode.2;
            if u < acc {
                chosen = mode;
                break;
            }
        }
        let value: f64 = Normal::new(chosen.0, chosen.1)
            .expect("positive std dev")
            .sample(&mut rng);
        pixels.push(value.round().clamp(0.0, 255.0) as u8);
    }
    GrayImage::new(SIZE, SIZE, 256, pixels).expect("valid image")
}

type ModeSpec = (&'static str, &'static [(f64, f64, f64)], u64);

fn main() {
    let corpus: &[ModeSpec] = &[
        (
            "peaks4",
            &[
                (40.0, 12.0, 0.35),
                (110.0, 18.0, 0.30),
                (190.0, 15.0, 0.25),
                (235.0, 8.0, 0.10),
            ],
            1,
        ),
        ("bimodal", &[(70.0, 20.0, 0.55), (180.0, 25.0, 0.45)], 2),
        (
            "trimodal",
            &[(30.0, 10.0, 0.3), (128.0, 22.0, 0.4), (210.0, 12.0, 0.3)],
            3,
        ),
        (
            "skewed",
            &[(25.0, 15.0, 0.7), (140.0, 30.0, 0.2), (240.0, 6.0, 0.1)],
            4,
        ),
    ];

    let out_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("assets/synthetic");
    std::fs::create_dir_all(&out_dir).expect("create assets dir");
    for (name, modes, seed) in corpus {
        let img = sample_mixture(modes, *seed);
        let path = out_dir.join(format!("{name}.pgm"));
        save_pgm(&img, &path).expect("write image");
        println!("wrote {}", path.display());
    }
}
