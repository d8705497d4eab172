//! Shared test support: an independent brute-force dark-channel oracle,
//! the deterministic synthetic scene suites the acceptance criteria run
//! on, and a tiny hash for golden-output checks.

// shared across test targets; not every target uses every item
#![allow(dead_code)]

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use unveil::{
    synthesize, ChannelTriple, DepthMap, GrayF, ImageF, PriorMode, PsfParams, SceneFeature,
    SceneSpec, TexturePlan,
};

/// Brute-force dark channel: triple loop over pixels, window, channels.
/// Deliberately independent of the separable min-filter implementation.
pub fn naive_dark_channel(image: &ImageF, radius: usize, mode: PriorMode) -> GrayF {
    let (w, h) = (image.width(), image.height());
    let mut out = GrayF::filled(w, h, 0.0).unwrap();
    for y in 0..h {
        for x in 0..w {
            let mut m = f32::INFINITY;
            for wy in y.saturating_sub(radius)..=(y + radius).min(h - 1) {
                for wx in x.saturating_sub(radius)..=(x + radius).min(w - 1) {
                    let px = image.pixel(wx, wy);
                    let v = match mode {
                        PriorMode::Classic => px[0].min(px[1]).min(px[2]),
                        PriorMode::Underwater => px[1].min(px[2]),
                        PriorMode::RedComplement => (1.0 - px[0]).min(px[1]).min(px[2]),
                        PriorMode::ShiftedRgb => (1.0 - px[0]).min(1.0 - px[1]).min(px[2]),
                    };
                    m = m.min(v);
                }
            }
            out.set(x, y, m);
        }
    }
    out
}

pub const SUITE_WIDTH: usize = 96;
pub const SUITE_HEIGHT: usize = 128;

/// One synthetic scene with its ground truth.
pub struct SuiteScene {
    pub scene: SceneSpec,
    pub hazy: ImageF,
}

impl SuiteScene {
    pub fn veiling(&self) -> ChannelTriple {
        self.scene.veiling
    }

    pub fn attenuation(&self) -> ChannelTriple {
        self.scene.attenuation
    }

    pub fn radiance(&self) -> &ImageF {
        &self.scene.radiance
    }

    /// Ground-truth transmission of the least attenuated channel.
    pub fn t_min_truth(&self) -> GrayF {
        let c_min = self
            .attenuation()
            .min_component();
        unveil::channel_transmission(&self.scene.depth, c_min)
    }
}

/// Three-plateau depth: open water at the top (for the veiling asymptote),
/// a midfield plateau carrying most of the image, and a near plateau where
/// the painted features sit. Plateaus keep the windowed minimum unbiased
/// away from the two boundaries.
fn terraced_depth(near: f32, mid: f32, far: f32) -> DepthMap {
    let (w, h) = (SUITE_WIDTH, SUITE_HEIGHT);
    let far_rows = (0.15 * h as f32) as usize;
    let mid_rows = (0.75 * h as f32) as usize;
    let mut data = vec![0.0f32; w * h];
    for y in 0..h {
        let r = if y < far_rows {
            far
        } else if y < mid_rows {
            mid
        } else {
            near
        };
        data[y * w..(y + 1) * w].fill(r);
    }
    DepthMap::new(w, h, data).unwrap()
}

fn suite_texture(seed: u64) -> ImageF {
    let plan = TexturePlan {
        features: vec![
            // bright sand patch close to the camera: the classic-prior trap
            SceneFeature {
                x: 0.08,
                y: 0.76,
                w: 0.19,
                h: 0.14,
                color: ChannelTriple::new(0.85, 0.85, 0.75),
            },
            // dark teal rock: what the shifted prior mistakes for open
            // water once the veil is green instead of blue
            SceneFeature {
                x: 0.60,
                y: 0.76,
                w: 0.19,
                h: 0.14,
                color: ChannelTriple::new(0.05, 0.22, 0.45),
            },
        ],
        ..TexturePlan::default()
    };
    plan.render(SUITE_WIDTH, SUITE_HEIGHT, seed).unwrap()
}

fn build(scene: SceneSpec) -> SuiteScene {
    let hazy = synthesize(&scene).unwrap();
    SuiteScene { scene, hazy }
}

/// 20 blue-water scenes: red attenuates fastest, the background signal is
/// blue dominant, max optical depth >= 3.3 in the clearest channel.
pub fn blue_suite() -> Vec<SuiteScene> {
    (0..20u64)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(0xB1_0000 + i);
            let c_b = rng.random_range(0.10f32..0.20);
            let c_g = c_b * rng.random_range(1.4f32..1.9);
            let c_r = c_b * rng.random_range(3.2f32..4.2);
            let veiling = ChannelTriple::new(
                rng.random_range(0.04f32..0.10),
                rng.random_range(0.20f32..0.30),
                rng.random_range(0.68f32..0.85),
            );
            let u_far = rng.random_range(3.3f32..4.2);
            let depth = terraced_depth(0.5 / c_b, 1.7 / c_b, u_far / c_b);
            build(SceneSpec {
                radiance: suite_texture(0xB2_0000 + i),
                depth,
                attenuation: ChannelTriple::new(c_r, c_g, c_b),
                veiling,
                psf: PsfParams::none(),
            })
        })
        .collect()
}

/// 10 green-water scenes: green is now the clearest channel and the veil is
/// green dominant, the condition that breaks the blue-shift assumption.
pub fn green_suite() -> Vec<SuiteScene> {
    (0..10u64)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(0x62_0000 + i);
            let c_g = rng.random_range(0.10f32..0.18);
            let c_b = c_g * rng.random_range(1.25f32..1.6);
            let c_r = c_g * rng.random_range(4.0f32..5.5);
            let veiling = ChannelTriple::new(
                rng.random_range(0.03f32..0.08),
                rng.random_range(0.62f32..0.78),
                rng.random_range(0.30f32..0.45),
            );
            let u_far = rng.random_range(3.3f32..4.2);
            let depth = terraced_depth(0.5 / c_g, 1.6 / c_g, u_far / c_g);
            build(SceneSpec {
                radiance: suite_texture(0x63_0000 + i),
                depth,
                attenuation: ChannelTriple::new(c_r, c_g, c_b),
                veiling,
                psf: PsfParams::none(),
            })
        })
        .collect()
}

pub fn linf(a: ChannelTriple, b: ChannelTriple) -> f32 {
    (a.r - b.r).abs().max((a.g - b.g).abs()).max((a.b - b.b).abs())
}

/// FNV-1a, 64-bit: stable fingerprint for golden outputs.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}
