//! Shared fixtures for the benchmarks: deterministic synthetic frames at
//! the sizes the throughput targets care about.

use unveil::{
    synthesize, ChannelTriple, DepthProfile, ImageF, PsfParams, SceneRecipe, TexturePlan,
};

/// A blue-water hazy frame with a depth ramp and an open-water band.
pub fn hazy_frame(width: usize, height: usize) -> ImageF {
    let recipe = SceneRecipe {
        width,
        height,
        seed: 0xBE9C,
        attenuation: ChannelTriple::new(0.45, 0.22, 0.15),
        veiling: ChannelTriple::new(0.08, 0.28, 0.75),
        psf: PsfParams::none(),
        depth: DepthProfile::Ramp {
            near: 1.0,
            far: 22.0,
            far_band: 0.2,
        },
        texture: TexturePlan::default(),
    };
    let scene = recipe.build().expect("valid bench scene");
    synthesize(&scene).expect("synthesis succeeds")
}

/// VGA frame, the size the video-rate target is stated at.
pub fn vga_frame() -> ImageF {
    hazy_frame(640, 480)
}
