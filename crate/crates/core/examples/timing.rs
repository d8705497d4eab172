//! Prints per-stage timings for a full-pipeline run on a VGA-sized
//! synthetic frame. Handy for checking the video-rate budget.

use std::time::Instant;

use unveil::pipeline::{enhance_frame, PipelineConfig};
use unveil::{ChannelTriple, DepthProfile, PsfParams, SceneRecipe, TexturePlan};

fn main() {
    let recipe = SceneRecipe {
        width: 640,
        height: 480,
        seed: 1,
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
    let scene = recipe.build().unwrap();
    let hazy = unveil::synthesize(&scene).unwrap();
    let config = PipelineConfig::default();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();

    pool.install(|| {
        // warm up
        enhance_frame(&hazy, &config).unwrap();
        let mut best = f64::INFINITY;
        for _ in 0..3 {
            let start = Instant::now();
            let result = enhance_frame(&hazy, &config).unwrap();
            let total = start.elapsed().as_secs_f64() * 1e3;
            best = best.min(total);
            println!("total {total:.1} ms");
            for (stage, d) in &result.timings {
                println!("  {:<22} {:.2} ms", stage.name(), d.as_secs_f64() * 1e3);
            }
        }
        println!("best {best:.1} ms (single worker)");
    });
}
