//! Acceptance suite: one test per criterion, every tolerance pinned in
//! code. Each test prints a PASS line with its measured numbers; a failed
//! assert names the criterion and the offending measurement.
//!
//! Run with `cargo test -p unveil --test acceptance -- --nocapture`.

mod common;

use std::time::Instant;

use common::{blue_suite, fnv1a64, green_suite, linf, naive_dark_channel, SuiteScene};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use unveil::pipeline::{enhance_frame, Brighten, PipelineConfig};
use unveil::{
    apply_floor, dark_channel, estimate_airlight, estimate_transmission, refine_transmission,
    shift_rgb, ChannelTriple, DepthMap, ImageF, PriorMode, PsfParams, SceneSpec,
    WindowSpec,
};

fn random_image(rng: &mut impl Rng, w: usize, h: usize) -> ImageF {
    let data = (0..w * h * 3).map(|_| rng.random::<f32>()).collect();
    ImageF::new(w, h, data).unwrap()
}

/// Pipeline settings the RMSE criteria run at: the shifted-prior pipeline
/// with brightening disabled, since auto exposure gain would rescale the
/// output relative to the fixed ground-truth radiance.
fn suite_config(use_whitebalance: bool) -> PipelineConfig {
    PipelineConfig {
        prior: PriorMode::ShiftedRgb,
        use_whitebalance,
        brighten: Brighten::Off,
        ..PipelineConfig::default()
    }
}

#[test]
fn acceptance_01_dark_channel_brute_force_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for img_idx in 0..100 {
        let w = rng.random_range(1..=32);
        let h = rng.random_range(1..=32);
        let image = random_image(&mut rng, w, h);
        for radius in [0usize, 1, 2, 7] {
            for mode in PriorMode::ALL {
                let fast = dark_channel(&image, WindowSpec::new(radius), mode);
                let naive = naive_dark_channel(&image, radius, mode);
                assert_eq!(
                    fast.data(),
                    naive.data(),
                    "criterion 1: image {img_idx} ({w}x{h}) radius {radius} mode {mode} diverges from brute force"
                );
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "criterion 1: oracle sweep took {elapsed:?}, budget 10 s"
    );
    println!(
        "criterion 1 PASS: 100 images x 4 radii x 4 modes bit-exact vs brute force in {:.2} s",
        elapsed.as_secs_f64()
    );
}

#[test]
fn acceptance_02_shift_involution_and_mode_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    // 1000 random pixels, exact involution
    let image = random_image(&mut rng, 1000, 1);
    let back = shift_rgb(&shift_rgb(&image));
    assert_eq!(
        back.data(),
        image.data(),
        "criterion 2: shift_rgb is not an exact involution"
    );

    // definitional identity, exact, across radii
    for _ in 0..5 {
        let w = rng.random_range(4..=40);
        let h = rng.random_range(4..=40);
        let img = random_image(&mut rng, w, h);
        for radius in [0usize, 1, 7] {
            let direct = dark_channel(&img, WindowSpec::new(radius), PriorMode::ShiftedRgb);
            let via = dark_channel(&shift_rgb(&img), WindowSpec::new(radius), PriorMode::Classic);
            assert_eq!(
                direct.data(),
                via.data(),
                "criterion 2: ShiftedRgb mode differs from Classic on shifted image"
            );
        }
    }
    println!("criterion 2 PASS: involution exact on 1000 pixels; mode identity exact");
}

fn airlight_for(scene: &SuiteScene, mode: PriorMode) -> ChannelTriple {
    let dark = dark_channel(&scene.hazy, WindowSpec::default(), mode);
    estimate_airlight(&scene.hazy, &dark, unveil::DEFAULT_TOP_FRACTION).unwrap()
}

#[test]
fn acceptance_03_airlight_recovery_shifted_vs_classic() {
    let suite = blue_suite();
    let mut shifted_ok = 0;
    let mut classic_fail = 0;
    let mut worst_shifted = 0.0f32;
    for scene in &suite {
        let err_shifted = linf(airlight_for(scene, PriorMode::ShiftedRgb), scene.veiling());
        let err_classic = linf(airlight_for(scene, PriorMode::Classic), scene.veiling());
        worst_shifted = worst_shifted.max(err_shifted);
        if err_shifted <= 0.05 {
            shifted_ok += 1;
        }
        if err_classic > 0.05 {
            classic_fail += 1;
        }
    }
    assert!(
        shifted_ok >= 18,
        "criterion 3: shifted airlight within 0.05 on only {shifted_ok}/20 scenes"
    );
    assert!(
        classic_fail >= 10,
        "criterion 3: classic airlight failed the bound on only {classic_fail}/20 scenes"
    );
    println!(
        "criterion 3 PASS: shifted ok {shifted_ok}/20 (worst Linf {worst_shifted:.4}), classic fails {classic_fail}/20"
    );
}

#[test]
fn acceptance_04_exact_algebraic_inversion() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst = 0.0f32;
    for _ in 0..6 {
        let (w, h) = (48, 40);
        let c = ChannelTriple::new(
            rng.random_range(0.3f32..0.9),
            rng.random_range(0.25f32..0.7),
            rng.random_range(0.2f32..0.6),
        );
        let c_max = c.r.max(c.g).max(c.b);
        // moderate optical depth: no pixel clamps during synthesis or recovery
        let r_cap = 1.4 / c_max;
        let depth_data: Vec<f32> = (0..w * h).map(|_| rng.random_range(0.0..r_cap)).collect();
        let radiance_data: Vec<f32> = (0..w * h * 3)
            .map(|_| rng.random_range(0.02f32..0.98))
            .collect();
        let scene = SceneSpec {
            radiance: ImageF::new(w, h, radiance_data).unwrap(),
            depth: DepthMap::new(w, h, depth_data).unwrap(),
            attenuation: c,
            veiling: ChannelTriple::new(
                rng.random_range(0.15f32..0.9),
                rng.random_range(0.15f32..0.9),
                rng.random_range(0.15f32..0.9),
            ),
            psf: PsfParams::none(),
        };
        let hazy = unveil::synthesize(&scene).unwrap();

        // recover each channel with its own true transmission map
        for (ch, coeff) in [c.r, c.g, c.b].into_iter().enumerate() {
            let t_true = unveil::channel_transmission(&scene.depth, coeff);
            let t = apply_floor(&t_true, 0.01).unwrap();
            let recovered = unveil::recover_radiance(&hazy, scene.veiling, &t).unwrap();
            for (rec, truth) in recovered
                .data()
                .iter()
                .skip(ch)
                .step_by(3)
                .zip(scene.radiance.data().iter().skip(ch).step_by(3))
            {
                let err = (rec - truth).abs();
                worst = worst.max(err);
                assert!(
                    err <= 1e-6,
                    "criterion 4: channel {ch} inversion error {err}"
                );
            }
        }
    }
    println!("criterion 4 PASS: per-channel inversion max error {worst:.2e} (tolerance 1e-6)");
}

struct SceneRun {
    rmse_ratio: f64,
    contrast_gain: f64,
}

fn run_scene(scene: &SuiteScene, config: &PipelineConfig) -> SceneRun {
    let result = enhance_frame(&scene.hazy, config).unwrap();
    let rmse_hazy = unveil::rmse(&scene.hazy, scene.radiance()).unwrap();
    let rmse_out = unveil::rmse(&result.output, scene.radiance()).unwrap();
    SceneRun {
        rmse_ratio: rmse_out / rmse_hazy,
        contrast_gain: unveil::global_contrast(&result.output)
            - unveil::global_contrast(&scene.hazy),
    }
}

#[test]
fn acceptance_05_end_to_end_haze_reduction_blue() {
    let suite = blue_suite();
    let config = suite_config(false);
    let mut worst_ratio = 0.0f64;
    for (i, scene) in suite.iter().enumerate() {
        let run = run_scene(scene, &config);
        worst_ratio = worst_ratio.max(run.rmse_ratio);
        assert!(
            run.rmse_ratio <= 0.7,
            "criterion 5: scene {i} rmse ratio {:.3} exceeds 0.7",
            run.rmse_ratio
        );
        assert!(
            run.contrast_gain >= 0.0,
            "criterion 5: scene {i} lost contrast ({:.4})",
            run.contrast_gain
        );
    }
    println!(
        "criterion 5 PASS: 20/20 blue scenes, worst rmse ratio {worst_ratio:.3} (bound 0.7), contrast never drops"
    );
}

#[test]
fn acceptance_06_green_water_robustness() {
    let suite = green_suite();

    // white balance on: the haze-reduction criterion still holds
    let config = suite_config(true);
    let mut worst_ratio = 0.0f64;
    for (i, scene) in suite.iter().enumerate() {
        let run = run_scene(scene, &config);
        worst_ratio = worst_ratio.max(run.rmse_ratio);
        assert!(
            run.rmse_ratio <= 0.7,
            "criterion 6: green scene {i} with wb on: rmse ratio {:.3}",
            run.rmse_ratio
        );
        assert!(
            run.contrast_gain >= 0.0,
            "criterion 6: green scene {i} with wb on lost contrast"
        );
    }

    // white balance off: the blue-shift assumption must visibly break
    let mut missed = 0;
    for scene in &suite {
        let err = linf(airlight_for(scene, PriorMode::ShiftedRgb), scene.veiling());
        if err > 0.05 {
            missed += 1;
        }
    }
    assert!(
        missed >= 3,
        "criterion 6: only {missed}/10 green scenes miss the airlight bound without white balance"
    );
    println!(
        "criterion 6 PASS: wb-on worst rmse ratio {worst_ratio:.3}; wb-off misses airlight on {missed}/10"
    );
}

#[test]
fn acceptance_07_transmission_accuracy_with_exact_airlight() {
    let suite = blue_suite();
    let mut worst_mae = 0.0f64;
    for (i, scene) in suite.iter().enumerate() {
        let raw = estimate_transmission(
            &scene.hazy,
            scene.veiling(), // exact airlight injected
            WindowSpec::default(),
            unveil::DEFAULT_OMEGA,
        )
        .unwrap();
        let refined =
            refine_transmission(&raw, &scene.hazy, unveil::RefineParams::default()).unwrap();
        let truth = scene.t_min_truth();
        let mae: f64 = refined
            .data()
            .iter()
            .zip(truth.data())
            .map(|(&a, &b)| (a as f64 - b as f64).abs())
            .sum::<f64>()
            / truth.data().len() as f64;
        worst_mae = worst_mae.max(mae);
        assert!(
            mae <= 0.1,
            "criterion 7: scene {i} refined transmission MAE {mae:.4} exceeds 0.1"
        );
    }
    println!("criterion 7 PASS: worst refined-t MAE {worst_mae:.4} (bound 0.1)");
}

#[test]
fn acceptance_08_white_balance_fixed_points() {
    // constant grays unchanged
    let mut worst_gray = 0.0f32;
    for g in [0.08f32, 0.25, 0.5, 0.77, 0.95] {
        let img = ImageF::filled(24, 20, ChannelTriple::splat(g)).unwrap();
        let out = unveil::local_gray_world(&img, unveil::WbParams::default()).unwrap();
        for (a, b) in img.data().iter().zip(out.data()) {
            worst_gray = worst_gray.max((a - b).abs());
        }
    }
    assert!(
        worst_gray <= 1e-6,
        "criterion 8: gray fixed point violated by {worst_gray}"
    );

    // round trip on 100 random images
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut worst_rt = 0.0f32;
    for _ in 0..100 {
        let w = rng.random_range(4..=24);
        let h = rng.random_range(4..=24);
        let img = random_image(&mut rng, w, h);
        let back = unveil::lalphabeta_to_rgb(&unveil::rgb_to_lalphabeta(&img));
        for (a, b) in img.data().iter().zip(back.data()) {
            worst_rt = worst_rt.max((a - b).abs());
        }
    }
    assert!(
        worst_rt <= 1e-4,
        "criterion 8: round-trip error {worst_rt} exceeds 1e-4"
    );
    println!(
        "criterion 8 PASS: gray fixed point max err {worst_gray:.2e}; round-trip max err {worst_rt:.2e}"
    );
}

#[test]
fn acceptance_09_single_worker_throughput() {
    let scene = unveil::SceneRecipe {
        width: 640,
        height: 480,
        seed: 909,
        attenuation: ChannelTriple::new(0.45, 0.22, 0.15),
        veiling: ChannelTriple::new(0.08, 0.28, 0.75),
        psf: PsfParams::none(),
        depth: unveil::DepthProfile::Ramp {
            near: 1.0,
            far: 22.0,
            far_band: 0.2,
        },
        texture: unveil::TexturePlan::default(),
    }
    .build()
    .unwrap();
    let hazy = unveil::synthesize(&scene).unwrap();
    let config = PipelineConfig::default();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let best_ms = pool.install(|| {
        enhance_frame(&hazy, &config).unwrap(); // warm-up
        (0..3)
            .map(|_| {
                let start = Instant::now();
                let _ = enhance_frame(&hazy, &config).unwrap();
                start.elapsed().as_secs_f64() * 1e3
            })
            .fold(f64::INFINITY, f64::min)
    });
    assert!(
        best_ms <= 200.0,
        "criterion 9: 640x480 single-worker frame took {best_ms:.1} ms, budget 200 ms"
    );
    println!("criterion 9 PASS: 640x480 single-worker best of 3 = {best_ms:.1} ms (budget 200 ms)");
}

/// Golden fingerprints of three fixed-seed scene outputs, quantized to
/// 8 bit. Regenerate deliberately if the pipeline math changes:
/// the test prints actual values on mismatch.
const GOLDEN_HASHES: [u64; 3] = [
    0x64770700dfa43a7f,
    0x745c568b05d8ae6f,
    0x9442217e0e05c89f,
];

#[test]
fn acceptance_10_determinism_and_golden_outputs() {
    let suite = blue_suite();
    let config = PipelineConfig::default();

    // bit-identical across repeated runs
    let first = enhance_frame(&suite[0].hazy, &config).unwrap();
    let second = enhance_frame(&suite[0].hazy, &config).unwrap();
    assert_eq!(
        first.output.data(),
        second.output.data(),
        "criterion 10: repeated runs differ"
    );

    // and across worker counts
    let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let out1 = pool1.install(|| enhance_frame(&suite[0].hazy, &config).unwrap());
    let out4 = pool4.install(|| enhance_frame(&suite[0].hazy, &config).unwrap());
    assert_eq!(
        out1.output.data(),
        out4.output.data(),
        "criterion 10: output depends on worker count"
    );

    // golden hashes over the first three suite scenes
    let mut actual = [0u64; 3];
    for (i, scene) in suite.iter().take(3).enumerate() {
        let result = enhance_frame(&scene.hazy, &config).unwrap();
        actual[i] = fnv1a64(&unveil::to_8bit(&result.output));
    }
    assert_eq!(
        actual, GOLDEN_HASHES,
        "criterion 10: golden hashes changed; actual {actual:#018x?}"
    );
    println!("criterion 10 PASS: bit-identical across runs and worker counts; golden hashes match");
}
