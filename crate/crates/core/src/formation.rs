//! Forward simulator of underwater image formation.
//!
//! The sensed signal is the sum of three components: the directly
//! transmitted scene radiance (attenuated exponentially with range), a
//! forward-scatter blur term, and the backscattered veiling light that
//! grows toward the background signal with range. Synthesizing scenes from
//! known radiance, depth, attenuation and veiling gives every downstream
//! estimator a ground-truth oracle to be tested against.
//!
//! With forward scatter disabled, the synthesized image per channel is
//! exactly `E_o * t + B * (1 - t)` with `t = exp(-c * r)` — the same haze
//! model the recovery stage inverts, which is what makes the simulator a
//! valid oracle for the whole pipeline.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::filter::gaussian_blur_plane;
use crate::img::{ChannelTriple, DepthMap, GrayF, ImageF};

/// Fraction of the blurred direct component added back as forward scatter.
/// The physical effect is a slight additive blur; the weight keeps the
/// haze-model reduction exact when it is zero and mild otherwise.
pub const FORWARD_SCATTER_MIX: f32 = 0.1;

/// Number of discrete blur levels used to approximate the range-dependent
/// point spread function.
const PSF_BANDS: usize = 8;

/// Point-spread parameters: Gaussian sigma grows linearly with range,
/// `sigma(x) = blur_scale * r(x)` pixels. Zero disables forward scatter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsfParams {
    pub blur_scale: f32,
}

impl PsfParams {
    pub fn none() -> Self {
        PsfParams { blur_scale: 0.0 }
    }
}

/// Everything needed to synthesize one frame.
#[derive(Debug, Clone)]
pub struct SceneSpec {
    pub radiance: ImageF,
    pub depth: DepthMap,
    pub attenuation: ChannelTriple,
    pub veiling: ChannelTriple,
    pub psf: PsfParams,
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        self.radiance
            .same_dims(self.depth.width(), self.depth.height())?;
        if !self.attenuation.all_positive() || !self.attenuation.is_finite() {
            return Err(Error::parameter(
                "attenuation",
                self.attenuation.min_component() as f64,
                "> 0 per channel",
            ));
        }
        if !self.veiling.in_unit_open_low() {
            return Err(Error::parameter(
                "veiling",
                self.veiling.min_component() as f64,
                "(0, 1] per channel",
            ));
        }
        if self.psf.blur_scale.is_nan() || self.psf.blur_scale < 0.0 {
            return Err(Error::parameter(
                "blur_scale",
                self.psf.blur_scale as f64,
                ">= 0",
            ));
        }
        Ok(())
    }
}

/// Attenuated direct component: per channel `E_o * exp(-c * r)`.
pub fn direct_transmission(
    radiance: &ImageF,
    depth: &DepthMap,
    attenuation: ChannelTriple,
) -> Result<ImageF> {
    radiance.same_dims(depth.width(), depth.height())?;
    let c = attenuation.as_array();
    let mut out = radiance.clone();
    for (px, &r) in out.data_mut().chunks_exact_mut(3).zip(depth.data()) {
        for (v, &coeff) in px.iter_mut().zip(&c) {
            *v = (*v as f64 * (-(coeff as f64) * r as f64).exp()) as f32;
        }
    }
    Ok(out)
}

/// Per-channel transmission ground truth, `t = exp(-c * r)`.
pub fn channel_transmission(depth: &DepthMap, coeff: f32) -> GrayF {
    let data = depth
        .data()
        .iter()
        .map(|&r| (-(coeff as f64) * r as f64).exp() as f32)
        .collect();
    GrayF::new(depth.width(), depth.height(), data).expect("dimensions preserved")
}

/// Forward-scatter component: the direct image blurred with a
/// range-dependent Gaussian and scaled by [`FORWARD_SCATTER_MIX`]. The
/// spatially varying sigma is quantized into at most [`PSF_BANDS`] levels
/// and blended linearly between the two bracketing levels.
pub fn forward_scatter(direct: &ImageF, depth: &DepthMap, psf: PsfParams) -> Result<ImageF> {
    direct.same_dims(depth.width(), depth.height())?;
    let (w, h) = (direct.width(), direct.height());
    if psf.blur_scale == 0.0 {
        return ImageF::new(w, h, vec![0.0; w * h * 3]);
    }

    let sigma_max = psf.blur_scale * depth.max_range();
    if sigma_max <= 0.0 {
        // zero sigma everywhere: the "blurred" copy is the direct image
        let mut out = direct.clone();
        for v in out.data_mut() {
            *v *= FORWARD_SCATTER_MIX;
        }
        return Ok(out);
    }

    let levels: Vec<f32> = (0..PSF_BANDS)
        .map(|k| sigma_max * k as f32 / (PSF_BANDS - 1) as f32)
        .collect();
    let blurred: Vec<ImageF> = levels
        .iter()
        .map(|&sigma| blur_rgb(direct, sigma))
        .collect();

    let scale = (PSF_BANDS - 1) as f32 / sigma_max;
    let mut out = vec![0.0f32; w * h * 3];
    for (i, &r) in depth.data().iter().enumerate() {
        let s = (psf.blur_scale * r * scale).clamp(0.0, (PSF_BANDS - 1) as f32);
        let k0 = s.floor() as usize;
        let k1 = (k0 + 1).min(PSF_BANDS - 1);
        let frac = s - k0 as f32;
        let a = &blurred[k0].data()[i * 3..i * 3 + 3];
        let b = &blurred[k1].data()[i * 3..i * 3 + 3];
        for ch in 0..3 {
            out[i * 3 + ch] = FORWARD_SCATTER_MIX * (a[ch] + frac * (b[ch] - a[ch]));
        }
    }
    ImageF::new(w, h, out)
}

fn blur_rgb(image: &ImageF, sigma: f32) -> ImageF {
    if sigma <= 0.0 {
        return image.clone();
    }
    let (w, h) = (image.width(), image.height());
    let mut planes = [vec![0.0f32; w * h], vec![0.0; w * h], vec![0.0; w * h]];
    for (i, px) in image.pixels().enumerate() {
        for ch in 0..3 {
            planes[ch][i] = px[ch];
        }
    }
    let blurred: Vec<Vec<f32>> = planes
        .iter()
        .map(|p| gaussian_blur_plane(p, w, h, sigma))
        .collect();
    let mut data = vec![0.0f32; w * h * 3];
    for i in 0..w * h {
        for ch in 0..3 {
            data[i * 3 + ch] = blurred[ch][i];
        }
    }
    ImageF::new(w, h, data).expect("dimensions preserved")
}

/// Backscattered veiling light: per channel `B * (1 - exp(-c * r))`.
pub fn backscatter(veiling: ChannelTriple, depth: &DepthMap, attenuation: ChannelTriple) -> ImageF {
    let b = veiling.as_array();
    let c = attenuation.as_array();
    let mut data = vec![0.0f32; depth.width() * depth.height() * 3];
    for (px, &r) in data.chunks_exact_mut(3).zip(depth.data()) {
        for ch in 0..3 {
            px[ch] = (b[ch] as f64 * (1.0 - (-(c[ch] as f64) * r as f64).exp())) as f32;
        }
    }
    ImageF::new(depth.width(), depth.height(), data).expect("dimensions preserved")
}

/// Total sensed signal: direct + forward scatter + backscatter, clamped to
/// `[0,1]` per channel.
pub fn synthesize(scene: &SceneSpec) -> Result<ImageF> {
    scene.validate()?;
    let direct = direct_transmission(&scene.radiance, &scene.depth, scene.attenuation)?;
    let fwd = forward_scatter(&direct, &scene.depth, scene.psf)?;
    let back = backscatter(scene.veiling, &scene.depth, scene.attenuation);

    let mut out = direct;
    for ((v, &f), &b) in out
        .data_mut()
        .iter_mut()
        .zip(fwd.data())
        .zip(back.data())
    {
        *v = (*v + f + b).clamp(0.0, 1.0);
    }
    Ok(out)
}

/// Procedural depth layouts for test scenes: a fronto-parallel wall, a
/// bottom-to-top plane ramp with an open-water band at the top, and a step
/// edge between a near structure and open water behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DepthProfile {
    Wall { range: f32 },
    Ramp { near: f32, far: f32, far_band: f32 },
    Step { near: f32, far: f32, edge: f32 },
}

impl DepthProfile {
    pub fn build(&self, width: usize, height: usize) -> Result<DepthMap> {
        match *self {
            DepthProfile::Wall { range } => DepthMap::filled(width, height, range),
            DepthProfile::Ramp {
                near,
                far,
                far_band,
            } => {
                let band_rows = ((far_band * height as f32).round() as usize).min(height - 1);
                let ramp_rows = (height - band_rows).max(2);
                let mut data = vec![0.0f32; width * height];
                for y in 0..height {
                    let r = if y < band_rows {
                        far
                    } else {
                        let s = (y - band_rows) as f32 / (ramp_rows - 1) as f32;
                        far + (near - far) * s
                    };
                    data[y * width..(y + 1) * width].fill(r);
                }
                DepthMap::new(width, height, data)
            }
            DepthProfile::Step { near, far, edge } => {
                let split = ((edge * width as f32).round() as usize).clamp(1, (width - 1).max(1));
                let mut data = vec![0.0f32; width * height];
                for row in data.chunks_exact_mut(width) {
                    row[..split].fill(near);
                    row[split..].fill(far);
                }
                DepthMap::new(width, height, data)
            }
        }
    }
}

/// A flat-colored rectangle painted over the procedural texture, in
/// fractional image coordinates. Used for the near-camera bright sand patch
/// and similar constructed failure cases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneFeature {
    pub x: f32,
    pub y: f32,
    pub w: f32,
    pub h: f32,
    pub color: ChannelTriple,
}

/// Procedural radiance texture: a grid of random-albedo blocks with mild
/// per-pixel jitter and a sprinkling of near-black shadow pixels so every
/// patch satisfies the dark-channel prior. Albedo ranges are per channel
/// (seafloor scenes reflect little red). Features are painted last and
/// stay shadow-free.
#[derive(Debug, Clone)]
pub struct TexturePlan {
    pub block: usize,
    pub albedo_lo: ChannelTriple,
    pub albedo_hi: ChannelTriple,
    pub shadow_fraction: f32,
    pub features: Vec<SceneFeature>,
}

impl Default for TexturePlan {
    fn default() -> Self {
        TexturePlan {
            block: 8,
            albedo_lo: ChannelTriple::new(0.04, 0.08, 0.08),
            albedo_hi: ChannelTriple::new(0.30, 0.55, 0.60),
            shadow_fraction: 0.08,
            features: Vec::new(),
        }
    }
}

/// Deterministic, seedable description of a full synthetic scene.
#[derive(Debug, Clone)]
pub struct SceneRecipe {
    pub width: usize,
    pub height: usize,
    pub seed: u64,
    pub attenuation: ChannelTriple,
    pub veiling: ChannelTriple,
    pub psf: PsfParams,
    pub depth: DepthProfile,
    pub texture: TexturePlan,
}

impl SceneRecipe {
    pub fn build(&self) -> Result<SceneSpec> {
        let depth = self.depth.build(self.width, self.height)?;
        let radiance = self.texture.render(self.width, self.height, self.seed)?;
        let scene = SceneSpec {
            radiance,
            depth,
            attenuation: self.attenuation,
            veiling: self.veiling,
            psf: self.psf,
        };
        scene.validate()?;
        Ok(scene)
    }
}

impl TexturePlan {
    pub fn render(&self, width: usize, height: usize, seed: u64) -> Result<ImageF> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let block = self.block.max(1);
        let bx = width.div_ceil(block);
        let by = height.div_ceil(block);
        let lo = self.albedo_lo.as_array();
        let hi = self.albedo_hi.as_array();
        let bases: Vec<[f32; 3]> = (0..bx * by)
            .map(|_| {
                [
                    rng.random_range(lo[0]..=hi[0]),
                    rng.random_range(lo[1]..=hi[1]),
                    rng.random_range(lo[2]..=hi[2]),
                ]
            })
            .collect();

        let mut data = vec![0.0f32; width * height * 3];
        for y in 0..height {
            for x in 0..width {
                let base = bases[(y / block) * bx + (x / block)];
                let i = (y * width + x) * 3;
                let shadow = rng.random::<f32>() < self.shadow_fraction;
                for ch in 0..3 {
                    let jitter = rng.random_range(-0.02f32..=0.02);
                    let v = (base[ch] + jitter).clamp(0.01, 0.99);
                    data[i + ch] = if shadow { v * 0.05 } else { v };
                }
            }
        }

        let mut img = ImageF::new(width, height, data)?;
        for f in &self.features {
            let x0 = (f.x * width as f32).round() as usize;
            let y0 = (f.y * height as f32).round() as usize;
            let x1 = (x0 + (f.w * width as f32).round() as usize).min(width);
            let y1 = (y0 + (f.h * height as f32).round() as usize).min(height);
            for y in y0..y1 {
                for x in x0..x1 {
                    let jitter = rng.random_range(-0.015f32..=0.015);
                    img.set_pixel(
                        x,
                        y,
                        [
                            (f.color.r + jitter).clamp(0.0, 1.0),
                            (f.color.g + jitter).clamp(0.0, 1.0),
                            (f.color.b + jitter).clamp(0.0, 1.0),
                        ],
                    );
                }
            }
        }
        Ok(img)
    }
}
