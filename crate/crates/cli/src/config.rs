//! Flat key=value configuration files: pipeline settings, synthetic scene
//! descriptions, and the ground-truth manifests written by `synth`.
//!
//! Syntax: one `key = value` per line, `#` comments, blank lines ignored.
//! Unknown keys are hard errors so typos cannot silently fall back to
//! defaults. Command-line flags override file values.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

use unveil::pipeline::{Brighten, PipelineConfig};
use unveil::{
    ChannelTriple, DepthProfile, PriorMode, PsfParams, SceneFeature, SceneRecipe, TexturePlan,
    WindowSpec,
};

/// Parse `key = value` lines, preserving order.
pub fn parse_kv(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected `key = value`, got `{raw}`", lineno + 1))?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

pub fn read_kv_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    parse_kv(&text).with_context(|| format!("in {}", path.display()))
}

fn parse_f32(key: &str, value: &str) -> Result<f32> {
    value
        .parse::<f32>()
        .map_err(|_| anyhow!("key `{key}`: `{value}` is not a number"))
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value
        .parse::<usize>()
        .map_err(|_| anyhow!("key `{key}`: `{value}` is not a non-negative integer"))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "on" | "true" | "1" | "yes" => Ok(true),
        "off" | "false" | "0" | "no" => Ok(false),
        _ => bail!("key `{key}`: `{value}` is not a boolean (on/off)"),
    }
}

fn parse_triple(key: &str, value: &str) -> Result<ChannelTriple> {
    let parts: Vec<&str> = value.split_whitespace().collect();
    if parts.len() != 3 {
        bail!("key `{key}`: expected three numbers, got `{value}`");
    }
    Ok(ChannelTriple::new(
        parse_f32(key, parts[0])?,
        parse_f32(key, parts[1])?,
        parse_f32(key, parts[2])?,
    ))
}

pub fn parse_prior(value: &str) -> Result<PriorMode> {
    match value {
        "classic" => Ok(PriorMode::Classic),
        "udcp" => Ok(PriorMode::Underwater),
        "rdcp" => Ok(PriorMode::RedComplement),
        "shifted" => Ok(PriorMode::ShiftedRgb),
        _ => bail!("unknown prior `{value}` (classic|udcp|rdcp|shifted)"),
    }
}

/// Every pipeline tunable, in file-addressable form.
#[derive(Debug, Clone, Default)]
pub struct PipelineSettings {
    pub config: PipelineConfig,
}

impl PipelineSettings {
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        for (key, value) in read_kv_file(path)? {
            self.apply_key(&key, &value)
                .with_context(|| format!("in {}", path.display()))?;
        }
        Ok(())
    }

    pub fn apply_key(&mut self, key: &str, value: &str) -> Result<()> {
        let c = &mut self.config;
        match key {
            "prior" => c.prior = parse_prior(value)?,
            "window_radius" => c.window = WindowSpec::new(parse_usize(key, value)?),
            "omega" => c.omega = parse_f32(key, value)?,
            "t0" => c.t0 = parse_f32(key, value)?,
            "refine_radius" => c.refine.radius = parse_usize(key, value)?,
            "refine_spatial_sigma" => c.refine.spatial_sigma = parse_f32(key, value)?,
            "refine_range_sigma" => c.refine.range_sigma = parse_f32(key, value)?,
            "wb_patch_radius" => {
                let r = parse_usize(key, value)?;
                c.wb.patch_radius = if r == 0 { None } else { Some(r) };
            }
            "wb_strength" => c.wb.strength = parse_f32(key, value)?,
            "use_whitebalance" => c.use_whitebalance = parse_bool(key, value)?,
            "top_fraction" => c.top_fraction = parse_f32(key, value)?,
            "brighten" => {
                c.brighten = match value {
                    "auto" => Brighten::Auto,
                    "off" => Brighten::Off,
                    other => {
                        let parts: Vec<&str> = other.split_whitespace().collect();
                        if parts.len() != 2 {
                            bail!(
                                "key `brighten`: expected auto, off, or `GAIN GAMMA`, got `{other}`"
                            );
                        }
                        Brighten::Manual {
                            gain: parse_f32(key, parts[0])?,
                            gamma: parse_f32(key, parts[1])?,
                        }
                    }
                };
            }
            _ => bail!("unknown config key `{key}`"),
        }
        Ok(())
    }

    /// The fully resolved configuration, for the run report.
    pub fn emit(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        let _ = writeln!(out, "config.prior = {}", c.prior);
        let _ = writeln!(out, "config.window_radius = {}", c.window.radius);
        let _ = writeln!(out, "config.omega = {}", c.omega);
        let _ = writeln!(out, "config.t0 = {}", c.t0);
        let _ = writeln!(out, "config.refine_radius = {}", c.refine.radius);
        let _ = writeln!(out, "config.refine_spatial_sigma = {}", c.refine.spatial_sigma);
        let _ = writeln!(out, "config.refine_range_sigma = {}", c.refine.range_sigma);
        let _ = writeln!(
            out,
            "config.wb_patch_radius = {}",
            c.wb.patch_radius.unwrap_or(0)
        );
        let _ = writeln!(out, "config.wb_strength = {}", c.wb.strength);
        let _ = writeln!(
            out,
            "config.use_whitebalance = {}",
            if c.use_whitebalance { "on" } else { "off" }
        );
        let _ = writeln!(out, "config.top_fraction = {}", c.top_fraction);
        let brighten = match c.brighten {
            Brighten::Auto => "auto".to_string(),
            Brighten::Off => "off".to_string(),
            Brighten::Manual { gain, gamma } => format!("{gain} {gamma}"),
        };
        let _ = writeln!(out, "config.brighten = {brighten}");
        out
    }
}

/// Scene description consumed by `synth`.
pub fn parse_scene(path: &Path) -> Result<SceneRecipe> {
    let mut recipe = SceneRecipe {
        width: 0,
        height: 0,
        seed: 0,
        attenuation: ChannelTriple::new(0.6, 0.1, 0.05),
        veiling: ChannelTriple::new(0.1, 0.3, 0.8),
        psf: PsfParams::none(),
        depth: DepthProfile::Wall { range: 10.0 },
        texture: TexturePlan::default(),
    };
    let mut depth_kind = "wall".to_string();
    let mut near = 1.0f32;
    let mut far = 30.0f32;
    let mut range = 10.0f32;
    let mut far_band = 0.2f32;
    let mut edge = 0.5f32;

    for (key, value) in read_kv_file(path)? {
        match key.as_str() {
            "width" => recipe.width = parse_usize(&key, &value)?,
            "height" => recipe.height = parse_usize(&key, &value)?,
            "seed" => {
                recipe.seed = value
                    .parse::<u64>()
                    .map_err(|_| anyhow!("key `seed`: `{value}` is not an integer"))?;
            }
            "attenuation" => recipe.attenuation = parse_triple(&key, &value)?,
            "veiling" => recipe.veiling = parse_triple(&key, &value)?,
            "blur_scale" => recipe.psf.blur_scale = parse_f32(&key, &value)?,
            "depth" => depth_kind = value,
            "depth_near" => near = parse_f32(&key, &value)?,
            "depth_far" => far = parse_f32(&key, &value)?,
            "depth_range" => range = parse_f32(&key, &value)?,
            "depth_far_band" => far_band = parse_f32(&key, &value)?,
            "depth_edge" => edge = parse_f32(&key, &value)?,
            "texture_block" => recipe.texture.block = parse_usize(&key, &value)?,
            "albedo_lo" => recipe.texture.albedo_lo = parse_triple(&key, &value)?,
            "albedo_hi" => recipe.texture.albedo_hi = parse_triple(&key, &value)?,
            "shadow_fraction" => recipe.texture.shadow_fraction = parse_f32(&key, &value)?,
            k if k.starts_with("feature.") => {
                let parts: Vec<&str> = value.split_whitespace().collect();
                if parts.len() != 7 {
                    bail!("key `{k}`: expected `x y w h r g b`, got `{value}`");
                }
                let nums: Result<Vec<f32>> =
                    parts.iter().map(|p| parse_f32(k, p)).collect();
                let nums = nums?;
                recipe.texture.features.push(SceneFeature {
                    x: nums[0],
                    y: nums[1],
                    w: nums[2],
                    h: nums[3],
                    color: ChannelTriple::new(nums[4], nums[5], nums[6]),
                });
            }
            _ => bail!("unknown scene key `{key}` in {}", path.display()),
        }
    }

    if recipe.width == 0 || recipe.height == 0 {
        bail!("scene config must set nonzero `width` and `height`");
    }
    recipe.depth = match depth_kind.as_str() {
        "wall" => DepthProfile::Wall { range },
        "ramp" => DepthProfile::Ramp {
            near,
            far,
            far_band,
        },
        "step" => DepthProfile::Step { near, far, edge },
        other => bail!("unknown depth profile `{other}` (wall|ramp|step)"),
    };
    Ok(recipe)
}

/// Serialize a recipe back into the scene config format `parse_scene`
/// reads; `synth` records this next to its outputs so every synthetic
/// frame is reproducible from files alone.
pub fn emit_scene(recipe: &SceneRecipe) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "width = {}", recipe.width);
    let _ = writeln!(out, "height = {}", recipe.height);
    let _ = writeln!(out, "seed = {}", recipe.seed);
    let a = recipe.attenuation;
    let _ = writeln!(out, "attenuation = {} {} {}", a.r, a.g, a.b);
    let v = recipe.veiling;
    let _ = writeln!(out, "veiling = {} {} {}", v.r, v.g, v.b);
    let _ = writeln!(out, "blur_scale = {}", recipe.psf.blur_scale);
    match recipe.depth {
        DepthProfile::Wall { range } => {
            let _ = writeln!(out, "depth = wall");
            let _ = writeln!(out, "depth_range = {range}");
        }
        DepthProfile::Ramp {
            near,
            far,
            far_band,
        } => {
            let _ = writeln!(out, "depth = ramp");
            let _ = writeln!(out, "depth_near = {near}");
            let _ = writeln!(out, "depth_far = {far}");
            let _ = writeln!(out, "depth_far_band = {far_band}");
        }
        DepthProfile::Step { near, far, edge } => {
            let _ = writeln!(out, "depth = step");
            let _ = writeln!(out, "depth_near = {near}");
            let _ = writeln!(out, "depth_far = {far}");
            let _ = writeln!(out, "depth_edge = {edge}");
        }
    }
    let t = &recipe.texture;
    let _ = writeln!(out, "texture_block = {}", t.block);
    let lo = t.albedo_lo;
    let _ = writeln!(out, "albedo_lo = {} {} {}", lo.r, lo.g, lo.b);
    let hi = t.albedo_hi;
    let _ = writeln!(out, "albedo_hi = {} {} {}", hi.r, hi.g, hi.b);
    let _ = writeln!(out, "shadow_fraction = {}", t.shadow_fraction);
    for (i, f) in t.features.iter().enumerate() {
        let _ = writeln!(
            out,
            "feature.{} = {} {} {} {} {} {} {}",
            i + 1,
            f.x,
            f.y,
            f.w,
            f.h,
            f.color.r,
            f.color.g,
            f.color.b
        );
    }
    out
}

/// Ground truth written next to synthesized frames and read back by
/// `compare`.
#[derive(Debug, Clone)]
pub struct Manifest {
    pub width: usize,
    pub height: usize,
    pub attenuation: ChannelTriple,
    pub veiling: ChannelTriple,
    pub hazy_file: String,
    pub radiance_file: String,
    pub depth_file: String,
}

impl Manifest {
    pub fn emit(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "width = {}", self.width);
        let _ = writeln!(out, "height = {}", self.height);
        let _ = writeln!(
            out,
            "attenuation = {} {} {}",
            self.attenuation.r, self.attenuation.g, self.attenuation.b
        );
        let _ = writeln!(
            out,
            "veiling = {} {} {}",
            self.veiling.r, self.veiling.g, self.veiling.b
        );
        let _ = writeln!(out, "hazy_file = {}", self.hazy_file);
        let _ = writeln!(out, "radiance_file = {}", self.radiance_file);
        let _ = writeln!(out, "depth_file = {}", self.depth_file);
        let _ = writeln!(out, "depth_scale = 0.001");
        out
    }

    pub fn read(path: &Path) -> Result<Manifest> {
        let mut m = Manifest {
            width: 0,
            height: 0,
            attenuation: ChannelTriple::new(0.0, 0.0, 0.0),
            veiling: ChannelTriple::new(0.0, 0.0, 0.0),
            hazy_file: String::new(),
            radiance_file: String::new(),
            depth_file: String::new(),
        };
        for (key, value) in read_kv_file(path)? {
            match key.as_str() {
                "width" => m.width = parse_usize(&key, &value)?,
                "height" => m.height = parse_usize(&key, &value)?,
                "attenuation" => m.attenuation = parse_triple(&key, &value)?,
                "veiling" => m.veiling = parse_triple(&key, &value)?,
                "hazy_file" => m.hazy_file = value,
                "radiance_file" => m.radiance_file = value,
                "depth_file" => m.depth_file = value,
                "depth_scale" => {
                    let s = parse_f32(&key, &value)?;
                    if (s - 0.001).abs() > 1e-9 {
                        bail!("unsupported depth_scale {s}; this build writes 0.001 m per unit");
                    }
                }
                _ => bail!("unknown manifest key `{key}` in {}", path.display()),
            }
        }
        Ok(m)
    }
}
