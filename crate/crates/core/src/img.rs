//! Core raster types shared by every stage: interleaved-RGB float images,
//! single-plane grayscale images, per-pixel depth in meters, and the
//! per-channel scalar triple used for attenuation coefficients and the
//! veiling light.
//!
//! All channel data is kept normalized to `[0,1]` as `f32`; operations that
//! can leave that range clamp at their boundary. 8-bit conversion maps
//! `255 -> 1.0` exactly and rounds half-up on the way back so golden tests
//! are deterministic across platforms.

use crate::error::{Error, Result};

/// Floating-point RGB image, interleaved, channels in `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageF {
    width: usize,
    height: usize,
    data: Vec<f32>,
}

/// Single-plane float image in `[0,1]`; backs dark channels and transmission maps.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayF {
    width: usize,
    height: usize,
    data: Vec<f32>,
}

/// Per-pixel range from the camera, in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    width: usize,
    height: usize,
    data: Vec<f32>,
}

/// One scalar per color channel: attenuation coefficients, the background
/// signal (veiling color at infinity), and the estimated atmospheric light
/// all live here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelTriple {
    pub r: f32,
    pub g: f32,
    pub b: f32,
}

/// Square patch around a pixel: radius `w` spans `(2w+1) x (2w+1)`, clipped
/// at the image border. Radius 0 degenerates to the pixel itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    pub radius: usize,
}

impl WindowSpec {
    pub fn new(radius: usize) -> Self {
        WindowSpec { radius }
    }
}

impl Default for WindowSpec {
    /// 15x15 patch, the size the original dark-channel work used.
    fn default() -> Self {
        WindowSpec { radius: 7 }
    }
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::EmptyImage { width, height });
    }
    Ok(())
}

impl ImageF {
    pub fn new(width: usize, height: usize, data: Vec<f32>) -> Result<Self> {
        check_dims(width, height)?;
        let expected = width * height * 3;
        if data.len() != expected {
            return Err(Error::BufferSize {
                width,
                height,
                expected,
                actual: data.len(),
            });
        }
        Ok(ImageF {
            width,
            height,
            data,
        })
    }

    /// Constant-color image.
    pub fn filled(width: usize, height: usize, color: ChannelTriple) -> Result<Self> {
        check_dims(width, height)?;
        let mut data = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            data.extend_from_slice(&[color.r, color.g, color.b]);
        }
        Ok(ImageF {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f32; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn set_pixel(&mut self, x: usize, y: usize, rgb: [f32; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    /// Iterator over `[r,g,b]` chunks in row-major order.
    pub fn pixels(&self) -> impl Iterator<Item = &[f32]> + '_ {
        self.data.chunks_exact(3)
    }

    pub fn same_dims(&self, other_width: usize, other_height: usize) -> Result<()> {
        if self.width != other_width || self.height != other_height {
            return Err(Error::DimensionMismatch {
                left_width: self.width,
                left_height: self.height,
                right_width: other_width,
                right_height: other_height,
            });
        }
        Ok(())
    }

    /// Scalar luminance plane, `0.299 r + 0.587 g + 0.114 b` (the single
    /// luminance convention used across the crate).
    pub fn luminance(&self) -> GrayF {
        let data = self
            .data
            .chunks_exact(3)
            .map(|p| luminance_of(p[0], p[1], p[2]))
            .collect();
        GrayF {
            width: self.width,
            height: self.height,
            data,
        }
    }

    /// Clamp every channel into `[0,1]` in place.
    pub fn clamp_unit(&mut self) {
        for v in &mut self.data {
            *v = v.clamp(0.0, 1.0);
        }
    }
}

pub fn luminance_of(r: f32, g: f32, b: f32) -> f32 {
    0.299 * r + 0.587 * g + 0.114 * b
}

impl GrayF {
    pub fn new(width: usize, height: usize, data: Vec<f32>) -> Result<Self> {
        check_dims(width, height)?;
        let expected = width * height;
        if data.len() != expected {
            return Err(Error::BufferSize {
                width,
                height,
                expected,
                actual: data.len(),
            });
        }
        Ok(GrayF {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f32) -> Result<Self> {
        check_dims(width, height)?;
        Ok(GrayF {
            width,
            height,
            data: vec![value; width * height],
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.data[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: f32) {
        self.data[y * self.width + x] = v;
    }

    pub fn same_dims(&self, other_width: usize, other_height: usize) -> Result<()> {
        if self.width != other_width || self.height != other_height {
            return Err(Error::DimensionMismatch {
                left_width: self.width,
                left_height: self.height,
                right_width: other_width,
                right_height: other_height,
            });
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        let sum: f64 = self.data.iter().map(|&v| v as f64).sum();
        sum / self.data.len() as f64
    }
}

impl DepthMap {
    pub fn new(width: usize, height: usize, data: Vec<f32>) -> Result<Self> {
        check_dims(width, height)?;
        let expected = width * height;
        if data.len() != expected {
            return Err(Error::BufferSize {
                width,
                height,
                expected,
                actual: data.len(),
            });
        }
        Ok(DepthMap {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, range_m: f32) -> Result<Self> {
        check_dims(width, height)?;
        Ok(DepthMap {
            width,
            height,
            data: vec![range_m; width * height],
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.data[y * self.width + x]
    }

    pub fn max_range(&self) -> f32 {
        self.data.iter().copied().fold(0.0, f32::max)
    }
}

impl ChannelTriple {
    pub fn new(r: f32, g: f32, b: f32) -> Self {
        ChannelTriple { r, g, b }
    }

    pub fn splat(v: f32) -> Self {
        ChannelTriple { r: v, g: v, b: v }
    }

    pub fn as_array(&self) -> [f32; 3] {
        [self.r, self.g, self.b]
    }

    pub fn min_component(&self) -> f32 {
        self.r.min(self.g).min(self.b)
    }

    pub fn map(&self, f: impl Fn(f32) -> f32) -> Self {
        ChannelTriple {
            r: f(self.r),
            g: f(self.g),
            b: f(self.b),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.r.is_finite() && self.g.is_finite() && self.b.is_finite()
    }

    /// All components strictly positive.
    pub fn all_positive(&self) -> bool {
        self.r > 0.0 && self.g > 0.0 && self.b > 0.0
    }

    /// All components in `(0, 1]`, the contract for veiling light and
    /// atmospheric light.
    pub fn in_unit_open_low(&self) -> bool {
        self.all_positive() && self.r <= 1.0 && self.g <= 1.0 && self.b <= 1.0
    }
}

impl From<[f32; 3]> for ChannelTriple {
    fn from(v: [f32; 3]) -> Self {
        ChannelTriple::new(v[0], v[1], v[2])
    }
}

/// Decode an interleaved 8-bit RGB raster into normalized floats, `v/255`.
pub fn from_8bit(width: usize, height: usize, raster: &[u8]) -> Result<ImageF> {
    check_dims(width, height)?;
    let expected = width * height * 3;
    if raster.len() != expected {
        return Err(Error::BufferSize {
            width,
            height,
            expected,
            actual: raster.len(),
        });
    }
    let data = raster.iter().map(|&v| v as f32 / 255.0).collect();
    ImageF::new(width, height, data)
}

/// Encode to interleaved 8-bit RGB: clamp to `[0,1]`, scale by 255, round
/// half-up. Out-of-range intermediates are absorbed by the clamp.
pub fn to_8bit(image: &ImageF) -> Vec<u8> {
    image.data.iter().map(|&v| quantize_8bit(v)).collect()
}

/// Same quantization for single-plane images (dark channel and transmission dumps).
pub fn gray_to_8bit(image: &GrayF) -> Vec<u8> {
    image.data.iter().map(|&v| quantize_8bit(v)).collect()
}

fn quantize_8bit(v: f32) -> u8 {
    // .round() is half-away-from-zero, which equals half-up on the
    // non-negative clamped range.
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}
