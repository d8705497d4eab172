//! Image file I/O: PNG and binary PPM (P6) for color, PNG/PGM (P5) in
//! 8 and 16 bit for grayscale dumps and depth maps. All lossless.

use std::path::Path;

use anyhow::{bail, Context, Result};
use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{DynamicImage, ExtendedColorType, ImageBuffer, ImageEncoder, ImageReader, Luma, Rgb};

use unveil::{from_8bit, gray_to_8bit, GrayF, ImageF};

pub const SUPPORTED_EXTENSIONS: [&str; 3] = ["png", "ppm", "pgm"];

pub fn is_supported(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| SUPPORTED_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
        .unwrap_or(false)
}

/// Load a color image (grayscale files are expanded to RGB).
pub fn load_color(path: &Path) -> Result<ImageF> {
    let decoded = ImageReader::open(path)
        .with_context(|| format!("cannot open {}", path.display()))?
        .decode()
        .with_context(|| format!("cannot decode {}", path.display()))?;
    let rgb = decoded.to_rgb8();
    let (w, h) = rgb.dimensions();
    from_8bit(w as usize, h as usize, rgb.as_raw())
        .with_context(|| format!("invalid raster in {}", path.display()))
}

fn is_pnm(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()),
        Some(e) if e.eq_ignore_ascii_case("ppm") || e.eq_ignore_ascii_case("pgm")
    )
}

fn save_pnm(
    path: &Path,
    bytes: &[u8],
    width: usize,
    height: usize,
    subtype: PnmSubtype,
    color: ExtendedColorType,
) -> Result<()> {
    let file = std::fs::File::create(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    PnmEncoder::new(std::io::BufWriter::new(file))
        .with_subtype(subtype)
        .write_image(bytes, width as u32, height as u32, color)
        .with_context(|| format!("cannot write {}", path.display()))
}

/// Save a color image; the format follows the extension (.png, or binary
/// P6 for .ppm).
pub fn save_color(path: &Path, image: &ImageF) -> Result<()> {
    check_extension(path)?;
    let raster = unveil::to_8bit(image);
    if is_pnm(path) {
        return save_pnm(
            path,
            &raster,
            image.width(),
            image.height(),
            PnmSubtype::Pixmap(SampleEncoding::Binary),
            ExtendedColorType::Rgb8,
        );
    }
    let buf: ImageBuffer<Rgb<u8>, _> =
        ImageBuffer::from_raw(image.width() as u32, image.height() as u32, raster)
            .expect("raster length matches dimensions");
    buf.save(path)
        .with_context(|| format!("cannot write {}", path.display()))
}

/// Save a grayscale plane quantized to 8 bit (.png, or binary P5 for .pgm).
pub fn save_gray8(path: &Path, image: &GrayF) -> Result<()> {
    check_extension(path)?;
    let raster = gray_to_8bit(image);
    if is_pnm(path) {
        return save_pnm(
            path,
            &raster,
            image.width(),
            image.height(),
            PnmSubtype::Graymap(SampleEncoding::Binary),
            ExtendedColorType::L8,
        );
    }
    let buf: ImageBuffer<Luma<u8>, _> =
        ImageBuffer::from_raw(image.width() as u32, image.height() as u32, raster)
            .expect("raster length matches dimensions");
    buf.save(path)
        .with_context(|| format!("cannot write {}", path.display()))
}

/// Save 16-bit grayscale samples (.png, or binary P5 with maxval 65535 for
/// .pgm — written by hand, the pnm codec only encodes 8-bit samples).
pub fn save_gray16(path: &Path, width: usize, height: usize, samples: Vec<u16>) -> Result<()> {
    check_extension(path)?;
    if is_pnm(path) {
        let mut bytes = Vec::with_capacity(samples.len() * 2 + 32);
        bytes.extend_from_slice(format!("P5\n{width} {height}\n65535\n").as_bytes());
        for s in &samples {
            bytes.extend_from_slice(&s.to_be_bytes());
        }
        return std::fs::write(path, bytes)
            .with_context(|| format!("cannot write {}", path.display()));
    }
    let buf: ImageBuffer<Luma<u16>, _> =
        ImageBuffer::from_raw(width as u32, height as u32, samples)
            .expect("raster length matches dimensions");
    buf.save(path)
        .with_context(|| format!("cannot write {}", path.display()))
}

/// Load a 16-bit grayscale image back as raw samples.
pub fn load_gray16(path: &Path) -> Result<(usize, usize, Vec<u16>)> {
    if is_pnm(path) {
        let bytes =
            std::fs::read(path).with_context(|| format!("cannot open {}", path.display()))?;
        return parse_pgm16(&bytes).with_context(|| format!("in {}", path.display()));
    }
    let decoded = ImageReader::open(path)
        .with_context(|| format!("cannot open {}", path.display()))?
        .decode()
        .with_context(|| format!("cannot decode {}", path.display()))?;
    let gray = match decoded {
        DynamicImage::ImageLuma16(img) => img,
        other => other.to_luma16(),
    };
    let (w, h) = gray.dimensions();
    Ok((w as usize, h as usize, gray.into_raw()))
}

fn parse_pgm16(bytes: &[u8]) -> Result<(usize, usize, Vec<u16>)> {
    let mut pos = 0usize;
    let mut fields = Vec::with_capacity(4);
    // header: magic, width, height, maxval, separated by whitespace and
    // optional comment lines
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            bail!("truncated PGM header");
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).context("non-ASCII PGM header")?);
    }
    pos += 1; // single whitespace after maxval

    if fields[0] != "P5" {
        bail!("expected binary PGM (P5), got {}", fields[0]);
    }
    let width: usize = fields[1].parse().context("bad PGM width")?;
    let height: usize = fields[2].parse().context("bad PGM height")?;
    let maxval: u32 = fields[3].parse().context("bad PGM maxval")?;
    if maxval != 65535 {
        bail!("expected 16-bit PGM (maxval 65535), got {maxval}");
    }
    let need = width * height * 2;
    let data = bytes
        .get(pos..pos + need)
        .ok_or_else(|| anyhow::anyhow!("PGM payload truncated"))?;
    let samples = data
        .chunks_exact(2)
        .map(|c| u16::from_be_bytes([c[0], c[1]]))
        .collect();
    Ok((width, height, samples))
}

fn check_extension(path: &Path) -> Result<()> {
    if !is_supported(path) {
        bail!(
            "unsupported image extension for {} (expected one of {:?})",
            path.display(),
            SUPPORTED_EXTENSIONS
        );
    }
    Ok(())
}

/// Depth maps are stored as 16-bit millimeters: 65.535 m ceiling.
pub fn depth_to_samples(depth: &unveil::DepthMap) -> Vec<u16> {
    depth
        .data()
        .iter()
        .map(|&r| ((r * 1000.0).round() as u32).min(u16::MAX as u32) as u16)
        .collect()
}

pub fn samples_to_depth(width: usize, height: usize, samples: &[u16]) -> Result<unveil::DepthMap> {
    let data = samples.iter().map(|&v| v as f32 / 1000.0).collect();
    unveil::DepthMap::new(width, height, data).context("invalid depth raster")
}

/// Transmission planes are stored as 16-bit fractions of 65535.
pub fn unit_to_samples(plane: &GrayF) -> Vec<u16> {
    plane
        .data()
        .iter()
        .map(|&v| (v.clamp(0.0, 1.0) * 65535.0).round() as u16)
        .collect()
}
