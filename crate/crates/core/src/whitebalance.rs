//! Local gray-world white balance in the Ruderman l-alpha-beta opponent
//! space.
//!
//! Plain gray-world correction fails underwater because the color cast is
//! range dependent. Working per-pixel against a *patch-local* chromatic
//! mean in an opponent color space limits the correction to the pixel's
//! neighborhood, so a change in distance only disturbs colors locally. Run
//! before veiling-light estimation, this makes the veil achromatic and
//! removes the blue-water assumption from the rest of the pipeline.
//!
//! Transform chain: RGB -> LMS (row-normalized cone matrix, so neutral gray
//! maps to equal cone responses) -> log -> orthonormal opponent basis.
//! Axis conventions, fixed here: `l` is achromatic log-luminance (shifted by
//! the log floor so it is non-negative), `alpha` is the yellow-blue axis
//! (negative for blue), `beta` the red-green axis.

use crate::error::{Error, Result};
use crate::filter::box_mean;
use crate::img::{GrayF, ImageF};

/// Channels are floored here before the logarithm.
pub const LOG_FLOOR: f32 = 1e-6;

// Cone response matrix (RGB -> LMS), rows normalized to sum to one so the
// achromatic axis is exact. Inverse computed to f64 precision; both are
// frozen so round-trip tests are bit-stable.
#[allow(clippy::excessive_precision)]
const RGB_TO_LMS: [[f64; 3]; 3] = [
    [0.38125250100040015, 0.57853141256502605, 0.04021608643457383],
    [0.19683778645051536, 0.72490743520464329, 0.07825477834484139],
    [0.02416524616464454, 0.12914870149403387, 0.84668605234132155],
];
#[allow(clippy::excessive_precision)]
const LMS_TO_RGB: [[f64; 3]; 3] = [
    [4.46688239555085786, -3.58616383033969655, 0.11928143478883896],
    [-1.21922874096671618, 2.38141975141638795, -0.16219101044967177],
    [0.05848507354777043, -0.26089568412037423, 1.20241061057260379],
];

const INV_SQRT3: f64 = 0.577_350_269_189_625_7;
const INV_SQRT6: f64 = 0.408_248_290_463_863;
const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Planar opponent-space image.
#[derive(Debug, Clone, PartialEq)]
pub struct LabImage {
    width: usize,
    height: usize,
    pub l: Vec<f32>,
    pub alpha: Vec<f32>,
    pub beta: Vec<f32>,
}

impl LabImage {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }
}

/// Patch radius and strength of the local chromatic correction.
/// `patch_radius = None` resolves to 1/8 of the smaller image dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WbParams {
    pub patch_radius: Option<usize>,
    pub strength: f32,
}

impl Default for WbParams {
    fn default() -> Self {
        WbParams {
            patch_radius: None,
            strength: 1.0,
        }
    }
}

impl WbParams {
    pub fn validate(&self) -> Result<()> {
        if let Some(r) = self.patch_radius {
            if r < 1 {
                return Err(Error::parameter("wb.patch_radius", r as f64, ">= 1"));
            }
        }
        if !(0.0..=1.0).contains(&self.strength) {
            return Err(Error::parameter(
                "wb.strength",
                self.strength as f64,
                "in [0, 1]",
            ));
        }
        Ok(())
    }

    pub fn resolved_radius(&self, width: usize, height: usize) -> usize {
        self.patch_radius
            .unwrap_or_else(|| (width.min(height) / 8).max(1))
    }
}

/// RGB to opponent space. Channels are floored at [`LOG_FLOOR`] before the
/// logarithm; the log is shifted by the floor so `l` stays non-negative.
pub fn rgb_to_lalphabeta(image: &ImageF) -> LabImage {
    let n = image.pixel_count();
    let mut l = vec![0.0f32; n];
    let mut alpha = vec![0.0f32; n];
    let mut beta = vec![0.0f32; n];
    let log_floor = (LOG_FLOOR as f64).ln();

    for (i, px) in image.pixels().enumerate() {
        let r = px[0].max(LOG_FLOOR) as f64;
        let g = px[1].max(LOG_FLOOR) as f64;
        let b = px[2].max(LOG_FLOOR) as f64;
        let lg = [
            (RGB_TO_LMS[0][0] * r + RGB_TO_LMS[0][1] * g + RGB_TO_LMS[0][2] * b).ln() - log_floor,
            (RGB_TO_LMS[1][0] * r + RGB_TO_LMS[1][1] * g + RGB_TO_LMS[1][2] * b).ln() - log_floor,
            (RGB_TO_LMS[2][0] * r + RGB_TO_LMS[2][1] * g + RGB_TO_LMS[2][2] * b).ln() - log_floor,
        ];
        l[i] = ((lg[0] + lg[1] + lg[2]) * INV_SQRT3) as f32;
        alpha[i] = ((lg[0] + lg[1] - 2.0 * lg[2]) * INV_SQRT6) as f32;
        beta[i] = ((lg[0] - lg[1]) * INV_SQRT2) as f32;
    }

    LabImage {
        width: image.width(),
        height: image.height(),
        l,
        alpha,
        beta,
    }
}

/// Opponent space back to RGB, clamped to `[0,1]`.
pub fn lalphabeta_to_rgb(lab: &LabImage) -> ImageF {
    let mut data = vec![0.0f32; lab.width * lab.height * 3];
    let log_floor = (LOG_FLOOR as f64).ln();

    for (i, px) in data.chunks_exact_mut(3).enumerate() {
        let l = lab.l[i] as f64 * INV_SQRT3;
        let a = lab.alpha[i] as f64 * INV_SQRT6;
        let b = lab.beta[i] as f64 * INV_SQRT2;
        // orthonormal basis: the inverse of the log-space rotation is its transpose
        let lms = [
            (l + a + b + log_floor).exp(),
            (l + a - b + log_floor).exp(),
            (l - 2.0 * a + log_floor).exp(),
        ];
        for ch in 0..3 {
            let v = LMS_TO_RGB[ch][0] * lms[0]
                + LMS_TO_RGB[ch][1] * lms[1]
                + LMS_TO_RGB[ch][2] * lms[2];
            px[ch] = (v as f32).clamp(0.0, 1.0);
        }
    }

    ImageF::new(lab.width, lab.height, data).expect("dimensions preserved")
}

/// Patch-local gray world: subtract `strength` times the patch mean from
/// both chromatic planes, leave `l` untouched, transform back. Achromatic
/// images are fixed points.
pub fn local_gray_world(image: &ImageF, params: WbParams) -> Result<ImageF> {
    params.validate()?;
    let radius = params.resolved_radius(image.width(), image.height());
    let mut lab = rgb_to_lalphabeta(image);

    let alpha_plane = GrayF::new(lab.width, lab.height, lab.alpha.clone())?;
    let beta_plane = GrayF::new(lab.width, lab.height, lab.beta.clone())?;
    let alpha_mean = box_mean(&alpha_plane, radius);
    let beta_mean = box_mean(&beta_plane, radius);

    for (v, &m) in lab.alpha.iter_mut().zip(alpha_mean.data()) {
        *v -= params.strength * m;
    }
    for (v, &m) in lab.beta.iter_mut().zip(beta_mean.data()) {
        *v -= params.strength * m;
    }

    Ok(lalphabeta_to_rgb(&lab))
}
