//! Transmission estimation and edge-preserving refinement.
//!
//! The raw estimate normalizes the hazy image by the atmospheric light,
//! takes the classic dark channel of the quotient, and inverts it:
//! `t = 1 - omega * DC(hazy / A)`. The block structure of the windowed
//! minimum is then smoothed with a joint bilateral filter guided by the
//! hazy image's luminance — the fast replacement for soft matting that
//! keeps the pipeline at video rate.

use crate::error::{Error, Result};
use crate::filter::joint_bilateral;
use crate::img::{ChannelTriple, GrayF, ImageF, WindowSpec};

/// Haze-retention factor. Estimating with slightly less than full strength
/// keeps distant scene content looking natural.
pub const DEFAULT_OMEGA: f32 = 0.95;

/// Default lower bound on transmission; guards recovery against amplifying
/// sensor noise where the signal is almost fully veiled.
pub const DEFAULT_T_FLOOR: f32 = 0.1;

/// Refined transmission with its floor applied; values in `[t0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionMap {
    map: GrayF,
    floor: f32,
}

impl TransmissionMap {
    pub fn map(&self) -> &GrayF {
        &self.map
    }

    pub fn floor(&self) -> f32 {
        self.floor
    }

    pub fn into_gray(self) -> GrayF {
        self.map
    }
}

/// Joint bilateral settings for the refinement pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineParams {
    pub radius: usize,
    pub spatial_sigma: f32,
    pub range_sigma: f32,
}

impl Default for RefineParams {
    fn default() -> Self {
        RefineParams {
            radius: 9,
            spatial_sigma: 6.0,
            range_sigma: 0.1,
        }
    }
}

impl RefineParams {
    pub fn validate(&self) -> Result<()> {
        if self.radius < 1 {
            return Err(Error::parameter("refine.radius", self.radius as f64, ">= 1"));
        }
        if self.spatial_sigma.is_nan() || self.spatial_sigma <= 0.0 {
            return Err(Error::parameter(
                "refine.spatial_sigma",
                self.spatial_sigma as f64,
                "> 0",
            ));
        }
        if self.range_sigma.is_nan() || self.range_sigma <= 0.0 {
            return Err(Error::parameter(
                "refine.range_sigma",
                self.range_sigma as f64,
                "> 0",
            ));
        }
        Ok(())
    }
}

/// Raw transmission estimate `1 - omega * DC(hazy / A)`. The channelwise
/// quotient is clamped to `[0,1]` before the windowed minimum, so the
/// result always lies in `[1 - omega, 1]`.
pub fn estimate_transmission(
    hazy: &ImageF,
    airlight: ChannelTriple,
    window: WindowSpec,
    omega: f32,
) -> Result<GrayF> {
    if omega.is_nan() || omega <= 0.0 || omega > 1.0 {
        return Err(Error::parameter("omega", omega as f64, "in (0, 1]"));
    }
    if airlight.min_component() < crate::airlight::AIRLIGHT_FLOOR {
        return Err(Error::parameter(
            "airlight",
            airlight.min_component() as f64,
            ">= airlight floor (0.02)",
        ));
    }

    let inv = [
        1.0 / airlight.r as f64,
        1.0 / airlight.g as f64,
        1.0 / airlight.b as f64,
    ];
    let quotient_min: Vec<f32> = hazy
        .pixels()
        .map(|px| {
            let mut m = f32::INFINITY;
            for ch in 0..3 {
                let q = ((px[ch] as f64 * inv[ch]) as f32).clamp(0.0, 1.0);
                m = m.min(q);
            }
            m
        })
        .collect();
    let gray = GrayF::new(hazy.width(), hazy.height(), quotient_min)?;
    let dark = crate::filter::min_filter(&gray, window.radius);

    let data = dark.data().iter().map(|&d| 1.0 - omega * d).collect();
    GrayF::new(hazy.width(), hazy.height(), data)
}

/// Edge-preserving smoothing of the raw estimate, guided by the luminance
/// of the hazy image. Output values never leave the input's `[min, max]`.
pub fn refine_transmission(t: &GrayF, guide: &ImageF, params: RefineParams) -> Result<GrayF> {
    params.validate()?;
    t.same_dims(guide.width(), guide.height())?;
    let lum = guide.luminance();
    Ok(joint_bilateral(
        t,
        &lum,
        params.radius,
        params.spatial_sigma,
        params.range_sigma,
    ))
}

/// Clamp the transmission from below: `max(t, t0)` per pixel.
pub fn apply_floor(t: &GrayF, t0: f32) -> Result<TransmissionMap> {
    if t0.is_nan() || t0 <= 0.0 || t0 >= 1.0 {
        return Err(Error::parameter("t0", t0 as f64, "in (0, 1)"));
    }
    let data = t.data().iter().map(|&v| v.max(t0)).collect();
    Ok(TransmissionMap {
        map: GrayF::new(t.width(), t.height(), data)?,
        floor: t0,
    })
}
