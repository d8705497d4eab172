//! Radiance recovery and brightening.
//!
//! Recovery inverts the haze model channelwise:
//! `radiance = (observed - A) / t + A`, clamped to `[0,1]`. With the exact
//! atmospheric light and transmission this is the exact left inverse of
//! synthesis wherever no clamping triggers. Removing the veil darkens the
//! image noticeably, so a brightening stage follows.

use crate::error::{Error, Result};
use crate::img::{ChannelTriple, ImageF};
use crate::transmission::TransmissionMap;

/// Invert the haze model with the given atmospheric light and floored
/// transmission map. Where the observation equals `A` the output is `A`
/// (no information, neutral); where `t = 1` the observation passes through.
pub fn recover_radiance(
    hazy: &ImageF,
    airlight: ChannelTriple,
    t: &TransmissionMap,
) -> Result<ImageF> {
    hazy.same_dims(t.map().width(), t.map().height())?;
    let a = [
        airlight.r as f64,
        airlight.g as f64,
        airlight.b as f64,
    ];
    let mut out = hazy.clone();
    for (px, &tv) in out.data_mut().chunks_exact_mut(3).zip(t.map().data()) {
        let inv_t = 1.0 / tv as f64;
        for ch in 0..3 {
            let v = (px[ch] as f64 - a[ch]) * inv_t + a[ch];
            px[ch] = (v as f32).clamp(0.0, 1.0);
        }
    }
    Ok(out)
}

/// Gain then gamma: `v -> clamp((gain * v)^(1/gamma))`. Gain 1 and gamma 1
/// is the identity.
pub fn brighten(image: &ImageF, gain: f32, gamma: f32) -> Result<ImageF> {
    if gain.is_nan() || gain <= 0.0 {
        return Err(Error::parameter("gain", gain as f64, "> 0"));
    }
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(Error::parameter("gamma", gamma as f64, "> 0"));
    }
    let mut out = image.clone();
    if gain == 1.0 && gamma == 1.0 {
        return Ok(out);
    }
    let inv_gamma = 1.0 / gamma as f64;
    for v in out.data_mut() {
        let scaled = (gain as f64) * (*v as f64);
        let lifted = if gamma == 1.0 {
            scaled
        } else {
            scaled.max(0.0).powf(inv_gamma)
        };
        *v = (lifted as f32).clamp(0.0, 1.0);
    }
    Ok(out)
}

/// Percentile the auto gain maps to [`AUTO_GAIN_TARGET`].
pub const AUTO_GAIN_PERCENTILE: f64 = 0.99;
/// Luminance value the chosen percentile is mapped to.
pub const AUTO_GAIN_TARGET: f32 = 0.95;

/// Gain that maps the 99th-percentile luminance to 0.95. Robust to the few
/// overexposed highlights recovery tends to amplify. Returns 1 for images
/// too dark to measure.
pub fn auto_gain(image: &ImageF) -> f32 {
    let lum = image.luminance();
    let mut vals = lum.data().to_vec();
    let k = ((vals.len() - 1) as f64 * AUTO_GAIN_PERCENTILE).floor() as usize;
    let (_, p99, _) = vals.select_nth_unstable_by(k, f32::total_cmp);
    let p99 = *p99;
    if p99 < 1e-4 {
        return 1.0;
    }
    AUTO_GAIN_TARGET / p99
}
