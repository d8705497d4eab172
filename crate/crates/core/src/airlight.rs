//! Global atmospheric light estimation.
//!
//! The estimate takes the brightest fraction of the dark channel and
//! averages the corresponding colors of the *original* image. The color
//! shift (when used) only locates the haze-opaque region; normalization and
//! recovery need real colors, so sampling always happens in the unshifted
//! image.

use crate::error::{Error, Result};
use crate::img::{ChannelTriple, GrayF, ImageF};

/// Lower clamp for each component of the estimate; recovery divides by the
/// airlight-normalized signal, so components must stay away from zero.
pub const AIRLIGHT_FLOOR: f32 = 0.02;

/// Default fraction of pixels averaged, following the original
/// dark-channel convention of 0.1%.
pub const DEFAULT_TOP_FRACTION: f32 = 0.001;

/// Mean color of the original image over the `top_fraction` brightest
/// dark-channel pixels. All pixels tied with the cutoff value are included,
/// so the result is independent of pixel order. Components are clamped to
/// `[AIRLIGHT_FLOOR, 1]`.
pub fn estimate_airlight(
    image: &ImageF,
    dark: &GrayF,
    top_fraction: f32,
) -> Result<ChannelTriple> {
    image.same_dims(dark.width(), dark.height())?;
    if top_fraction.is_nan() || top_fraction <= 0.0 || top_fraction > 1.0 {
        return Err(Error::parameter(
            "top_fraction",
            top_fraction as f64,
            "in (0, 1]",
        ));
    }

    let n = dark.data().len();
    let k = ((top_fraction as f64 * n as f64).ceil() as usize).clamp(1, n);

    let mut sorted: Vec<f32> = dark.data().to_vec();
    let (_, cutoff, _) = sorted.select_nth_unstable_by(n - k, f32::total_cmp);
    let cutoff = *cutoff;

    let mut sum = [0.0f64; 3];
    let mut count = 0u64;
    for (px, &d) in image.pixels().zip(dark.data()) {
        if d >= cutoff {
            for ch in 0..3 {
                sum[ch] += px[ch] as f64;
            }
            count += 1;
        }
    }
    debug_assert!(count as usize >= k);

    let mean = |s: f64| ((s / count as f64) as f32).clamp(AIRLIGHT_FLOOR, 1.0);
    Ok(ChannelTriple::new(mean(sum[0]), mean(sum[1]), mean(sum[2])))
}
