//! Dark channel computation under four prior modes.
//!
//! The dark channel of an image is the windowed minimum over a set of color
//! channels. Which channels enter the minimum is what distinguishes the
//! priors:
//!
//! * `Classic` — min over {r, g, b}; near zero on haze-free outdoor scenes.
//! * `Underwater` — min over {g, b}; drops the red channel, which carries
//!   almost no signal underwater.
//! * `RedComplement` — min over {1-r, g, b}; strong red implies weak
//!   backscatter.
//! * `ShiftedRgb` — min over {1-r, 1-g, b}: the full RGB coordinate shift
//!   that maps blue to white, so the most veiled region of the image becomes
//!   the brightest region of the dark channel. Only the veiling-light
//!   estimate uses the shifted colors; the rest of the pipeline works on the
//!   original image.

use crate::filter::min_filter;
use crate::img::{GrayF, ImageF, WindowSpec};

/// Channel set fed into the windowed minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PriorMode {
    Classic,
    Underwater,
    RedComplement,
    ShiftedRgb,
}

impl PriorMode {
    pub const ALL: [PriorMode; 4] = [
        PriorMode::Classic,
        PriorMode::Underwater,
        PriorMode::RedComplement,
        PriorMode::ShiftedRgb,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PriorMode::Classic => "classic",
            PriorMode::Underwater => "udcp",
            PriorMode::RedComplement => "rdcp",
            PriorMode::ShiftedRgb => "shifted",
        }
    }
}

impl std::fmt::Display for PriorMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Shift the RGB coordinate system so pure blue maps to white:
/// `(r, g, b) -> (1-r, 1-g, b)`. Involutive.
pub fn shift_rgb(image: &ImageF) -> ImageF {
    let mut out = image.clone();
    for px in out.data_mut().chunks_exact_mut(3) {
        px[0] = 1.0 - px[0];
        px[1] = 1.0 - px[1];
    }
    out
}

fn channel_set_min(px: &[f32], mode: PriorMode) -> f32 {
    match mode {
        PriorMode::Classic => px[0].min(px[1]).min(px[2]),
        PriorMode::Underwater => px[1].min(px[2]),
        PriorMode::RedComplement => (1.0 - px[0]).min(px[1]).min(px[2]),
        PriorMode::ShiftedRgb => (1.0 - px[0]).min(1.0 - px[1]).min(px[2]),
    }
}

/// Dark channel: per-pixel minimum over the mode's channel set, eroded by
/// the clipped `(2r+1)^2` window minimum.
pub fn dark_channel(image: &ImageF, window: WindowSpec, mode: PriorMode) -> GrayF {
    let per_pixel: Vec<f32> = image
        .pixels()
        .map(|px| channel_set_min(px, mode))
        .collect();
    let gray =
        GrayF::new(image.width(), image.height(), per_pixel).expect("dimensions preserved");
    min_filter(&gray, window.radius)
}
