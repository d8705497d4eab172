//! The full enhancement pipeline: white balance, dark channel, veiling
//! light, transmission estimation and refinement, recovery, brightening.
//!
//! Stage order is fixed. When white balance is enabled, the balanced image
//! becomes the working image for every later stage; disabling it reproduces
//! the earlier shifted-RGB-only pipeline, which is also the scaffold the
//! competing priors run through so output differences are attributable to
//! the prior alone. Frames are processed statelessly, so sequences
//! parallelize trivially and results are bit-reproducible.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::airlight::{estimate_airlight, DEFAULT_TOP_FRACTION};
use crate::darkchannel::{dark_channel, PriorMode};
use crate::error::Error as CoreError;
use crate::img::{ChannelTriple, GrayF, ImageF, WindowSpec};
use crate::restore::{auto_gain, brighten, recover_radiance};
use crate::transmission::{
    apply_floor, estimate_transmission, refine_transmission, RefineParams, TransmissionMap,
    DEFAULT_OMEGA, DEFAULT_T_FLOOR,
};
use crate::whitebalance::{local_gray_world, WbParams};

/// Brightening stage configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Brighten {
    /// Per-image gain mapping the 99th-percentile luminance to 0.95.
    Auto,
    Manual { gain: f32, gamma: f32 },
    Off,
}

/// Every tunable of the pipeline in one place.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub prior: PriorMode,
    pub window: WindowSpec,
    pub omega: f32,
    pub t0: f32,
    pub refine: RefineParams,
    pub wb: WbParams,
    pub use_whitebalance: bool,
    pub brighten: Brighten,
    pub top_fraction: f32,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            prior: PriorMode::ShiftedRgb,
            window: WindowSpec::default(),
            omega: DEFAULT_OMEGA,
            t0: DEFAULT_T_FLOOR,
            refine: RefineParams::default(),
            wb: WbParams::default(),
            use_whitebalance: true,
            brighten: Brighten::Auto,
            top_fraction: DEFAULT_TOP_FRACTION,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let check = |r: Result<(), CoreError>| {
            r.map_err(|source| PipelineError {
                stage: Stage::Configuration,
                source,
            })
        };
        check(self.refine.validate())?;
        check(self.wb.validate())?;
        if self.omega.is_nan() || self.omega <= 0.0 || self.omega > 1.0 {
            return check(Err(CoreError::parameter(
                "omega",
                self.omega as f64,
                "in (0, 1]",
            )));
        }
        if self.t0.is_nan() || self.t0 <= 0.0 || self.t0 >= 1.0 {
            return check(Err(CoreError::parameter("t0", self.t0 as f64, "in (0, 1)")));
        }
        if self.top_fraction.is_nan() || self.top_fraction <= 0.0 || self.top_fraction > 1.0 {
            return check(Err(CoreError::parameter(
                "top_fraction",
                self.top_fraction as f64,
                "in (0, 1]",
            )));
        }
        if let Brighten::Manual { gain, gamma } = self.brighten {
            if gain.is_nan() || gain <= 0.0 {
                return check(Err(CoreError::parameter("gain", gain as f64, "> 0")));
            }
            if gamma.is_nan() || gamma <= 0.0 {
                return check(Err(CoreError::parameter("gamma", gamma as f64, "> 0")));
            }
        }
        Ok(())
    }
}

/// Pipeline stages, used for timing and error attribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Configuration,
    WhiteBalance,
    DarkChannel,
    Airlight,
    TransmissionEstimate,
    TransmissionRefine,
    Recovery,
    Brighten,
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Configuration => "configuration",
            Stage::WhiteBalance => "white_balance",
            Stage::DarkChannel => "dark_channel",
            Stage::Airlight => "airlight",
            Stage::TransmissionEstimate => "transmission_estimate",
            Stage::TransmissionRefine => "transmission_refine",
            Stage::Recovery => "recovery",
            Stage::Brighten => "brighten",
        }
    }
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
#[error("{stage} stage failed: {source}")]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub source: CoreError,
}

/// Output frame plus every intermediate worth inspecting.
#[derive(Debug, Clone)]
pub struct EnhancedResult {
    pub output: ImageF,
    pub airlight: ChannelTriple,
    pub transmission: TransmissionMap,
    pub dark: GrayF,
    pub timings: Vec<(Stage, Duration)>,
}

/// Run the full pipeline on a single frame.
pub fn enhance_frame(
    image: &ImageF,
    config: &PipelineConfig,
) -> Result<EnhancedResult, PipelineError> {
    config.validate()?;
    let at = |stage: Stage| move |source: CoreError| PipelineError { stage, source };
    let mut timings = Vec::with_capacity(8);

    let mut clock = Instant::now();
    let mut lap = |timings: &mut Vec<(Stage, Duration)>, stage: Stage| {
        let now = Instant::now();
        timings.push((stage, now - clock));
        clock = now;
    };

    let working = if config.use_whitebalance {
        local_gray_world(image, config.wb).map_err(at(Stage::WhiteBalance))?
    } else {
        image.clone()
    };
    lap(&mut timings, Stage::WhiteBalance);

    let dark = dark_channel(&working, config.window, config.prior);
    lap(&mut timings, Stage::DarkChannel);

    let airlight = estimate_airlight(&working, &dark, config.top_fraction)
        .map_err(at(Stage::Airlight))?;
    lap(&mut timings, Stage::Airlight);

    let raw_t = estimate_transmission(&working, airlight, config.window, config.omega)
        .map_err(at(Stage::TransmissionEstimate))?;
    lap(&mut timings, Stage::TransmissionEstimate);

    let refined = refine_transmission(&raw_t, &working, config.refine)
        .map_err(at(Stage::TransmissionRefine))?;
    let transmission = apply_floor(&refined, config.t0).map_err(at(Stage::TransmissionRefine))?;
    lap(&mut timings, Stage::TransmissionRefine);

    let recovered =
        recover_radiance(&working, airlight, &transmission).map_err(at(Stage::Recovery))?;
    lap(&mut timings, Stage::Recovery);

    let output = match config.brighten {
        Brighten::Off => recovered,
        Brighten::Manual { gain, gamma } => {
            brighten(&recovered, gain, gamma).map_err(at(Stage::Brighten))?
        }
        Brighten::Auto => {
            let gain = auto_gain(&recovered);
            brighten(&recovered, gain, 1.0).map_err(at(Stage::Brighten))?
        }
    };
    lap(&mut timings, Stage::Brighten);

    Ok(EnhancedResult {
        output,
        airlight,
        transmission,
        dark,
        timings,
    })
}

/// Process an ordered frame sequence. Frames are independent; order is
/// preserved and a failing frame does not stop the rest.
pub fn enhance_sequence(
    frames: &[ImageF],
    config: &PipelineConfig,
) -> Vec<Result<EnhancedResult, PipelineError>> {
    frames
        .par_iter()
        .map(|frame| enhance_frame(frame, config))
        .collect()
}
