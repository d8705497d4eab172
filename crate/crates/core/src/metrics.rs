//! Quantitative evaluation used by the tests and the comparison CLI.

use crate::darkchannel::{dark_channel, PriorMode};
use crate::error::Result;
use crate::img::{ImageF, WindowSpec};

/// Root mean square error over all pixels and channels.
pub fn rmse(a: &ImageF, b: &ImageF) -> Result<f64> {
    a.same_dims(b.width(), b.height())?;
    let sum: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| {
            let d = x as f64 - y as f64;
            d * d
        })
        .sum();
    Ok((sum / a.data().len() as f64).sqrt())
}

/// Standard deviation of luminance; zero iff the luminance is constant.
pub fn global_contrast(image: &ImageF) -> f64 {
    let lum = image.luminance();
    let n = lum.data().len() as f64;
    let mean: f64 = lum.data().iter().map(|&v| v as f64).sum::<f64>() / n;
    let var: f64 = lum
        .data()
        .iter()
        .map(|&v| {
            let d = v as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / n;
    var.sqrt()
}

/// Mean of the dark channel: how well an image satisfies the prior.
pub fn dark_channel_mean(image: &ImageF, window: WindowSpec, mode: PriorMode) -> f64 {
    dark_channel(image, window, mode).mean()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::img::ChannelTriple;
    use proptest::prelude::*;

    #[test]
    fn rmse_identity_and_extremes() {
        let x = ImageF::filled(5, 4, ChannelTriple::new(0.1, 0.7, 0.3)).unwrap();
        assert_eq!(rmse(&x, &x).unwrap(), 0.0);

        let zeros = ImageF::filled(5, 4, ChannelTriple::splat(0.0)).unwrap();
        let ones = ImageF::filled(5, 4, ChannelTriple::splat(1.0)).unwrap();
        assert!((rmse(&zeros, &ones).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rmse_constant_offset_closed_form() {
        let a = ImageF::filled(8, 8, ChannelTriple::splat(0.5)).unwrap();
        let b = ImageF::filled(8, 8, ChannelTriple::splat(0.8)).unwrap();
        assert!((rmse(&a, &b).unwrap() - 0.3).abs() < 1e-6);
    }

    #[test]
    fn rmse_rejects_mismatched_dims() {
        let a = ImageF::filled(4, 4, ChannelTriple::splat(0.5)).unwrap();
        let b = ImageF::filled(4, 5, ChannelTriple::splat(0.5)).unwrap();
        assert!(rmse(&a, &b).is_err());
    }

    #[test]
    fn contrast_zero_for_constant() {
        let img = ImageF::filled(9, 9, ChannelTriple::new(0.2, 0.9, 0.4)).unwrap();
        assert!(global_contrast(&img) < 1e-9);
    }

    #[test]
    fn checkerboard_contrast_is_half() {
        let (w, h) = (16, 16);
        let mut data = vec![0.0f32; w * h * 3];
        for y in 0..h {
            for x in 0..w {
                if (x + y) % 2 == 0 {
                    for ch in 0..3 {
                        data[(y * w + x) * 3 + ch] = 1.0;
                    }
                }
            }
        }
        let img = ImageF::new(w, h, data).unwrap();
        assert!((global_contrast(&img) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn dark_mean_trivials() {
        let black = ImageF::filled(10, 10, ChannelTriple::splat(0.0)).unwrap();
        assert_eq!(
            dark_channel_mean(&black, WindowSpec::default(), PriorMode::Classic),
            0.0
        );

        let veil = ImageF::filled(10, 10, ChannelTriple::new(0.2, 0.5, 0.8)).unwrap();
        let m = dark_channel_mean(&veil, WindowSpec::new(2), PriorMode::Classic);
        assert!((m - 0.2).abs() < 1e-6);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn rmse_is_a_metric(
            a in proptest::collection::vec(0.0f32..=1.0, 27..=27),
            b in proptest::collection::vec(0.0f32..=1.0, 27..=27),
            c in proptest::collection::vec(0.0f32..=1.0, 27..=27),
        ) {
            let ia = ImageF::new(3, 3, a).unwrap();
            let ib = ImageF::new(3, 3, b).unwrap();
            let ic = ImageF::new(3, 3, c).unwrap();
            let ab = rmse(&ia, &ib).unwrap();
            let ba = rmse(&ib, &ia).unwrap();
            let ac = rmse(&ia, &ic).unwrap();
            let cb = rmse(&ic, &ib).unwrap();
            prop_assert!((ab - ba).abs() < 1e-12);
            prop_assert!(ab >= 0.0);
            prop_assert!(ab <= ac + cb + 1e-12);
            if ia == ib {
                prop_assert_eq!(ab, 0.0);
            }
        }
    }
}
