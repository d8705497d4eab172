//! Shared 2-D filter kernels: the streaming sliding-window minimum behind
//! the dark channel, clipped box means for local white balance, separable
//! Gaussian blur for the forward-scatter simulator, and the joint bilateral
//! filter used for transmission refinement.
//!
//! Every kernel clips its window at the image border; no padding values are
//! invented. For the minimum filter, clipping is realized by virtual +inf
//! padding, which is the identity of `min`.

use rayon::prelude::*;

use crate::img::GrayF;

/// Streaming 1-D windowed minimum (Gil-Werman / van Herk): O(1) amortized
/// per sample via block prefix/suffix minima. `dst.len() == src.len()`.
fn sliding_min_row(src: &[f32], radius: usize, scratch: &mut MinScratch, dst: &mut [f32]) {
    let n = src.len();
    if radius == 0 {
        dst.copy_from_slice(src);
        return;
    }
    let w = 2 * radius + 1;
    let padded = (n + 2 * radius).div_ceil(w) * w;

    let buf = &mut scratch.buf;
    buf.clear();
    buf.resize(padded, f32::INFINITY);
    buf[radius..radius + n].copy_from_slice(src);

    let pre = &mut scratch.pre;
    let suf = &mut scratch.suf;
    pre.clear();
    pre.resize(padded, f32::INFINITY);
    suf.clear();
    suf.resize(padded, f32::INFINITY);

    for block in (0..padded).step_by(w) {
        let end = block + w;
        let mut acc = f32::INFINITY;
        for i in block..end {
            acc = acc.min(buf[i]);
            pre[i] = acc;
        }
        acc = f32::INFINITY;
        for i in (block..end).rev() {
            acc = acc.min(buf[i]);
            suf[i] = acc;
        }
    }

    for (x, out) in dst.iter_mut().enumerate() {
        // window covers buf[x ..= x + w - 1]
        *out = suf[x].min(pre[x + w - 1]);
    }
}

#[derive(Default)]
struct MinScratch {
    buf: Vec<f32>,
    pre: Vec<f32>,
    suf: Vec<f32>,
}

/// 2-D windowed minimum over the clipped `(2r+1)^2` square, as two separable
/// 1-D passes (min over a square window factorizes exactly).
pub fn min_filter(src: &GrayF, radius: usize) -> GrayF {
    let (w, h) = (src.width(), src.height());
    if radius == 0 {
        return src.clone();
    }

    let mut horiz = vec![0.0f32; w * h];
    horiz
        .par_chunks_mut(w)
        .zip(src.data().par_chunks(w))
        .for_each(|(dst_row, src_row)| {
            let mut scratch = MinScratch::default();
            sliding_min_row(src_row, radius, &mut scratch, dst_row);
        });

    let mut out = vec![0.0f32; w * h];
    let columns: Vec<Vec<f32>> = (0..w)
        .into_par_iter()
        .map(|x| {
            let mut col: Vec<f32> = (0..h).map(|y| horiz[y * w + x]).collect();
            let mut dst = vec![0.0f32; h];
            let mut scratch = MinScratch::default();
            sliding_min_row(&col, radius, &mut scratch, &mut dst);
            col.clear();
            dst
        })
        .collect();
    for (x, col) in columns.iter().enumerate() {
        for (y, &v) in col.iter().enumerate() {
            out[y * w + x] = v;
        }
    }

    GrayF::new(w, h, out).expect("dimensions preserved")
}

/// Clipped box mean over the `(2r+1)^2` square, exact via running sums.
pub fn box_mean(src: &GrayF, radius: usize) -> GrayF {
    let (w, h) = (src.width(), src.height());
    let r = radius;

    // Horizontal sliding sums per row.
    let mut hsum = vec![0.0f64; w * h];
    hsum.chunks_mut(w)
        .zip(src.data().chunks(w))
        .for_each(|(dst, row)| {
            let mut acc = 0.0f64;
            for v in row.iter().take(r.min(w - 1) + 1) {
                acc += *v as f64;
            }
            for x in 0..w {
                dst[x] = acc;
                if x + r + 1 < w {
                    acc += row[x + r + 1] as f64;
                }
                if x >= r {
                    acc -= row[x - r] as f64;
                }
            }
        });

    // Vertical sliding sums via a running row accumulator.
    let mut acc = vec![0.0f64; w];
    for row in hsum.chunks(w).take(r.min(h - 1) + 1) {
        for (a, v) in acc.iter_mut().zip(row) {
            *a += v;
        }
    }
    let mut out = vec![0.0f32; w * h];
    for y in 0..h {
        let ny = span_len(y, r, h) as f64;
        for x in 0..w {
            let nx = span_len(x, r, w) as f64;
            out[y * w + x] = (acc[x] / (nx * ny)) as f32;
        }
        if y + r + 1 < h {
            let row = &hsum[(y + r + 1) * w..(y + r + 2) * w];
            for (a, v) in acc.iter_mut().zip(row) {
                *a += v;
            }
        }
        if y >= r {
            let row = &hsum[(y - r) * w..(y - r + 1) * w];
            for (a, v) in acc.iter_mut().zip(row) {
                *a -= v;
            }
        }
    }

    GrayF::new(w, h, out).expect("dimensions preserved")
}

fn span_len(i: usize, r: usize, n: usize) -> usize {
    let lo = i.saturating_sub(r);
    let hi = (i + r).min(n - 1);
    hi - lo + 1
}

/// Normalized 1-D Gaussian taps for the given sigma, truncated at 3 sigma.
pub fn gaussian_kernel(sigma: f32) -> Vec<f32> {
    if sigma <= 0.0 {
        return vec![1.0];
    }
    let radius = (3.0 * sigma).ceil() as usize;
    let s2 = 2.0 * (sigma as f64) * (sigma as f64);
    let mut taps: Vec<f64> = (0..=2 * radius)
        .map(|i| {
            let d = i as f64 - radius as f64;
            (-d * d / s2).exp()
        })
        .collect();
    let sum: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= sum;
    }
    taps.into_iter().map(|t| t as f32).collect()
}

/// Separable Gaussian blur of a single plane; the kernel is renormalized
/// over the in-bounds taps at the borders so constants are preserved.
pub fn gaussian_blur_plane(data: &[f32], w: usize, h: usize, sigma: f32) -> Vec<f32> {
    let taps = gaussian_kernel(sigma);
    let radius = taps.len() / 2;
    if radius == 0 {
        return data.to_vec();
    }

    let mut horiz = vec![0.0f32; w * h];
    horiz
        .par_chunks_mut(w)
        .zip(data.par_chunks(w))
        .for_each(|(dst, row)| blur_row(row, &taps, radius, dst));

    let mut out = vec![0.0f32; w * h];
    let columns: Vec<Vec<f32>> = (0..w)
        .into_par_iter()
        .map(|x| {
            let col: Vec<f32> = (0..h).map(|y| horiz[y * w + x]).collect();
            let mut dst = vec![0.0f32; h];
            blur_row(&col, &taps, radius, &mut dst);
            dst
        })
        .collect();
    for (x, col) in columns.iter().enumerate() {
        for (y, &v) in col.iter().enumerate() {
            out[y * w + x] = v;
        }
    }
    out
}

fn blur_row(row: &[f32], taps: &[f32], radius: usize, dst: &mut [f32]) {
    let n = row.len();
    for (x, out) in dst.iter_mut().enumerate() {
        let lo = x.saturating_sub(radius);
        let hi = (x + radius).min(n - 1);
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for i in lo..=hi {
            let t = taps[i + radius - x] as f64;
            num += t * row[i] as f64;
            den += t;
        }
        *out = (num / den) as f32;
    }
}

/// Joint (cross) bilateral filter on a bilateral grid, the standard
/// video-rate formulation: `src` is splatted into a coarse
/// (x, y, guide-intensity) lattice with homogeneous weights, the lattice is
/// blurred with a small Gaussian, and the result is sliced back per pixel
/// by trilinear interpolation at the pixel's guide intensity. A direct
/// windowed evaluation costs `(2r+1)^2` taps per pixel and blows the frame
/// budget at VGA sizes; the grid is linear in pixels.
///
/// `spatial_sigma` is the spatial cell size in pixels (the effective
/// smoothing scale), `range_sigma` the intensity cell size, and `radius`
/// truncates the lattice blur at `ceil(radius / spatial_sigma)` cells.
/// Guide edges taller than a couple of `range_sigma` land in distant
/// intensity cells and are preserved. Output is a convex combination of
/// `src` values, clamped to the input range.
pub fn joint_bilateral(
    src: &GrayF,
    guide: &GrayF,
    radius: usize,
    spatial_sigma: f32,
    range_sigma: f32,
) -> GrayF {
    let (w, h) = (src.width(), src.height());
    debug_assert_eq!((guide.width(), guide.height()), (w, h));

    let rc = ((radius as f32 / spatial_sigma).ceil() as usize).clamp(1, 4);
    let inv_ss = 1.0 / spatial_sigma;
    let inv_sr = 1.0 / range_sigma;

    let gw = ((w - 1) as f32 * inv_ss).ceil() as usize + 1 + 2 * rc;
    let gh = ((h - 1) as f32 * inv_ss).ceil() as usize + 1 + 2 * rc;
    let gz = (inv_sr.min(1e4).ceil() as usize) + 1 + 2 * rc;
    let plane = gw * gh;

    let mut num = vec![0.0f32; plane * gz];
    let mut den = vec![0.0f32; plane * gz];

    // splat with trilinear weights (homogeneous: value and weight together)
    let src_data = src.data();
    let guide_data = guide.data();
    for y in 0..h {
        let gy = y as f32 * inv_ss + rc as f32;
        let iy = gy as usize;
        let fy = gy - iy as f32;
        for x in 0..w {
            let i = y * w + x;
            let gx = x as f32 * inv_ss + rc as f32;
            let ix = gx as usize;
            let fx = gx - ix as f32;
            let gv = (guide_data[i].clamp(0.0, 1.0) * inv_sr).min(1e4) + rc as f32;
            let iz = gv as usize;
            let fz = gv - iz as f32;
            let v = src_data[i];
            for dz in 0..2usize {
                let wz = if dz == 0 { 1.0 - fz } else { fz };
                for dy in 0..2usize {
                    let wy = if dy == 0 { 1.0 - fy } else { fy };
                    for dx in 0..2usize {
                        let wx = if dx == 0 { 1.0 - fx } else { fx };
                        let wgt = wz * wy * wx;
                        let cell = (iz + dz) * plane + (iy + dy) * gw + ix + dx;
                        num[cell] += wgt * v;
                        den[cell] += wgt;
                    }
                }
            }
        }
    }

    // separable lattice blur, sigma = one cell; normalization cancels in
    // the homogeneous division, borders read the zero padding
    let taps: Vec<f32> = (0..=2 * rc)
        .map(|i| {
            let d = i as f64 - rc as f64;
            (-d * d / 2.0).exp() as f32
        })
        .collect();
    for (dim_stride, dim_len) in [(1usize, gw), (gw, gh), (plane, gz)] {
        blur_lattice(&mut num, (gw, gh, gz), dim_stride, dim_len, &taps, rc);
        blur_lattice(&mut den, (gw, gh, gz), dim_stride, dim_len, &taps, rc);
    }

    // slice
    let mut out = vec![0.0f32; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, dst_row)| {
        let gy = y as f32 * inv_ss + rc as f32;
        let iy = gy as usize;
        let fy = gy - iy as f32;
        for (x, out_px) in dst_row.iter_mut().enumerate() {
            let i = y * w + x;
            let gx = x as f32 * inv_ss + rc as f32;
            let ix = gx as usize;
            let fx = gx - ix as f32;
            let gv = (guide_data[i].clamp(0.0, 1.0) * inv_sr).min(1e4) + rc as f32;
            let iz = gv as usize;
            let fz = gv - iz as f32;
            let mut n = 0.0f32;
            let mut d = 0.0f32;
            for dz in 0..2usize {
                let wz = if dz == 0 { 1.0 - fz } else { fz };
                for dy in 0..2usize {
                    let wy = if dy == 0 { 1.0 - fy } else { fy };
                    for dx in 0..2usize {
                        let wx = if dx == 0 { 1.0 - fx } else { fx };
                        let wgt = wz * wy * wx;
                        let cell = (iz + dz) * plane + (iy + dy) * gw + ix + dx;
                        n += wgt * num[cell];
                        d += wgt * den[cell];
                    }
                }
            }
            *out_px = if d > 0.0 { n / d } else { src_data[i] };
        }
    });

    // The sliced value is a convex combination of src values; pin down
    // float rounding so the output range never escapes the input range.
    let (mut lo, mut hi) = (f32::INFINITY, f32::NEG_INFINITY);
    for &v in src_data {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    for v in &mut out {
        *v = v.clamp(lo, hi);
    }

    GrayF::new(w, h, out).expect("dimensions preserved")
}

fn blur_lattice(
    grid: &mut [f32],
    (gw, gh, gz): (usize, usize, usize),
    stride: usize,
    dim_len: usize,
    taps: &[f32],
    rc: usize,
) {
    // iterate over all 1-D lines along the blurred dimension
    let mut line = vec![0.0f32; dim_len];
    let (outer_a, stride_a, outer_b, stride_b) = match stride {
        1 => (gh, gw, gz, gw * gh),
        s if s == gw => (gw, 1, gz, gw * gh),
        _ => (gw, 1, gh, gw),
    };
    for b in 0..outer_b {
        for a in 0..outer_a {
            let base = b * stride_b + a * stride_a;
            for (k, v) in line.iter_mut().enumerate() {
                *v = grid[base + k * stride];
            }
            for k in 0..dim_len {
                let lo = k.saturating_sub(rc);
                let hi = (k + rc).min(dim_len - 1);
                let mut acc = 0.0f32;
                for j in lo..=hi {
                    acc += taps[j + rc - k] * line[j];
                }
                grid[base + k * stride] = acc;
            }
        }
    }
}
