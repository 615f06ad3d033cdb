//! PSNR, SSIM, and wall-clock timing.
//!
//! PSNR is computed on 8-bit quantized samples (the same quantization the
//! file writer applies), jointly over all three channels, so the number
//! describes what a viewer of the saved file would get. SSIM runs
//! single-scale on the BT.601 luma plane with the standard 11x11 Gaussian
//! window, sigma 1.5, K1 = 0.01, K2 = 0.03, dynamic range 255.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::image::{Channel, PlanarImage};
use crate::io::quantize_u8;

/// PSNR/SSIM/time triple produced by the benchmark runners.
#[derive(Clone, Copy, Debug)]
pub struct QualityReport {
    pub psnr: f64,
    pub ssim: f64,
    pub elapsed: f64,
}

/// Color space a PSNR is computed in.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PsnrSpace {
    #[default]
    Rgb,
    Luma,
}

impl PsnrSpace {
    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "rgb" => Ok(PsnrSpace::Rgb),
            "y" | "luma" => Ok(PsnrSpace::Luma),
            other => Err(Error::invalid(format!("unknown psnr space '{other}' (rgb, y)"))),
        }
    }
}

fn check_dims(a: &PlanarImage, b: &PlanarImage) -> Result<()> {
    if a.height() != b.height() || a.width() != b.width() {
        return Err(Error::dimension(format!(
            "{}x{} vs {}x{}",
            a.height(),
            a.width(),
            b.height(),
            b.width()
        )));
    }
    Ok(())
}

/// Peak signal-to-noise ratio in dB over the crop-trimmed region, all three
/// channels jointly, after 8-bit quantization. Identical inputs return
/// `f64::INFINITY`.
pub fn psnr(a: &PlanarImage, b: &PlanarImage, crop: usize) -> Result<f64> {
    psnr_in(a, b, crop, PsnrSpace::Rgb)
}

pub fn psnr_in(a: &PlanarImage, b: &PlanarImage, crop: usize, space: PsnrSpace) -> Result<f64> {
    check_dims(a, b)?;
    let (h, w) = (a.height(), a.width());
    if 2 * crop >= h.min(w) {
        return Err(Error::invalid(format!("crop {crop} swallows the whole {h}x{w} image")));
    }
    let (r0, r1) = (crop, h - crop);
    let (c0, c1) = (crop, w - crop);
    match space {
        PsnrSpace::Rgb => {
            let mut sum_sq: u64 = 0;
            for ch in Channel::ALL {
                let pa = a.plane(ch);
                let pb = b.plane(ch);
                for r in r0..r1 {
                    for c in c0..c1 {
                        let d = quantize_u8(pa.get(r, c)) as i64 - quantize_u8(pb.get(r, c)) as i64;
                        sum_sq += (d * d) as u64;
                    }
                }
            }
            let n = 3 * (r1 - r0) * (c1 - c0);
            if sum_sq == 0 {
                return Ok(f64::INFINITY);
            }
            let mse = sum_sq as f64 / n as f64;
            Ok(10.0 * (255.0 * 255.0 / mse).log10())
        }
        PsnrSpace::Luma => {
            let mut sum_sq = 0.0f64;
            for r in r0..r1 {
                for c in c0..c1 {
                    let d = luma_at(a, r, c) - luma_at(b, r, c);
                    sum_sq += d * d;
                }
            }
            let n = (r1 - r0) * (c1 - c0);
            if sum_sq == 0.0 {
                return Ok(f64::INFINITY);
            }
            let mse = sum_sq / n as f64;
            Ok(10.0 * (255.0 * 255.0 / mse).log10())
        }
    }
}

/// BT.601 luma of the 8-bit quantized pixel, in the 0..255 range.
#[inline]
fn luma_at(img: &PlanarImage, r: usize, c: usize) -> f64 {
    0.299 * quantize_u8(img.plane(Channel::R).get(r, c)) as f64
        + 0.587 * quantize_u8(img.plane(Channel::G).get(r, c)) as f64
        + 0.114 * quantize_u8(img.plane(Channel::B).get(r, c)) as f64
}

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;
const SSIM_L: f64 = 255.0;

fn gaussian_window() -> [f64; SSIM_WINDOW] {
    let mut w = [0.0; SSIM_WINDOW];
    let mid = (SSIM_WINDOW / 2) as f64;
    let mut sum = 0.0;
    for (i, v) in w.iter_mut().enumerate() {
        *v = (-((i as f64 - mid).powi(2)) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
        sum += *v;
    }
    for v in &mut w {
        *v /= sum;
    }
    w
}

/// Separable valid-region Gaussian filter: input h x w, output
/// (h-10) x (w-10).
fn gauss_filter_valid(src: &[f64], h: usize, w: usize) -> Vec<f64> {
    let g = gaussian_window();
    let ow = w - SSIM_WINDOW + 1;
    let oh = h - SSIM_WINDOW + 1;
    // horizontal
    let mut mid = vec![0.0f64; h * ow];
    for r in 0..h {
        for c in 0..ow {
            let mut acc = 0.0;
            for (k, &gk) in g.iter().enumerate() {
                acc += gk * src[r * w + c + k];
            }
            mid[r * ow + c] = acc;
        }
    }
    // vertical
    let mut out = vec![0.0f64; oh * ow];
    for r in 0..oh {
        for c in 0..ow {
            let mut acc = 0.0;
            for (k, &gk) in g.iter().enumerate() {
                acc += gk * mid[(r + k) * ow + c];
            }
            out[r * ow + c] = acc;
        }
    }
    out
}

/// Single-scale SSIM on the luma plane, mean over all valid window
/// positions. Identical inputs score exactly 1.0.
pub fn ssim(a: &PlanarImage, b: &PlanarImage) -> Result<f64> {
    check_dims(a, b)?;
    let (h, w) = (a.height(), a.width());
    if h < SSIM_WINDOW || w < SSIM_WINDOW {
        return Err(Error::dimension(format!(
            "{h}x{w} image smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} SSIM window"
        )));
    }
    let lum = |img: &PlanarImage| -> Vec<f64> {
        let mut out = Vec::with_capacity(h * w);
        for r in 0..h {
            for c in 0..w {
                out.push(luma_at(img, r, c));
            }
        }
        out
    };
    let x = lum(a);
    let y = lum(b);
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(&y).map(|(u, v)| u * v).collect();

    let mu_x = gauss_filter_valid(&x, h, w);
    let mu_y = gauss_filter_valid(&y, h, w);
    let m_xx = gauss_filter_valid(&xx, h, w);
    let m_yy = gauss_filter_valid(&yy, h, w);
    let m_xy = gauss_filter_valid(&xy, h, w);

    let c1 = (SSIM_K1 * SSIM_L) * (SSIM_K1 * SSIM_L);
    let c2 = (SSIM_K2 * SSIM_L) * (SSIM_K2 * SSIM_L);
    let mut sum = 0.0;
    for i in 0..mu_x.len() {
        let (mx, my) = (mu_x[i], mu_y[i]);
        let var_x = m_xx[i] - mx * mx;
        let var_y = m_yy[i] - my * my;
        let cov = m_xy[i] - mx * my;
        let num = (2.0 * mx * my + c1) * (2.0 * cov + c2);
        let den = (mx * mx + my * my + c1) * (var_x + var_y + c2);
        sum += num / den;
    }
    Ok(sum / mu_x.len() as f64)
}

/// Wall-clock seconds for a deferred computation: one warm-up run, then the
/// median of five timed repetitions.
pub fn time_op<T>(mut op: impl FnMut() -> T) -> f64 {
    std::hint::black_box(op());
    let mut times: Vec<f64> = (0..5)
        .map(|_| {
            let t0 = Instant::now();
            std::hint::black_box(op());
            t0.elapsed().as_secs_f64()
        })
        .collect();
    times.sort_by(f64::total_cmp);
    times[2]
}
