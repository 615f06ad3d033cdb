//! Separable 1-D reconstruction kernels and fractional-coordinate sampling.
//!
//! Sampling follows the pixel-center convention: resizing a plane by factor
//! `S` reads source coordinate `x = (i + 0.5) / S - 0.5` for output index
//! `i`. Footprint weights are renormalized to sum to one on every call, which
//! makes constant planes exactly constant under any kernel, any boundary
//! policy, and any footprint truncation.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::{BoundaryPolicy, ChannelPlane};

/// A fractional source coordinate `(x, y)` = (row, column).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FracCoord {
    pub x: f64,
    pub y: f64,
}

impl FracCoord {
    pub fn new(x: f64, y: f64) -> Self {
        FracCoord { x, y }
    }

    /// Floor integer part of the row coordinate.
    pub fn floor_row(&self) -> i64 {
        self.x.floor() as i64
    }

    /// Floor integer part of the column coordinate.
    pub fn floor_col(&self) -> i64 {
        self.y.floor() as i64
    }

    /// Fractional row part in `[0, 1)`.
    pub fn frac_row(&self) -> f64 {
        self.x - self.x.floor()
    }

    /// Fractional column part in `[0, 1)`.
    pub fn frac_col(&self) -> f64 {
        self.y - self.y.floor()
    }
}

/// A separable 1-D reconstruction kernel.
///
/// The Lanczos variant carries its lobe parameter and an optional cap on the
/// number of taps per axis. The default [`InterpKernel::lanczos`] uses
/// fractional lobes `a = 2.5`, the windowed sinc whose support spans exactly
/// five taps per axis. `lanczos2`/`lanczos3` are the classic two- and
/// three-lobe kernels, and a truncated three-lobe variant (`lanczos3t5`,
/// five nearest taps with renormalization) ships as the alternative 5x5
/// reading.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InterpKernel {
    Nearest,
    Bilinear,
    Bicubic,
    Lanczos { lobes: f64, max_taps: Option<u32> },
}

impl InterpKernel {
    /// The default Lanczos: a 5x5 footprint via fractional lobes a = 2.5.
    pub fn lanczos() -> Self {
        InterpKernel::Lanczos { lobes: 2.5, max_taps: None }
    }

    pub fn lanczos2() -> Self {
        InterpKernel::Lanczos { lobes: 2.0, max_taps: None }
    }

    pub fn lanczos3() -> Self {
        InterpKernel::Lanczos { lobes: 3.0, max_taps: None }
    }

    /// Three lobes truncated to the five nearest taps per axis;
    /// renormalization absorbs the truncation.
    pub fn lanczos3_truncated() -> Self {
        InterpKernel::Lanczos { lobes: 3.0, max_taps: Some(5) }
    }

    /// Half-width of the kernel support in samples.
    pub fn support_radius(&self) -> f64 {
        match self {
            InterpKernel::Nearest => 0.5,
            InterpKernel::Bilinear => 1.0,
            InterpKernel::Bicubic => 2.0,
            InterpKernel::Lanczos { lobes, .. } => *lobes,
        }
    }

    /// Kernel weight at signed offset `t`.
    ///
    /// Bilinear is the triangle `max(0, 1 - |t|)`; Bicubic is the Keys cubic
    /// with `a = -0.5`; Lanczos is `sinc(t) sinc(t/a)` inside its support.
    /// Nearest selects the single closest sample, resolving the `|t| = 0.5`
    /// tie toward the lower index.
    pub fn weight(&self, t: f64) -> f64 {
        match self {
            InterpKernel::Nearest => {
                if t > -0.5 && t <= 0.5 {
                    1.0
                } else {
                    0.0
                }
            }
            InterpKernel::Bilinear => (1.0 - t.abs()).max(0.0),
            InterpKernel::Bicubic => keys_cubic(t),
            InterpKernel::Lanczos { lobes, .. } => lanczos(t, *lobes),
        }
    }

    /// Parse a CLI kernel name (case-insensitive).
    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "nearest" => Ok(InterpKernel::Nearest),
            "bilinear" => Ok(InterpKernel::Bilinear),
            "bicubic" => Ok(InterpKernel::Bicubic),
            "lanczos" => Ok(InterpKernel::lanczos()),
            "lanczos2" => Ok(InterpKernel::lanczos2()),
            "lanczos3" => Ok(InterpKernel::lanczos3()),
            "lanczos3t5" => Ok(InterpKernel::lanczos3_truncated()),
            other => Err(Error::invalid(format!(
                "unknown kernel '{other}' (nearest, bilinear, bicubic, lanczos, lanczos2, lanczos3, lanczos3t5)"
            ))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            InterpKernel::Nearest => "nearest".into(),
            InterpKernel::Bilinear => "bilinear".into(),
            InterpKernel::Bicubic => "bicubic".into(),
            InterpKernel::Lanczos { lobes, max_taps: None } if *lobes == 2.5 => "lanczos".into(),
            InterpKernel::Lanczos { lobes, max_taps: None } => format!("lanczos{lobes}"),
            InterpKernel::Lanczos { lobes, max_taps: Some(t) } => format!("lanczos{lobes}t{t}"),
        }
    }
}

/// Keys cubic, a = -0.5 (the common bicubic default).
fn keys_cubic(t: f64) -> f64 {
    let a = t.abs();
    if a < 1.0 {
        (1.5 * a - 2.5) * a * a + 1.0
    } else if a < 2.0 {
        ((-0.5 * a + 2.5) * a - 4.0) * a + 2.0
    } else {
        0.0
    }
}

fn sinc(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        let p = PI * t;
        p.sin() / p
    }
}

fn lanczos(t: f64, lobes: f64) -> f64 {
    if t.abs() < lobes {
        sinc(t) * sinc(t / lobes)
    } else {
        0.0
    }
}

/// Kernel-weight evaluation in free-function form.
pub fn kernel_weight(kernel: InterpKernel, t: f64) -> f64 {
    kernel.weight(t)
}

/// The taps of a kernel along one axis at one fractional coordinate:
/// consecutive integer sample positions starting at `start`, with one weight
/// per position. Weights are raw (not normalized).
#[derive(Clone, Debug)]
pub(crate) struct AxisTaps {
    pub start: i64,
    pub weights: Vec<f64>,
}

/// Build the taps for coordinate `x`, optionally widening the kernel by
/// `widen >= 1` (antialiased downsampling). A `max_taps` cap applies only at
/// `widen == 1`, keeping the unwidened footprint semantics.
pub(crate) fn axis_taps(kernel: InterpKernel, x: f64, widen: f64) -> AxisTaps {
    debug_assert!(widen >= 1.0);
    let radius = kernel.support_radius() * widen;
    let mut lo = (x - radius).ceil() as i64;
    let mut hi = (x + radius).floor() as i64;
    if hi < lo {
        lo = x.round() as i64;
        hi = lo;
    }
    if widen == 1.0 {
        if let InterpKernel::Lanczos { max_taps: Some(cap), .. } = kernel {
            let cap = cap as i64;
            if hi - lo + 1 > cap {
                // Keep the `cap` taps nearest to x; a tie at the half sample
                // goes to the window whose center is the lower index.
                let m = x.floor() as i64;
                let s = x - m as f64;
                let center = if s <= 0.5 { m } else { m + 1 };
                let new_lo = (center - (cap - 1) / 2).max(lo);
                lo = new_lo.min(hi - cap + 1);
                hi = lo + cap - 1;
            }
        }
    }
    let mut weights = Vec::with_capacity((hi - lo + 1) as usize);
    for tap in lo..=hi {
        weights.push(kernel.weight((x - tap as f64) / widen));
    }
    AxisTaps { start: lo, weights }
}

/// Sample one channel plane at a fractional coordinate.
///
/// Evaluates the full 2-D footprint (the outer product of the two 1-D tap
/// sets), renormalizes the weight sum to one, and resolves out-of-bounds taps
/// by the boundary policy. For the bilinear kernel on in-bounds interior
/// coordinates this reduces to the familiar four-corner blend.
pub fn sample_channel(
    plane: &ChannelPlane,
    coord: FracCoord,
    kernel: InterpKernel,
    policy: BoundaryPolicy,
) -> f64 {
    let row = axis_taps(kernel, coord.x, 1.0);
    let col = axis_taps(kernel, coord.y, 1.0);
    let mut acc = 0.0;
    let mut wsum = 0.0;
    for (di, &wr) in row.weights.iter().enumerate() {
        let r = row.start + di as i64;
        for (dj, &wc) in col.weights.iter().enumerate() {
            let c = col.start + dj as i64;
            let w = wr * wc;
            acc += w * plane.sample_at(r, c, policy);
            wsum += w;
        }
    }
    acc / wsum
}

/// Per-axis sampling plan for separable resizing: for each output index, a
/// fixed-width row of boundary-resolved source indices and renormalized
/// weights (padded with zero weights where the footprint is narrower). The
/// flat fixed-stride layout keeps the resize inner loops branch-free.
#[derive(Clone, Debug)]
pub(crate) struct AxisPlan {
    pub len: usize,
    pub taps: usize,
    pub idx: Vec<u32>,
    pub weights: Vec<f64>,
}

/// Coordinates for output index `i` under forward scale `s` (pixel-center).
#[inline]
pub(crate) fn scale_coord(i: usize, s: f64) -> f64 {
    (i as f64 + 0.5) / s - 0.5
}

pub(crate) fn axis_plan(
    kernel: InterpKernel,
    n_out: usize,
    s: f64,
    widen: f64,
    source_len: usize,
    policy: BoundaryPolicy,
) -> AxisPlan {
    let raw: Vec<AxisTaps> = (0..n_out)
        .map(|i| {
            let mut t = axis_taps(kernel, scale_coord(i, s), widen);
            let sum: f64 = t.weights.iter().sum();
            for w in &mut t.weights {
                *w /= sum;
            }
            t
        })
        .collect();
    let taps = raw.iter().map(|t| t.weights.len()).max().unwrap_or(1);
    let mut idx = vec![0u32; n_out * taps];
    let mut weights = vec![0.0f64; n_out * taps];
    for (i, t) in raw.iter().enumerate() {
        for (k, &w) in t.weights.iter().enumerate() {
            idx[i * taps + k] =
                crate::image::resolve_index(t.start + k as i64, source_len, policy) as u32;
            weights[i * taps + k] = w;
        }
        // pad with zero-weight repeats of the last tap
        for k in t.weights.len()..taps {
            idx[i * taps + k] = idx[i * taps + t.weights.len() - 1];
        }
    }
    AxisPlan { len: n_out, taps, idx, weights }
}

/// Separable two-pass resize of one plane. The result matches per-pixel
/// [`sample_channel`] evaluation up to floating-point associativity (well
/// inside 1e-12 for normalized intensities). `mid` is scratch reused across
/// planes; `clamp` squeezes each finished row into `[0, 1]` while it is
/// still cache-hot.
pub(crate) fn resize_plane(
    plane: &ChannelPlane,
    rows: &AxisPlan,
    cols: &AxisPlan,
    mid: &mut Vec<f64>,
    clamp: bool,
) -> ChannelPlane {
    let sh = plane.height();
    let sw = plane.width();
    let tw = cols.len;
    let th = rows.len;

    // Pass 1: horizontal gather, producing sh x tw. Every cell is written,
    // so the scratch only needs zeroing when it grows.
    if mid.len() != sh * tw {
        mid.clear();
        mid.resize(sh * tw, 0.0);
    }
    let ctaps = cols.taps;
    mid.par_chunks_mut(tw).enumerate().for_each(|(r, out_row)| {
        let src = &plane.data()[r * sw..(r + 1) * sw];
        for (j, cell) in out_row.iter_mut().enumerate() {
            let base = j * ctaps;
            let weights = &cols.weights[base..base + ctaps];
            let idx = &cols.idx[base..base + ctaps];
            let mut acc = 0.0;
            for (w, &i) in weights.iter().zip(idx) {
                // SAFETY: plan indices are resolved against the source width
                // at construction, so i < sw always holds.
                acc += w * unsafe { *src.get_unchecked(i as usize) };
            }
            *cell = acc;
        }
    });

    // Pass 2: vertical accumulation over whole rows, producing th x tw. The
    // first tap initializes each output row, so the buffer starts
    // uninitialized instead of paying for a redundant zero fill.
    let rtaps = rows.taps;
    let mid_ref: &[f64] = mid;
    let n = th * tw;
    let mut out: Vec<f64> = Vec::with_capacity(n);
    {
        let spare = &mut out.spare_capacity_mut()[..n];
        spare.par_chunks_mut(tw).enumerate().for_each(|(i, urow)| {
            let base = i * rtaps;
            let w0 = rows.weights[base];
            let first = &mid_ref[rows.idx[base] as usize * tw..][..tw];
            for (o, &m) in urow.iter_mut().zip(first) {
                o.write(w0 * m);
            }
            // SAFETY: the loop above initialized every element of this row.
            let out_row: &mut [f64] =
                unsafe { std::slice::from_raw_parts_mut(urow.as_mut_ptr().cast(), urow.len()) };
            for k in 1..rtaps {
                let w = rows.weights[base + k];
                let src_row = &mid_ref[rows.idx[base + k] as usize * tw..][..tw];
                for (o, &m) in out_row.iter_mut().zip(src_row) {
                    *o += w * m;
                }
            }
            if clamp {
                for o in out_row.iter_mut() {
                    *o = o.clamp(0.0, 1.0);
                }
            }
        });
    }
    // SAFETY: the parallel loop wrote all n elements.
    unsafe { out.set_len(n) };

    ChannelPlane::new(th, tw, out).expect("resize output dims are nonzero")
}

/// Resize a plane to `target_h x target_w` with the pixel-center scale map
/// `S_axis = target / source` per axis. No antialiasing: this is the
/// reconstruction path used for upsampling (shrinking through this function
/// aliases, by design of the protocol that calls it).
pub fn upsample_plane(
    plane: &ChannelPlane,
    target_h: usize,
    target_w: usize,
    kernel: InterpKernel,
    policy: BoundaryPolicy,
) -> Result<ChannelPlane> {
    if target_h == 0 || target_w == 0 {
        return Err(Error::dimension("target dimensions must be at least 1x1"));
    }
    let s_row = target_h as f64 / plane.height() as f64;
    let s_col = target_w as f64 / plane.width() as f64;
    let rows = axis_plan(kernel, target_h, s_row, 1.0, plane.height(), policy);
    let cols = axis_plan(kernel, target_w, s_col, 1.0, plane.width(), policy);
    Ok(resize_plane(plane, &rows, &cols, &mut Vec::new(), false))
}
