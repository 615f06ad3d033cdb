//! Backward-mapped warping of 3-channel images.
//!
//! Two modes share one sampling engine:
//!
//! * independent — each channel is interpolated from itself only;
//! * correlated — the intra-channel estimate is corrected with weighted,
//!   interpolated Laplacians of the other two channels:
//!
//! ```text
//! G2 = G~ + w_gr * lap(R1) + w_gb * lap(B1)
//! R2 = R~ + w_rg * lap(G1) + w_rb * lap(B1)
//! B2 = B~ + w_bg * lap(G1) + w_br * lap(R1)
//! ```
//!
//! Laplacian maps are computed on the low-resolution source and then
//! interpolated with the same kernel as the channels themselves. With an
//! all-zero weight set the correlated mode degenerates to the independent
//! one bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::GeometricMap;
use crate::image::{BoundaryPolicy, ChannelPlane, PlanarImage};
use crate::kernel::{axis_plan, axis_taps, resize_plane, InterpKernel};
use crate::laplacian::laplacian_at;

/// The six cross-channel gains. Row channel receives, column channel donates
/// its Laplacian: `w_gr` is the gain on the R Laplacian added to G.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightSet {
    pub w_gr: f64,
    pub w_gb: f64,
    pub w_rg: f64,
    pub w_rb: f64,
    pub w_bg: f64,
    pub w_br: f64,
}

impl WeightSet {
    pub const ZERO: WeightSet =
        WeightSet { w_gr: 0.0, w_gb: 0.0, w_rg: 0.0, w_rb: 0.0, w_bg: 0.0, w_br: 0.0 };

    pub fn new(w_gr: f64, w_gb: f64, w_rg: f64, w_rb: f64, w_bg: f64, w_br: f64) -> Result<Self> {
        let ws = WeightSet { w_gr, w_gb, w_rg, w_rb, w_bg, w_br };
        ws.validate()?;
        Ok(ws)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.entries() {
            if !v.is_finite() || v.abs() >= 1.0 {
                return Err(Error::invalid(format!("weight {name} = {v} out of sane range (|w| < 1)")));
            }
        }
        Ok(())
    }

    pub fn entries(&self) -> [(&'static str, f64); 6] {
        [
            ("w_gr", self.w_gr),
            ("w_gb", self.w_gb),
            ("w_rg", self.w_rg),
            ("w_rb", self.w_rb),
            ("w_bg", self.w_bg),
            ("w_br", self.w_br),
        ]
    }

    pub fn is_zero(&self) -> bool {
        self.entries().iter().all(|(_, v)| *v == 0.0)
    }

    /// Reference gains shipped per kernel family, trained at 4x upscaling.
    /// Nearest has no published set and returns `None`.
    pub fn builtin(kernel: InterpKernel) -> Option<WeightSet> {
        match kernel {
            InterpKernel::Bilinear => Some(WeightSet {
                w_gr: 0.094,
                w_gb: 0.119,
                w_rg: 0.195,
                w_rb: 0.008,
                w_bg: 0.180,
                w_br: -0.003,
            }),
            InterpKernel::Bicubic => Some(WeightSet {
                w_gr: 0.045,
                w_gb: 0.064,
                w_rg: 0.096,
                w_rb: 0.010,
                w_bg: 0.089,
                w_br: 0.003,
            }),
            InterpKernel::Lanczos { .. } => Some(WeightSet {
                w_gr: 0.032,
                w_gb: 0.041,
                w_rg: 0.058,
                w_rb: 0.015,
                w_bg: 0.054,
                w_br: 0.008,
            }),
            InterpKernel::Nearest => None,
        }
    }

    /// Parse the plain-text weight file: six `name value` lines, names
    /// `w_gr w_gb w_rg w_rb w_bg w_br` in any order, unknown names rejected.
    pub fn parse(text: &str) -> Result<Self> {
        let mut vals: [Option<f64>; 6] = [None; 6];
        const NAMES: [&str; 6] = ["w_gr", "w_gb", "w_rg", "w_rb", "w_bg", "w_br"];
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let name = parts.next().unwrap();
            let value = parts
                .next()
                .ok_or_else(|| Error::format(format!("weights: missing value on line '{line}'")))?;
            if parts.next().is_some() {
                return Err(Error::format(format!("weights: trailing tokens on line '{line}'")));
            }
            let idx = NAMES
                .iter()
                .position(|n| *n == name)
                .ok_or_else(|| Error::format(format!("weights: unknown name '{name}'")))?;
            if vals[idx].is_some() {
                return Err(Error::format(format!("weights: duplicate name '{name}'")));
            }
            vals[idx] = Some(
                value
                    .parse::<f64>()
                    .map_err(|_| Error::format(format!("weights: '{value}' is not a number")))?,
            );
        }
        let get = |i: usize| vals[i].ok_or_else(|| Error::format(format!("weights: missing '{}'", NAMES[i])));
        WeightSet::new(get(0)?, get(1)?, get(2)?, get(3)?, get(4)?, get(5)?)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            // anything wrong inside the file is a content problem
            Error::Format(msg) | Error::InvalidArg(msg) => {
                Error::format(format!("{}: {msg}", path.display()))
            }
            other => other,
        })
    }

    pub fn to_file_text(&self) -> String {
        let mut out = String::new();
        for (name, v) in self.entries() {
            // default float formatting roundtrips exactly
            let _ = writeln!(out, "{name} {v}");
        }
        out
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_file_text()).map_err(|e| Error::io(path, e))
    }
}

/// Everything a warp call needs beyond the input image and output extent.
#[derive(Clone, Debug)]
pub struct WarpConfig {
    pub kernel: InterpKernel,
    pub map: GeometricMap,
    /// Required for correlated warps.
    pub weights: Option<WeightSet>,
    pub laplacian_stride: u32,
    pub boundary: BoundaryPolicy,
    pub clamp_output: bool,
}

impl WarpConfig {
    pub fn new(map: GeometricMap, kernel: InterpKernel) -> Self {
        WarpConfig {
            kernel,
            map,
            weights: None,
            laplacian_stride: 2,
            boundary: BoundaryPolicy::Replicate,
            clamp_output: true,
        }
    }

    pub fn with_weights(mut self, weights: WeightSet) -> Self {
        self.weights = Some(weights);
        self
    }
}

/// A warp result plus how many target pixels had no finite source
/// correspondence (projective denominators that vanished; filled with 0).
#[derive(Clone, Debug)]
pub struct Warped {
    pub image: PlanarImage,
    pub infinity_pixels: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WarpMode {
    Independent,
    Correlated,
}

/// Per-channel backward warp without cross-channel interaction.
pub fn warp_independent(
    img: &PlanarImage,
    cfg: &WarpConfig,
    target_h: usize,
    target_w: usize,
) -> Result<PlanarImage> {
    Ok(warp(img, cfg, WarpMode::Independent, target_h, target_w)?.image)
}

/// Backward warp with cross-channel Laplacian correction. Requires
/// `cfg.weights`.
pub fn warp_correlated(
    img: &PlanarImage,
    cfg: &WarpConfig,
    target_h: usize,
    target_w: usize,
) -> Result<PlanarImage> {
    Ok(warp(img, cfg, WarpMode::Correlated, target_h, target_w)?.image)
}

/// The shared engine behind both modes.
pub fn warp(
    img: &PlanarImage,
    cfg: &WarpConfig,
    mode: WarpMode,
    target_h: usize,
    target_w: usize,
) -> Result<Warped> {
    if target_h == 0 || target_w == 0 {
        return Err(Error::dimension("target dimensions must be at least 1x1"));
    }
    let weights = match mode {
        WarpMode::Independent => WeightSet::ZERO,
        WarpMode::Correlated => *cfg
            .weights
            .as_ref()
            .ok_or_else(|| Error::invalid("correlated warp requires a weight set"))?,
    };
    if mode == WarpMode::Correlated {
        weights.validate()?;
    }

    let [r, g, b] = img.planes();
    let correlated = mode == WarpMode::Correlated;

    // Sampling is linear, so the cross-channel combination can happen on the
    // low-resolution source before interpolation: warping (channel +
    // weighted foreign Laplacians) equals warping each and combining after,
    // and with zero weights the combined plane is bitwise the channel
    // itself. This keeps the correlated mode within a whisker of the
    // independent mode's cost.
    let stride = cfg.laplacian_stride;
    let combined: Option<[ChannelPlane; 3]> = if correlated {
        if stride < 1 {
            return Err(Error::invalid("laplacian stride must be at least 1"));
        }
        Some([
            combine_with_laplacians(r, weights.w_rg, g, weights.w_rb, b, stride, cfg.boundary),
            combine_with_laplacians(g, weights.w_gr, r, weights.w_gb, b, stride, cfg.boundary),
            combine_with_laplacians(b, weights.w_bg, g, weights.w_br, r, stride, cfg.boundary),
        ])
    } else {
        None
    };
    let source_refs: Vec<&ChannelPlane> = match &combined {
        Some(planes) => planes.iter().collect(),
        None => vec![r, g, b],
    };

    let (sampled, infinity_pixels) = match cfg.map {
        GeometricMap::Scale { s_row, s_col } => {
            let rows = axis_plan(cfg.kernel, target_h, s_row, 1.0, img.height(), cfg.boundary);
            let cols = axis_plan(cfg.kernel, target_w, s_col, 1.0, img.width(), cfg.boundary);
            let mut mid = Vec::new();
            let planes = source_refs
                .iter()
                .map(|p| resize_plane(p, &rows, &cols, &mut mid, cfg.clamp_output))
                .collect::<Vec<_>>();
            (planes, 0u64)
        }
        _ => {
            let (mut planes, infinity) = warp_planes_general(
                &source_refs,
                &cfg.map,
                cfg.kernel,
                cfg.boundary,
                target_h,
                target_w,
            )?;
            if cfg.clamp_output {
                for plane in &mut planes {
                    for v in plane.data_mut() {
                        *v = v.clamp(0.0, 1.0);
                    }
                }
            }
            (planes, infinity)
        }
    };

    let [er, eg, eb] = <[ChannelPlane; 3]>::try_from(sampled).expect("three planes");
    let image = PlanarImage::new(er, eg, eb)?;

    Ok(Warped { image, infinity_pixels })
}

/// `base + wa * lap(a) + wb * lap(b)` in one pass, evaluating the cross
/// Laplacians inline. Interior pixels use direct indexing; the border goes
/// through boundary resolution.
fn combine_with_laplacians(
    base: &ChannelPlane,
    wa: f64,
    a: &ChannelPlane,
    wb: f64,
    b: &ChannelPlane,
    stride: u32,
    policy: BoundaryPolicy,
) -> ChannelPlane {
    let (h, w) = (base.height(), base.width());
    let d = stride as usize;
    let (src_a, src_b, src_base) = (a.data(), b.data(), base.data());
    let mut data = vec![0.0f64; h * w];
    data.par_chunks_mut(w).enumerate().for_each(|(r, row)| {
        let slow = |c: usize| {
            let (ri, ci) = (r as i64, c as i64);
            src_base[r * w + c]
                + (wa * laplacian_at(a, ri, ci, stride, policy)
                    + wb * laplacian_at(b, ri, ci, stride, policy))
        };
        if r >= d && r + d < h {
            let c_lo = d.min(w);
            let c_hi = w.saturating_sub(d).max(c_lo);
            for (c, cell) in row.iter_mut().enumerate().take(c_lo) {
                *cell = slow(c);
            }
            let o = r * w;
            let (up, down) = ((r - d) * w, (r + d) * w);
            for c in c_lo..c_hi {
                let la = src_a[o + c]
                    - 0.25 * (src_a[down + c] + src_a[up + c] + src_a[o + c - d] + src_a[o + c + d]);
                let lb = src_b[o + c]
                    - 0.25 * (src_b[down + c] + src_b[up + c] + src_b[o + c - d] + src_b[o + c + d]);
                row[c] = src_base[o + c] + (wa * la + wb * lb);
            }
            for (c, cell) in row.iter_mut().enumerate().skip(c_hi) {
                *cell = slow(c);
            }
        } else {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = slow(c);
            }
        }
    });
    ChannelPlane::new(h, w, data).expect("combined plane dims")
}

/// Per-pixel path for affine/projective maps: invert the map at every target
/// pixel and sample all planes with the same footprint. Vanishing projective
/// denominators fill the pixel with 0 across all planes and are counted.
fn warp_planes_general(
    planes: &[&ChannelPlane],
    map: &GeometricMap,
    kernel: InterpKernel,
    policy: BoundaryPolicy,
    target_h: usize,
    target_w: usize,
) -> Result<(Vec<ChannelPlane>, u64)> {
    let n_planes = planes.len();
    let mut out: Vec<Vec<f64>> = (0..n_planes).map(|_| vec![0.0f64; target_h * target_w]).collect();

    // Row-parallel over the output; each row writes a disjoint slice of every
    // output plane.
    struct RowSlices<'a>(Vec<&'a mut [f64]>);
    let mut row_views: Vec<RowSlices> = Vec::with_capacity(target_h);
    {
        let mut rests: Vec<&mut [f64]> = out.iter_mut().map(|v| v.as_mut_slice()).collect();
        for _ in 0..target_h {
            let mut row = Vec::with_capacity(n_planes);
            let mut new_rests = Vec::with_capacity(n_planes);
            for rest in rests {
                let (head, tail) = rest.split_at_mut(target_w);
                row.push(head);
                new_rests.push(tail);
            }
            rests = new_rests;
            row_views.push(RowSlices(row));
        }
    }

    let infinity: u64 = row_views
        .par_iter_mut()
        .enumerate()
        .map(|(i, slices)| {
            let mut inf_count = 0u64;
            for j in 0..target_w {
                match map.inverse_map(i, j) {
                    Ok(coord) => {
                        let row = axis_taps(kernel, coord.x, 1.0);
                        let col = axis_taps(kernel, coord.y, 1.0);
                        for (p, plane) in planes.iter().enumerate() {
                            let mut acc = 0.0;
                            let mut wsum = 0.0;
                            for (di, &wr) in row.weights.iter().enumerate() {
                                let rr = row.start + di as i64;
                                for (dj, &wc) in col.weights.iter().enumerate() {
                                    let cc = col.start + dj as i64;
                                    let w = wr * wc;
                                    acc += w * plane.sample_at(rr, cc, policy);
                                    wsum += w;
                                }
                            }
                            slices.0[p][j] = acc / wsum;
                        }
                    }
                    Err(Error::PointAtInfinity { .. }) => {
                        for p in 0..n_planes {
                            slices.0[p][j] = 0.0;
                        }
                        inf_count += 1;
                    }
                    Err(e) => panic!("unexpected inverse map failure: {e}"),
                }
            }
            inf_count
        })
        .sum();

    let planes_out = out
        .into_iter()
        .map(|d| ChannelPlane::new(target_h, target_w, d))
        .collect::<Result<Vec<_>>>()?;
    Ok((planes_out, infinity))
}
