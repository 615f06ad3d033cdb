//! Planar floating-point pixel containers.
//!
//! All pixel math in this crate runs on normalized `f64` intensities in
//! `[0, 1]`, held as three independent row-major channel planes. Quantization
//! to 8 bits happens only at file output (see [`crate::io`]).

use crate::error::{Error, Result};

/// One of the three color channels, in storage order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    R = 0,
    G = 1,
    B = 2,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::R, Channel::G, Channel::B];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// How out-of-bounds indices are resolved when a stencil or kernel footprint
/// reaches past the edge of a plane.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BoundaryPolicy {
    /// Clamp the index to the nearest edge sample.
    #[default]
    Replicate,
    /// Mirror about the edge sample (the edge itself is not repeated).
    Reflect,
}

pub(crate) fn resolve_index(i: i64, len: usize, policy: BoundaryPolicy) -> usize {
    debug_assert!(len >= 1);
    let n = len as i64;
    if (0..n).contains(&i) {
        return i as usize;
    }
    match policy {
        BoundaryPolicy::Replicate => i.clamp(0, n - 1) as usize,
        BoundaryPolicy::Reflect => {
            if n == 1 {
                return 0;
            }
            let period = 2 * (n - 1);
            let mut k = i.rem_euclid(period);
            if k > n - 1 {
                k = period - k;
            }
            k as usize
        }
    }
}

/// A single channel: a row-major grid of intensities.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelPlane {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl ChannelPlane {
    pub fn new(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::dimension("plane dimensions must be at least 1x1"));
        }
        if data.len() != height * width {
            return Err(Error::dimension(format!(
                "plane data length {} does not match {}x{}",
                data.len(),
                height,
                width
            )));
        }
        Ok(ChannelPlane { height, width, data })
    }

    pub fn filled(height: usize, width: usize, value: f64) -> Self {
        ChannelPlane { height, width, data: vec![value; height * width] }
    }

    /// Build a plane from a function of (row, col).
    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                data.push(f(r, c));
            }
        }
        ChannelPlane { height, width, data }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        debug_assert!(row < self.height && col < self.width);
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.height && col < self.width);
        self.data[row * self.width + col] = value;
    }

    /// Read at arbitrary (possibly out-of-bounds) integer coordinates,
    /// resolved by the boundary policy. In-bounds reads are exact.
    #[inline]
    pub fn sample_at(&self, row: i64, col: i64, policy: BoundaryPolicy) -> f64 {
        let r = resolve_index(row, self.height, policy);
        let c = resolve_index(col, self.width, policy);
        self.data[r * self.width + c]
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.data.iter().copied()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Elementwise map into a new plane.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ChannelPlane {
        ChannelPlane {
            height: self.height,
            width: self.width,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// Free-function form of boundary-resolved plane access.
pub fn sample_at(plane: &ChannelPlane, row: i64, col: i64, policy: BoundaryPolicy) -> f64 {
    plane.sample_at(row, col, policy)
}

/// An H x W x 3 color image stored as three planes (R, G, B).
///
/// Images are immutable from the caller's perspective: operations take
/// read-only inputs and return new images, so values may be shared freely
/// across threads.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarImage {
    planes: [ChannelPlane; 3],
}

impl PlanarImage {
    pub fn new(r: ChannelPlane, g: ChannelPlane, b: ChannelPlane) -> Result<Self> {
        if r.height() != g.height()
            || r.height() != b.height()
            || r.width() != g.width()
            || r.width() != b.width()
        {
            return Err(Error::dimension(format!(
                "channel planes disagree: R {}x{}, G {}x{}, B {}x{}",
                r.height(),
                r.width(),
                g.height(),
                g.width(),
                b.height(),
                b.width()
            )));
        }
        Ok(PlanarImage { planes: [r, g, b] })
    }

    pub fn filled(height: usize, width: usize, rgb: [f64; 3]) -> Self {
        PlanarImage {
            planes: [
                ChannelPlane::filled(height, width, rgb[0]),
                ChannelPlane::filled(height, width, rgb[1]),
                ChannelPlane::filled(height, width, rgb[2]),
            ],
        }
    }

    /// Build an image from a function of (channel, row, col).
    pub fn from_fn(
        height: usize,
        width: usize,
        mut f: impl FnMut(Channel, usize, usize) -> f64,
    ) -> Self {
        let planes = Channel::ALL.map(|ch| ChannelPlane::from_fn(height, width, |r, c| f(ch, r, c)));
        PlanarImage { planes }
    }

    pub fn height(&self) -> usize {
        self.planes[0].height()
    }

    pub fn width(&self) -> usize {
        self.planes[0].width()
    }

    pub fn plane(&self, ch: Channel) -> &ChannelPlane {
        &self.planes[ch.index()]
    }

    pub fn plane_mut(&mut self, ch: Channel) -> &mut ChannelPlane {
        &mut self.planes[ch.index()]
    }

    pub fn planes(&self) -> &[ChannelPlane; 3] {
        &self.planes
    }

    pub fn into_planes(self) -> [ChannelPlane; 3] {
        self.planes
    }

    pub fn is_finite(&self) -> bool {
        self.planes.iter().all(ChannelPlane::is_finite)
    }

    /// Elementwise map across all channels.
    pub fn map(&self, f: impl Fn(f64) -> f64 + Copy) -> PlanarImage {
        PlanarImage { planes: [self.planes[0].map(f), self.planes[1].map(f), self.planes[2].map(f)] }
    }

    /// Clamp every intensity into `[0, 1]`.
    pub fn clamped(&self) -> PlanarImage {
        self.map(|v| v.clamp(0.0, 1.0))
    }
}
