//! The 5-point cross Laplacian: center minus the mean of the four axis
//! neighbors at a fixed tap spacing. The spacing (stride) is 2 by default,
//! matching the demosaicking stencil this detail extractor comes from; a
//! stride-1 variant is selectable wherever a stride is configurable.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::{BoundaryPolicy, ChannelPlane};

/// A plane of signed Laplacian values plus the stride it was computed with.
/// Same dimensions as its source plane.
#[derive(Clone, Debug)]
pub struct LaplacianMap {
    pub plane: ChannelPlane,
    pub stride: u32,
}

/// Laplacian at a single pixel: `p[m,n] - (p[m+d,n] + p[m-d,n] + p[m,n-d] +
/// p[m,n+d]) / 4`, neighbors resolved by the boundary policy.
pub fn laplacian_at(
    plane: &ChannelPlane,
    m: i64,
    n: i64,
    stride: u32,
    policy: BoundaryPolicy,
) -> f64 {
    debug_assert!(stride >= 1);
    let d = stride as i64;
    plane.sample_at(m, n, policy)
        - 0.25
            * (plane.sample_at(m + d, n, policy)
                + plane.sample_at(m - d, n, policy)
                + plane.sample_at(m, n - d, policy)
                + plane.sample_at(m, n + d, policy))
}

/// Laplacian at every pixel of the plane. Interior pixels take a direct
/// indexing path; only the border goes through boundary resolution.
pub fn laplacian_map(plane: &ChannelPlane, stride: u32, policy: BoundaryPolicy) -> Result<LaplacianMap> {
    if stride < 1 {
        return Err(Error::invalid("laplacian stride must be at least 1"));
    }
    let (h, w) = (plane.height(), plane.width());
    let d = stride as usize;
    let src = plane.data();
    let mut data = vec![0.0f64; h * w];
    data.par_chunks_mut(w).enumerate().for_each(|(r, row)| {
        let interior_row = r >= d && r + d < h;
        let c_lo = d.min(w);
        let c_hi = w.saturating_sub(d).max(c_lo);
        if interior_row {
            for (c, cell) in row.iter_mut().enumerate().take(c_lo) {
                *cell = laplacian_at(plane, r as i64, c as i64, stride, policy);
            }
            let up = &src[(r - d) * w..];
            let down = &src[(r + d) * w..];
            let mid = &src[r * w..];
            for c in c_lo..c_hi {
                row[c] = mid[c] - 0.25 * (down[c] + up[c] + mid[c - d] + mid[c + d]);
            }
            for (c, cell) in row.iter_mut().enumerate().skip(c_hi) {
                *cell = laplacian_at(plane, r as i64, c as i64, stride, policy);
            }
        } else {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = laplacian_at(plane, r as i64, c as i64, stride, policy);
            }
        }
    });
    Ok(LaplacianMap { plane: ChannelPlane::new(h, w, data)?, stride })
}
