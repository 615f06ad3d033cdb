//! Invertible 2-D coordinate mappings used by the backward-warping engine.
//!
//! Coordinates are `(row, col)` pairs. A map describes the forward transform
//! from source to target; warping evaluates the inverse at each target pixel.
//! Scale maps use the pixel-center convention `x = (i + 0.5) / S - 0.5`;
//! affine and projective maps act on raw pixel coordinates.

use crate::error::{Error, Result};
use crate::kernel::FracCoord;

const SINGULARITY_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GeometricMap {
    /// Axis-aligned scaling by `(s_row, s_col)`, both positive.
    Scale { s_row: f64, s_col: f64 },
    /// Row-major 2x3 forward matrix with its cached inverse.
    Affine { forward: [f64; 6], inverse: [f64; 6] },
    /// Row-major 3x3 forward matrix (bottom-right normalized to 1 when
    /// nonzero) with its cached inverse.
    Homography { forward: [f64; 9], inverse: [f64; 9] },
}

impl GeometricMap {
    /// Isotropic scale, `s > 0`.
    pub fn scale(s: f64) -> Result<Self> {
        Self::scale_xy(s, s)
    }

    /// Anisotropic scale by `(s_row, s_col)`, both positive.
    pub fn scale_xy(s_row: f64, s_col: f64) -> Result<Self> {
        if !(s_row > 0.0 && s_col > 0.0) || !s_row.is_finite() || !s_col.is_finite() {
            return Err(Error::invalid(format!("scale factors must be positive finite, got ({s_row}, {s_col})")));
        }
        Ok(GeometricMap::Scale { s_row, s_col })
    }

    /// Forward affine map from a row-major 2x3 matrix `[a b c; d e f]`
    /// mapping `(row, col)` to `(a*row + b*col + c, d*row + e*col + f)`.
    pub fn affine(m: [f64; 6]) -> Result<Self> {
        let det = m[0] * m[4] - m[1] * m[3];
        if det.abs() <= SINGULARITY_EPS {
            return Err(Error::degenerate(format!("affine linear part is singular (det = {det:e})")));
        }
        let inv_lin = [m[4] / det, -m[1] / det, -m[3] / det, m[0] / det];
        let inverse = [
            inv_lin[0],
            inv_lin[1],
            -(inv_lin[0] * m[2] + inv_lin[1] * m[5]),
            inv_lin[2],
            inv_lin[3],
            -(inv_lin[2] * m[2] + inv_lin[3] * m[5]),
        ];
        Ok(GeometricMap::Affine { forward: m, inverse })
    }

    /// Forward projective map from a row-major 3x3 matrix.
    pub fn homography(m: [f64; 9]) -> Result<Self> {
        let mut fwd = m;
        if fwd[8] != 0.0 {
            for v in &mut fwd {
                *v /= m[8];
            }
        }
        let det = det3(&fwd);
        if det.abs() <= SINGULARITY_EPS {
            return Err(Error::degenerate(format!("homography is singular (det = {det:e})")));
        }
        let mut inverse = adjugate3(&fwd);
        for v in &mut inverse {
            *v /= det;
        }
        if inverse[8] != 0.0 {
            let w = inverse[8];
            for v in &mut inverse {
                *v /= w;
            }
        }
        Ok(GeometricMap::Homography { forward: fwd, inverse })
    }

    /// The source coordinate feeding target pixel `(i, j)`.
    pub fn inverse_map(&self, i: usize, j: usize) -> Result<FracCoord> {
        let (fi, fj) = (i as f64, j as f64);
        match self {
            GeometricMap::Scale { s_row, s_col } => Ok(FracCoord::new(
                (fi + 0.5) / s_row - 0.5,
                (fj + 0.5) / s_col - 0.5,
            )),
            GeometricMap::Affine { inverse, .. } => Ok(FracCoord::new(
                inverse[0] * fi + inverse[1] * fj + inverse[2],
                inverse[3] * fi + inverse[4] * fj + inverse[5],
            )),
            GeometricMap::Homography { inverse, .. } => {
                let u = inverse[0] * fi + inverse[1] * fj + inverse[2];
                let v = inverse[3] * fi + inverse[4] * fj + inverse[5];
                let w = inverse[6] * fi + inverse[7] * fj + inverse[8];
                if w.abs() < SINGULARITY_EPS {
                    return Err(Error::PointAtInfinity { row: i, col: j });
                }
                Ok(FracCoord::new(u / w, v / w))
            }
        }
    }

    /// Natural output extent for a source of `source_h x source_w`.
    ///
    /// Only scale maps have one (`round(source * S)` per axis, half away from
    /// zero); affine and projective warps require explicit target dims on the
    /// warp call.
    pub fn target_extent(&self, source_h: usize, source_w: usize) -> Result<(usize, usize)> {
        match self {
            GeometricMap::Scale { s_row, s_col } => {
                let th = (source_h as f64 * s_row).round() as usize;
                let tw = (source_w as f64 * s_col).round() as usize;
                if th == 0 || tw == 0 {
                    return Err(Error::degenerate(format!(
                        "scale ({s_row}, {s_col}) of {source_h}x{source_w} rounds to an empty image"
                    )));
                }
                Ok((th, tw))
            }
            _ => Err(Error::invalid(
                "affine/homography maps have no implied extent; pass explicit target dims to the warp call",
            )),
        }
    }

    /// Parse whitespace-separated row-major numbers: 6 for affine, 9 for
    /// homography.
    pub fn parse_affine(text: &str) -> Result<Self> {
        Self::affine(parse_numbers::<6>(text, "affine")?)
    }

    pub fn parse_homography(text: &str) -> Result<Self> {
        Self::homography(parse_numbers::<9>(text, "homography")?)
    }
}

fn parse_numbers<const N: usize>(text: &str, what: &str) -> Result<[f64; N]> {
    let vals: Vec<f64> = text
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::invalid(format!("{what}: '{t}' is not a number")))
        })
        .collect::<Result<_>>()?;
    let arr: [f64; N] = vals
        .try_into()
        .map_err(|v: Vec<f64>| Error::invalid(format!("{what}: expected {N} numbers, got {}", v.len())))?;
    Ok(arr)
}

fn det3(m: &[f64; 9]) -> f64 {
    m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
        + m[2] * (m[3] * m[7] - m[4] * m[6])
}

fn adjugate3(m: &[f64; 9]) -> [f64; 9] {
    [
        m[4] * m[8] - m[5] * m[7],
        m[2] * m[7] - m[1] * m[8],
        m[1] * m[5] - m[2] * m[4],
        m[5] * m[6] - m[3] * m[8],
        m[0] * m[8] - m[2] * m[6],
        m[2] * m[3] - m[0] * m[5],
        m[3] * m[7] - m[4] * m[6],
        m[1] * m[6] - m[0] * m[7],
        m[0] * m[4] - m[1] * m[3],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_scale_maps_to_itself() {
        let m = GeometricMap::scale(1.0).unwrap();
        let c = m.inverse_map(3, 7).unwrap();
        assert_eq!((c.x, c.y), (3.0, 7.0));
    }

    #[test]
    fn scale_two_pixel_center() {
        let m = GeometricMap::scale(2.0).unwrap();
        let c = m.inverse_map(0, 0).unwrap();
        assert_eq!((c.x, c.y), (-0.25, -0.25));
    }

    #[test]
    fn identity_homography_is_fixed_point() {
        let m = GeometricMap::homography([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let c = m.inverse_map(5, 5).unwrap();
        assert!((c.x - 5.0).abs() < 1e-12 && (c.y - 5.0).abs() < 1e-12);
    }

    #[test]
    fn extent_rounds_half_away() {
        let m = GeometricMap::scale(2.0).unwrap();
        assert_eq!(m.target_extent(256, 256).unwrap(), (512, 512));
        let m = GeometricMap::scale(1.5).unwrap();
        assert_eq!(m.target_extent(3, 3).unwrap(), (5, 5));
    }

    #[test]
    fn non_scale_maps_need_explicit_dims() {
        let m = GeometricMap::affine([1.0, 0.0, 0.0, 0.0, 1.0, 0.0]).unwrap();
        assert!(matches!(m.target_extent(4, 4), Err(Error::InvalidArg(_))));
    }

    #[test]
    fn singular_maps_rejected() {
        assert!(GeometricMap::affine([1.0, 2.0, 0.0, 2.0, 4.0, 0.0]).is_err());
        assert!(GeometricMap::homography([1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]).is_err());
        assert!(GeometricMap::scale(0.0).is_err());
        assert!(GeometricMap::scale(-2.0).is_err());
    }

    #[test]
    fn affine_forward_inverse_roundtrip() {
        let m = GeometricMap::affine([0.8, 0.3, -2.0, -0.1, 1.2, 5.0]).unwrap();
        let GeometricMap::Affine { forward, .. } = m else { unreachable!() };
        for (i, j) in [(0usize, 0usize), (3, 9), (17, 4)] {
            let c = m.inverse_map(i, j).unwrap();
            let fi = forward[0] * c.x + forward[1] * c.y + forward[2];
            let fj = forward[3] * c.x + forward[4] * c.y + forward[5];
            assert!((fi - i as f64).abs() < 1e-10);
            assert!((fj - j as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn homography_forward_inverse_roundtrip() {
        let m = GeometricMap::homography([1.1, 0.2, -4.0, 0.05, 0.9, 2.0, 1e-3, -2e-3, 1.0]).unwrap();
        let GeometricMap::Homography { forward, .. } = m else { unreachable!() };
        for (i, j) in [(0usize, 0usize), (5, 11), (20, 3)] {
            let c = m.inverse_map(i, j).unwrap();
            let w = forward[6] * c.x + forward[7] * c.y + forward[8];
            let fi = (forward[0] * c.x + forward[1] * c.y + forward[2]) / w;
            let fj = (forward[3] * c.x + forward[4] * c.y + forward[5]) / w;
            assert!((fi - i as f64).abs() < 1e-10);
            assert!((fj - j as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn scale_inverse_is_monotone() {
        let m = GeometricMap::scale_xy(1.7, 0.6).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..20 {
            let c = m.inverse_map(i, 0).unwrap();
            assert!(c.x > prev);
            prev = c.x;
        }
    }

    #[test]
    fn parse_matrix_text() {
        assert!(GeometricMap::parse_affine("1 0 0 0 1 0").is_ok());
        assert!(GeometricMap::parse_affine("1 0 0 0 1").is_err());
        assert!(GeometricMap::parse_homography("1 0 0 0 1 0 0 0 1").is_ok());
        assert!(GeometricMap::parse_homography("1 0 0 0 x 0 0 0 1").is_err());
    }
}
