//! Downsampling pipelines that manufacture low-resolution inputs.
//!
//! Two protocols: nearest-neighbour decimation (no prefilter, aliasing
//! expected) and antialiased bicubic (kernel support widened by the shrink
//! factor so sampling implicitly low-pass filters, as Matlab-style resize
//! does when shrinking). Output extent is `floor(M/S) x floor(N/S)`.

use crate::error::{Error, Result};
use crate::image::{BoundaryPolicy, ChannelPlane, PlanarImage};
use crate::kernel::{axis_plan, resize_plane, InterpKernel};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DownsampleMethod {
    NearestNeighbour,
    BicubicAntialiased,
}

impl DownsampleMethod {
    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "nearest" => Ok(DownsampleMethod::NearestNeighbour),
            "bicubic" => Ok(DownsampleMethod::BicubicAntialiased),
            other => Err(Error::invalid(format!("unknown downsample method '{other}' (nearest, bicubic)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DownsampleSpec {
    pub method: DownsampleMethod,
    pub factor: f64,
}

impl DownsampleSpec {
    pub fn new(method: DownsampleMethod, factor: f64) -> Result<Self> {
        if !(factor > 1.0) || !factor.is_finite() {
            return Err(Error::invalid(format!("downsample factor must be > 1, got {factor}")));
        }
        Ok(DownsampleSpec { method, factor })
    }
}

/// Shrink an image by `spec.factor`, producing `floor(M/S) x floor(N/S)`.
pub fn downsample(img: &PlanarImage, spec: &DownsampleSpec) -> Result<PlanarImage> {
    let th = (img.height() as f64 / spec.factor).floor() as usize;
    let tw = (img.width() as f64 / spec.factor).floor() as usize;
    if th == 0 || tw == 0 {
        return Err(Error::degenerate(format!(
            "downsampling {}x{} by {} leaves an empty image",
            img.height(),
            img.width(),
            spec.factor
        )));
    }
    let s_row = th as f64 / img.height() as f64;
    let s_col = tw as f64 / img.width() as f64;
    let (kernel, widen_row, widen_col) = match spec.method {
        DownsampleMethod::NearestNeighbour => (InterpKernel::Nearest, 1.0, 1.0),
        DownsampleMethod::BicubicAntialiased => (InterpKernel::Bicubic, 1.0 / s_row, 1.0 / s_col),
    };
    let policy = BoundaryPolicy::Replicate;
    let rows = axis_plan(kernel, th, s_row, widen_row.max(1.0), img.height(), policy);
    let cols = axis_plan(kernel, tw, s_col, widen_col.max(1.0), img.width(), policy);
    let mut mid = Vec::new();
    let planes: Vec<ChannelPlane> =
        img.planes().iter().map(|p| resize_plane(p, &rows, &cols, &mut mid, false)).collect();
    let [r, g, b] = <[ChannelPlane; 3]>::try_from(planes).expect("three planes");
    PlanarImage::new(r, g, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::Channel;

    fn checkerboard(h: usize, w: usize) -> PlanarImage {
        PlanarImage::from_fn(h, w, |_, r, c| ((r + c) % 2) as f64)
    }

    #[test]
    fn output_dims_are_floored() {
        let img = PlanarImage::filled(9, 7, [0.5; 3]);
        for method in [DownsampleMethod::NearestNeighbour, DownsampleMethod::BicubicAntialiased] {
            let spec = DownsampleSpec::new(method, 2.0).unwrap();
            let out = downsample(&img, &spec).unwrap();
            assert_eq!((out.height(), out.width()), (4, 3));
        }
        let spec = DownsampleSpec::new(DownsampleMethod::NearestNeighbour, 2.5).unwrap();
        let out = downsample(&img, &spec).unwrap();
        assert_eq!((out.height(), out.width()), (3, 2));
    }

    #[test]
    fn constant_image_stays_constant() {
        let img = PlanarImage::filled(12, 12, [0.3, 0.6, 0.9]);
        for method in [DownsampleMethod::NearestNeighbour, DownsampleMethod::BicubicAntialiased] {
            for factor in [1.5, 2.0, 3.7] {
                let out = downsample(&img, &DownsampleSpec::new(method, factor).unwrap()).unwrap();
                for (ch, expect) in Channel::ALL.into_iter().zip([0.3, 0.6, 0.9]) {
                    for v in out.plane(ch).iter() {
                        assert!((v - expect).abs() < 1e-12, "{method:?} x{factor}");
                    }
                }
            }
        }
    }

    #[test]
    fn nearest_on_checkerboard_collapses_to_one_parity() {
        let img = checkerboard(8, 8);
        let spec = DownsampleSpec::new(DownsampleMethod::NearestNeighbour, 2.0).unwrap();
        let out = downsample(&img, &spec).unwrap();
        let first = out.plane(Channel::R).get(0, 0);
        for v in out.plane(Channel::R).iter() {
            assert_eq!(v, first);
        }
    }

    #[test]
    fn nearest_output_is_subset_of_input() {
        let img = PlanarImage::from_fn(11, 13, |ch, r, c| ((r * 31 + c * 7 + ch.index()) % 17) as f64 / 17.0);
        let spec = DownsampleSpec::new(DownsampleMethod::NearestNeighbour, 1.9).unwrap();
        let out = downsample(&img, &spec).unwrap();
        for ch in Channel::ALL {
            let source: Vec<f64> = img.plane(ch).iter().collect();
            for v in out.plane(ch).iter() {
                assert!(source.iter().any(|s| *s == v), "{v} not an exact input copy");
            }
        }
    }

    #[test]
    fn antialiased_bicubic_kills_nyquist_checkerboard() {
        let img = checkerboard(16, 16);
        let spec = DownsampleSpec::new(DownsampleMethod::BicubicAntialiased, 2.0).unwrap();
        let out = downsample(&img, &spec).unwrap();
        for r in 2..6 {
            for c in 2..6 {
                let v = out.plane(Channel::R).get(r, c);
                assert!((v - 0.5).abs() < 1e-6, "interior value {v}");
            }
        }
    }

    #[test]
    fn antialiased_bicubic_preserves_mean_of_periodic_input() {
        let img = PlanarImage::from_fn(24, 24, |_, r, c| {
            0.5 + 0.3 * ((r % 4) as f64 - 1.5) / 1.5 * (((c % 3) as f64 - 1.0).abs() - 0.5)
        });
        let spec = DownsampleSpec::new(DownsampleMethod::BicubicAntialiased, 2.0).unwrap();
        let out = downsample(&img, &spec).unwrap();
        let mean_in: f64 =
            img.plane(Channel::R).iter().sum::<f64>() / (img.height() * img.width()) as f64;
        let mean_out: f64 =
            out.plane(Channel::R).iter().sum::<f64>() / (out.height() * out.width()) as f64;
        assert!((mean_in - mean_out).abs() < 1e-3, "{mean_in} vs {mean_out}");
    }

    #[test]
    fn degenerate_output_is_an_error() {
        let img = PlanarImage::filled(3, 3, [0.1; 3]);
        let spec = DownsampleSpec::new(DownsampleMethod::NearestNeighbour, 4.0).unwrap();
        assert!(matches!(downsample(&img, &spec), Err(Error::Degenerate(_))));
        assert!(DownsampleSpec::new(DownsampleMethod::NearestNeighbour, 1.0).is_err());
    }
}
