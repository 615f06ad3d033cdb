//! Learning the six cross-channel gains by regression on
//! (low-resolution, ground-truth) pairs.
//!
//! Each ground-truth image is shrunk with antialiased bicubic downsampling;
//! intra-channel estimates and interpolated Laplacians are evaluated at
//! randomly drawn target pixels; residuals `ground truth - estimate` are
//! regressed onto the two foreign-channel Laplacians. The three channel
//! systems are independent with two unknowns each, so the MSE solution is a
//! closed-form 2x2 normal-equation solve; the MAE solution is iteratively
//! reweighted least squares.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::image::{BoundaryPolicy, Channel, PlanarImage};
use crate::kernel::{sample_channel, InterpKernel};
use crate::laplacian::laplacian_map;
use crate::resample::{downsample, DownsampleMethod, DownsampleSpec};
use crate::warp::WeightSet;

/// One drawn pixel: per-channel residuals of the intra-channel estimate and
/// the three interpolated Laplacians at the same fractional coordinate.
#[derive(Clone, Copy, Debug)]
pub struct TrainingSample {
    pub residual_r: f64,
    pub residual_g: f64,
    pub residual_b: f64,
    pub lap_r: f64,
    pub lap_g: f64,
    pub lap_b: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Loss {
    Mse,
    Mae,
}

impl Loss {
    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "mse" => Ok(Loss::Mse),
            "mae" => Ok(Loss::Mae),
            other => Err(Error::invalid(format!("unknown loss '{other}' (mse, mae)"))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TrainSpec {
    /// Downsampling factor the pairs are built at. Gains trained large
    /// (the default 4) transfer well to smaller factors.
    pub scale: f64,
    pub kernel: InterpKernel,
    /// Total number of pixels drawn across the whole corpus.
    pub sample_count: usize,
    pub loss: Loss,
    pub seed: u64,
    pub laplacian_stride: u32,
}

impl Default for TrainSpec {
    fn default() -> Self {
        TrainSpec {
            scale: 4.0,
            kernel: InterpKernel::Bilinear,
            sample_count: 10_000,
            loss: Loss::Mse,
            seed: 0,
            laplacian_stride: 2,
        }
    }
}

impl TrainSpec {
    fn validate(&self) -> Result<()> {
        if self.sample_count < 12 {
            return Err(Error::invalid(format!(
                "sample count {} is below the well-posedness floor of 12",
                self.sample_count
            )));
        }
        if !(self.scale > 1.0) {
            return Err(Error::invalid(format!("training scale must be > 1, got {}", self.scale)));
        }
        Ok(())
    }

    /// Border width excluded from sampling in the target lattice.
    fn border(&self) -> usize {
        (2 * self.laplacian_stride as usize).max(self.kernel.support_radius().ceil() as usize)
    }
}

/// Samples plus bookkeeping about what was skipped.
#[derive(Clone, Debug)]
pub struct SampleSet {
    pub samples: Vec<TrainingSample>,
    pub skipped_images: usize,
}

/// Draw samples from ground-truth images, deriving each low-resolution
/// source internally by antialiased bicubic downsampling at `spec.scale`.
pub fn collect_samples(corpus: &[PlanarImage], spec: &TrainSpec) -> Result<SampleSet> {
    spec.validate()?;
    // big enough to downsample at all, and to leave an interior once the
    // sampling border is excluded
    let min_side = ((2.0 * spec.scale).ceil() as usize).max(2 * spec.border() + 2);
    let down = DownsampleSpec::new(DownsampleMethod::BicubicAntialiased, spec.scale)?;
    let mut pairs = Vec::new();
    let mut skipped = 0usize;
    for gt in corpus {
        if gt.height() < min_side || gt.width() < min_side {
            skipped += 1;
            continue;
        }
        let lr = downsample(gt, &down)?;
        pairs.push((lr, gt.clone()));
    }
    if pairs.is_empty() {
        return Err(Error::degenerate(if corpus.is_empty() {
            "empty training corpus".to_string()
        } else {
            format!("all {} corpus images are smaller than {min_side}x{min_side}", corpus.len())
        }));
    }
    let mut set = collect_samples_from_pairs(&pairs, spec)?;
    set.skipped_images = skipped;
    Ok(set)
}

/// Draw samples from explicit (low-resolution, ground-truth) pairs.
///
/// `spec.sample_count` pixels are drawn uniformly without replacement across
/// the union of all valid target lattices (a border of
/// `max(2 * stride, kernel support)` is excluded). The draw is seeded and the
/// output ordering is image index first, then draw order, so a fixed seed
/// reproduces the sample list exactly.
pub fn collect_samples_from_pairs(
    pairs: &[(PlanarImage, PlanarImage)],
    spec: &TrainSpec,
) -> Result<SampleSet> {
    spec.validate()?;
    let border = spec.border();
    let policy = BoundaryPolicy::Replicate;

    struct Valid {
        cols: usize,
        offset: usize, // cumulative start in the global lattice
    }
    let mut regions = Vec::with_capacity(pairs.len());
    let mut total = 0usize;
    for (_, gt) in pairs {
        let (h, w) = (gt.height(), gt.width());
        if h <= 2 * border || w <= 2 * border {
            return Err(Error::degenerate(format!(
                "target {h}x{w} has no interior once the {border}-pixel sampling border is removed"
            )));
        }
        let rows = h - 2 * border;
        let cols = w - 2 * border;
        regions.push(Valid { cols, offset: total });
        total += rows * cols;
    }

    let count = spec.sample_count.min(total);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut picks: Vec<usize> = rand::seq::index::sample(&mut rng, total, count).into_vec();
    // group by image, preserving draw order within each image
    picks.sort_by_key(|&g| regions.partition_point(|v| v.offset <= g) - 1);

    // per-image precomputation, reused across that image's picks
    let mut samples = Vec::with_capacity(count);
    let mut current_img = usize::MAX;
    let mut laps: [Option<crate::image::ChannelPlane>; 3] = [None, None, None];
    for g in picks {
        let img_idx = regions.partition_point(|v| v.offset <= g) - 1;
        let region = &regions[img_idx];
        let (lr, gt) = &pairs[img_idx];
        if img_idx != current_img {
            for ch in Channel::ALL {
                laps[ch.index()] =
                    Some(laplacian_map(lr.plane(ch), spec.laplacian_stride, policy)?.plane);
            }
            current_img = img_idx;
        }
        let local = g - region.offset;
        let i = border + local / region.cols;
        let j = border + local % region.cols;
        let s_row = gt.height() as f64 / lr.height() as f64;
        let s_col = gt.width() as f64 / lr.width() as f64;
        let coord = crate::kernel::FracCoord::new(
            (i as f64 + 0.5) / s_row - 0.5,
            (j as f64 + 0.5) / s_col - 0.5,
        );
        let est = Channel::ALL
            .map(|ch| sample_channel(lr.plane(ch), coord, spec.kernel, policy));
        let lap = Channel::ALL.map(|ch| {
            sample_channel(laps[ch.index()].as_ref().unwrap(), coord, spec.kernel, policy)
        });
        samples.push(TrainingSample {
            residual_r: gt.plane(Channel::R).get(i, j) - est[0],
            residual_g: gt.plane(Channel::G).get(i, j) - est[1],
            residual_b: gt.plane(Channel::B).get(i, j) - est[2],
            lap_r: lap[0],
            lap_g: lap[1],
            lap_b: lap[2],
        });
    }
    Ok(SampleSet { samples, skipped_images: 0 })
}

/// Solve the three independent 2-unknown systems and assemble the weight
/// set: green from (lap_r, lap_b), red from (lap_g, lap_b), blue from
/// (lap_g, lap_r).
pub fn fit_weights(samples: &[TrainingSample], loss: Loss) -> Result<WeightSet> {
    if samples.len() < 2 {
        return Err(Error::degenerate(format!("{} samples cannot determine 2 unknowns", samples.len())));
    }
    let green = solve_system(samples, |s| (s.lap_r, s.lap_b, s.residual_g), loss, "green")?;
    let red = solve_system(samples, |s| (s.lap_g, s.lap_b, s.residual_r), loss, "red")?;
    let blue = solve_system(samples, |s| (s.lap_g, s.lap_r, s.residual_b), loss, "blue")?;
    Ok(WeightSet {
        w_gr: green[0],
        w_gb: green[1],
        w_rg: red[0],
        w_rb: red[1],
        w_bg: blue[0],
        w_br: blue[1],
    })
}

/// Convenience wrapper: collect then fit.
pub fn train(corpus: &[PlanarImage], spec: &TrainSpec) -> Result<(WeightSet, SampleSet)> {
    let set = collect_samples(corpus, spec)?;
    let weights = fit_weights(&set.samples, spec.loss)?;
    Ok((weights, set))
}

const IRLS_EPS: f64 = 1e-8;
const IRLS_TOL: f64 = 1e-10;
const IRLS_MAX_ITERS: usize = 500;

fn solve_system(
    samples: &[TrainingSample],
    row: impl Fn(&TrainingSample) -> (f64, f64, f64),
    loss: Loss,
    name: &str,
) -> Result<[f64; 2]> {
    let weighted = |beta: Option<([f64; 2], f64)>| -> Result<[f64; 2]> {
        let mut s11 = 0.0;
        let mut s12 = 0.0;
        let mut s22 = 0.0;
        let mut r1 = 0.0;
        let mut r2 = 0.0;
        for s in samples {
            let (a, b, y) = row(s);
            let w = match beta {
                None => 1.0,
                Some((bt, floor)) => {
                    let resid = y - bt[0] * a - bt[1] * b;
                    1.0 / resid.abs().max(floor)
                }
            };
            s11 += w * a * a;
            s12 += w * a * b;
            s22 += w * b * b;
            r1 += w * a * y;
            r2 += w * b * y;
        }
        let det = s11 * s22 - s12 * s12;
        if s11 * s22 == 0.0 || det <= 1e-12 * s11 * s22 {
            return Err(Error::degenerate(format!(
                "{name} system is rank-deficient (Laplacian columns constant or collinear)"
            )));
        }
        Ok([(s22 * r1 - s12 * r2) / det, (s11 * r2 - s12 * r1) / det])
    };

    let mse = weighted(None)?;
    match loss {
        Loss::Mse => Ok(mse),
        Loss::Mae => {
            // The epsilon floor on |residual| is relative to the residual
            // scale; an absolute floor would break the scale invariance of
            // the fit.
            let rms = (samples.len() as f64).recip()
                * samples.iter().map(|s| row(s).2 * row(s).2).sum::<f64>();
            let floor = IRLS_EPS * rms.sqrt().max(f64::MIN_POSITIVE);
            let mut beta = mse;
            for _ in 0..IRLS_MAX_ITERS {
                let next = weighted(Some((beta, floor)))?;
                let delta = (next[0] - beta[0]).abs().max((next[1] - beta[1]).abs());
                beta = next;
                if delta <= IRLS_TOL {
                    break;
                }
            }
            Ok(beta)
        }
    }
}
