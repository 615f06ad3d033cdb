//! Regenerates the bundled `desk5` mini corpus (five synthetic CC0 images)
//! and its manifest. Deterministic: rerunning produces byte-identical files.
//!
//! The scenes imitate the statistics the warping pipelines care about:
//! soft-shaded objects with sharp occlusion boundaries over gentle
//! gradients, mild stochastic texture, and color applied as low-frequency
//! chroma over a shared luminance field so high-frequency detail stays
//! strongly correlated across channels. Everything is rendered at 4x and
//! shrunk with antialiasing, which gives edges the couple-of-pixel ramps a
//! camera would produce.
//!
//! Usage: cargo run --example gen_desk5 [out_dir]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use chromawarp::bench::DatasetManifest;
use chromawarp::image::{Channel, PlanarImage};
use chromawarp::resample::{downsample, DownsampleMethod, DownsampleSpec};
use chromawarp::save_image;

/// Smooth value noise: bilinear interpolation of a seeded lattice, summed
/// over a few octaves.
struct ValueNoise {
    lattice: Vec<f64>,
    n: usize,
}

impl ValueNoise {
    fn new(rng: &mut ChaCha8Rng, n: usize) -> Self {
        ValueNoise { lattice: (0..n * n).map(|_| rng.random::<f64>()).collect(), n }
    }

    fn at(&self, x: f64, y: f64) -> f64 {
        let n = self.n;
        let (xi, yi) = (x.floor() as usize % n, y.floor() as usize % n);
        let (xf, yf) = (x - x.floor(), y - y.floor());
        let idx = |r: usize, c: usize| self.lattice[(r % n) * n + (c % n)];
        let smooth = |t: f64| t * t * (3.0 - 2.0 * t);
        let (sx, sy) = (smooth(xf), smooth(yf));
        let top = idx(xi, yi) * (1.0 - sy) + idx(xi, yi + 1) * sy;
        let bot = idx(xi + 1, yi) * (1.0 - sy) + idx(xi + 1, yi + 1) * sy;
        top * (1.0 - sx) + bot * sx
    }

    fn fbm(&self, x: f64, y: f64, octaves: u32, persistence: f64) -> f64 {
        let mut acc = 0.0;
        let mut amp = 1.0;
        let mut freq = 1.0;
        let mut norm = 0.0;
        for _ in 0..octaves {
            acc += amp * self.at(x * freq, y * freq);
            norm += amp;
            amp *= persistence;
            freq *= 2.0;
        }
        acc / norm
    }
}

/// One scene: `n_blobs` shaded disks and `n_tris` flat-shaded triangles over
/// a gradient background, textured, colored through two low-frequency chroma
/// fields, rendered at 4x and antialiased down to `h x w`.
fn scene(rng: &mut ChaCha8Rng, h: usize, w: usize, n_blobs: usize, n_tris: usize) -> PlanarImage {
    let (hi_h, hi_w) = (h * 4, w * 4);
    let mut blobs = Vec::new();
    for _ in 0..n_blobs {
        blobs.push((
            rng.random::<f64>(),
            rng.random::<f64>(),
            0.04 + 0.2 * rng.random::<f64>(),
            0.15 + 0.7 * rng.random::<f64>(),
        ));
    }
    let mut tris = Vec::new();
    for _ in 0..n_tris {
        let (ax, ay) = (rng.random::<f64>(), rng.random::<f64>());
        let (bx, by) = (ax + 0.4 * (rng.random::<f64>() - 0.5), ay + 0.4 * (rng.random::<f64>() - 0.5));
        let (cx, cy) = (ax + 0.4 * (rng.random::<f64>() - 0.5), ay + 0.4 * (rng.random::<f64>() - 0.5));
        tris.push(((ax, ay), (bx, by), (cx, cy), 0.15 + 0.7 * rng.random::<f64>()));
    }
    let grain = ValueNoise::new(rng, 32);
    let u = ValueNoise::new(rng, 8);
    let v = ValueNoise::new(rng, 8);
    let edge = |p: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (p.0 - b.0) * (a.1 - b.1) - (a.0 - b.0) * (p.1 - b.1)
    };
    let big = PlanarImage::from_fn(hi_h, hi_w, |ch, r, c| {
        let (x, y) = (r as f64 / hi_h as f64, c as f64 / hi_w as f64);
        let mut l = 0.55 - 0.25 * x + 0.04 * (y * 6.0).sin();
        for &(a, b, c2, tone) in &tris {
            let p = (x, y);
            let d1 = edge(p, a, b);
            let d2 = edge(p, b, c2);
            let d3 = edge(p, c2, a);
            if !((d1 < 0.0 || d2 < 0.0 || d3 < 0.0) && (d1 > 0.0 || d2 > 0.0 || d3 > 0.0)) {
                l = tone * (0.8 + 0.4 * x);
            }
        }
        for &(bx, by, rad, tone) in &blobs {
            let d2 = (x - bx).powi(2) + (y - by).powi(2);
            if d2 < rad * rad {
                l = tone * (0.8 + 0.3 * (1.0 - d2 / (rad * rad)));
            }
        }
        l += 0.12 * (grain.fbm(x * 9.0, y * 9.0, 4, 0.55) - 0.5);
        let uu = u.fbm(x * 2.0, y * 2.0, 2, 0.5) - 0.5;
        let vv = v.fbm(x * 2.5, y * 2.0, 2, 0.5) - 0.5;
        match ch {
            Channel::R => (l + 0.55 * uu).clamp(0.02, 0.98),
            Channel::G => (l - 0.2 * uu + 0.3 * vv).clamp(0.02, 0.98),
            Channel::B => (l - 0.45 * vv).clamp(0.02, 0.98),
        }
    });
    downsample(&big, &DownsampleSpec::new(DownsampleMethod::BicubicAntialiased, 4.0).unwrap())
        .expect("downsample rendered scene")
}

fn main() {
    let out_dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("assets/desk5"));
    std::fs::create_dir_all(&out_dir).expect("create output dir");

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let images: [(&str, PlanarImage); 5] = [
        ("pebbles", scene(&mut rng, 127, 139, 18, 6)),
        ("shards", scene(&mut rng, 128, 160, 12, 10)),
        ("lanterns", scene(&mut rng, 131, 117, 24, 4)),
        ("driftwood", scene(&mut rng, 144, 144, 20, 5)),
        ("cairns", scene(&mut rng, 120, 152, 16, 8)),
    ];
    for (name, img) in &images {
        let path = out_dir.join(format!("{name}.png"));
        save_image(img, &path).expect("write png");
        println!("wrote {} ({}x{})", path.display(), img.height(), img.width());
    }
    let manifest = DatasetManifest::from_dir(&out_dir).expect("scan corpus");
    let manifest_path = out_dir.join("desk5.manifest");
    manifest.save(&manifest_path, &out_dir).expect("write manifest");
    println!("wrote {}", manifest_path.display());
}

const SEED: u64 = 2718;
