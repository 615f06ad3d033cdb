//! PNG and binary PPM (P6) reading and writing.
//!
//! Files hold 8-bit samples; in memory everything is normalized `f64`.
//! Loading divides by 255, saving clamps to `[0, 1]` and quantizes with
//! round-half-away-from-zero. That quantization rule is part of the file
//! contract and is reused by the PSNR metric.

use std::fs::File;
use std::io::{BufWriter, Cursor, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::{ChannelPlane, PlanarImage};

/// Quantize a normalized intensity to one 8-bit sample:
/// clamp to `[0, 1]`, scale by 255, round half away from zero.
#[inline]
pub fn quantize_u8(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

#[inline]
fn normalize(v: u8) -> f64 {
    v as f64 / 255.0
}

/// Load a PNG or binary PPM (P6) file into a planar image.
///
/// 8-bit RGB and grayscale inputs are accepted; grayscale expands to three
/// identical planes. Anything else (16-bit samples, alpha) is a format error.
pub fn load_image(path: impl AsRef<Path>) -> Result<PlanarImage> {
    let path = path.as_ref();
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut magic = [0u8; 2];
    let n = file.read(&mut magic).map_err(|e| Error::io(path, e))?;
    if n < 2 {
        return Err(Error::format(format!("{}: file too short to identify", path.display())));
    }
    let mut rest = Vec::new();
    file.read_to_end(&mut rest).map_err(|e| Error::io(path, e))?;
    let mut bytes = magic.to_vec();
    bytes.extend_from_slice(&rest);

    match &magic {
        [0x89, b'P'] => load_png_bytes(&bytes, path),
        [b'P', b'6'] => load_ppm_bytes(&bytes, path),
        [b'P', tag] if (b'1'..=b'5').contains(tag) || *tag == b'7' => Err(Error::format(format!(
            "{}: netpbm type P{} is unsupported (only binary P6)",
            path.display(),
            *tag as char
        ))),
        _ => Err(Error::format(format!("{}: not a PNG or binary PPM file", path.display()))),
    }
}

fn load_png_bytes(bytes: &[u8], path: &Path) -> Result<PlanarImage> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    // Expands palette images to RGB and low-bit grayscale to 8 bits;
    // 16-bit stays 16-bit so we can reject it explicitly.
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::format(format!("{}: png: {e}", path.display())))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::format(format!("{}: png image too large", path.display())))?;
    let mut buf = vec![0u8; size];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::format(format!("{}: png: {e}", path.display())))?;

    if info.bit_depth != png::BitDepth::Eight {
        return Err(Error::format(format!(
            "{}: unsupported bit depth {:?} (only 8-bit samples)",
            path.display(),
            info.bit_depth
        )));
    }
    let (h, w) = (info.height as usize, info.width as usize);
    let data = &buf[..info.line_size * h];
    match info.color_type {
        png::ColorType::Rgb => from_interleaved_rgb(h, w, data),
        png::ColorType::Grayscale => {
            let plane = ChannelPlane::new(h, w, data.iter().map(|&v| normalize(v)).collect())?;
            PlanarImage::new(plane.clone(), plane.clone(), plane)
        }
        other => Err(Error::format(format!(
            "{}: unsupported channel layout {other:?} (only RGB or grayscale)",
            path.display()
        ))),
    }
}

fn from_interleaved_rgb(h: usize, w: usize, data: &[u8]) -> Result<PlanarImage> {
    let n = h * w;
    let mut r = Vec::with_capacity(n);
    let mut g = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for px in data.chunks_exact(3).take(n) {
        r.push(normalize(px[0]));
        g.push(normalize(px[1]));
        b.push(normalize(px[2]));
    }
    PlanarImage::new(ChannelPlane::new(h, w, r)?, ChannelPlane::new(h, w, g)?, ChannelPlane::new(h, w, b)?)
}

/// PPM header token reader: skips whitespace and `#` comments.
struct PpmCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> PpmCursor<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        PpmCursor { bytes, pos: 0 }
    }

    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn number(&mut self) -> Option<usize> {
        let tok = self.token()?;
        std::str::from_utf8(tok).ok()?.parse().ok()
    }
}

fn load_ppm_bytes(bytes: &[u8], path: &Path) -> Result<PlanarImage> {
    let bad = |what: &str| Error::format(format!("{}: ppm: {what}", path.display()));
    let mut cur = PpmCursor::new(bytes);
    let magic = cur.token().ok_or_else(|| bad("missing magic"))?;
    if magic != b"P6" {
        return Err(bad("expected P6 magic"));
    }
    let w = cur.number().ok_or_else(|| bad("truncated or invalid header (width)"))?;
    let h = cur.number().ok_or_else(|| bad("truncated or invalid header (height)"))?;
    let maxval = cur.number().ok_or_else(|| bad("truncated or invalid header (maxval)"))?;
    if w == 0 || h == 0 {
        return Err(bad("zero image dimension"));
    }
    if maxval != 255 {
        return Err(Error::format(format!(
            "{}: ppm: unsupported maxval {maxval} (only 8-bit, maxval 255)",
            path.display()
        )));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if cur.pos >= bytes.len() || !bytes[cur.pos].is_ascii_whitespace() {
        return Err(bad("missing raster separator"));
    }
    let raster = &bytes[cur.pos + 1..];
    let need = h * w * 3;
    if raster.len() < need {
        return Err(bad("raster shorter than header promises"));
    }
    from_interleaved_rgb(h, w, &raster[..need])
}

/// Save a planar image as 8-bit PNG or binary PPM, chosen by file extension.
///
/// Every value is clamped to `[0, 1]` and quantized by `round(v * 255)`
/// (half away from zero).
pub fn save_image(img: &PlanarImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .unwrap_or_default();
    match ext.as_str() {
        "png" => save_png(img, path),
        "ppm" => save_ppm(img, path),
        other => Err(Error::format(format!(
            "{}: unsupported output extension '{other}' (use .png or .ppm)",
            path.display()
        ))),
    }
}

fn interleave_quantized(img: &PlanarImage) -> Vec<u8> {
    let (h, w) = (img.height(), img.width());
    let [r, g, b] = img.planes();
    let mut out = Vec::with_capacity(h * w * 3);
    for i in 0..h * w {
        out.push(quantize_u8(r.data()[i]));
        out.push(quantize_u8(g.data()[i]));
        out.push(quantize_u8(b.data()[i]));
    }
    out
}

fn save_png(img: &PlanarImage, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), img.width() as u32, img.height() as u32);
    encoder.set_color(png::ColorType::Rgb);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder
        .write_header()
        .map_err(|e| Error::format(format!("{}: png: {e}", path.display())))?;
    writer
        .write_image_data(&interleave_quantized(img))
        .map_err(|e| Error::format(format!("{}: png: {e}", path.display())))?;
    Ok(())
}

fn save_ppm(img: &PlanarImage, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write!(w, "P6\n{} {}\n255\n", img.width(), img.height()).map_err(|e| Error::io(path, e))?;
    w.write_all(&interleave_quantized(img)).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Read a PNG/PPM from already-loaded bytes (used by dataset hashing).
pub fn load_image_bytes(bytes: &[u8], name: &Path) -> Result<PlanarImage> {
    match bytes {
        [0x89, b'P', ..] => load_png_bytes(bytes, name),
        [b'P', b'6', ..] => load_ppm_bytes(bytes, name),
        _ => Err(Error::format(format!("{}: not a PNG or binary PPM file", name.display()))),
    }
}
