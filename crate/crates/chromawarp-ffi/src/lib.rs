//! C ABI for the chromawarp library.
//!
//! Conventions:
//!
//! * images and weight sets are opaque handles, freed with their `_free`
//!   function;
//! * every fallible call returns a [`CwStatus`]; `CW_STATUS_OK` is zero;
//! * on failure, [`cw_last_error_message`] returns a thread-local UTF-8
//!   message valid until the next failing call on the same thread;
//! * pixel buffers cross the boundary as planar `double` arrays in `[0, 1]`,
//!   row-major, R plane then G then B.
//!
//! The matching header lives in `include/chromawarp.h` (kept by hand in
//! sync; `cbindgen.toml` is provided for regeneration where cbindgen is
//! available).

use std::cell::RefCell;
use std::ffi::{c_char, c_double, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use chromawarp::demosaic::sequential_refine;
use chromawarp::error::Error;
use chromawarp::geometry::GeometricMap;
use chromawarp::image::{Channel, ChannelPlane, PlanarImage};
use chromawarp::kernel::InterpKernel;
use chromawarp::metrics::{psnr, ssim};
use chromawarp::warp::{warp, WarpConfig, WarpMode, WeightSet};
use chromawarp::{load_image, save_image};

/// Status codes for every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CwStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    Io = 3,
    Format = 4,
    Degenerate = 5,
    Panic = 6,
}

/// Opaque image handle.
pub struct CwImage(PlanarImage);

/// Opaque weight-set handle.
pub struct CwWeights(WeightSet);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> CwStatus {
    match err {
        Error::Io { .. } => CwStatus::Io,
        Error::Format(_) | Error::Dimension(_) => CwStatus::Format,
        Error::Degenerate(_) | Error::PointAtInfinity { .. } => CwStatus::Degenerate,
        Error::InvalidArg(_) => CwStatus::InvalidArgument,
    }
}

fn fail(err: Error) -> CwStatus {
    set_error(&err.to_string());
    status_of(&err)
}

/// Run a closure, translating panics into a status instead of unwinding
/// across the FFI boundary.
fn guarded(f: impl FnOnce() -> CwStatus) -> CwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            CwStatus::Panic
        }
    }
}

unsafe fn path_arg(ptr: *const c_char) -> Result<PathBuf, CwStatus> {
    if ptr.is_null() {
        set_error("null path");
        return Err(CwStatus::NullArgument);
    }
    match unsafe { CStr::from_ptr(ptr) }.to_str() {
        Ok(s) => Ok(PathBuf::from(s)),
        Err(_) => {
            set_error("path is not valid UTF-8");
            Err(CwStatus::InvalidArgument)
        }
    }
}

unsafe fn str_arg<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, CwStatus> {
    if ptr.is_null() {
        set_error(&format!("null {what}"));
        return Err(CwStatus::NullArgument);
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| {
        set_error(&format!("{what} is not valid UTF-8"));
        CwStatus::InvalidArgument
    })
}

macro_rules! nonnull {
    ($ptr:expr, $what:literal) => {
        match unsafe { $ptr.as_ref() } {
            Some(r) => r,
            None => {
                set_error(concat!("null ", $what));
                return CwStatus::NullArgument;
            }
        }
    };
}

macro_rules! out_param {
    ($ptr:expr, $what:literal) => {
        match unsafe { $ptr.as_mut() } {
            Some(r) => r,
            None => {
                set_error(concat!("null ", $what));
                return CwStatus::NullArgument;
            }
        }
    };
}

/// Message for the most recent failure on this thread. Never null; empty
/// before any failure. The pointer stays valid until the next failing call
/// on the same thread.
#[no_mangle]
pub extern "C" fn cw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Load a PNG or binary PPM file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be a valid pointer.
/// On success `*out` owns the image and must be released with
/// [`cw_image_free`].
#[no_mangle]
pub unsafe extern "C" fn cw_image_load(path: *const c_char, out: *mut *mut CwImage) -> CwStatus {
    guarded(|| {
        let out = out_param!(out, "output handle");
        let path = match unsafe { path_arg(path) } {
            Ok(p) => p,
            Err(s) => return s,
        };
        match load_image(&path) {
            Ok(img) => {
                *out = Box::into_raw(Box::new(CwImage(img)));
                CwStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Save an image as 8-bit PNG or binary PPM, chosen by file extension.
///
/// # Safety
/// `img` must be a handle from this library; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cw_image_save(img: *const CwImage, path: *const c_char) -> CwStatus {
    guarded(|| {
        let img = nonnull!(img, "image");
        let path = match unsafe { path_arg(path) } {
            Ok(p) => p,
            Err(s) => return s,
        };
        match save_image(&img.0, &path) {
            Ok(()) => CwStatus::Ok,
            Err(e) => fail(e),
        }
    })
}

/// Build an image from planar data: `data` holds `3 * height * width`
/// doubles, R plane then G then B, each row-major.
///
/// # Safety
/// `data` must point to `3 * height * width` readable doubles; `out` must be
/// valid.
#[no_mangle]
pub unsafe extern "C" fn cw_image_from_planes(
    height: usize,
    width: usize,
    data: *const c_double,
    out: *mut *mut CwImage,
) -> CwStatus {
    guarded(|| {
        let out = out_param!(out, "output handle");
        if data.is_null() {
            set_error("null data");
            return CwStatus::NullArgument;
        }
        if height == 0 || width == 0 {
            set_error("empty image");
            return CwStatus::InvalidArgument;
        }
        let n = height * width;
        let slice = unsafe { std::slice::from_raw_parts(data, 3 * n) };
        if slice.iter().any(|v| !v.is_finite()) {
            set_error("pixel data contains non-finite values");
            return CwStatus::InvalidArgument;
        }
        let plane = |k: usize| ChannelPlane::new(height, width, slice[k * n..(k + 1) * n].to_vec());
        match (plane(0), plane(1), plane(2)) {
            (Ok(r), Ok(g), Ok(b)) => match PlanarImage::new(r, g, b) {
                Ok(img) => {
                    *out = Box::into_raw(Box::new(CwImage(img)));
                    CwStatus::Ok
                }
                Err(e) => fail(e),
            },
            _ => {
                set_error("plane construction failed");
                CwStatus::InvalidArgument
            }
        }
    })
}

/// Image dimensions.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cw_image_dims(
    img: *const CwImage,
    height: *mut usize,
    width: *mut usize,
) -> CwStatus {
    guarded(|| {
        let img = nonnull!(img, "image");
        let height = out_param!(height, "height");
        let width = out_param!(width, "width");
        *height = img.0.height();
        *width = img.0.width();
        CwStatus::Ok
    })
}

/// Copy the image into a caller-owned buffer of `3 * height * width`
/// doubles (planar, R then G then B).
///
/// # Safety
/// `buf` must point to at least `len` writable doubles and `len` must be at
/// least `3 * height * width`.
#[no_mangle]
pub unsafe extern "C" fn cw_image_copy_planes(
    img: *const CwImage,
    buf: *mut c_double,
    len: usize,
) -> CwStatus {
    guarded(|| {
        let img = nonnull!(img, "image");
        if buf.is_null() {
            set_error("null buffer");
            return CwStatus::NullArgument;
        }
        let n = img.0.height() * img.0.width();
        if len < 3 * n {
            set_error(&format!("buffer holds {len} doubles, need {}", 3 * n));
            return CwStatus::InvalidArgument;
        }
        let out = unsafe { std::slice::from_raw_parts_mut(buf, 3 * n) };
        for (k, ch) in Channel::ALL.into_iter().enumerate() {
            out[k * n..(k + 1) * n].copy_from_slice(img.0.plane(ch).data());
        }
        CwStatus::Ok
    })
}

/// Release an image handle. Null is a no-op.
///
/// # Safety
/// `img` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cw_image_free(img: *mut CwImage) {
    if !img.is_null() {
        drop(unsafe { Box::from_raw(img) });
    }
}

/// Built-in reference gains for a kernel name.
///
/// # Safety
/// `kernel` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cw_weights_builtin(
    kernel: *const c_char,
    out: *mut *mut CwWeights,
) -> CwStatus {
    guarded(|| {
        let out = out_param!(out, "output handle");
        let name = match unsafe { str_arg(kernel, "kernel name") } {
            Ok(s) => s,
            Err(s) => return s,
        };
        let kernel = match InterpKernel::parse(name) {
            Ok(k) => k,
            Err(e) => return fail(e),
        };
        match WeightSet::builtin(kernel) {
            Some(w) => {
                *out = Box::into_raw(Box::new(CwWeights(w)));
                CwStatus::Ok
            }
            None => {
                set_error(&format!("no built-in weights for kernel '{name}'"));
                CwStatus::InvalidArgument
            }
        }
    })
}

/// Load a weight file (six `name value` lines).
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cw_weights_load(path: *const c_char, out: *mut *mut CwWeights) -> CwStatus {
    guarded(|| {
        let out = out_param!(out, "output handle");
        let path = match unsafe { path_arg(path) } {
            Ok(p) => p,
            Err(s) => return s,
        };
        match WeightSet::from_file(&path) {
            Ok(w) => {
                *out = Box::into_raw(Box::new(CwWeights(w)));
                CwStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Copy the six gains in the order w_gr, w_gb, w_rg, w_rb, w_bg, w_br.
///
/// # Safety
/// `out` must point to six writable doubles.
#[no_mangle]
pub unsafe extern "C" fn cw_weights_values(w: *const CwWeights, out: *mut c_double) -> CwStatus {
    guarded(|| {
        let w = nonnull!(w, "weights");
        if out.is_null() {
            set_error("null output buffer");
            return CwStatus::NullArgument;
        }
        let slice = unsafe { std::slice::from_raw_parts_mut(out, 6) };
        for (dst, (_, v)) in slice.iter_mut().zip(w.0.entries()) {
            *dst = v;
        }
        CwStatus::Ok
    })
}

/// Release a weights handle. Null is a no-op.
///
/// # Safety
/// `w` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cw_weights_free(w: *mut CwWeights) {
    if !w.is_null() {
        drop(unsafe { Box::from_raw(w) });
    }
}

fn run_warp(
    img: &PlanarImage,
    map: GeometricMap,
    target_h: usize,
    target_w: usize,
    kernel: &str,
    correlated: c_int,
    weights: Option<&CwWeights>,
    out: &mut *mut CwImage,
) -> CwStatus {
    let kernel = match InterpKernel::parse(kernel) {
        Ok(k) => k,
        Err(e) => return fail(e),
    };
    let mode = if correlated != 0 { WarpMode::Correlated } else { WarpMode::Independent };
    let mut cfg = WarpConfig::new(map, kernel);
    if mode == WarpMode::Correlated {
        cfg.weights = match weights {
            Some(w) => Some(w.0),
            None => match WeightSet::builtin(kernel) {
                Some(w) => Some(w),
                None => {
                    set_error(&format!(
                        "no built-in weights for kernel '{}'; pass an explicit weight set",
                        kernel.name()
                    ));
                    return CwStatus::InvalidArgument;
                }
            },
        };
    }
    match warp(img, &cfg, mode, target_h, target_w) {
        Ok(warped) => {
            *out = Box::into_raw(Box::new(CwImage(warped.image)));
            CwStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Resize by a scale factor. `weights` may be null in correlated mode to use
/// the built-in gains for the kernel.
///
/// # Safety
/// Handles must come from this library; `kernel` must be NUL-terminated;
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cw_upscale(
    img: *const CwImage,
    scale: c_double,
    kernel: *const c_char,
    correlated: c_int,
    weights: *const CwWeights,
    out: *mut *mut CwImage,
) -> CwStatus {
    guarded(|| {
        let img = nonnull!(img, "image");
        let out = out_param!(out, "output handle");
        let kernel = match unsafe { str_arg(kernel, "kernel name") } {
            Ok(s) => s,
            Err(s) => return s,
        };
        let map = match GeometricMap::scale(scale) {
            Ok(m) => m,
            Err(e) => return fail(e),
        };
        let (th, tw) = match map.target_extent(img.0.height(), img.0.width()) {
            Ok(d) => d,
            Err(e) => return fail(e),
        };
        let weights = unsafe { weights.as_ref() };
        run_warp(&img.0, map, th, tw, kernel, correlated, weights, out)
    })
}

/// Warp under a forward affine map (6 row-major doubles) to an explicit
/// extent.
///
/// # Safety
/// As [`cw_upscale`]; `matrix` must point to 6 readable doubles.
#[no_mangle]
pub unsafe extern "C" fn cw_warp_affine(
    img: *const CwImage,
    matrix: *const c_double,
    target_h: usize,
    target_w: usize,
    kernel: *const c_char,
    correlated: c_int,
    weights: *const CwWeights,
    out: *mut *mut CwImage,
) -> CwStatus {
    guarded(|| {
        let img = nonnull!(img, "image");
        let out = out_param!(out, "output handle");
        if matrix.is_null() {
            set_error("null matrix");
            return CwStatus::NullArgument;
        }
        let kernel = match unsafe { str_arg(kernel, "kernel name") } {
            Ok(s) => s,
            Err(s) => return s,
        };
        let m: [f64; 6] = unsafe { std::slice::from_raw_parts(matrix, 6) }.try_into().unwrap();
        let map = match GeometricMap::affine(m) {
            Ok(m) => m,
            Err(e) => return fail(e),
        };
        let weights = unsafe { weights.as_ref() };
        run_warp(&img.0, map, target_h, target_w, kernel, correlated, weights, out)
    })
}

/// Warp under a forward projective map (9 row-major doubles) to an explicit
/// extent. Target pixels whose source lies at infinity are filled with 0.
///
/// # Safety
/// As [`cw_upscale`]; `matrix` must point to 9 readable doubles.
#[no_mangle]
pub unsafe extern "C" fn cw_warp_homography(
    img: *const CwImage,
    matrix: *const c_double,
    target_h: usize,
    target_w: usize,
    kernel: *const c_char,
    correlated: c_int,
    weights: *const CwWeights,
    out: *mut *mut CwImage,
) -> CwStatus {
    guarded(|| {
        let img = nonnull!(img, "image");
        let out = out_param!(out, "output handle");
        if matrix.is_null() {
            set_error("null matrix");
            return CwStatus::NullArgument;
        }
        let kernel = match unsafe { str_arg(kernel, "kernel name") } {
            Ok(s) => s,
            Err(s) => return s,
        };
        let m: [f64; 9] = unsafe { std::slice::from_raw_parts(matrix, 9) }.try_into().unwrap();
        let map = match GeometricMap::homography(m) {
            Ok(m) => m,
            Err(e) => return fail(e),
        };
        let weights = unsafe { weights.as_ref() };
        run_warp(&img.0, map, target_h, target_w, kernel, correlated, weights, out)
    })
}

/// Three rounds of CFA re-estimation (GRBG, RGGB, BGGR).
///
/// # Safety
/// `img` must be a handle from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cw_demosaic_refine(img: *const CwImage, out: *mut *mut CwImage) -> CwStatus {
    guarded(|| {
        let img = nonnull!(img, "image");
        let out = out_param!(out, "output handle");
        *out = Box::into_raw(Box::new(CwImage(sequential_refine(&img.0))));
        CwStatus::Ok
    })
}

/// PSNR in dB over 8-bit quantized samples, all channels jointly, with
/// `crop` border pixels excluded. Identical images yield +infinity.
///
/// # Safety
/// Handles must come from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cw_psnr(
    a: *const CwImage,
    b: *const CwImage,
    crop: usize,
    out: *mut c_double,
) -> CwStatus {
    guarded(|| {
        let a = nonnull!(a, "first image");
        let b = nonnull!(b, "second image");
        let out = out_param!(out, "output value");
        match psnr(&a.0, &b.0, crop) {
            Ok(v) => {
                *out = v;
                CwStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Single-scale SSIM on the luma plane.
///
/// # Safety
/// Handles must come from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cw_ssim(a: *const CwImage, b: *const CwImage, out: *mut c_double) -> CwStatus {
    guarded(|| {
        let a = nonnull!(a, "first image");
        let b = nonnull!(b, "second image");
        let out = out_param!(out, "output value");
        match ssim(&a.0, &b.0) {
            Ok(v) => {
                *out = v;
                CwStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
