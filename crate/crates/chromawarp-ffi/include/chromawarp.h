/* C ABI for the chromawarp image warping library.
 *
 * Conventions:
 *   - cw_image / cw_weights are opaque handles, released with cw_*_free;
 *   - fallible calls return cw_status; CW_STATUS_OK is zero;
 *   - after a failure, cw_last_error_message() returns a thread-local UTF-8
 *     message, valid until the next failing call on the same thread;
 *   - pixel buffers are planar double arrays in [0, 1], row-major,
 *     R plane then G then B.
 */

#ifndef CHROMAWARP_H
#define CHROMAWARP_H

#pragma once

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cw_status {
  CW_STATUS_OK = 0,
  CW_STATUS_NULL_ARGUMENT = 1,
  CW_STATUS_INVALID_ARGUMENT = 2,
  CW_STATUS_IO = 3,
  CW_STATUS_FORMAT = 4,
  CW_STATUS_DEGENERATE = 5,
  CW_STATUS_PANIC = 6,
} cw_status;

/* Opaque image handle. */
typedef struct CwImage cw_image;

/* Opaque weight-set handle. */
typedef struct CwWeights cw_weights;

/* Message for the most recent failure on this thread. Never NULL; empty
 * before any failure. */
const char *cw_last_error_message(void);

/* --- images --------------------------------------------------------- */

/* Load a PNG or binary PPM (P6) file. On success *out must be freed with
 * cw_image_free. */
cw_status cw_image_load(const char *path, cw_image **out);

/* Save as 8-bit PNG or PPM, chosen by file extension. */
cw_status cw_image_save(const cw_image *img, const char *path);

/* Build an image from 3 * height * width doubles (planar, R then G then B,
 * each row-major, values in [0, 1]). */
cw_status cw_image_from_planes(size_t height,
                               size_t width,
                               const double *data,
                               cw_image **out);

cw_status cw_image_dims(const cw_image *img, size_t *height, size_t *width);

/* Copy into a caller buffer of at least 3 * height * width doubles. */
cw_status cw_image_copy_planes(const cw_image *img, double *buf, size_t len);

/* Release an image handle. NULL is a no-op. */
void cw_image_free(cw_image *img);

/* --- cross-channel gains -------------------------------------------- */

/* Built-in reference gains for a kernel name (bilinear, bicubic,
 * lanczos, lanczos2, lanczos3, lanczos3t5). */
cw_status cw_weights_builtin(const char *kernel, cw_weights **out);

/* Load a weight file: six "name value" lines, names
 * w_gr w_gb w_rg w_rb w_bg w_br. */
cw_status cw_weights_load(const char *path, cw_weights **out);

/* Copy the six gains in the order w_gr, w_gb, w_rg, w_rb, w_bg, w_br. */
cw_status cw_weights_values(const cw_weights *w, double *out);

/* Release a weights handle. NULL is a no-op. */
void cw_weights_free(cw_weights *w);

/* --- warping --------------------------------------------------------- */

/* Resize by a positive scale factor. kernel is one of nearest, bilinear,
 * bicubic, lanczos, lanczos2, lanczos3, lanczos3t5. With correlated != 0
 * the cross-channel correction is applied; weights may be NULL to use the
 * built-in gains for the kernel. */
cw_status cw_upscale(const cw_image *img,
                     double scale,
                     const char *kernel,
                     int correlated,
                     const cw_weights *weights,
                     cw_image **out);

/* Warp under a forward affine map (6 row-major doubles: the 2x3 matrix
 * mapping source (row, col) to target) to an explicit target extent. */
cw_status cw_warp_affine(const cw_image *img,
                         const double *matrix,
                         size_t target_h,
                         size_t target_w,
                         const char *kernel,
                         int correlated,
                         const cw_weights *weights,
                         cw_image **out);

/* Warp under a forward projective map (9 row-major doubles). Target pixels
 * whose source lies at infinity are filled with 0. */
cw_status cw_warp_homography(const cw_image *img,
                             const double *matrix,
                             size_t target_h,
                             size_t target_w,
                             const char *kernel,
                             int correlated,
                             const cw_weights *weights,
                             cw_image **out);

/* Three rounds of Bayer re-estimation (GRBG, RGGB, BGGR). */
cw_status cw_demosaic_refine(const cw_image *img, cw_image **out);

/* --- metrics --------------------------------------------------------- */

/* PSNR in dB over 8-bit quantized samples, all channels jointly, excluding
 * `crop` border pixels. Identical images give +infinity. */
cw_status cw_psnr(const cw_image *a,
                  const cw_image *b,
                  size_t crop,
                  double *out);

/* Single-scale SSIM on the luma plane (11x11 Gaussian window). */
cw_status cw_ssim(const cw_image *a, const cw_image *b, double *out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CHROMAWARP_H */
