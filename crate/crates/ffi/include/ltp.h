#ifndef LTP_H
#define LTP_H

#pragma once

/* Generated by cbindgen from crates/ffi/src; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  LTP_STATUS_OK = 0,
  LTP_STATUS_NULL_POINTER = 1,
  LTP_STATUS_INVALID_UTF8 = 2,
  LTP_STATUS_INVALID_ARGUMENT = 3,
  LTP_STATUS_DIMENSION_MISMATCH = 4,
  LTP_STATUS_PARSE = 5,
  LTP_STATUS_IO = 6,
  LTP_STATUS_PANIC = 7,
} LtpStatus;

/**
 * `Additive`: `G + MLP(t)`; `Weighted`: `G + λ·MLP(t)`.
 */
typedef enum {
  LTP_FUSE_MODE_ADDITIVE = 0,
  LTP_FUSE_MODE_WEIGHTED = 1,
} LtpFuseMode;

/**
 * Offline feature-hashing text embedder.
 */
typedef struct LtpEmbedder LtpEmbedder;

/**
 * MLP weights plus λ for embedding fusion.
 */
typedef struct LtpFusionParams LtpFusionParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. Valid until
 * the next failing call on the same thread.
 */
const char *ltp_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ltp_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void ltp_string_free(char *s);

/**
 * `(DET_l + DET_t + √TOP_ll + √TOP_lt) / 4`; inputs must lie in [0, 1].
 *
 * # Safety
 * `out` must be valid for writes.
 */
LtpStatus ltp_ols(double det_l, double det_t, double top_ll, double top_lt, double *out);

/**
 * Discrete Fréchet distance between polylines given as packed `x,y,z`
 * triples (`n_a` and `n_b` points).
 *
 * # Safety
 * `a` and `b` must hold `3·n` doubles; `out` must be valid for writes.
 */
LtpStatus ltp_discrete_frechet(const double *a,
                               size_t n_a,
                               const double *b,
                               size_t n_b,
                               double *out);

/**
 * All-point interpolated AP of ranked decisions (nonzero = true positive).
 *
 * # Safety
 * `decisions` must hold `n` bytes; `out` must be valid for writes.
 */
LtpStatus ltp_average_precision(const uint8_t *decisions, size_t n, size_t n_gt, double *out);

/**
 * Road-type suffix of a name with the built-in vocabulary. `*out` is set to
 * a new string, or null when the name has no suffix.
 *
 * # Safety
 * `name` must be NUL-terminated; `out` must be valid for writes.
 */
LtpStatus ltp_road_suffix(const char *name, char **out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
LtpStatus ltp_embedder_new(size_t dimension, LtpEmbedder **out);

/**
 * # Safety
 * `embedder` must come from [`ltp_embedder_new`] and not be used afterwards.
 */
void ltp_embedder_free(LtpEmbedder *embedder);

/**
 * Output dimension, or 0 for a null handle.
 *
 * # Safety
 * `embedder` must be null or a live handle.
 */
size_t ltp_embedder_dimension(const LtpEmbedder *embedder);

/**
 * Embeds `text` into `out`, which must have exactly the embedder's dimension.
 *
 * # Safety
 * `embedder` must be live, `text` NUL-terminated, `out` writable for `len`.
 */
LtpStatus ltp_embed_text(const LtpEmbedder *embedder, const char *text_in, double *out, size_t len);

/**
 * Cosine similarity of two length-`n` vectors; 0 when either is zero.
 *
 * # Safety
 * `a` and `b` must hold `n` doubles; `out` must be valid for writes.
 */
LtpStatus ltp_cosine_similarity(const double *a, const double *b, size_t n, double *out);

/**
 * Sinusoidal polyline embedding of packed `x,y` pairs in meters.
 *
 * # Safety
 * `xy` must hold `2·n_points` doubles; `out` must be writable for `d_map`.
 */
LtpStatus ltp_graph_embed(const double *xy, size_t n_points, size_t d_map, double *out);

/**
 * Seeded parameters with λ = 1.
 *
 * # Safety
 * `out` must be valid for writes.
 */
LtpStatus ltp_fusion_params_new(size_t d_text,
                                size_t hidden,
                                size_t d_map,
                                uint64_t seed,
                                LtpFusionParams **out);

/**
 * Reads a parameter file written by `ltp fuse --params`.
 *
 * # Safety
 * `path` must be NUL-terminated; `out` must be valid for writes.
 */
LtpStatus ltp_fusion_params_load(const char *path, LtpFusionParams **out);

/**
 * # Safety
 * `params` must come from this library and not be used afterwards.
 */
void ltp_fusion_params_free(LtpFusionParams *params);

/**
 * Writes `d_text`, `hidden` and `d_map` through the non-null pointers.
 *
 * # Safety
 * `params` must be live; each out-pointer must be null or writable.
 */
LtpStatus ltp_fusion_params_dims(const LtpFusionParams *params,
                                 size_t *d_text,
                                 size_t *hidden,
                                 size_t *d_map);

/**
 * # Safety
 * `params` must be a live handle.
 */
LtpStatus ltp_fusion_params_set_lambda(LtpFusionParams *params, double lambda);

/**
 * # Safety
 * `params` must be live; `out` must be valid for writes.
 */
LtpStatus ltp_fusion_params_lambda(const LtpFusionParams *params, double *out);

/**
 * Fused embedding of a graph vector (`d_map`) and a text vector (`d_text`),
 * written to `out` (`d_map`).
 *
 * # Safety
 * `params` must be live; buffers must hold `d_map`, `d_text` and `d_map`
 * doubles respectively.
 */
LtpStatus ltp_fuse(const LtpFusionParams *params,
                   LtpFuseMode mode,
                   const double *graph,
                   size_t d_map,
                   const double *text_vec,
                   size_t d_text,
                   double *out);

/**
 * Scores two scenario JSON documents with default thresholds and sets
 * `*report_json` to the report as a new JSON string.
 *
 * # Safety
 * Strings must be NUL-terminated; `report_json` must be valid for writes.
 */
LtpStatus ltp_evaluate_json(const char *gt_json,
                            const char *pred_json,
                            const char *label,
                            char **report_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LTP_H */
