#ifndef SPLATPRIOR_H
#define SPLATPRIOR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SpStatus {
  SP_STATUS_OK = 0,
  SP_STATUS_NULL_POINTER = 1,
  SP_STATUS_INVALID_ARGUMENT = 2,
  SP_STATUS_IO = 3,
  SP_STATUS_PARSE = 4,
  SP_STATUS_REGISTRATION = 5,
  SP_STATUS_COLORLESS_INPUT = 6,
  SP_STATUS_BUFFER_TOO_SMALL = 7,
  SP_STATUS_RENDER = 8,
  SP_STATUS_PANIC = 99,
} SpStatus;

/**
 * Opaque exact nearest-neighbor index over a copy of a cloud's positions.
 */
typedef struct SpKdTree SpKdTree;

/**
 * Opaque colored point cloud.
 */
typedef struct SpPointCloud SpPointCloud;

/**
 * Opaque set of Gaussian splats.
 */
typedef struct SpSplats SpSplats;

/**
 * `x ↦ scale · R(rotation) · x + translation`, rotation as `w, x, y, z`.
 */
typedef struct SpSim3 {
  double scale;
  double rotation[4];
  double translation[3];
} SpSim3;

/**
 * Registration settings. Start from [`sp_register_params_default`].
 */
typedef struct SpRegisterParams {
  double radius_percentile;
  double outlier_factor;
  double sfm_error_percentile;
  double sfm_distance_factor;
  int32_t coarse_with_scale;
  double trim_fraction;
  size_t max_iterations;
  double relative_tolerance;
  /**
   * Non-positive means unlimited.
   */
  double max_correspondence_distance;
} SpRegisterParams;

typedef struct SpRegisterReport {
  double estimated_scale;
  size_t iterations;
  /**
   * NaN when no round ran.
   */
  double final_rms;
  double inlier_fraction;
  int32_t converged;
  size_t sfm_points_used;
} SpRegisterReport;

/**
 * Pinhole camera; `rotation` (`w, x, y, z`) and `translation` map world
 * to camera coordinates, with +z forward and +y down.
 */
typedef struct SpCamera {
  double fx;
  double fy;
  double cx;
  double cy;
  size_t width;
  size_t height;
  double rotation[4];
  double translation[3];
} SpCamera;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null after a
 * success. Valid until the next call on the same thread.
 */
const char *sp_last_error_message(void);

/**
 * NUL-terminated library version.
 */
const char *sp_version(void);

/**
 * Builds a cloud from `n` interleaved `xyz` triples and, unless `rgb` is
 * null, `n` interleaved color triples.
 */
enum SpStatus sp_cloud_new(const double *xyz,
                           const uint8_t *rgb,
                           size_t n,
                           struct SpPointCloud **out);

enum SpStatus sp_cloud_read_ply(const char *path_, struct SpPointCloud **out);

/**
 * Writes binary little-endian PLY unless `ascii` is nonzero.
 */
enum SpStatus sp_cloud_write_ply(const struct SpPointCloud *cloud,
                                 const char *path_,
                                 int32_t ascii);

/**
 * Number of points; 0 for a null handle.
 */
size_t sp_cloud_len(const struct SpPointCloud *cloud);

/**
 * Copies positions into `xyz` (`capacity` doubles, at least `3 · len`).
 */
enum SpStatus sp_cloud_positions(const struct SpPointCloud *cloud, double *xyz, size_t capacity);

/**
 * Copies colors into `rgb` (`capacity` bytes, at least `3 · len`).
 */
enum SpStatus sp_cloud_colors(const struct SpPointCloud *cloud, uint8_t *rgb, size_t capacity);

enum SpStatus sp_cloud_transform(const struct SpPointCloud *cloud,
                                 struct SpSim3 t,
                                 struct SpPointCloud **out);

/**
 * One centroid point per occupied cube of side `edge`.
 */
enum SpStatus sp_cloud_voxel_downsample(const struct SpPointCloud *cloud,
                                        double edge,
                                        struct SpPointCloud **out);

/**
 * # Safety
 * `cloud` is null or a handle not yet freed.
 */
void sp_cloud_free(struct SpPointCloud *cloud);

enum SpStatus sp_kdtree_new(const struct SpPointCloud *cloud, struct SpKdTree **out);

/**
 * Nearest point to each of `n` interleaved queries; ties go to the
 * smaller index.
 */
enum SpStatus sp_kdtree_nearest(const struct SpKdTree *tree,
                                const double *queries,
                                size_t n,
                                size_t *out_index,
                                double *out_distance);

/**
 * # Safety
 * `tree` is null or a handle not yet freed.
 */
void sp_kdtree_free(struct SpKdTree *tree);

/**
 * Least-squares transform taking `n` source points onto `n` targets;
 * the scale stays 1 unless `with_scale` is nonzero.
 */
enum SpStatus sp_umeyama(const double *src,
                         const double *dst,
                         size_t n,
                         int32_t with_scale,
                         struct SpSim3 *out);

enum SpStatus sp_sim3_apply(struct SpSim3 t, const double *p, double *out);

struct SpRegisterParams sp_register_params_default(void);

/**
 * Registers `lidar` into the frame of `sfm` (`sfm_errors` may be null).
 * Non-convergence is not an error: check `report.converged`.
 */
enum SpStatus sp_register(const struct SpPointCloud *lidar,
                          const struct SpPointCloud *sfm,
                          const double *sfm_errors,
                          const double *corr_src,
                          const double *corr_dst,
                          size_t n_corr,
                          const struct SpRegisterParams *params,
                          struct SpSim3 *out,
                          struct SpRegisterReport *report);

/**
 * Mean absolute per-channel color difference (0–255) from each `pred`
 * point to its nearest `gt` point.
 */
enum SpStatus sp_cloud_color_l1(const struct SpPointCloud *pred,
                                const struct SpPointCloud *gt,
                                double *out);

enum SpStatus sp_splats_read_ply(const char *path_, struct SpSplats **out);

size_t sp_splats_len(const struct SpSplats *splats);

/**
 * # Safety
 * `splats` is null or a handle not yet freed.
 */
void sp_splats_free(struct SpSplats *splats);

/**
 * Renders into `rgb`, `3 · width · height` row-major interleaved floats
 * in [0, 1].
 */
enum SpStatus sp_render(const struct SpSplats *splats,
                        const struct SpCamera *camera,
                        const double *background,
                        float *rgb,
                        size_t capacity);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPLATPRIOR_H */
