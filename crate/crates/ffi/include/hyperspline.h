#ifndef HYPERSPLINE_H
#define HYPERSPLINE_H

#include <stddef.h>
#include <stdint.h>

typedef enum HsStatus {
  HS_STATUS_OK = 0,
  HS_STATUS_NULL_POINTER = 1,
  HS_STATUS_INVALID_ARGUMENT = 2,
  HS_STATUS_VALIDATION = 3,
  HS_STATUS_NUMERICAL = 4,
  HS_STATUS_BUFFER_TOO_SMALL = 5,
  HS_STATUS_PANIC = 6,
} HsStatus;

typedef struct HsBasis HsBasis;

typedef struct HsGroup HsGroup;

typedef struct HsPartition HsPartition;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *hs_last_error(void);

struct HsGroup *hs_group_new(void);

/**
 * # Safety
 * `group` must be NULL or a handle from [`hs_group_new`] not yet freed.
 */
void hs_group_free(struct HsGroup *group);

/**
 * Maps a Klein point into the fundamental octagon. `word` receives up to
 * `word_capacity` generator indices of the applied element (outermost
 * first) and `word_len` its full length.
 *
 * # Safety
 * Pointers must be valid; `word` may be NULL when `word_capacity` is 0.
 */
enum HsStatus hs_canonicalize(const struct HsGroup *group,
                              double x,
                              double y,
                              double *out_x,
                              double *out_y,
                              uint8_t *word,
                              size_t word_capacity,
                              size_t *word_len);

/**
 * # Safety
 * `out_x` and `out_y` must be valid for writes.
 */
enum HsStatus hs_poincare_to_klein(double x, double y, double *out_x, double *out_y);

/**
 * Conformality solution-space dimension for `lines` generic concurrent
 * lines, `degree` and `smoothness`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum HsStatus hs_conformality_dim(size_t lines, size_t degree, size_t smoothness, size_t *out);

/**
 * The eight-triangle star triangulation of the octagon.
 *
 * # Safety
 * `group` must be a live handle.
 */
struct HsPartition *hs_partition_default(const struct HsGroup *group);

/**
 * # Safety
 * `json` must be a NUL-terminated string and `out` valid for writes.
 */
enum HsStatus hs_partition_from_json(const struct HsGroup *group,
                                     const char *json,
                                     struct HsPartition **out);

/**
 * # Safety
 * `partition` must be a live handle.
 */
size_t hs_partition_cell_count(const struct HsPartition *partition);

/**
 * # Safety
 * `partition` must be NULL or a handle not yet freed.
 */
void hs_partition_free(struct HsPartition *partition);

/**
 * Assembles and solves for a basis of periodic splines of `degree` and
 * `smoothness` (−1 for none) on `partition`.
 *
 * # Safety
 * Handles must be live and `out` valid for writes.
 */
enum HsStatus hs_basis_build(const struct HsGroup *group,
                             const struct HsPartition *partition,
                             size_t degree,
                             int64_t smoothness,
                             double tolerance,
                             struct HsBasis **out);

/**
 * # Safety
 * `basis` must be a live handle.
 */
size_t hs_basis_dimension(const struct HsBasis *basis);

/**
 * # Safety
 * `basis` must be a live handle.
 */
double hs_basis_max_residual(const struct HsBasis *basis);

/**
 * Writes the value of every basis spline at the Klein point `(x, y)`.
 *
 * # Safety
 * `values` must hold `capacity` doubles.
 */
enum HsStatus hs_basis_eval(const struct HsBasis *basis,
                            double x,
                            double y,
                            double *values,
                            size_t capacity);

/**
 * Basis as JSON. Release with [`hs_string_free`]. NULL on failure.
 *
 * # Safety
 * `basis` must be a live handle.
 */
char *hs_basis_to_json(const struct HsBasis *basis);

/**
 * # Safety
 * `basis` must be NULL or a handle not yet freed.
 */
void hs_basis_free(struct HsBasis *basis);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library.
 */
void hs_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPERSPLINE_H */
