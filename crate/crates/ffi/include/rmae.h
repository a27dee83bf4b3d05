#ifndef RMAE_H
#define RMAE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Storage model for [`rmae_memory_requirements`].
typedef enum RmaeMemoryScenario {
  RMAE_MEMORY_SCENARIO_STABLE = 0,
  RMAE_MEMORY_SCENARIO_UNKNOWN_PERMS = 1,
} RmaeMemoryScenario;

// Result code of every fallible call.
typedef enum RmaeStatus {
  RMAE_STATUS_OK = 0,
  RMAE_STATUS_NULL_POINTER = 1,
  RMAE_STATUS_INVALID_ARGUMENT = 2,
  RMAE_STATUS_DIMENSION_MISMATCH = 3,
  RMAE_STATUS_UNSTABLE_PERMUTATION = 4,
  RMAE_STATUS_RESOURCE_CAP = 5,
  RMAE_STATUS_PARSE = 6,
  RMAE_STATUS_INTERNAL = 7,
} RmaeStatus;

// An automorphism ensemble decoder with its scratch space.
typedef struct RmaeAeDecoder RmaeAeDecoder;

// A pre-transformed Reed-Muller code.
typedef struct RmaeConstraint RmaeConstraint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread. The pointer stays valid
// until the next failing call on the same thread.
const char *rmae_last_error(void);

// Builds `R(r, n)` with the dynamic classes whose weights are listed in
// `weights`. Pass `full = true` to enable every class and ignore `weights`.
//
// # Safety
// `weights` must point to `weights_len` readable entries (or be null when
// `weights_len` is 0); `out` must be writable.
enum RmaeStatus rmae_constraint_new(size_t r,
                                    size_t n,
                                    const size_t *weights,
                                    size_t weights_len,
                                    bool full,
                                    struct RmaeConstraint **out);

// Parses a constraint file.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable.
enum RmaeStatus rmae_constraint_from_toml(const char *text, struct RmaeConstraint **out);

// # Safety
// `c` must come from a constructor of this library and not be freed twice.
void rmae_constraint_free(struct RmaeConstraint *c);

// Code length `N`; 0 for a null handle.
//
// # Safety
// `c` must be null or a live handle.
size_t rmae_constraint_length(const struct RmaeConstraint *c);

// Code dimension `K`; 0 for a null handle.
//
// # Safety
// `c` must be null or a live handle.
size_t rmae_constraint_dimension(const struct RmaeConstraint *c);

// Number of dynamic frozen bits; 0 for a null handle.
//
// # Safety
// `c` must be null or a live handle.
size_t rmae_constraint_dynamic_count(const struct RmaeConstraint *c);

// Encodes `K` information bits into `N` code bits.
//
// # Safety
// `info` must hold `info_len` bytes and `codeword` `codeword_len` bytes.
enum RmaeStatus rmae_encode(const struct RmaeConstraint *c,
                            const uint8_t *info,
                            size_t info_len,
                            uint8_t *codeword,
                            size_t codeword_len);

// Whether the affine map `z -> A z + b` leaves the constraint invariant.
// `a` holds `n * n` entries in row-major order, `b` holds `n`.
//
// # Safety
// `a`, `b` and `stable` must be valid for the stated sizes.
enum RmaeStatus rmae_is_stable(const struct RmaeConstraint *c,
                               const uint8_t *a,
                               const uint8_t *b,
                               size_t n,
                               bool *stable);

// Ensemble decoder with `m` distinct members of `group` (`identity`,
// `blta-pl`, `pl`, `lta`, `ga` or `blta:s1,s2,...`) sampled with `seed`.
// With `transformed = false` every member must leave the constraint
// invariant; otherwise each branch derives its own freezing rules.
//
// # Safety
// `c` must be a live handle, `group` a NUL-terminated string and `out`
// writable.
enum RmaeStatus rmae_ae_decoder_new(const struct RmaeConstraint *c,
                                    const char *group,
                                    size_t m,
                                    uint64_t seed,
                                    size_t list,
                                    bool transformed,
                                    struct RmaeAeDecoder **out);

// # Safety
// `d` must come from [`rmae_ae_decoder_new`] and not be freed twice.
void rmae_ae_decoder_free(struct RmaeAeDecoder *d);

// Decodes the BPSK-AWGN observation `y` (bit 0 sent as +1) with noise
// variance `sigma2`. Writes `K` information bits and, when `codeword` is
// non-null, `N` code bits.
//
// # Safety
// `d` must be a live handle not used concurrently; buffers must be valid
// for the stated lengths.
enum RmaeStatus rmae_ae_decode(struct RmaeAeDecoder *d,
                               const double *y,
                               size_t len,
                               double sigma2,
                               uint8_t *info,
                               size_t info_len,
                               uint8_t *codeword,
                               size_t codeword_len);

// SC-list decoding of `y`; writes the information bits of the path with the
// best metric.
//
// # Safety
// Buffers must be valid for the stated lengths.
enum RmaeStatus rmae_scl_decode(const struct RmaeConstraint *c,
                                const double *y,
                                size_t len,
                                double sigma2,
                                size_t list,
                                uint8_t *info,
                                size_t info_len);

// Constraint storage in bits for an `m`-branch ensemble on `R(r, n)`.
//
// # Safety
// `bits` must be writable.
enum RmaeStatus rmae_memory_requirements(size_t r,
                                         size_t n,
                                         size_t m,
                                         enum RmaeMemoryScenario scenario,
                                         uint64_t *bits);

// Truncated union bound from `len` (weight, count) pairs.
//
// # Safety
// `weights` and `counts` must hold `len` entries; `bound` must be writable.
enum RmaeStatus rmae_union_bound(const size_t *weights,
                                 const uint64_t *counts,
                                 size_t len,
                                 double rate,
                                 double ebn0_db,
                                 size_t w_max,
                                 double *bound);

// Static description of a status code.
const char *rmae_status_name(enum RmaeStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RMAE_H */
