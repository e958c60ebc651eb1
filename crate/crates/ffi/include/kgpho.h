#ifndef KGPHO_H
#define KGPHO_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum KgphoLevelKind {
  KGPHO_LEVEL_KIND_POSITIVE = 0,
  KGPHO_LEVEL_KIND_NEGATIVE = 1,
  KGPHO_LEVEL_KIND_FREE_FIELD = 2,
  KGPHO_LEVEL_KIND_NONREL_FIELDS = 3,
  KGPHO_LEVEL_KIND_NONREL_PHO = 4,
  KGPHO_LEVEL_KIND_KG_PHO = 5,
  KGPHO_LEVEL_KIND_KG_HO = 6,
  KGPHO_LEVEL_KIND_NONREL_HO = 7,
} KgphoLevelKind;

typedef enum KgphoMethod {
  KGPHO_METHOD_POSITIVE = 0,
  KGPHO_METHOD_NEGATIVE = 1,
  KGPHO_METHOD_FREE = 2,
  KGPHO_METHOD_NONREL = 3,
  KGPHO_METHOD_KG_PHO = 4,
  KGPHO_METHOD_KG_HO = 5,
  KGPHO_METHOD_NONREL_HO = 6,
} KgphoMethod;

// Result code of every fallible call.
typedef enum KgphoStatus {
  KGPHO_STATUS_OK = 0,
  KGPHO_STATUS_NULL_POINTER = 1,
  KGPHO_STATUS_INVALID_ARGUMENT = 2,
  KGPHO_STATUS_DOMAIN = 3,
  KGPHO_STATUS_NO_ROOT = 4,
  KGPHO_STATUS_DEGENERATE = 5,
  KGPHO_STATUS_BUFFER_TOO_SMALL = 6,
  KGPHO_STATUS_VERIFICATION_FAILED = 7,
  KGPHO_STATUS_PANIC = 99,
} KgphoStatus;

// Opaque system parameters.
typedef struct KgphoSystem KgphoSystem;

// Opaque radial wave function.
typedef struct KgphoWaveFunction KgphoWaveFunction;

// A solved level. `oracle_dev` is meaningful only when `has_oracle_dev`.
typedef struct KgphoLevel {
  double energy;
  double residual;
  double m_eff;
  double oracle_dev;
  uint32_t n;
  int32_t m;
  enum KgphoLevelKind kind;
  bool principal;
  bool has_oracle_dev;
} KgphoLevel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static NUL-terminated string.
const char *kgpho_version(void);

// Message of the last failed call on this thread, or an empty string.
// Valid until the next call into the library on this thread.
const char *kgpho_last_error_message(void);

// Creates a system. `*out` receives a handle to release with
// [`kgpho_system_free`].
//
// # Safety
// `out` must be a valid pointer to writable storage.
enum KgphoStatus kgpho_system_new(double v0,
                                  double rho0,
                                  double b_field,
                                  double flux_xi,
                                  struct KgphoSystem **out);

// # Safety
// `sys` must come from [`kgpho_system_new`] and not be freed twice. Null is ignored.
void kgpho_system_free(struct KgphoSystem *sys);

// Principal level of `(n, m)`.
//
// # Safety
// `sys` must be a live handle and `out` valid for writes.
enum KgphoStatus kgpho_solve(const struct KgphoSystem *sys,
                             uint32_t n,
                             int32_t m,
                             enum KgphoMethod method,
                             struct KgphoLevel *out);

// Every root of the relativistic equation for `(n, m)`. `method` must be
// `Positive` or `Negative`. `*count` receives the number of roots; at most
// `capacity` are written to `out`, and `BufferTooSmall` is returned when
// that is fewer than `*count`. `out` may be null when `capacity` is 0.
//
// # Safety
// `sys` must be a live handle, `count` valid for writes and `out` valid
// for `capacity` writes.
enum KgphoStatus kgpho_solve_all(const struct KgphoSystem *sys,
                                 uint32_t n,
                                 int32_t m,
                                 enum KgphoMethod method,
                                 struct KgphoLevel *out,
                                 size_t capacity,
                                 size_t *count);

// Checks `level` against the finite-difference oracle and stores the
// relative deviation in it. `grid_n = 0` and `tol <= 0` select defaults.
// Returns `VerificationFailed` when the deviation exceeds `tol`.
// `convergence_ratio` may be null; the value written is NaN when the
// refinement differences are at rounding level.
//
// # Safety
// `sys` must be a live handle and `level` valid for reads and writes.
enum KgphoStatus kgpho_verify_level(const struct KgphoSystem *sys,
                                    struct KgphoLevel *level,
                                    size_t grid_n,
                                    double tol,
                                    double *convergence_ratio);

// Normalized radial function with explicit `(n, β, γ)`.
//
// # Safety
// `out` must be valid for writes.
enum KgphoStatus kgpho_wavefunction_new(uint32_t n,
                                        double beta,
                                        double gamma,
                                        struct KgphoWaveFunction **out);

// Radial function belonging to a solved level.
//
// # Safety
// `sys` must be a live handle, `level` valid for reads and `out` for writes.
enum KgphoStatus kgpho_wavefunction_for_level(const struct KgphoSystem *sys,
                                              const struct KgphoLevel *level,
                                              struct KgphoWaveFunction **out);

// `g(r)`; `r` must be finite and non-negative.
//
// # Safety
// `wf` must be a live handle and `out` valid for writes.
enum KgphoStatus kgpho_wavefunction_eval(const struct KgphoWaveFunction *wf, double r, double *out);

// Parameters of a wave function. Any output pointer may be null.
//
// # Safety
// `wf` must be a live handle; non-null outputs must be valid for writes.
enum KgphoStatus kgpho_wavefunction_params(const struct KgphoWaveFunction *wf,
                                           uint32_t *n,
                                           double *beta,
                                           double *gamma,
                                           double *norm);

// # Safety
// `wf` must come from a `kgpho_wavefunction_*` constructor. Null is ignored.
void kgpho_wavefunction_free(struct KgphoWaveFunction *wf);

// Generalized Laguerre polynomial `L_n^(alpha)(x)`.
//
// # Safety
// `out` must be valid for writes.
enum KgphoStatus kgpho_laguerre(uint32_t n, double alpha, double x, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KGPHO_H */
