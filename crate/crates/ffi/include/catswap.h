#ifndef CATSWAP_H
#define CATSWAP_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CatswapStatus {
  CATSWAP_STATUS_OK = 0,
  CATSWAP_STATUS_NULL_POINTER = 1,
  CATSWAP_STATUS_INVALID_ARGUMENT = 2,
  CATSWAP_STATUS_TRUNCATION = 3,
  CATSWAP_STATUS_DEGENERATE_CAT = 4,
  CATSWAP_STATUS_DIMENSION_MISMATCH = 5,
  CATSWAP_STATUS_INDEX_OUT_OF_RANGE = 6,
  CATSWAP_STATUS_INVALID_ANGULAR_MOMENTUM = 7,
  CATSWAP_STATUS_STEP_SIZE_TOO_LARGE = 8,
  CATSWAP_STATUS_POSITIVITY_VIOLATION = 9,
  CATSWAP_STATUS_REALITY_VIOLATION = 10,
  CATSWAP_STATUS_CONFIG = 11,
  CATSWAP_STATUS_IO = 12,
  CATSWAP_STATUS_BUFFER_TOO_SMALL = 13,
  CATSWAP_STATUS_INVALID_UTF8 = 14,
  CATSWAP_STATUS_PANIC = 15,
} CatswapStatus;

/**
 * Density matrix on the spin, field or composite factor.
 */
typedef struct CatswapDensity CatswapDensity;

/**
 * Sampled Wigner function.
 */
typedef struct CatswapGrid CatswapGrid;

/**
 * Hilbert-space layout: qubit count, Fock cutoff and coupling.
 */
typedef struct CatswapSpace CatswapSpace;

/**
 * Pure state on the spin, field or composite factor.
 */
typedef struct CatswapState CatswapState;

typedef struct CatswapTimescales {
  double rabi;
  double collapse;
  double revival;
  double first_revival;
} CatswapTimescales;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *catswap_last_error_message(void);

/**
 * Static name of a status code.
 */
const char *catswap_status_name(enum CatswapStatus status);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum CatswapStatus catswap_space_new(size_t n_qubits,
                                     size_t fock_cutoff,
                                     double coupling,
                                     struct CatswapSpace **out);

/**
 * # Safety
 * `space` must be NULL or a handle from `catswap_space_new` not yet freed.
 */
void catswap_space_free(struct CatswapSpace *space);

/**
 * Composite dimension `(N+1)(n_max+1)`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CatswapStatus catswap_space_dim(const struct CatswapSpace *space, size_t *out);

/**
 * # Safety
 * `out` must be valid.
 */
enum CatswapStatus catswap_timescales(double coupling,
                                      double nbar,
                                      size_t n_qubits,
                                      struct CatswapTimescales *out);

/**
 * Default integration step for the given parameters.
 *
 * # Safety
 * `out` must be valid.
 */
enum CatswapStatus catswap_default_step(double coupling, double nbar, size_t n_qubits, double *out);

/**
 * # Safety
 * Pointers must be valid.
 */
enum CatswapStatus catswap_spin_coherent(const struct CatswapSpace *space,
                                         double z_re,
                                         double z_im,
                                         struct CatswapState **out);

/**
 * # Safety
 * Pointers must be valid.
 */
enum CatswapStatus catswap_spin_cat(const struct CatswapSpace *space,
                                    double z_re,
                                    double z_im,
                                    struct CatswapState **out);

/**
 * Dicke state with `k` ground-state spins.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CatswapStatus catswap_dicke(const struct CatswapSpace *space,
                                 size_t k,
                                 struct CatswapState **out);

/**
 * # Safety
 * Pointers must be valid.
 */
enum CatswapStatus catswap_coherent(const struct CatswapSpace *space,
                                    double alpha_re,
                                    double alpha_im,
                                    struct CatswapState **out);

/**
 * `sign` is +1 (even cat) or -1 (odd cat).
 *
 * # Safety
 * Pointers must be valid.
 */
enum CatswapStatus catswap_field_cat(const struct CatswapSpace *space,
                                     double alpha_re,
                                     double alpha_im,
                                     int8_t sign,
                                     struct CatswapState **out);

/**
 * # Safety
 * Pointers must be valid.
 */
enum CatswapStatus catswap_fock(const struct CatswapSpace *space,
                                size_t n,
                                struct CatswapState **out);

/**
 * Tensor product of a spin state and a field state.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CatswapStatus catswap_product(const struct CatswapState *spin,
                                   const struct CatswapState *field,
                                   struct CatswapState **out);

/**
 * # Safety
 * `state` must be NULL or a live handle.
 */
void catswap_state_free(struct CatswapState *state);

/**
 * Number of complex amplitudes.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CatswapStatus catswap_state_len(const struct CatswapState *state, size_t *out);

/**
 * Copies amplitudes into `buf` as `2*len` interleaved doubles. `buf_len`
 * counts doubles.
 *
 * # Safety
 * `buf` must point to `buf_len` writable doubles.
 */
enum CatswapStatus catswap_state_amplitudes(const struct CatswapState *state,
                                            double *buf,
                                            size_t buf_len);

/**
 * `|ψ⟩⟨ψ|`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CatswapStatus catswap_state_projector(const struct CatswapState *state,
                                           struct CatswapDensity **out);

/**
 * Integrates the master equation with field loss rate `gamma` from the pure
 * composite state `initial` to `t_final` with step `dt` and returns the
 * final density matrix.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CatswapStatus catswap_evolve(const struct CatswapState *initial,
                                  double t_final,
                                  double dt,
                                  double gamma,
                                  struct CatswapDensity **out);

/**
 * # Safety
 * `rho` must be NULL or a live handle.
 */
void catswap_density_free(struct CatswapDensity *rho);

/**
 * # Safety
 * Pointers must be valid.
 */
enum CatswapStatus catswap_density_dim(const struct CatswapDensity *rho, size_t *out);

/**
 * Copies the matrix in row-major order as interleaved doubles
 * (`2*dim*dim` values).
 *
 * # Safety
 * `buf` must point to `buf_len` writable doubles.
 */
enum CatswapStatus catswap_density_entries(const struct CatswapDensity *rho,
                                           double *buf,
                                           size_t buf_len);

/**
 * Real part of the trace.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CatswapStatus catswap_density_trace(const struct CatswapDensity *rho, double *out);

/**
 * # Safety
 * Pointers must be valid.
 */
enum CatswapStatus catswap_density_purity(const struct CatswapDensity *rho, double *out);

/**
 * # Safety
 * Pointers must be valid.
 */
enum CatswapStatus catswap_density_min_eigenvalue(const struct CatswapDensity *rho, double *out);

/**
 * Traces out the field.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CatswapStatus catswap_reduce_spins(const struct CatswapDensity *rho,
                                        struct CatswapDensity **out);

/**
 * Traces out the spins.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CatswapStatus catswap_reduce_field(const struct CatswapDensity *rho,
                                        struct CatswapDensity **out);

/**
 * `⟨ψ|ρ|ψ⟩`, clamped to [0, 1].
 *
 * # Safety
 * Pointers must be valid.
 */
enum CatswapStatus catswap_fidelity(const struct CatswapDensity *rho,
                                    const struct CatswapState *target,
                                    double *out);

/**
 * Field Wigner function of a field density matrix on an `nq × np` grid.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CatswapStatus catswap_field_wigner(const struct CatswapDensity *rho_field,
                                        double q_min,
                                        double q_max,
                                        double p_min,
                                        double p_max,
                                        size_t nq,
                                        size_t np,
                                        struct CatswapGrid **out);

/**
 * Spin Wigner function on a `theta_res × phi_res` sphere grid.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CatswapStatus catswap_spin_wigner(const struct CatswapDensity *rho_spin,
                                       size_t theta_res,
                                       size_t phi_res,
                                       struct CatswapGrid **out);

/**
 * Resamples a sphere grid onto the Lambert equal-area disk.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CatswapStatus catswap_lambert(const struct CatswapGrid *sphere,
                                   size_t radial_res,
                                   size_t angular_res,
                                   struct CatswapGrid **out);

/**
 * # Safety
 * `grid` must be NULL or a live handle.
 */
void catswap_grid_free(struct CatswapGrid *grid);

/**
 * # Safety
 * Pointers must be valid.
 */
enum CatswapStatus catswap_grid_shape(const struct CatswapGrid *grid, size_t *rows, size_t *cols);

/**
 * Row-major values, `rows*cols` doubles.
 *
 * # Safety
 * `buf` must point to `buf_len` writable doubles.
 */
enum CatswapStatus catswap_grid_values(const struct CatswapGrid *grid, double *buf, size_t buf_len);

/**
 * Coordinates along `axis` (0 for rows, 1 for columns).
 *
 * # Safety
 * `buf` must point to `buf_len` writable doubles.
 */
enum CatswapStatus catswap_grid_axis(const struct CatswapGrid *grid,
                                     uint32_t axis,
                                     double *buf,
                                     size_t buf_len);

/**
 * Largest imaginary part discarded when the grid was made real.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CatswapStatus catswap_grid_imag_residue(const struct CatswapGrid *grid, double *out);

/**
 * Wigner 3j symbol with doubled arguments (`two_j1 = 2*j1`, ...), so that
 * half-integers are exact.
 *
 * # Safety
 * `out` must be valid.
 */
enum CatswapStatus catswap_wigner_3j(int64_t two_j1,
                                     int64_t two_j2,
                                     int64_t two_j3,
                                     int64_t two_m1,
                                     int64_t two_m2,
                                     int64_t two_m3,
                                     double *out);

/**
 * Runs an experiment config file. `out_dir` may be NULL to use the
 * directory named in the config.
 *
 * # Safety
 * `config_path` must be a NUL-terminated string; `out_dir` NULL or one.
 */
enum CatswapStatus catswap_run_config(const char *config_path, const char *out_dir, bool dry_run);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CATSWAP_H */
