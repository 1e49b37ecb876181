/* C ABI for the rodwheel dynamics library. */

#ifndef RODWHEEL_H
#define RODWHEEL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code of every fallible call.
typedef enum RwStatus {
  RW_STATUS_OK = 0,
  // A required pointer was null.
  RW_STATUS_NULL_POINTER = 1,
  // A value such as a parameter, step size or index was out of range.
  RW_STATUS_INVALID_ARGUMENT = 2,
  // The mass-matrix solve failed (configuration at or near θ = ±π/2).
  RW_STATUS_SINGULAR_MASS = 3,
} RwStatus;

// Controller selection for `rw_simulate` / `rw_control_torque`.
typedef enum RwControllerKind {
  RW_CONTROLLER_KIND_NONE = 0,
  RW_CONTROLLER_KIND_CASE1 = 1,
  RW_CONTROLLER_KIND_CASE2 = 2,
  // Gains supplied through `RwGains`.
  RW_CONTROLLER_KIND_CUSTOM = 3,
} RwControllerKind;

// Opaque physical model (parameters).
typedef struct RwModel RwModel;

// Opaque recorded trajectory.
typedef struct RwTrajectory RwTrajectory;

// Gains of the generalized rod-balance law
// `u = k_p(beta - beta0) + k_d*dbeta + k_theta*|theta|` with
// `beta0 = amplitude * tanh(v_ref - dphi)`.
typedef struct RwGains {
  double k_p;
  double k_d;
  double k_theta;
  double amplitude;
  double v_ref;
} RwGains;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *rw_version(void);

// New model with the reference parameter set
// `(m, g, r, mu, ell) = (5, 9.81, 1, 1, 2)` and the physical potential.
struct RwModel *rw_model_default(void);

// New model from explicit parameters; all five must be strictly positive.
// Returns null on invalid input. `legacy_potential` drops the gravity
// factor on the rod potential term (the convention the tuned controller
// gains assume).
struct RwModel *rw_model_new(double m,
                             double g,
                             double r,
                             double mu,
                             double ell,
                             bool legacy_potential);

// Free a model. Null is ignored.
//
// # Safety
// `model` must come from `rw_model_new`/`rw_model_default` and not have
// been freed already.
void rw_model_free(struct RwModel *model);

// State derivative `xdot = f(x, u)`; `state` and `out_xdot` are length 10.
//
// # Safety
// `model` must be a live model handle; `state` must point at 10 readable
// doubles and `out_xdot` at 10 writable doubles.
enum RwStatus rw_forward_dynamics(const struct RwModel *model,
                                  const double *state,
                                  double u,
                                  double *out_xdot);

// Ground-reaction multipliers `(lambda1, lambda2)`; `out_lambda` is length 2.
//
// # Safety
// As `rw_forward_dynamics`, with `out_lambda` pointing at 2 doubles.
enum RwStatus rw_ground_reaction(const struct RwModel *model,
                                 const double *state,
                                 double u,
                                 double *out_lambda);

// Total mechanical energy of a state, with the center velocity
// reconstructed from the rolling constraints.
//
// # Safety
// `model` live, `state` 10 readable doubles, `out_energy` writable.
enum RwStatus rw_total_energy(const struct RwModel *model, const double *state, double *out_energy);

// Evaluate a feedback law at a state.
//
// # Safety
// `state` must point at 10 readable doubles and `out_u` be writable;
// `gains` must be readable when `kind == Custom` (ignored otherwise).
enum RwStatus rw_control_torque(enum RwControllerKind kind,
                                const struct RwGains *gains,
                                const double *state,
                                double *out_u);

// Advance one fixed step of the second-order scheme with the torque held.
//
// # Safety
// As `rw_forward_dynamics`; `out_state` must point at 10 writable doubles.
enum RwStatus rw_rk2_step(const struct RwModel *model,
                          const double *state,
                          double u,
                          double dt,
                          double *out_state);

// Run a closed-loop simulation and hand back an owned trajectory handle.
//
// A run that ends in a fall still returns `Ok` with a trajectory; query
// `rw_trajectory_fell` / `rw_trajectory_fall_time`.
//
// # Safety
// `model` live, `x0` 10 readable doubles, `out_trajectory` a writable
// pointer slot; `gains` readable when `kind == Custom`.
enum RwStatus rw_simulate(const struct RwModel *model,
                          const double *x0,
                          enum RwControllerKind kind,
                          const struct RwGains *gains,
                          double dt,
                          double duration,
                          struct RwTrajectory **out_trajectory);

// Number of recorded samples.
//
// # Safety
// `trajectory` must be a live trajectory handle.
size_t rw_trajectory_len(const struct RwTrajectory *trajectory);

// Copy out sample `index`: time, the 10 state components, held torque,
// total energy and the two multipliers. Any out-pointer may be null to
// skip that field.
//
// # Safety
// `trajectory` live; non-null out-pointers must be writable (`out_state`
// spans 10 doubles, `out_lambda` 2).
enum RwStatus rw_trajectory_sample(const struct RwTrajectory *trajectory,
                                   size_t index,
                                   double *out_t,
                                   double *out_state,
                                   double *out_u,
                                   double *out_energy,
                                   double *out_lambda);

// Whether the run ended in a fall.
//
// # Safety
// `trajectory` must be a live trajectory handle.
bool rw_trajectory_fell(const struct RwTrajectory *trajectory);

// Time of the fall event; `InvalidArgument` when the run completed.
//
// # Safety
// `trajectory` live, `out_t` writable.
enum RwStatus rw_trajectory_fall_time(const struct RwTrajectory *trajectory, double *out_t);

// Free a trajectory. Null is ignored.
//
// # Safety
// `trajectory` must come from `rw_simulate` and not have been freed.
void rw_trajectory_free(struct RwTrajectory *trajectory);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RODWHEEL_H */
