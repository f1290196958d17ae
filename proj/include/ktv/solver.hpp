#pragma once

#include "ktv/coefficient.hpp"
#include "ktv/core.hpp"
#include "ktv/trajectory.hpp"
#include "ktv/tv.hpp"

#include <optional>
#include <string>

namespace ktv {

enum class SolverMode { direct_prox, direct_regularized, reparametrized };

std::string to_string(SolverMode m);
SolverMode parse_mode(std::string const &name);

struct SolverConfig
{
  SolverMode mode = SolverMode::direct_prox;
  double dt = 1e-3;
  double epsilon = 1e-3;             // regularised mode only
  double prox_tol = 1e-5;            // dual fixed-point residual
  int max_inner_iters = 20000;
  double extinction_threshold = 1e-6; // relative to ‖u0‖∞
  double horizon = 1.0;
  int snapshot_stride = 10;
  double linear_tol = 1e-8;          // CG relative residual, regularised mode
  int max_linear_iters = 20000;
  double alpha_tol = 1e-9;           // time-map accuracy, reparametrised mode

  void validate() const;
};

/// dt = h/8, the default for indicator data.
inline double default_dt(double h) { return h / 8.0; }

struct StepResult
{
  ScalarField field;
  int iterations = 0;
  double residual = 0.0;
  bool converged = true;
};

/// Advances the Kirchhoff flow one step at a time, keeping solver state
/// (the dual variable of the prox) between steps.
class FlowStepper
{
public:
  FlowStepper(ScalarField u0, KirchhoffCoefficient coef, SolverConfig cfg);

  StepResult step();
  ScalarField const &current() const noexcept { return u_; }
  double time() const noexcept { return t_; }
  std::size_t steps_taken() const noexcept { return n_; }

private:
  ScalarField u_;
  KirchhoffCoefficient coef_;
  SolverConfig cfg_;
  TvProx prox_;
  double t_ = 0.0;
  std::size_t n_ = 0;
};

/// Semi-implicit minimizing movement: λ = dt·m(Φ(u)), return prox_{λΦ}(u).
StepResult step_direct(ScalarField const &u, KirchhoffCoefficient const &coef, SolverConfig const &cfg);

/// Lagged diffusivity: solve (I + dt m(σ) ∇ᵀ W ∇) u⁺ = u with W = 1/√(|∇u|² + ε²)
/// frozen at u, by preconditioned conjugate gradients. Throws NumericalError
/// when CG does not reach cfg.linear_tol.
StepResult step_regularized(ScalarField const &u, KirchhoffCoefficient const &coef, SolverConfig const &cfg);

/// Integrates until ‖u‖∞ drops below the extinction threshold or the horizon is
/// reached. Diagnostics are recorded every step, snapshots every
/// cfg.snapshot_stride steps and at the final step.
FlowTrajectory solve_flow(ScalarField const &u0, KirchhoffCoefficient const &coef, SolverConfig const &cfg);

/// First time the linf diagnostic falls below `threshold`, linearly interpolated
/// between the bracketing samples. Throws if it never does.
double refine_extinction(FlowTrajectory const &traj, double threshold);

} // namespace ktv
