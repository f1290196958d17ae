#pragma once

// Executable checks of the qualitative estimates satisfied by the Kirchhoff
// TV flow: maximum principle, energy dissipation, extinction and support
// bounds, lower bounds on the amplitude, decay shape and the time-derivative
// bound. Each check returns a VerificationReport whose worst_margin is
// negative when the inequality is violated.

#include "ktv/analytic.hpp"
#include "ktv/coefficient.hpp"
#include "ktv/core.hpp"
#include "ktv/trajectory.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ktv {

enum class ComparisonSide { upper, lower, both };

/// Which checks to run and how strictly.
struct CheckSuiteConfig
{
  static std::vector<std::string> const &all_checks();

  std::vector<std::string> checks = all_checks();
  double max_principle_tol = 1e-12;
  double energy_tol = 1e-6;
  double comparison_tol = 1e-12;
  double lower_bound_tol = 0.05; // absolute, in units of u
  double derivative_tol = 1e-6;  // relative
  double decay_r2 = 0.98;
  int support_halo_cells = 2;
  double derivative_t_min = 0.0; // 0 selects ten time steps
  int stride = 1;                // sampling stride over trajectory times

  void validate() const;
  bool enabled(std::string const &name) const;

  friend bool operator==(CheckSuiteConfig const &, CheckSuiteConfig const &) = default;
};

/// min_t (‖u0‖∞ - ‖u(t)‖∞) >= -tol.
VerificationReport check_max_principle(FlowTrajectory const &traj, double tol = 1e-12, int stride = 1);

/// M(tv(t)) <= M(tv(0)) + tol and tv non-increasing step to step (within tol).
/// metrics: energy_margin, monotone_margin.
VerificationReport check_energy(FlowTrajectory const &traj, KirchhoffCoefficient const &coef, double tol = 1e-6,
                                int stride = 1);

/// T* <= d(Ω)‖u0‖∞/(N m(0)) + dt. Inconclusive when the run did not go extinct.
VerificationReport check_extinction_bound(FlowTrajectory const &traj, KirchhoffCoefficient const &coef, double dt);

/// u(t) <= (alpha0 - |slope| t)^+ (upper side), and the mirror image below.
/// Throws std::invalid_argument if |slope| > N m(0)/d(Ω) or the initial datum
/// is not dominated at t = 0.
VerificationReport check_comparison(FlowTrajectory const &traj, double alpha0, double slope,
                                    KirchhoffCoefficient const &coef, ComparisonSide side = ComparisonSide::upper,
                                    double tol = 1e-12, int stride = 1);

/// Every cell with |u| > 1e-10 lies within r + halo_cells·h of the origin, at
/// every recorded time.
VerificationReport check_support(FlowTrajectory const &traj, double r, int halo_cells);

/// ‖u(t)‖∞ >= a(t) - tol for t up to the closed-form extinction time of `spec`.
VerificationReport check_linf_lower_bounds(FlowTrajectory const &traj, RadialSolutionSpec const &spec,
                                           double tol = 0.0, int stride = 1);

/// Least-squares line of ‖u(t)‖_N against T* - t over the final third of the
/// lifespan. Passes when the slope is positive, R² >= r2_min and the ratio
/// ‖u‖_N/(T*-t) stays positive. metrics: slope, intercept, r2, min_ratio, samples.
VerificationReport check_lN_decay(FlowTrajectory const &traj, double r2_min = 0.98);

/// Per-cell difference quotients between consecutive snapshots against
/// ‖u0‖∞ m(M(tv0)/(μ m(0)))/t at the left sample, for t >= t_min.
/// metrics: max_ratio (largest quotient/bound). Throws with fewer than 3 snapshots.
VerificationReport check_derivative_bound(FlowTrajectory const &traj, KirchhoffCoefficient const &coef, double mu,
                                          double t_min, double tol = 1e-6);

/// max_t |‖u(t)‖∞ - a(t)| / k over the recorded times, a the explicit amplitude.
double max_amplitude_error(FlowTrajectory const &traj, RadialSolutionSpec const &spec);

/// Inputs shared by the whole suite.
struct SuiteInputs
{
  KirchhoffCoefficient coef;
  double dt = 0.0;
  std::optional<RadialSolutionSpec> bound_spec; // lower-bound check and support radius
};

/// Runs the enabled checks concurrently. Checks whose inputs are missing
/// (e.g. no bound_spec, unsupported μ) are reported inconclusive.
std::vector<VerificationReport> run_checks(FlowTrajectory const &traj, SuiteInputs const &in,
                                           CheckSuiteConfig const &cfg);

} // namespace ktv
