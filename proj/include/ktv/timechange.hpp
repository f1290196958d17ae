#pragma once

// Reduction of the Kirchhoff flow to plain TV flow by a change of time.
//
// If v solves the TV flow (m ≡ 1) from u0 and φ(s) = m(Φ(v(s))), then
// u(t) = v(α(t)) solves the Kirchhoff flow, where α' = φ(α), α(0) = 0.
// Equivalently α = ψ⁻¹ with ψ(s) = ∫₀^s ds'/φ(s'). Both routes are
// implemented and cross-checked.

#include "ktv/analytic.hpp"
#include "ktv/coefficient.hpp"
#include "ktv/trajectory.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ktv {

using Phi = std::function<double(double)>;

/// Piecewise cubic Hermite interpolant with Fritsch–Carlson limited slopes;
/// monotone data give a monotone interpolant. Constant outside the knots.
class MonotoneCubic
{
public:
  MonotoneCubic() = default;
  /// Slopes estimated from the data (PCHIP).
  MonotoneCubic(std::vector<double> x, std::vector<double> y);
  /// Given slopes, limited where they would break monotonicity.
  MonotoneCubic(std::vector<double> x, std::vector<double> y, std::vector<double> slopes);

  double operator()(double x) const;
  bool empty() const noexcept { return x_.empty(); }
  std::vector<double> const &knots() const noexcept { return x_; }
  std::vector<double> const &values() const noexcept { return y_; }

private:
  void limit();
  std::vector<double> x_, y_, d_;
};

/// φ(s) = m(a_base(s) γ_N r^{N-1}) for the plain TV flow from k·χ_{B_r};
/// equals m(0) once the base flow is extinct. Only the geometry of `base` is used.
Phi build_phi_analytic(RadialSolutionSpec const &base, KirchhoffCoefficient const &coef);

/// φ(s) = m(tv(s)) with tv interpolated monotonically from the trajectory's
/// diagnostics and held constant past the last sample.
Phi build_phi_from_trajectory(FlowTrajectory const &traj, KirchhoffCoefficient const &coef);

/// ψ(s) = ∫₀^s 1/φ by adaptive Simpson.
double psi(Phi const &phi, double s, double tol);

class TimeMap
{
public:
  TimeMap(std::vector<double> t, std::vector<double> alpha, std::vector<double> slope, std::string source);

  double operator()(double t) const;
  double t_end() const noexcept { return t_.back(); }
  std::vector<double> const &sample_times() const noexcept { return t_; }
  std::vector<double> const &sample_values() const noexcept { return alpha_; }
  std::string const &source() const noexcept { return source_; }
  /// Largest disagreement between the ODE and quadrature routes at the samples.
  double route_gap = 0.0;

private:
  std::vector<double> t_, alpha_;
  MonotoneCubic interp_;
  std::string source_;
};

/// α by adaptive RK4 (step doubling) on α' = φ(α).
TimeMap alpha_by_ode(Phi const &phi, double t_end, double tol);
/// α(t_i) = ψ⁻¹(t_i) by safeguarded Newton on the quadrature ψ.
std::vector<double> alpha_by_quadrature(Phi const &phi, std::span<double const> times, double tol);

/// α on [0, t_end]. Integrates the ODE, inverts ψ at the same samples and throws
/// NumericalError if the two disagree by more than tol. Throws
/// std::invalid_argument if φ is ever non-positive.
TimeMap solve_alpha(Phi const &phi, double t_end, double tol);

/// u(t_q) = v(α(t_q)), v interpolated linearly in time between base snapshots.
/// Past the end of an extinct base trajectory v is its final snapshot.
FlowTrajectory compose(FlowTrajectory const &base, TimeMap const &alpha, std::span<double const> query_times,
                       KirchhoffCoefficient const &coef);

/// Same with the analytic radial base flow sampled on `domain`.
FlowTrajectory compose(RadialSolutionSpec const &base, DomainPtr domain, TimeMap const &alpha,
                       std::span<double const> query_times, KirchhoffCoefficient const &coef);

} // namespace ktv
