#pragma once

// Closed-form oracles for radial indicator data u0 = k·χ_{B_r(0)}.
//
// For such data the flow keeps the shape u(t) = a(t)·χ_{B_r}: the vector field
// z = -x/r inside B_r and -r^{N-1} x/|x|^N outside has div z = -N/r on the
// ball and 0 elsewhere, and the total variation of u(t) is a(t)·γ_N r^{N-1}.
// The amplitude therefore obeys the scalar ODE
//
//     a'(t) = -(N/r) · m(a(t) γ_N r^{N-1}),   a(0) = k,
//
// which integrates in closed form for the constant, affine and power families.

#include "ktv/coefficient.hpp"
#include "ktv/core.hpp"
#include "ktv/trajectory.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>

namespace ktv {

/// Surface measure of the unit sphere in R^N, N π^{N/2} / Γ(N/2 + 1).
/// Γ at half-integers comes from Γ(1/2) = √π and Γ(1) = 1 by Γ(x+1) = xΓ(x).
template <typename Scalar = double> Scalar gamma_n(int N)
{
  if (N <= 0) throw std::invalid_argument("gamma_n: dimension must be positive");
  Scalar const pi = std::numbers::pi_v<Scalar>;
  Scalar g = (N % 2 == 0) ? Scalar(1) : std::sqrt(pi); // Γ(1) or Γ(1/2)
  for (Scalar x = (N % 2 == 0) ? Scalar(1) : Scalar(0.5); x < Scalar(N) / 2 + Scalar(0.5); x += 1) g *= x;
  return Scalar(N) * std::pow(pi, Scalar(N) / 2) / g;
}

/// Lebesgue measure of B_r in R^N.
template <typename Scalar = double> Scalar ball_volume(int N, Scalar r)
{
  return gamma_n<Scalar>(N) * std::pow(r, Scalar(N)) / Scalar(N);
}

struct RadialSolutionSpec
{
  int dim = 2;
  double r = 0.5; // radius of the initial plateau
  double k = 1.0; // initial height
  KirchhoffCoefficient coef = KirchhoffCoefficient::constant(1.0);

  /// Throws unless r > 0, k >= 0, 1 <= dim <= 3 and the family is analytic.
  void validate() const;
  /// γ_N r^{N-1}: the perimeter of B_r, so that TV(a·χ_{B_r}) = a·perimeter().
  double perimeter() const { return gamma_n(dim) * std::pow(r, dim - 1); }
};

template <typename Scalar = double>
Scalar amplitude_power(int N, Scalar r, Scalar k, Scalar p, Scalar t)
{
  if (!(p > 1)) throw std::invalid_argument("amplitude_power: requires p > 1");
  if (t < 0) throw std::invalid_argument("amplitude_power: requires t >= 0");
  Scalar const g = gamma_n<Scalar>(N);
  Scalar const per = g * std::pow(r, Scalar(N - 1));
  Scalar const bracket = Scalar(N) * (p - 1) * g * std::pow(r, Scalar(N - 2)) * t + std::pow(per * k + 1, 1 - p);
  Scalar const a = (std::pow(bracket, 1 / (1 - p)) - 1) / per;
  return a > 0 ? a : Scalar(0);
}

template <typename Scalar = double>
Scalar amplitude_affine(int N, Scalar r, Scalar k, Scalar t)
{
  if (t < 0) throw std::invalid_argument("amplitude_affine: requires t >= 0");
  Scalar const g = gamma_n<Scalar>(N);
  Scalar const per = g * std::pow(r, Scalar(N - 1));
  Scalar const a = (std::exp(-Scalar(N) * g * std::pow(r, Scalar(N - 2)) * t) * (per * k + 1) - 1) / per;
  return a > 0 ? a : Scalar(0);
}

/// Amplitude under plain TV flow (m ≡ 1): (k - N t / r)^+.
template <typename Scalar = double>
Scalar base_radial_amplitude(int N, Scalar r, Scalar k, Scalar t)
{
  if (t < 0) throw std::invalid_argument("base_radial_amplitude: requires t >= 0");
  Scalar const a = k - Scalar(N) * t / r;
  return a > 0 ? a : Scalar(0);
}

double amplitude_power(RadialSolutionSpec const &spec, double t);
double amplitude_affine(RadialSolutionSpec const &spec, double t);
/// Dispatches on the coefficient family; constant c gives (k - N c t / r)^+.
double amplitude(RadialSolutionSpec const &spec, double t);
/// Closed-form da/dt; 0 at and after extinction.
double amplitude_rate(RadialSolutionSpec const &spec, double t);

/// Lower bounds ‖u(t)‖∞ >= a(t) for data dominating k·χ_{B_r}; same function as amplitude().
double linf_lower_bound_power(RadialSolutionSpec const &spec, double t);
double linf_lower_bound_affine(RadialSolutionSpec const &spec, double t);

double extinction_time_closed_form(RadialSolutionSpec const &spec);

/// z(x) = -x/r for |x| < r, -r^{N-1} x / |x|^N otherwise.
Point candidate_vector_field(Point const &x, double r, int N);

/// Discrete check of the strong-solution conditions for the radial solution at time t:
///   (a) u' = m(∫|Du|) div z in L¹, div z by central differences on the grid,
///       relative to |u'|·|B_r|;
///   (b) ∫(z, Du) = ∫|Du|, the pairing evaluated by Green's formula -∫ u div z;
///   (c) u vanishes on the cells next to ∂Ω, so [z,ν] ∈ sign(-u) holds trivially.
/// Passes when both relative errors are <= tol and |z| <= 1.
VerificationReport verify_strong_solution_conditions(RadialSolutionSpec const &spec, double t,
                                                     GridDomain const &domain, double tol);

/// μ with M(σ) >= μ m(σ) σ: 1 (constant), 1/2 (affine), 1/(p+1) (power).
double mu_constant(KirchhoffCoefficient const &coef);

/// d(Ω)‖u0‖∞ / (N m(0)).
double extinction_upper_bound(GridDomain const &domain, ScalarField const &u0, KirchhoffCoefficient const &coef);

/// u0_scale · m(M(tv0) / (μ m(0))) / t.
double derivative_bound(KirchhoffCoefficient const &coef, double u0_scale, double tv0, double t, double mu);

/// Samples the explicit solution on `domain` at the given times, snapshot at every time.
FlowTrajectory analytic_trajectory(RadialSolutionSpec const &spec, DomainPtr domain, std::span<double const> times);

} // namespace ktv
