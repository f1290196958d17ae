#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ktv {

enum class CoefficientFamily { constant, affine, power, tabulated };

std::string to_string(CoefficientFamily f);
CoefficientFamily parse_family(std::string const &name);

/// The nonlocal multiplier m(σ) applied to the 1-Laplacian, together with its
/// antiderivative M(σ) = ∫₀^σ m. Every family satisfies m(σ) >= m(0) > 0.
///
///   constant(c)   m = c
///   affine        m = 1 + σ
///   power(p)      m = (1 + σ)^p, p > 1
///   tabulated     piecewise linear through (σ_i, m_i), σ_0 = 0, clamped past the table
class KirchhoffCoefficient
{
public:
  static KirchhoffCoefficient constant(double c);
  static KirchhoffCoefficient affine();
  static KirchhoffCoefficient power(double p);
  static KirchhoffCoefficient tabulated(std::vector<std::pair<double, double>> samples);

  CoefficientFamily family() const noexcept { return family_; }
  bool is_analytic() const noexcept { return family_ != CoefficientFamily::tabulated; }
  /// c for the constant family, p for the power family, unused otherwise.
  double parameter() const noexcept { return param_; }
  std::vector<std::pair<double, double>> const &table() const noexcept { return table_; }

  double operator()(double sigma) const { return value(sigma); }
  double value(double sigma) const;
  double at_zero() const { return value(0.0); }
  double antiderivative(double sigma) const;

  /// μ of the growth condition M(σ) >= μ m(σ) σ, when one has been attached.
  std::optional<double> mu() const noexcept { return mu_; }
  KirchhoffCoefficient with_mu(double mu) const;

  friend bool operator==(KirchhoffCoefficient const &, KirchhoffCoefficient const &) = default;

private:
  KirchhoffCoefficient(CoefficientFamily f, double param) : family_(f), param_(param) {}

  CoefficientFamily family_;
  double param_ = 0.0;
  std::vector<std::pair<double, double>> table_;
  std::optional<double> mu_;
};

} // namespace ktv
