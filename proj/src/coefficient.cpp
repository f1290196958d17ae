#include "ktv/coefficient.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ktv {

std::string to_string(CoefficientFamily f)
{
  switch (f) {
  case CoefficientFamily::constant: return "constant";
  case CoefficientFamily::affine: return "affine";
  case CoefficientFamily::power: return "power";
  case CoefficientFamily::tabulated: return "tabulated";
  }
  return "unknown";
}

CoefficientFamily parse_family(std::string const &name)
{
  if (name == "constant") return CoefficientFamily::constant;
  if (name == "affine") return CoefficientFamily::affine;
  if (name == "power") return CoefficientFamily::power;
  if (name == "tabulated") return CoefficientFamily::tabulated;
  throw std::invalid_argument("unknown coefficient family '" + name + "'");
}

KirchhoffCoefficient KirchhoffCoefficient::constant(double c)
{
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("constant coefficient must be positive");
  return {CoefficientFamily::constant, c};
}

KirchhoffCoefficient KirchhoffCoefficient::affine() { return {CoefficientFamily::affine, 0.0}; }

KirchhoffCoefficient KirchhoffCoefficient::power(double p)
{
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("power family requires p > 1");
  return {CoefficientFamily::power, p};
}

KirchhoffCoefficient KirchhoffCoefficient::tabulated(std::vector<std::pair<double, double>> samples)
{
  if (samples.empty()) throw std::invalid_argument("tabulated coefficient needs at least one sample");
  if (samples.front().first != 0.0) throw std::invalid_argument("tabulated coefficient must start at sigma = 0");
  if (!(samples.front().second > 0.0)) throw std::invalid_argument("tabulated coefficient needs m(0) > 0");
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].first > samples[i - 1].first))
      throw std::invalid_argument("tabulated sigma values must be strictly increasing");
    if (samples[i].second < samples[i - 1].second)
      throw std::invalid_argument("tabulated m values must be nondecreasing");
  }
  for (auto const &[s, m] : samples)
    if (!std::isfinite(s) || !std::isfinite(m)) throw std::invalid_argument("tabulated samples must be finite");
  KirchhoffCoefficient k{CoefficientFamily::tabulated, 0.0};
  k.table_ = std::move(samples);
  return k;
}

KirchhoffCoefficient KirchhoffCoefficient::with_mu(double mu) const
{
  if (!(mu > 0.0) || mu > 1.0) throw std::invalid_argument("mu must lie in (0, 1]");
  KirchhoffCoefficient k = *this;
  k.mu_ = mu;
  return k;
}

double KirchhoffCoefficient::value(double sigma) const
{
  if (sigma < 0.0) throw std::invalid_argument("coefficient evaluated at negative sigma");
  switch (family_) {
  case CoefficientFamily::constant: return param_;
  case CoefficientFamily::affine: return 1.0 + sigma;
  case CoefficientFamily::power: return std::pow(1.0 + sigma, param_);
  case CoefficientFamily::tabulated: {
    if (sigma >= table_.back().first) return table_.back().second;
    auto const it = std::upper_bound(table_.begin(), table_.end(), sigma,
                                     [](double s, auto const &e) { return s < e.first; });
    auto const &[s1, m1] = *it;
    auto const &[s0, m0] = *(it - 1);
    return m0 + (m1 - m0) * (sigma - s0) / (s1 - s0);
  }
  }
  return 0.0;
}

double KirchhoffCoefficient::antiderivative(double sigma) const
{
  if (sigma < 0.0) throw std::invalid_argument("antiderivative evaluated at negative sigma");
  switch (family_) {
  case CoefficientFamily::constant: return param_ * sigma;
  case CoefficientFamily::affine: return sigma + 0.5 * sigma * sigma;
  case CoefficientFamily::power: return (std::pow(1.0 + sigma, param_ + 1.0) - 1.0) / (param_ + 1.0);
  case CoefficientFamily::tabulated: {
    // trapezoid rule is exact on the piecewise linear interpolant
    double acc = 0.0;
    for (std::size_t i = 1; i < table_.size(); ++i) {
      auto const [s0, m0] = table_[i - 1];
      auto const [s1, m1] = table_[i];
      if (sigma <= s0) return acc;
      double const top = std::min(sigma, s1);
      double const mt = m0 + (m1 - m0) * (top - s0) / (s1 - s0);
      acc += 0.5 * (m0 + mt) * (top - s0);
      if (sigma <= s1) return acc;
    }
    return acc + table_.back().second * (sigma - table_.back().first);
  }
  }
  return 0.0;
}

} // namespace ktv
