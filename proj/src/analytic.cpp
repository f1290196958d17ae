#include "ktv/analytic.hpp"
#include "ktv/tv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ktv {

void RadialSolutionSpec::validate() const
{
  if (dim < 1 || dim > 3) throw std::invalid_argument("radial spec: dimension must be 1, 2 or 3");
  if (!(r > 0.0)) throw std::invalid_argument("radial spec: r must be positive");
  if (!(k >= 0.0) || !std::isfinite(k)) throw std::invalid_argument("radial spec: k must be nonnegative");
  if (!coef.is_analytic()) throw std::invalid_argument("radial spec: tabulated coefficients have no closed form");
}

double amplitude_power(RadialSolutionSpec const &spec, double t)
{
  spec.validate();
  if (spec.coef.family() != CoefficientFamily::power) throw std::invalid_argument("amplitude_power: needs the power family");
  return amplitude_power<double>(spec.dim, spec.r, spec.k, spec.coef.parameter(), t);
}

double amplitude_affine(RadialSolutionSpec const &spec, double t)
{
  spec.validate();
  if (spec.coef.family() != CoefficientFamily::affine) throw std::invalid_argument("amplitude_affine: needs the affine family");
  return amplitude_affine<double>(spec.dim, spec.r, spec.k, t);
}

double amplitude(RadialSolutionSpec const &spec, double t)
{
  spec.validate();
  switch (spec.coef.family()) {
  case CoefficientFamily::constant:
    return base_radial_amplitude<double>(spec.dim, spec.r, spec.k, spec.coef.parameter() * t);
  case CoefficientFamily::affine: return amplitude_affine(spec, t);
  case CoefficientFamily::power: return amplitude_power(spec, t);
  default: break;
  }
  throw std::invalid_argument("amplitude: unsupported family");
}

double amplitude_rate(RadialSolutionSpec const &spec, double t)
{
  spec.validate();
  if (t < 0.0) throw std::invalid_argument("amplitude_rate: requires t >= 0");
  if (t >= extinction_time_closed_form(spec)) return 0.0;
  int const N = spec.dim;
  double const g = gamma_n(N);
  double const per = spec.perimeter();
  switch (spec.coef.family()) {
  case CoefficientFamily::constant: return -N * spec.coef.parameter() / spec.r;
  case CoefficientFamily::affine:
    return -N * g * std::pow(spec.r, N - 2) * std::exp(-N * g * std::pow(spec.r, N - 2) * t) * (per * spec.k + 1.0) / per;
  case CoefficientFamily::power: {
    double const p = spec.coef.parameter();
    double const bracket = N * (p - 1.0) * g * std::pow(spec.r, N - 2) * t + std::pow(per * spec.k + 1.0, 1.0 - p);
    return -std::pow(bracket, p / (1.0 - p)) * N / spec.r;
  }
  default: break;
  }
  throw std::invalid_argument("amplitude_rate: unsupported family");
}

double linf_lower_bound_power(RadialSolutionSpec const &spec, double t) { return amplitude_power(spec, t); }
double linf_lower_bound_affine(RadialSolutionSpec const &spec, double t) { return amplitude_affine(spec, t); }

double extinction_time_closed_form(RadialSolutionSpec const &spec)
{
  spec.validate();
  if (spec.k == 0.0) return 0.0;
  int const N = spec.dim;
  double const g = gamma_n(N);
  double const per = spec.perimeter();
  switch (spec.coef.family()) {
  case CoefficientFamily::constant: return spec.k * spec.r / (N * spec.coef.parameter());
  case CoefficientFamily::affine: return std::log(per * spec.k + 1.0) / (N * g * std::pow(spec.r, N - 2));
  case CoefficientFamily::power: {
    double const p = spec.coef.parameter();
    return (1.0 - std::pow(per * spec.k + 1.0, 1.0 - p)) / (N * (p - 1.0) * g * std::pow(spec.r, N - 2));
  }
  default: break;
  }
  throw std::invalid_argument("extinction_time_closed_form: unsupported family");
}

Point candidate_vector_field(Point const &x, double r, int N)
{
  double const n = x.norm();
  if (n < r) return -x / r;
  return -std::pow(r, N - 1) * x / std::pow(n, N);
}

namespace {

double central_divergence(Point const &x, double r, int N, double h)
{
  double div = 0.0;
  for (int a = 0; a < N; ++a) {
    Point xp = x, xm = x;
    xp[a] += h;
    xm[a] -= h;
    div += (candidate_vector_field(xp, r, N)[a] - candidate_vector_field(xm, r, N)[a]) / (2.0 * h);
  }
  return div;
}

} // namespace

VerificationReport verify_strong_solution_conditions(RadialSolutionSpec const &spec, double t,
                                                     GridDomain const &domain, double tol)
{
  spec.validate();
  if (domain.dim() != spec.dim) throw std::invalid_argument("verify_strong_solution_conditions: dimension mismatch");
  VerificationReport rep;
  rep.check_name = "strong_solution_conditions";
  rep.tolerance = tol;
  if (spec.k == 0.0) {
    rep.worst_margin = 0.0;
    rep.metrics = {{"residual_rel", 0.0}, {"pairing_rel", 0.0}, {"max_abs_z", 0.0}, {"boundary_max_abs", 0.0}};
    rep.status = CheckStatus::pass;
    return rep;
  }
  double const T = extinction_time_closed_form(spec);
  if (!(t >= 0.0) || t >= T) throw std::invalid_argument("verify_strong_solution_conditions: t must lie before extinction");

  int const N = spec.dim;
  double const h = domain.spacing();
  double const a = amplitude(spec, t);
  double const da = amplitude_rate(spec, t);
  double const m = spec.coef(a * spec.perimeter());
  double const r2 = spec.r * spec.r;

  double residual = 0.0, pairing = 0.0, max_z = 0.0, boundary = 0.0;
  for (Index c = 0; c < domain.size(); ++c) {
    if (!domain.inside(c)) continue;
    Point const x = domain.center(c);
    double const chi = x.squaredNorm() < r2 ? 1.0 : 0.0;
    double const div = central_divergence(x, spec.r, N, h);
    residual += std::abs(da * chi - m * div);
    pairing -= a * chi * div;
    max_z = std::max(max_z, candidate_vector_field(x, spec.r, N).norm());
    bool edge = false;
    for (int ax = 0; ax < N; ++ax)
      edge = edge || !domain.inside(c - domain.stride(ax)) || !domain.inside(c + domain.stride(ax));
    if (edge) boundary = std::max(boundary, a * chi);
  }
  residual *= domain.cell_volume();
  pairing *= domain.cell_volume();

  double const tv_exact = a * spec.perimeter();
  double const residual_rel = residual / (std::abs(da) * ball_volume(N, spec.r));
  double const pairing_rel = std::abs(pairing - tv_exact) / tv_exact;
  rep.metrics = {{"residual_rel", residual_rel},
                 {"pairing_rel", pairing_rel},
                 {"max_abs_z", max_z},
                 {"boundary_max_abs", boundary},
                 {"discrete_tv", discrete_tv(indicator_field(std::make_shared<GridDomain const>(domain), spec.r, a))},
                 {"exact_tv", tv_exact}};
  rep.details.push_back({t, residual_rel, tol, tol - residual_rel});
  rep.details.push_back({t, pairing_rel, tol, tol - pairing_rel});
  rep.worst_margin = std::min({tol - residual_rel, tol - pairing_rel, 1.0 + 1e-12 - max_z});
  if (boundary > 0.0) {
    rep.worst_margin = -boundary;
    rep.message = "solution does not vanish next to the domain boundary";
  }
  rep.status = rep.worst_margin >= 0.0 ? CheckStatus::pass : CheckStatus::fail;
  return rep;
}

double mu_constant(KirchhoffCoefficient const &coef)
{
  switch (coef.family()) {
  case CoefficientFamily::constant: return 1.0;
  case CoefficientFamily::affine: return 0.5;
  case CoefficientFamily::power: return 1.0 / (coef.parameter() + 1.0);
  case CoefficientFamily::tabulated: break;
  }
  throw std::invalid_argument("mu_constant: tabulated coefficients need a caller-supplied mu");
}

double extinction_upper_bound(GridDomain const &domain, ScalarField const &u0, KirchhoffCoefficient const &coef)
{
  return domain.enclosing_radius() * field_norms(u0).linf / (domain.dim() * coef.at_zero());
}

double derivative_bound(KirchhoffCoefficient const &coef, double u0_scale, double tv0, double t, double mu)
{
  if (!(t > 0.0)) throw std::invalid_argument("derivative_bound: requires t > 0");
  if (!(mu > 0.0) || mu > 1.0) throw std::invalid_argument("derivative_bound: mu must lie in (0, 1]");
  return u0_scale * coef(coef.antiderivative(tv0) / (mu * coef.at_zero())) / t;
}

FlowTrajectory analytic_trajectory(RadialSolutionSpec const &spec, DomainPtr domain, std::span<double const> times)
{
  spec.validate();
  FlowTrajectory traj(domain);
  for (double t : times) {
    ScalarField u = indicator_field(domain, spec.r, amplitude(spec, t));
    traj.append(t, measure(u, spec.coef));
    traj.add_snapshot(std::move(u));
  }
  double const T = extinction_time_closed_form(spec);
  if (!times.empty() && times.back() >= T * (1 - 4 * std::numeric_limits<double>::epsilon()))
    traj.extinction_time = T;
  return traj;
}

} // namespace ktv
