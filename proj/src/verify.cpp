#include "ktv/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <stdexcept>

namespace ktv {

namespace {

std::vector<std::size_t> sampled(FlowTrajectory const &traj, int stride)
{
  if (stride < 1) throw std::invalid_argument("verify: stride must be at least 1");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < traj.size(); i += static_cast<std::size_t>(stride)) idx.push_back(i);
  if (!idx.empty() && idx.back() + 1 != traj.size()) idx.push_back(traj.size() - 1);
  return idx;
}

VerificationReport make_report(std::string name, double tol)
{
  VerificationReport r;
  r.check_name = std::move(name);
  r.tolerance = tol;
  return r;
}

void require_samples(FlowTrajectory const &traj, char const *who)
{
  if (traj.empty()) throw std::invalid_argument(std::string(who) + ": empty trajectory");
}

void record(VerificationReport &r, double t, double measured, double bound, double margin)
{
  r.details.push_back({t, measured, bound, margin});
  if (std::isnan(r.worst_margin) || margin < r.worst_margin) r.worst_margin = margin;
}

} // namespace

std::vector<std::string> const &CheckSuiteConfig::all_checks()
{
  static std::vector<std::string> const names{"max_principle", "energy",          "extinction_bound",
                                              "comparison",    "support",         "linf_lower_bound",
                                              "lN_decay",      "derivative_bound"};
  return names;
}

void CheckSuiteConfig::validate() const
{
  for (auto const &c : checks)
    if (std::find(all_checks().begin(), all_checks().end(), c) == all_checks().end())
      throw std::invalid_argument("checks: unknown check '" + c + "'");
  for (double t : {max_principle_tol, energy_tol, comparison_tol, lower_bound_tol, derivative_tol})
    if (!(t > 0.0)) throw std::invalid_argument("checks: tolerances must be positive");
  if (!(decay_r2 > 0.0 && decay_r2 <= 1.0)) throw std::invalid_argument("checks: decay_r2 must lie in (0, 1]");
  if (support_halo_cells < 0) throw std::invalid_argument("checks: support_halo_cells must be non-negative");
  if (derivative_t_min < 0.0) throw std::invalid_argument("checks: derivative_t_min must be non-negative");
  if (stride < 1) throw std::invalid_argument("checks: stride must be at least 1");
}

bool CheckSuiteConfig::enabled(std::string const &name) const
{
  return std::find(checks.begin(), checks.end(), name) != checks.end();
}

VerificationReport check_max_principle(FlowTrajectory const &traj, double tol, int stride)
{
  require_samples(traj, "check_max_principle");
  auto r = make_report("max_principle", tol);
  double const u0 = traj.diagnostics().front().linf;
  for (std::size_t i : sampled(traj, stride)) {
    double const v = traj.diagnostics()[i].linf;
    record(r, traj.times()[i], v, u0, u0 - v);
  }
  r.conclude();
  return r;
}

VerificationReport check_energy(FlowTrajectory const &traj, KirchhoffCoefficient const &coef, double tol, int stride)
{
  require_samples(traj, "check_energy");
  auto r = make_report("energy", tol);
  auto const &d = traj.diagnostics();
  double const e0 = coef.antiderivative(d.front().tv);
  double energy_margin = 0.0, monotone_margin = 0.0;
  auto const idx = sampled(traj, stride);
  for (std::size_t j = 0; j < idx.size(); ++j) {
    std::size_t const i = idx[j];
    double const e = coef.antiderivative(d[i].tv);
    energy_margin = std::min(energy_margin, e0 - e);
    double const mono = j == 0 ? 0.0 : d[idx[j - 1]].tv - d[i].tv;
    monotone_margin = std::min(monotone_margin, mono);
    record(r, traj.times()[i], e, e0, std::min(e0 - e, mono));
  }
  r.metrics["energy_margin"] = energy_margin;
  r.metrics["monotone_margin"] = monotone_margin;
  r.conclude();
  return r;
}

VerificationReport check_extinction_bound(FlowTrajectory const &traj, KirchhoffCoefficient const &coef, double dt)
{
  require_samples(traj, "check_extinction_bound");
  auto r = make_report("extinction_bound", dt);
  auto const &dom = traj.domain();
  double const bound = dom.enclosing_radius() * traj.diagnostics().front().linf / (dom.dim() * coef.at_zero());
  r.metrics["bound"] = bound;
  if (!traj.extinction_time) {
    r.status = CheckStatus::inconclusive;
    r.message = "extinction not reached before the horizon";
    return r;
  }
  double const t = *traj.extinction_time;
  r.metrics["extinction_time"] = t;
  record(r, t, t, bound, bound - t);
  r.conclude();
  return r;
}

VerificationReport check_comparison(FlowTrajectory const &traj, double alpha0, double slope,
                                    KirchhoffCoefficient const &coef, ComparisonSide side, double tol, int stride)
{
  require_samples(traj, "check_comparison");
  auto const &dom = traj.domain();
  double const limit = dom.dim() * coef.at_zero() / dom.enclosing_radius();
  if (std::abs(slope) > limit * (1.0 + 1e-12))
    throw std::invalid_argument("check_comparison: |slope| exceeds N m(0)/d(Omega)");
  auto const &d0 = traj.diagnostics().front();
  bool const upper = side != ComparisonSide::lower, lower = side != ComparisonSide::upper;
  if (upper && d0.max > alpha0) throw std::invalid_argument("check_comparison: u0 is not below alpha(0)");
  if (lower && d0.min < -alpha0) throw std::invalid_argument("check_comparison: u0 is not above -alpha(0)");

  auto r = make_report("comparison", tol);
  for (std::size_t i : sampled(traj, stride)) {
    double const t = traj.times()[i];
    double const a = std::max(alpha0 - std::abs(slope) * t, 0.0);
    auto const &d = traj.diagnostics()[i];
    if (upper) record(r, t, d.max, a, a - d.max);
    if (lower) record(r, t, d.min, -a, d.min + a);
  }
  r.conclude();
  return r;
}

VerificationReport check_support(FlowTrajectory const &traj, double r, int halo_cells)
{
  require_samples(traj, "check_support");
  double const h = traj.domain().spacing();
  double const allowed = r + halo_cells * h;
  auto rep = make_report("support", 1e-9 * h);
  rep.metrics["allowed_radius"] = allowed;
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    double const s = traj.diagnostics()[i].support_radius;
    worst = std::max(worst, s);
    record(rep, traj.times()[i], s, allowed, allowed - s);
  }
  for (auto const &snap : traj.snapshots()) {
    double const s = support_radius(snap.field);
    worst = std::max(worst, s);
    record(rep, traj.snapshot_time(snap), s, allowed, allowed - s);
  }
  rep.metrics["support_radius"] = worst;
  rep.metrics["excess_cells"] = std::max(0.0, (worst - r) / h);
  rep.conclude();
  return rep;
}

VerificationReport check_linf_lower_bounds(FlowTrajectory const &traj, RadialSolutionSpec const &spec, double tol,
                                           int stride)
{
  require_samples(traj, "check_linf_lower_bounds");
  spec.validate();
  auto r = make_report("linf_lower_bound", tol);
  double const T = extinction_time_closed_form(spec);
  for (std::size_t i : sampled(traj, stride)) {
    double const t = traj.times()[i];
    if (t > T) break;
    double const v = traj.diagnostics()[i].linf, a = amplitude(spec, t);
    record(r, t, v, a, v - a);
  }
  r.conclude();
  return r;
}

VerificationReport check_lN_decay(FlowTrajectory const &traj, double r2_min)
{
  auto r = make_report("lN_decay", 0.0);
  if (!traj.extinction_time || !(*traj.extinction_time > 0.0)) {
    r.status = CheckStatus::inconclusive;
    r.message = "no extinction with positive lifespan";
    return r;
  }
  double const T = *traj.extinction_time;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    double const t = traj.times()[i];
    if (t >= 2.0 * T / 3.0 && t < T) {
      x.push_back(T - t);
      y.push_back(traj.diagnostics()[i].lN);
    }
  }
  r.metrics["samples"] = static_cast<double>(x.size());
  if (x.size() < 3) {
    r.status = CheckStatus::inconclusive;
    r.message = "fewer than 3 samples in the final third of the lifespan";
    return r;
  }
  Eigen::Map<Eigen::ArrayXd const> X(x.data(), static_cast<Index>(x.size())), Y(y.data(), static_cast<Index>(y.size()));
  double const mx = X.mean(), my = Y.mean();
  double const sxx = (X - mx).square().sum(), sxy = ((X - mx) * (Y - my)).sum(), syy = (Y - my).square().sum();
  double const slope = sxy / sxx, intercept = my - slope * mx;
  double const r2 = syy > 0.0 ? 1.0 - (Y - intercept - slope * X).square().sum() / syy : 0.0;
  double const min_ratio = (Y / X).minCoeff();
  r.metrics["slope"] = slope;
  r.metrics["intercept"] = intercept;
  r.metrics["r2"] = r2;
  r.metrics["min_ratio"] = min_ratio;
  r.worst_margin = std::min(r2 - r2_min, min_ratio);
  r.status = slope > 0.0 && r2 >= r2_min && min_ratio > 0.0 ? CheckStatus::pass : CheckStatus::fail;
  return r;
}

VerificationReport check_derivative_bound(FlowTrajectory const &traj, KirchhoffCoefficient const &coef, double mu,
                                          double t_min, double tol)
{
  auto const &snaps = traj.snapshots();
  if (snaps.size() < 3) throw std::invalid_argument("check_derivative_bound: needs at least 3 snapshots");
  auto r = make_report("derivative_bound", tol);
  if (t_min <= 0.0) t_min = 10.0 * (traj.times().at(1) - traj.times().at(0));
  double const u0 = traj.diagnostics().front().linf, tv0 = traj.diagnostics().front().tv;
  double max_ratio = 0.0;
  for (std::size_t i = 0; i + 1 < snaps.size(); ++i) {
    double const t0 = traj.snapshot_time(snaps[i]), t1 = traj.snapshot_time(snaps[i + 1]);
    if (t0 < t_min || !(t0 > 0.0)) continue;
    double const q = (snaps[i + 1].field.values() - snaps[i].field.values()).abs().maxCoeff() / (t1 - t0);
    double const b = derivative_bound(coef, u0, tv0, t0, mu);
    double const ratio = q / b;
    max_ratio = std::max(max_ratio, ratio);
    record(r, t0, q, b, 1.0 - ratio);
  }
  r.metrics["max_ratio"] = max_ratio;
  r.metrics["t_min"] = t_min;
  if (r.details.empty()) {
    r.status = CheckStatus::inconclusive;
    r.message = "no snapshot interval starts after t_min";
    return r;
  }
  r.conclude();
  return r;
}

double max_amplitude_error(FlowTrajectory const &traj, RadialSolutionSpec const &spec)
{
  if (!(spec.k > 0.0)) throw std::invalid_argument("max_amplitude_error: requires k > 0");
  double err = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i)
    err = std::max(err, std::abs(traj.diagnostics()[i].linf - amplitude(spec, traj.times()[i])));
  return err / spec.k;
}

std::vector<VerificationReport> run_checks(FlowTrajectory const &traj, SuiteInputs const &in,
                                           CheckSuiteConfig const &cfg)
{
  cfg.validate();
  auto skipped = [](std::string name, std::string why) {
    VerificationReport r;
    r.check_name = std::move(name);
    r.status = CheckStatus::inconclusive;
    r.message = std::move(why);
    return r;
  };
  std::vector<std::pair<std::string, std::function<VerificationReport()>>> jobs;
  auto add = [&](std::string const &name, std::function<VerificationReport()> f) {
    if (cfg.enabled(name)) jobs.emplace_back(name, std::move(f));
  };
  auto const &dom = traj.domain();
  add("max_principle", [&] { return check_max_principle(traj, cfg.max_principle_tol, cfg.stride); });
  add("energy", [&] { return check_energy(traj, in.coef, cfg.energy_tol, cfg.stride); });
  add("extinction_bound", [&] { return check_extinction_bound(traj, in.coef, in.dt); });
  add("comparison", [&] {
    double const a0 = traj.diagnostics().front().linf;
    double const slope = dom.dim() * in.coef.at_zero() / dom.enclosing_radius();
    return check_comparison(traj, a0, slope, in.coef, ComparisonSide::both, cfg.comparison_tol, cfg.stride);
  });
  add("support", [&] {
    if (!in.bound_spec) return skipped("support", "no reference ball given");
    return check_support(traj, in.bound_spec->r, cfg.support_halo_cells);
  });
  add("linf_lower_bound", [&] {
    if (!in.bound_spec) return skipped("linf_lower_bound", "no reference ball given");
    return check_linf_lower_bounds(traj, *in.bound_spec, cfg.lower_bound_tol, cfg.stride);
  });
  add("lN_decay", [&] { return check_lN_decay(traj, cfg.decay_r2); });
  add("derivative_bound", [&] {
    if (in.coef.family() == CoefficientFamily::tabulated && !in.coef.mu())
      return skipped("derivative_bound", "no mu for the tabulated coefficient");
    if (traj.snapshots().size() < 3) return skipped("derivative_bound", "fewer than 3 snapshots");
    double const mu = in.coef.mu() ? *in.coef.mu() : mu_constant(in.coef);
    double const t_min = cfg.derivative_t_min > 0.0 ? cfg.derivative_t_min : 10.0 * in.dt;
    return check_derivative_bound(traj, in.coef, mu, t_min, cfg.derivative_tol);
  });

  std::vector<std::future<VerificationReport>> futures;
  for (auto &job : jobs) futures.push_back(std::async(std::launch::async, job.second));
  std::vector<VerificationReport> out;
  for (std::size_t i = 0; i < futures.size(); ++i) {
    try {
      out.push_back(futures[i].get());
    } catch (std::invalid_argument const &e) {
      VerificationReport r = skipped(jobs[i].first, e.what());
      r.status = CheckStatus::fail;
      out.push_back(std::move(r));
    }
  }
  return out;
}

} // namespace ktv
