// End-to-end acceptance run: one PASS/FAIL line per criterion, exit status 1
// if any criterion fails.

#include "ktv/analytic.hpp"
#include "ktv/solver.hpp"
#include "ktv/timechange.hpp"
#include "ktv/tv.hpp"
#include "ktv/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

using namespace ktv;

namespace {

struct Run
{
  std::string name;
  RadialSolutionSpec spec;
  FlowTrajectory traj;
  SolverConfig cfg;
  double seconds = 0.0;
  double error = 0.0;
};

Run solve_radial(std::string name, KirchhoffCoefficient coef, double h, double dt, SolverMode mode)
{
  auto const domain = make_ball_domain(2, 1.0, h);
  RadialSolutionSpec const spec{2, 0.5, 1.0, std::move(coef)};
  SolverConfig cfg;
  cfg.mode = mode;
  cfg.dt = dt;
  cfg.snapshot_stride = 5;
  auto const u0 = indicator_field(domain, spec.r, spec.k);
  cfg.horizon = 1.1 * extinction_upper_bound(*domain, u0, spec.coef) + dt;
  auto const start = std::chrono::steady_clock::now();
  FlowTrajectory traj = solve_flow(u0, spec.coef, cfg);
  double const seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  double const err = max_amplitude_error(traj, spec);
  std::printf("  run %-28s %5zu steps  %7.1f s  max rel error %.4f  extinction %s\n", name.c_str(), traj.size() - 1,
              seconds, err, traj.extinction_time ? std::to_string(*traj.extinction_time).c_str() : "not reached");
  std::fflush(stdout);
  return {std::move(name), spec, std::move(traj), cfg, seconds, err};
}

FlowTrajectory analytic_run(RadialSolutionSpec const &spec, DomainPtr const &d, int samples, double until)
{
  double const T = extinction_time_closed_form(spec);
  std::vector<double> times;
  for (int i = 0; i < samples; ++i) times.push_back(until * T * i / (samples - 1));
  return analytic_trajectory(spec, d, times);
}

FlowTrajectory handmade(DomainPtr const &d, std::vector<double> const &heights, double r, double dt,
                        KirchhoffCoefficient const &m)
{
  FlowTrajectory traj(d);
  for (std::size_t i = 0; i < heights.size(); ++i) {
    auto u = indicator_field(d, r, heights[i]);
    traj.append(dt * static_cast<double>(i), measure(u, m));
    traj.add_snapshot(std::move(u));
  }
  return traj;
}

int failures = 0;

void report(int id, bool ok, std::string const &detail)
{
  std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(char const *f, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

} // namespace

int main()
{
  double const dt = 1e-4;
  auto const power2 = KirchhoffCoefficient::power(2.0);
  auto const affine = KirchhoffCoefficient::affine();

  std::puts("solving:");
  std::vector<Run> ladder;
  for (double h : {1.0 / 32, 1.0 / 64, 1.0 / 128})
    ladder.push_back(solve_radial(fmt("power p=2 h=1/%.0f", 1 / h), power2, h, dt, SolverMode::direct_prox));
  Run const &run1 = ladder.back();
  Run const run2 = solve_radial("affine h=1/128", affine, 1.0 / 128, dt, SolverMode::direct_prox);
  Run const run3 = solve_radial("power p=2 h=1/128 reparam", power2, 1.0 / 128, dt, SolverMode::reparametrized);

  // 1
  {
    bool const monotone = ladder[0].error > ladder[1].error && ladder[1].error > ladder[2].error;
    report(1, run1.error <= 0.05 && run1.seconds <= 300.0 && monotone,
           fmt("max rel error %.4f (<= 0.05), runtime %.1f s (<= 300), errors over h: %.4f %.4f %.4f", run1.error,
               run1.seconds, ladder[0].error, ladder[1].error, ladder[2].error));
  }

  // 2
  {
    double const T = std::log(std::numbers::pi + 1) / (4 * std::numbers::pi);
    double const Tn = run2.traj.extinction_time.value_or(INFINITY);
    double const rel = std::abs(Tn - T) / T;
    report(2, run2.error <= 0.05 && rel <= 0.03,
           fmt("max rel error %.4f (<= 0.05), extinction %.5f vs %.5f, rel %.4f (<= 0.03)", run2.error, Tn, T, rel));
  }

  // 3
  {
    auto const &a = run1.traj.diagnostics();
    auto const &b = run3.traj.diagnostics();
    std::size_t const n = std::min(a.size(), b.size());
    double gap = 0.0;
    for (std::size_t i = 0; i < n; ++i) gap = std::max(gap, std::abs(a[i].linf - b[i].linf));
    double const single = std::max(run1.error, run3.error) * run1.spec.k;
    report(3, gap <= 2 * single,
           fmt("max amplitude gap %.4f over %zu common times (<= 2 x %.4f); reparametrized error %.4f", gap, n, single,
               run3.error));
  }

  // 4
  {
    double worst_linear = 0.0;
    for (double c : {0.5, 1.0, 3.0}) {
      auto const alpha = solve_alpha([c](double) { return c; }, 2.0, 1e-12);
      for (int i = 0; i <= 1000; ++i) {
        double const t = 2.0 * i / 1000;
        worst_linear = std::max(worst_linear, std::abs(alpha(t) - c * t));
      }
    }
    auto const d = make_ball_domain(2, 1.0, 1.0 / 32);
    RadialSolutionSpec const base{2, 0.5, 1.0, KirchhoffCoefficient::constant(1.0)};
    double worst_composed = 0.0;
    for (auto const &m : {affine, power2, KirchhoffCoefficient::power(3.0)}) {
      RadialSolutionSpec const spec{2, 0.5, 1.0, m};
      double const T = extinction_time_closed_form(spec);
      auto const alpha = solve_alpha(build_phi_analytic(base, m), T, 1e-10);
      std::vector<double> times;
      for (int i = 0; i < 100; ++i) times.push_back(T * i / 99);
      auto const traj = compose(base, d, alpha, times, m);
      for (std::size_t i = 0; i < times.size(); ++i)
        worst_composed = std::max(worst_composed, std::abs(traj.diagnostics()[i].linf - amplitude(spec, times[i])));
    }
    report(4, worst_linear <= 1e-10 && worst_composed <= 1e-6,
           fmt("constant m: max |alpha - ct| %.2e (<= 1e-10); composed amplitudes max error %.2e (<= 1e-6)",
               worst_linear, worst_composed));
  }

  std::vector<Run const *> all;
  for (auto const &r : ladder) all.push_back(&r);
  all.push_back(&run2);
  all.push_back(&run3);

  // 5
  {
    bool ok = true;
    std::string detail;
    for (auto const *r : all) {
      auto const c = check_extinction_bound(r->traj, r->spec.coef, r->cfg.dt);
      ok &= c.passed();
      detail += fmt("%s: %.5f <= %.5f; ", r->name.c_str(), c.metrics.at("extinction_time"), c.metrics.at("bound"));
    }
    report(5, ok, detail);
  }

  // 6
  {
    double worst = INFINITY;
    bool ok = true;
    for (auto const *r : all) {
      if (r->cfg.mode != SolverMode::direct_prox) continue;
      auto const c = check_max_principle(r->traj, 1e-12);
      ok &= c.passed();
      worst = std::min(worst, c.worst_margin);
    }
    report(6, ok, fmt("worst margin %.3e over every direct_prox step (>= -1e-12)", worst));
  }

  // 7
  {
    double worst = INFINITY;
    bool ok = true;
    for (auto const *r : all) {
      double const tol = 10 * r->cfg.prox_tol;
      auto const &dg = r->traj.diagnostics();
      for (std::size_t i = 1; i < dg.size(); ++i) {
        double const margin = dg[i - 1].tv + tol - dg[i].tv;
        worst = std::min(worst, margin);
        ok &= margin >= 0.0;
      }
    }
    report(7, ok, fmt("worst margin of tv(n) + 10 prox_tol - tv(n+1): %.3e", worst));
  }

  // 8
  {
    auto const c = check_support(run1.traj, 0.5, 2);
    double r6 = 0.0, r3 = 0.0;
    for (auto const &s : run1.traj.snapshots()) {
      r6 = std::max(r6, support_radius(s.field, 1e-6));
      r3 = std::max(r3, support_radius(s.field, 1e-3));
    }
    report(8, c.passed(),
           fmt("support radius %.4f vs allowed %.4f (|u| > 1e-10); at levels 1e-6 / 1e-3: %.4f / %.4f",
               c.metrics.at("support_radius"), c.metrics.at("allowed_radius"), r6, r3));
  }

  // 9
  {
    auto const d = make_ball_domain(2, 1.0, 1.0 / 128);
    bool ok = true;
    std::string detail;
    for (double lambda : {0.01, 0.05}) {
      double const expected = std::max(1.0 - lambda * 2 / 0.5, 0.0);
      auto const r = tv_prox(indicator_field(d, 0.5, 1.0), lambda, 1e-6, 200000);
      double const err = std::abs(r.field.values().maxCoeff() - expected) / expected;
      ok &= err <= 0.03;
      detail += fmt("lambda %.2f: %.5f vs %.5f, rel %.4f; ", lambda, r.field.values().maxCoeff(), expected, err);
    }
    report(9, ok, detail);
  }

  // 10
  {
    bool ok = true;
    std::string detail;
    for (auto const *r : {&run1, &run2}) {
      auto const c = check_lN_decay(r->traj, 0.98);
      ok &= c.passed();
      detail += fmt("%s: R2 %.4f slope %.4f; ", r->name.c_str(), c.metrics.at("r2"), c.metrics.at("slope"));
    }
    report(10, ok, detail);
  }

  // 11
  {
    auto const d = make_ball_domain(2, 1.0, 1.0 / 64);
    bool ok = true;
    std::string detail;
    for (auto const &m : {affine, power2}) {
      RadialSolutionSpec const spec{2, 0.5, 1.0, m};
      auto const traj = analytic_run(spec, d, 401, 1.0);
      double const step = traj.times()[1];
      auto const c = check_derivative_bound(traj, m, mu_constant(m), 10 * step);
      ok &= c.passed();
      detail += fmt("%s max ratio %.4f; ", to_string(m.family()).c_str(), c.metrics.at("max_ratio"));
    }
    RadialSolutionSpec const base{2, 0.5, 1.0, KirchhoffCoefficient::constant(1.0)};
    auto const traj = analytic_run(base, d, 401, 1.2);
    double const step = traj.times()[1];
    auto const c = check_derivative_bound(traj, base.coef, 1.0, 10 * step);
    double const ratio = c.metrics.at("max_ratio");
    ok &= c.passed() && std::abs(ratio - 1.0) <= 0.01;
    detail += fmt("constant m max ratio %.5f (within 1%% of 1)", ratio);
    report(11, ok, detail);
  }

  // 12
  {
    auto const d = make_ball_domain(2, 1.0, 1.0 / 32);
    auto const m = affine;
    double const slope = 2 * m.at_zero() / d->enclosing_radius();
    RadialSolutionSpec const ref{2, 0.5, 1.0, m};
    RadialSolutionSpec half = ref;
    half.k = 0.5;
    std::vector<double> plateau(60, 1.0);
    plateau.back() = 0.0;
    std::vector<double> jump(20, 1.0);
    for (std::size_t i = 15; i < jump.size(); ++i) jump[i] = 0.0;
    auto late = analytic_run(ref, d, 20, 1.0);
    late.extinction_time = 2.0;
    auto cliff = handmade(d, plateau, 0.5, 0.01, m);
    cliff.extinction_time = 0.59;

    std::vector<std::pair<std::string, VerificationReport>> const controls{
      {"max_principle", check_max_principle(handmade(d, {1.0, 2.0}, 0.5, 0.01, m))},
      {"energy", check_energy(handmade(d, {1.0, 0.5, 0.8}, 0.5, 0.01, m), m)},
      {"extinction_bound", check_extinction_bound(late, m, 1e-4)},
      {"comparison", check_comparison(handmade(d, {1.0, 1.0, 1.0}, 0.5, 0.1, m), 1.0, slope, m)},
      {"support", check_support(handmade(d, {1.0, 0.5}, 0.8, 0.01, m), 0.5, 2)},
      {"linf_lower_bound", check_linf_lower_bounds(analytic_run(half, d, 50, 1.0), ref, 1e-6)},
      {"lN_decay", check_lN_decay(cliff)},
      {"derivative_bound", check_derivative_bound(handmade(d, jump, 0.5, 0.01, KirchhoffCoefficient::constant(1.0)),
                                                  KirchhoffCoefficient::constant(1.0), 1.0, 0.05)},
    };
    int failed = 0;
    std::string detail;
    for (auto const &[name, r] : controls) {
      bool const caught = r.status == CheckStatus::fail;
      failed += caught;
      detail += name + (caught ? " fails; " : " DID NOT FAIL; ");
    }
    report(12, failed == static_cast<int>(controls.size()),
           fmt("%d of %zu counterexamples rejected: ", failed, controls.size()) + detail);
  }

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
