#include "ktv/solver.hpp"
#include "ktv/timechange.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace ktv;

TEST(MonotoneCubic, InterpolatesKnotsAndStaysMonotone)
{
  std::vector<double> x{0.0, 0.1, 0.5, 0.6, 2.0}, y{5.0, 4.0, 3.9, 1.0, 0.0};
  MonotoneCubic f(x, y);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_DOUBLE_EQ(f(x[i]), y[i]);
  double prev = f(0.0);
  for (int i = 1; i <= 2000; ++i) {
    double const v = f(2.0 * i / 2000);
    EXPECT_LE(v, prev + 1e-15);
    prev = v;
  }
  EXPECT_EQ(f(-1.0), 5.0);
  EXPECT_EQ(f(3.0), 0.0);
}

TEST(MonotoneCubic, ReproducesCubicWithExactSlopes)
{
  std::vector<double> x, y, d;
  for (int i = 0; i <= 10; ++i) {
    double const t = 0.1 * i;
    x.push_back(t);
    y.push_back(t * t * t + t);
    d.push_back(3 * t * t + 1);
  }
  MonotoneCubic f(x, y, d);
  EXPECT_NEAR(f(0.37), 0.37 * 0.37 * 0.37 + 0.37, 1e-14);
  EXPECT_THROW(MonotoneCubic({0.0, 0.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST(Psi, ConstantAndLinearPhi)
{
  EXPECT_NEAR(psi([](double) { return 4.0; }, 2.0, 1e-12), 0.5, 1e-14);
  EXPECT_NEAR(psi([](double s) { return 1.0 + s; }, 1.0, 1e-12), std::log(2.0), 1e-11);
  EXPECT_THROW(psi([](double) { return 0.0; }, 1.0, 1e-9), std::invalid_argument);
}

TEST(SolveAlpha, ConstantCoefficientIsLinear)
{
  for (double c : {0.5, 1.0, 3.0}) {
    auto alpha = solve_alpha([c](double) { return c; }, 2.0, 1e-12);
    double worst = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      double const t = 2.0 * i / 1000;
      worst = std::max(worst, std::abs(alpha(t) - c * t));
    }
    EXPECT_LE(worst, 1e-10);
  }
}

TEST(SolveAlpha, ExponentialGrowth)
{
  // α' = 1 + α  =>  α = e^t - 1
  auto alpha = solve_alpha([](double s) { return 1.0 + s; }, 1.0, 1e-10);
  for (double t : {0.1, 0.5, 1.0}) EXPECT_NEAR(alpha(t), std::expm1(t), 1e-8);
  EXPECT_LE(alpha.route_gap, 1e-10);
  EXPECT_THROW(alpha(1.5), std::out_of_range);
}

TEST(SolveAlpha, RoutesAgreeForRadialFamilies)
{
  RadialSolutionSpec const base{2, 0.5, 1.0, KirchhoffCoefficient::constant(1.0)};
  for (auto const &m : {KirchhoffCoefficient::affine(), KirchhoffCoefficient::power(2.0), KirchhoffCoefficient::power(3.0)}) {
    auto const phi = build_phi_analytic(base, m);
    auto alpha = solve_alpha(phi, 0.2, 1e-9);
    EXPECT_LE(alpha.route_gap, 1e-9);
    std::vector<double> times{0.01, 0.03, 0.1};
    auto const q = alpha_by_quadrature(phi, times, 1e-11);
    for (std::size_t i = 0; i < times.size(); ++i) EXPECT_NEAR(alpha(times[i]), q[i], 1e-8);
  }
}

TEST(SolveAlpha, RejectsNonPositivePhi)
{
  EXPECT_THROW(solve_alpha([](double s) { return s - 1.0; }, 5.0, 1e-9), std::invalid_argument);
}

TEST(ComposeProperty, AnalyticCompositionReproducesClosedForms)
{
  auto d = make_ball_domain(2, 1.0, 1.0 / 32);
  RadialSolutionSpec const base{2, 0.5, 1.0, KirchhoffCoefficient::constant(1.0)};
  for (auto const &m : {KirchhoffCoefficient::affine(), KirchhoffCoefficient::power(2.0), KirchhoffCoefficient::power(3.0)}) {
    RadialSolutionSpec const spec{2, 0.5, 1.0, m};
    double const T = extinction_time_closed_form(spec);
    auto alpha = solve_alpha(build_phi_analytic(base, m), 1.2 * T, 1e-10);
    std::vector<double> times;
    for (int i = 0; i < 100; ++i) times.push_back(1.2 * T * i / 99);
    auto traj = compose(base, d, alpha, times, m);
    for (std::size_t i = 0; i < times.size(); ++i)
      EXPECT_NEAR(traj.diagnostics()[i].linf, amplitude(spec, times[i]), 1e-6) << to_string(m.family());
  }
}

TEST(ComposeProperty, TrajectoryCompositionMatchesDirectSolve)
{
  auto d = make_ball_domain(2, 1.0, 1.0 / 32);
  auto const u0 = indicator_field(d, 0.5, 1.0);
  auto const m = KirchhoffCoefficient::affine();
  SolverConfig base_cfg;
  base_cfg.dt = 2e-4;
  base_cfg.horizon = 0.3;
  base_cfg.prox_tol = 1e-6;
  base_cfg.snapshot_stride = 1;
  auto base = solve_flow(u0, KirchhoffCoefficient::constant(1.0), base_cfg);
  auto alpha = solve_alpha(build_phi_from_trajectory(base, m), 0.1, 1e-9);
  std::vector<double> times{0.0, 0.02, 0.05, 0.08};
  auto composed = compose(base, alpha, times, m);

  SolverConfig cfg = base_cfg;
  cfg.horizon = 0.08;
  cfg.dt = 1e-4;
  auto direct = solve_flow(u0, m, cfg);
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::size_t const j = static_cast<std::size_t>(std::lround(times[i] / cfg.dt));
    if (j >= direct.size()) break;
    EXPECT_NEAR(composed.diagnostics()[i].linf, direct.diagnostics()[j].linf, 0.02);
  }
}

TEST(TimeMap, ConstructionChecks)
{
  EXPECT_THROW(TimeMap({0.0, 1.0}, {0.0}, {1.0, 1.0}, "x"), std::invalid_argument);
  TimeMap m({0.0, 1.0}, {0.0, 2.0}, {2.0, 2.0}, "test");
  EXPECT_DOUBLE_EQ(m(0.5), 1.0);
  EXPECT_EQ(m.source(), "test");
  EXPECT_THROW(m(-0.1), std::out_of_range);
}
