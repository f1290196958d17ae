#include "ktv/commands.hpp"
#include "ktv/io.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

using namespace ktv;

namespace {

class Cli : public ::testing::Test
{
protected:
  void SetUp() override
  {
    std::random_device rd;
    dir_ = fs::temp_directory_path() / ("tvflow_test_" + std::to_string(rd()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(std::string const &name, std::string const &text)
  {
    auto const p = dir_ / name;
    write_text(p, text);
    return p;
  }

  int tvflow(std::string const &args)
  {
    std::string const cmd = std::string(TVFLOW_EXE) + " " + args + " >" + (dir_ / "stdout.txt").string() + " 2>" +
                            (dir_ / "stderr.txt").string();
    int const status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  int run(Command cmd, std::string const &text, fs::path const &out)
  {
    std::ostringstream log, err;
    try {
      return run_command(cmd, parse_config(text), out, log, err);
    } catch (ConfigError const &) {
      return exit_usage;
    }
  }

  fs::path dir_;
};

std::string slurp(fs::path const &p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<double>> table(fs::path const &p)
{
  std::vector<std::vector<double>> rows;
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream s(line);
    std::string cell;
    while (std::getline(s, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

std::string value_of(fs::path const &p, std::string const &key)
{
  for (auto const &[k, v] : read_key_values(p))
    if (k == key) return v;
  return {};
}

std::string const base = "dim = 2\nradius = 1\nh = 1/32\n";

} // namespace

TEST_F(Cli, AnalyticPowerStartsAtHeight)
{
  auto const cfg = write_config("a.cfg", base + "m = power\np = 2\nk = 1.5\nsamples = 11\n");
  ASSERT_EQ(tvflow("analytic --config " + cfg.string() + " --out " + (dir_ / "a").string()), 0);
  auto const rows = table(dir_ / "a" / "amplitude.csv");
  ASSERT_EQ(rows.size(), 11u);
  EXPECT_EQ(rows.front()[0], 0.0);
  EXPECT_EQ(rows.front()[1], 1.5);
  EXPECT_EQ(rows.back()[1], 0.0);
  EXPECT_FALSE(value_of(dir_ / "a" / "bounds.csv", "gamma_n").empty());
}

TEST_F(Cli, AnalyticAffineEndsAtZeroAtClosedFormTime)
{
  auto const cfg = write_config("a.cfg", base + "m = affine\n");
  ASSERT_EQ(tvflow("analytic --config " + cfg.string() + " --out " + (dir_ / "a").string()), 0);
  auto const rows = table(dir_ / "a" / "amplitude.csv");
  ASSERT_EQ(rows.size(), 201u);
  EXPECT_NEAR(rows.back()[0], 0.11308598611364139, 1e-15);
  EXPECT_EQ(rows.back()[1], 0.0);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[i][1], rows[i - 1][1]);
}

TEST_F(Cli, AnalyticConstantIsLinearRamp)
{
  auto const cfg = write_config("a.cfg", base + "m = constant\nc = 2\nsamples = 5\n");
  ASSERT_EQ(tvflow("analytic --config " + cfg.string() + " --out " + (dir_ / "a").string()), 0);
  auto const rows = table(dir_ / "a" / "amplitude.csv");
  double const T = 0.5 / (2 * 2.0);
  for (auto const &r : rows) EXPECT_NEAR(r[1], 1.0 - r[0] / T, 1e-14);
  EXPECT_NEAR(rows.back()[0], T, 1e-15);
}

TEST_F(Cli, UsageErrors)
{
  auto const bad = write_config("bad.cfg", base + "m = power\np = 0.5\n");
  EXPECT_EQ(tvflow("solve --config " + bad.string()), 1);
  EXPECT_NE(slurp(dir_ / "stderr.txt").find("p > 1"), std::string::npos);
  EXPECT_EQ(tvflow("solve --config " + (dir_ / "missing.cfg").string()), 1);
  EXPECT_EQ(tvflow("frobnicate"), 1);
  auto const tab = write_config("t.cfg", base + "m = tabulated\ntable = 0:1, 1:2\n");
  EXPECT_EQ(tvflow("analytic --config " + tab.string()), 1);
  EXPECT_EQ(tvflow("--help"), 0);
}

TEST_F(Cli, SolveZeroDataIsExtinctAtOnce)
{
  EXPECT_EQ(run(Command::solve, base + "m = affine\ninitial = zero\n", dir_ / "s"), 0);
  EXPECT_EQ(table(dir_ / "s" / "diagnostics.csv").size(), 1u);
  EXPECT_EQ(value_of(dir_ / "s" / "summary.csv", "extinction_time"), "0");
}

TEST_F(Cli, ShortHorizonReportsNotReached)
{
  EXPECT_EQ(run(Command::solve, base + "m = affine\ndt = 1e-3\nhorizon = 0.005\n", dir_ / "s"), 0);
  EXPECT_EQ(value_of(dir_ / "s" / "summary.csv", "extinction_time"), "not reached");
  EXPECT_EQ(table(dir_ / "s" / "diagnostics.csv").size(), 6u);
}

TEST_F(Cli, OutputsAreByteStable)
{
  auto const cfg = write_config("s.cfg", base + "m = power\np = 2\ndt = 1e-3\nhorizon = 0.02\nsnapshot_stride = 5\n");
  ASSERT_EQ(tvflow("solve --config " + cfg.string() + " --out " + (dir_ / "x").string()), 0);
  ASSERT_EQ(tvflow("solve --config " + cfg.string() + " --out " + (dir_ / "y").string()), 0);
  for (auto const *f : {"diagnostics.csv", "summary.csv", "snapshots/t_000005.csv", "snapshots/t_000020.csv"})
    EXPECT_EQ(slurp(dir_ / "x" / f), slurp(dir_ / "y" / f)) << f;
  EXPECT_FALSE(slurp(dir_ / "x" / "snapshots/t_000020.csv").empty());
  EXPECT_TRUE(fs::exists(dir_ / "x" / "timing.csv"));
}

TEST_F(Cli, VerifyPassesOnAnHonestRun)
{
  auto const cfg = write_config(
    "v.cfg", base + "m = affine\ndt = 5e-4\nprox_tol = 1e-6\nsnapshot_stride = 5\nchecks = max_principle,energy,"
                    "extinction_bound,comparison,linf_lower_bound,lN_decay\n");
  EXPECT_EQ(tvflow("verify --config " + cfg.string() + " --out " + (dir_ / "v").string()), 0);
  auto const report = slurp(dir_ / "v" / "report.csv");
  EXPECT_EQ(report.rfind("check,passed,margin,status\n", 0), 0u);
  EXPECT_EQ(report.find(",false,"), std::string::npos) << report;
}

TEST_F(Cli, VerifyFailsAgainstTooLargeReferenceBall)
{
  // The bound for a taller reference indicator cannot hold: exit code 3.
  auto const text = base + "m = affine\ndt = 5e-4\nprox_tol = 1e-6\nbound_k = 3\nchecks = linf_lower_bound\n";
  EXPECT_EQ(run(Command::verify, text, dir_ / "v"), exit_verification);
  EXPECT_NE(slurp(dir_ / "v" / "report.csv").find("linf_lower_bound,false"), std::string::npos);
}

TEST_F(Cli, VerifyLoadsPreviousTrajectory)
{
  auto const text = base + "m = power\np = 2\ndt = 5e-4\nprox_tol = 1e-6\nsnapshot_stride = 4\n";
  ASSERT_EQ(run(Command::solve, text, dir_ / "s"), 0);
  auto const loaded = text + "trajectory = " + (dir_ / "s").string() + "\nchecks = max_principle,energy,"
                                                                       "extinction_bound,derivative_bound\n";
  EXPECT_EQ(run(Command::verify, loaded, dir_ / "v"), 0);
}

TEST_F(Cli, SweepRejectsEmptyList)
{
  EXPECT_EQ(run(Command::sweep, base + "m = affine\nsweep_key = h\n", dir_ / "w"), exit_usage);
  EXPECT_EQ(run(Command::sweep, base + "m = affine\nsweep_key = h\nsweep_values = 1/32, 0\n", dir_ / "w"),
            exit_usage);
}

TEST_F(Cli, SweepWritesOneRowPerValue)
{
  auto const text = base + "m = affine\ndt = 1e-3\nprox_tol = 1e-6\nsweep_key = k\nsweep_values = 0.5, 1, 2\n";
  ASSERT_EQ(run(Command::sweep, text, dir_ / "w"), 0);
  auto const csv = slurp(dir_ / "w" / "sweep.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  for (int i = 0; i < 3; ++i) EXPECT_TRUE(fs::exists(dir_ / "w" / ("run_" + std::to_string(i)) / "diagnostics.csv"));
}

TEST_F(Cli, SnapshotAndTrajectoryRoundTrip)
{
  auto const d = make_ball_domain(2, 1.0, 1.0 / 16);
  auto const u = indicator_field(d, 0.5, 1.0 / 3.0);
  write_snapshot(dir_ / "u.csv", u);
  EXPECT_EQ((read_snapshot(dir_ / "u.csv", d).values() - u.values()).abs().maxCoeff(), 0.0);
  EXPECT_THROW(read_snapshot(dir_ / "u.csv", make_ball_domain(2, 1.0, 1.0 / 32)), std::runtime_error);

  auto const text = base + "m = affine\ndt = 1e-3\nsnapshot_stride = 7\n";
  ASSERT_EQ(run(Command::solve, text, dir_ / "s"), 0);
  auto const cfg = parse_config(text);
  auto const traj = solve_flow(cfg.initial_field(cfg.make_domain()), cfg.coefficient(),
                               cfg.solver_config(*cfg.make_domain(), cfg.initial_field(cfg.make_domain())));
  auto const back = load_trajectory(dir_ / "s", cfg.make_domain());
  ASSERT_EQ(back.size(), traj.size());
  ASSERT_EQ(back.snapshots().size(), traj.snapshots().size());
  EXPECT_EQ(back.extinction_time, traj.extinction_time);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    EXPECT_EQ(back.times()[i], traj.times()[i]);
    EXPECT_EQ(back.diagnostics()[i].tv, traj.diagnostics()[i].tv);
  }
  for (std::size_t i = 0; i < traj.snapshots().size(); ++i)
    EXPECT_EQ((back.snapshots()[i].field.values() - traj.snapshots()[i].field.values()).abs().maxCoeff(), 0.0);
}
