#include "ktv/commands.hpp"
#include "ktv/io.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ostream>
#include <thread>

namespace ktv {

namespace {

struct SolveOutcome
{
  FlowTrajectory traj;
  SolverConfig solver;
  double seconds = 0.0;
};

std::optional<RadialSolutionSpec> closed_form_spec(RunConfig const &cfg)
{
  if (cfg.initial != "indicator" || cfg.family == CoefficientFamily::tabulated) return std::nullopt;
  return cfg.radial_spec();
}

SolveOutcome solve_and_write(RunConfig const &cfg, fs::path const &out)
{
  auto const dom = cfg.make_domain();
  auto const u0 = cfg.initial_field(dom);
  auto const coef = cfg.coefficient();
  auto const scfg = cfg.solver_config(*dom, u0);

  auto const start = std::chrono::steady_clock::now();
  FlowTrajectory traj = solve_flow(u0, coef, scfg);
  double const seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  ensure_directory(out);
  write_diagnostics(out / "diagnostics.csv", traj);
  write_snapshots(out / "snapshots", traj);
  KeyValues summary{
    {"mode", to_string(scfg.mode)},
    {"family", to_string(coef.family())},
    {"dim", std::to_string(dom->dim())},
    {"h", format_real(dom->spacing())},
    {"dt", format_real(scfg.dt)},
    {"horizon", format_real(scfg.horizon)},
    {"steps", std::to_string(traj.size() - 1)},
    {"extinction_time", traj.extinction_time ? format_real(*traj.extinction_time) : "not reached"},
    {"extinction_upper_bound", format_real(extinction_upper_bound(*dom, u0, coef))},
    {"enclosing_radius", format_real(dom->enclosing_radius())},
  };
  if (auto spec = closed_form_spec(cfg))
    summary.emplace_back("closed_form_extinction", format_real(extinction_time_closed_form(*spec)));
  summary.emplace_back("prox_warnings", std::to_string(traj.prox_warnings));
  summary.emplace_back("worst_prox_residual", format_real(traj.worst_prox_residual));
  write_key_values(out / "summary.csv", summary);
  // Wall time varies run to run, so it lives apart from the byte-stable summary.
  write_key_values(out / "timing.csv", {{"wall_seconds", format_real(seconds)}});
  return {std::move(traj), scfg, seconds};
}

std::string clean(std::string s)
{
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

unsigned thread_cap()
{
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (char const *env = std::getenv("TVFLOW_THREADS")) {
    int const v = std::atoi(env);
    if (v >= 1) n = static_cast<unsigned>(v);
  }
  return n;
}

} // namespace

int cmd_solve(RunConfig const &cfg, fs::path const &out, std::ostream &log)
{
  cfg.require(Command::solve);
  auto const r = solve_and_write(cfg, out);
  log << "solve: " << r.traj.size() - 1 << " steps, extinction "
      << (r.traj.extinction_time ? format_real(*r.traj.extinction_time) : "not reached") << ", " << r.seconds
      << " s\n";
  if (r.traj.prox_warnings > 0) log << "solve: " << r.traj.prox_warnings << " prox solves hit the iteration cap\n";
  return exit_ok;
}

int cmd_analytic(RunConfig const &cfg, fs::path const &out, std::ostream &log)
{
  cfg.require(Command::analytic);
  auto const spec = cfg.radial_spec();
  auto const dom = cfg.make_domain();
  double const T = extinction_time_closed_form(spec);
  int const rows = T > 0.0 ? cfg.samples : 1;

  std::string table = "t,amplitude\n";
  for (int i = 0; i < rows; ++i) {
    double const t = rows == 1 ? 0.0 : T * i / (rows - 1);
    table += format_real(t) + "," + format_real(i == rows - 1 && T > 0.0 ? 0.0 : amplitude(spec, t)) + "\n";
  }

  double const m0 = spec.coef.at_zero(), d = dom->enclosing_radius(), mu = mu_constant(spec.coef);
  double const tv0 = spec.k * spec.perimeter();
  KeyValues bounds{
    {"family", to_string(spec.coef.family())},
    {"gamma_n", format_real(gamma_n(spec.dim))},
    {"closed_form_extinction", format_real(T)},
    {"enclosing_radius", format_real(d)},
    {"extinction_upper_bound", format_real(d * spec.k / (spec.dim * m0))},
    {"comparison_slope", format_real(spec.dim * m0 / d)},
    {"mu", format_real(mu)},
    // |u'(t)| <= C / t
    {"derivative_bound_constant", format_real(spec.k * spec.coef(spec.coef.antiderivative(tv0) / (mu * m0)))},
  };

  ensure_directory(out);
  write_text(out / "amplitude.csv", table);
  write_key_values(out / "bounds.csv", bounds);
  log << "analytic: extinction time " << format_real(T) << "\n";
  return exit_ok;
}

int cmd_verify(RunConfig const &cfg, fs::path const &out, std::ostream &log, std::ostream &err)
{
  cfg.require(Command::verify);
  auto const dom = cfg.make_domain();
  auto const coef = cfg.coefficient();
  double dt = cfg.dt.value_or(default_dt(cfg.h));
  FlowTrajectory traj = [&] {
    if (!cfg.trajectory.empty()) return load_trajectory(cfg.trajectory, dom);
    return solve_and_write(cfg, out).traj;
  }();
  if (traj.size() > 1) dt = traj.times()[1] - traj.times()[0];

  CheckSuiteConfig checks = cfg.checks;
  checks.energy_tol = std::max(checks.energy_tol, 10 * cfg.prox_tol);
  auto const reports = run_checks(traj, {coef, dt, cfg.bound_spec()}, checks);
  ensure_directory(out);
  write_report(out / "report.csv", reports);

  bool failed = false;
  for (auto const &r : reports) {
    log << "verify: " << r.check_name << " " << to_string(r.status) << " margin " << format_real(r.worst_margin)
        << "\n";
    if (r.status == CheckStatus::fail) failed = true;
    if (r.status == CheckStatus::inconclusive)
      err << "warning: " << r.check_name << " inconclusive" << (r.message.empty() ? "" : ": " + r.message) << "\n";
  }
  return failed ? exit_verification : exit_ok;
}

int cmd_sweep(RunConfig const &cfg, fs::path const &out, std::ostream &log)
{
  cfg.require(Command::sweep);
  std::vector<RunConfig> runs;
  for (auto const &v : cfg.sweep_values) runs.push_back(with_override(cfg, cfg.sweep_key, v));

  struct Row
  {
    std::string status = "ok", message;
    std::optional<double> extinction, closed_form, amplitude_error;
    std::size_t steps = 0;
  };
  std::vector<Row> rows(runs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < runs.size();) {
      Row &row = rows[i];
      try {
        auto const r = solve_and_write(runs[i], out / ("run_" + std::to_string(i)));
        row.steps = r.traj.size() - 1;
        row.extinction = r.traj.extinction_time;
        if (auto spec = closed_form_spec(runs[i]); spec && spec->k > 0.0) {
          row.closed_form = extinction_time_closed_form(*spec);
          row.amplitude_error = max_amplitude_error(r.traj, *spec);
        }
      } catch (std::exception const &e) {
        row.status = "error";
        row.message = clean(e.what());
      }
    }
  };
  std::vector<std::jthread> pool;
  unsigned const n = std::min<unsigned>(thread_cap(), static_cast<unsigned>(runs.size()));
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  pool.clear();

  auto opt = [](std::optional<double> v) { return v ? format_real(*v) : std::string(); };
  std::string csv = "key,value,status,extinction_time,closed_form_extinction,extinction_rel_error,"
                    "max_amplitude_error,steps,message\n";
  bool any_failed = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto const &r = rows[i];
    std::optional<double> rel;
    if (r.extinction && r.closed_form && *r.closed_form > 0.0)
      rel = std::abs(*r.extinction - *r.closed_form) / *r.closed_form;
    csv += cfg.sweep_key + "," + clean(cfg.sweep_values[i]) + "," + r.status + "," + opt(r.extinction) + "," +
           opt(r.closed_form) + "," + opt(rel) + "," + opt(r.amplitude_error) + "," + std::to_string(r.steps) + "," +
           r.message + "\n";
    any_failed |= r.status != "ok";
    log << "sweep: " << cfg.sweep_key << "=" << cfg.sweep_values[i] << " " << r.status
        << (r.message.empty() ? "" : ": " + r.message) << "\n";
  }
  ensure_directory(out);
  write_text(out / "sweep.csv", csv);
  return any_failed ? exit_solver : exit_ok;
}

int run_command(Command cmd, RunConfig const &cfg, fs::path const &out, std::ostream &log, std::ostream &err)
{
  try {
    switch (cmd) {
    case Command::solve: return cmd_solve(cfg, out, log);
    case Command::analytic: return cmd_analytic(cfg, out, log);
    case Command::verify: return cmd_verify(cfg, out, log, err);
    case Command::sweep: return cmd_sweep(cfg, out, log);
    }
  } catch (ConfigError const &e) {
    err << "config error: " << e.what() << "\n";
    return exit_usage;
  } catch (std::invalid_argument const &e) {
    err << "invalid input: " << e.what() << "\n";
    return exit_usage;
  } catch (NumericalError const &e) {
    err << "solver failure: " << e.what() << " (residual " << format_real(e.residual()) << ")\n";
    return exit_solver;
  } catch (std::exception const &e) {
    err << "failure: " << e.what() << "\n";
    return exit_solver;
  }
  return exit_usage;
}

} // namespace ktv
