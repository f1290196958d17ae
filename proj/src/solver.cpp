#include "ktv/solver.hpp"
#include "ktv/timechange.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include <algorithm>
#include <limits>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ktv {

std::string to_string(SolverMode m)
{
  switch (m) {
  case SolverMode::direct_prox: return "direct_prox";
  case SolverMode::direct_regularized: return "direct_regularized";
  case SolverMode::reparametrized: return "reparametrized";
  }
  return "unknown";
}

SolverMode parse_mode(std::string const &name)
{
  if (name == "direct_prox") return SolverMode::direct_prox;
  if (name == "direct_regularized") return SolverMode::direct_regularized;
  if (name == "reparametrized") return SolverMode::reparametrized;
  throw std::invalid_argument("unknown solver mode '" + name + "'");
}

void SolverConfig::validate() const
{
  if (!(dt > 0.0)) throw std::invalid_argument("solver: dt must be positive");
  if (!(prox_tol > 0.0)) throw std::invalid_argument("solver: prox_tol must be positive");
  if (!(horizon > 0.0)) throw std::invalid_argument("solver: horizon must be positive");
  if (mode == SolverMode::direct_regularized && !(epsilon > 0.0))
    throw std::invalid_argument("solver: epsilon must be positive");
  if (max_inner_iters < 1) throw std::invalid_argument("solver: max_inner_iters must be at least 1");
  if (snapshot_stride < 1) throw std::invalid_argument("solver: snapshot_stride must be at least 1");
  if (!(extinction_threshold > 0.0)) throw std::invalid_argument("solver: extinction_threshold must be positive");
}

FlowStepper::FlowStepper(ScalarField u0, KirchhoffCoefficient coef, SolverConfig cfg)
  : u_(std::move(u0)), coef_(std::move(coef)), cfg_(cfg), prox_(u_.domain_ptr())
{
  cfg_.validate();
  if (cfg_.mode == SolverMode::reparametrized)
    throw std::invalid_argument("FlowStepper: the reparametrised mode is a whole-trajectory construction");
}

StepResult FlowStepper::step()
{
  StepResult r{u_, 0, 0.0, true};
  if (cfg_.mode == SolverMode::direct_regularized) {
    r = step_regularized(u_, coef_, cfg_);
  } else {
    double const lambda = cfg_.dt * coef_(discrete_tv(u_));
    auto p = prox_.solve(u_, lambda, cfg_.prox_tol, cfg_.max_inner_iters);
    r = {std::move(p.field), p.iterations, p.residual, p.converged};
  }
  u_ = r.field;
  ++n_;
  t_ = static_cast<double>(n_) * cfg_.dt;
  return r;
}

StepResult step_direct(ScalarField const &u, KirchhoffCoefficient const &coef, SolverConfig const &cfg)
{
  if (cfg.mode != SolverMode::direct_prox) throw std::invalid_argument("step_direct: mode must be direct_prox");
  cfg.validate();
  double const lambda = cfg.dt * coef(discrete_tv(u));
  auto p = tv_prox(u, lambda, cfg.prox_tol, cfg.max_inner_iters);
  return {std::move(p.field), p.iterations, p.residual, p.converged};
}

StepResult step_regularized(ScalarField const &u, KirchhoffCoefficient const &coef, SolverConfig const &cfg)
{
  if (cfg.mode != SolverMode::direct_regularized)
    throw std::invalid_argument("step_regularized: mode must be direct_regularized");
  cfg.validate();
  GridDomain const &dom = u.domain();
  Index const n = dom.size();
  int const N = dom.dim();
  double const h = dom.spacing();

  Eigen::ArrayXXd grad(n, N);
  forward_gradient(u.values(), dom, grad);
  Eigen::ArrayXd const weight = (grad.square().rowwise().sum() + cfg.epsilon * cfg.epsilon).rsqrt();
  double const scale = cfg.dt * coef(dom.cell_volume() * grad.square().rowwise().sum().sqrt().sum()) / (h * h);

  std::vector<Index> unknown(n, -1);
  Index count = 0;
  for (Index c = 0; c < n; ++c)
    if (dom.inside(c)) unknown[c] = count++;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(count) * (2 * N + 1));
  Eigen::VectorXd diag = Eigen::VectorXd::Ones(count);
  for (int a = 0; a < N; ++a) {
    Index const s = dom.stride(a);
    for (Index c = 0; c + s < n; ++c) {
      Index const i = unknown[c], j = unknown[c + s];
      if (i < 0 && j < 0) continue;
      double const w = scale * weight[c];
      if (i >= 0) diag[i] += w;
      if (j >= 0) diag[j] += w;
      if (i >= 0 && j >= 0) {
        trip.emplace_back(i, j, -w);
        trip.emplace_back(j, i, -w);
      }
    }
  }
  for (Index i = 0; i < count; ++i) trip.emplace_back(i, i, diag[i]);
  Eigen::SparseMatrix<double> A(count, count);
  A.setFromTriplets(trip.begin(), trip.end());

  Eigen::VectorXd rhs(count);
  for (Index c = 0; c < n; ++c)
    if (unknown[c] >= 0) rhs[unknown[c]] = u[c];

  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(cfg.linear_tol);
  cg.setMaxIterations(cfg.max_linear_iters);
  cg.compute(A);
  Eigen::VectorXd const x = cg.solveWithGuess(rhs, rhs);
  if (cg.info() != Eigen::Success || !(cg.error() <= cfg.linear_tol))
    throw NumericalError("step_regularized: conjugate gradients did not converge", cg.error());

  Eigen::ArrayXd next = Eigen::ArrayXd::Zero(n);
  for (Index c = 0; c < n; ++c)
    if (unknown[c] >= 0) next[c] = x[unknown[c]];
  return {ScalarField(u.domain_ptr(), std::move(next)), static_cast<int>(cg.iterations()), cg.error(), true};
}

double refine_extinction(FlowTrajectory const &traj, double threshold)
{
  auto const &d = traj.diagnostics();
  auto const &t = traj.times();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!(d[i].linf < threshold)) continue;
    if (i == 0) return t[0];
    double const a = d[i - 1].linf, b = d[i].linf;
    return t[i - 1] + (a - threshold) / (a - b) * (t[i] - t[i - 1]);
  }
  throw std::runtime_error("refine_extinction: linf never falls below the threshold");
}

namespace {

struct Recorder
{
  FlowTrajectory traj;
  KirchhoffCoefficient coef;
  int stride;
  std::size_t last_snapshot = 0;

  void record(double t, ScalarField const &u, std::size_t step)
  {
    traj.append(t, measure(u, coef));
    if (step % static_cast<std::size_t>(stride) == 0) {
      traj.add_snapshot(u);
      last_snapshot = step;
    }
  }
  void finish(ScalarField const &u, std::size_t step)
  {
    if (last_snapshot != step) traj.add_snapshot(u);
  }
  void note(StepResult const &r)
  {
    if (!r.converged) ++traj.prox_warnings;
    traj.worst_prox_residual = std::max(traj.worst_prox_residual, r.converged ? 0.0 : r.residual);
  }
};

std::size_t step_count(SolverConfig const &cfg)
{
  return static_cast<std::size_t>(std::floor(cfg.horizon / cfg.dt * (1.0 + 1e-12)));
}

FlowTrajectory solve_direct(ScalarField const &u0, KirchhoffCoefficient const &coef, SolverConfig const &cfg)
{
  Recorder rec{FlowTrajectory(u0.domain_ptr()), coef, cfg.snapshot_stride};
  rec.record(0.0, u0, 0);
  double const threshold = cfg.extinction_threshold * field_norms(u0).linf;
  if (threshold == 0.0) {
    rec.traj.extinction_time = 0.0;
    return std::move(rec.traj);
  }
  FlowStepper stepper(u0, coef, cfg);
  std::size_t const steps = step_count(cfg);
  for (std::size_t n = 1; n <= steps; ++n) {
    rec.note(stepper.step());
    rec.record(stepper.time(), stepper.current(), n);
    if (rec.traj.diagnostics().back().linf < threshold) {
      rec.traj.extinction_time = refine_extinction(rec.traj, threshold);
      break;
    }
  }
  rec.finish(stepper.current(), stepper.steps_taken());
  return std::move(rec.traj);
}

FlowTrajectory solve_reparametrized(ScalarField const &u0, KirchhoffCoefficient const &coef, SolverConfig const &cfg)
{
  double const threshold = cfg.extinction_threshold * field_norms(u0).linf;
  if (threshold == 0.0) {
    FlowTrajectory traj(u0.domain_ptr());
    traj.append(0.0, measure(u0, coef));
    traj.add_snapshot(u0);
    traj.extinction_time = 0.0;
    return traj;
  }

  // Pass 1: plain TV flow, diagnostics only. φ <= m(Φ(u0)) bounds how far α reaches.
  auto const unit = KirchhoffCoefficient::constant(1.0);
  SolverConfig base_cfg = cfg;
  base_cfg.mode = SolverMode::direct_prox;
  base_cfg.horizon = 1.1 * cfg.horizon * coef(discrete_tv(u0)) + cfg.dt;
  base_cfg.snapshot_stride = std::numeric_limits<int>::max();
  FlowTrajectory const base = solve_direct(u0, unit, base_cfg);
  TimeMap const alpha = solve_alpha(build_phi_from_trajectory(base, coef), cfg.horizon, cfg.alpha_tol);

  // Pass 2: replay the base flow and sample v(α(t_n)).
  Recorder rec{FlowTrajectory(u0.domain_ptr()), coef, cfg.snapshot_stride};
  rec.record(0.0, u0, 0);
  FlowStepper stepper(u0, unit, base_cfg);
  ScalarField prev = u0;
  bool base_extinct = false;
  std::size_t const steps = step_count(cfg);
  std::size_t n = 1;
  ScalarField u = u0;
  for (; n <= steps; ++n) {
    double const t = static_cast<double>(n) * cfg.dt;
    double const s = alpha(t);
    while (!base_extinct && stepper.time() < s) {
      prev = stepper.current();
      rec.note(stepper.step());
      base_extinct = field_norms(stepper.current()).linf < threshold;
      if (!base_extinct && stepper.steps_taken() >= base.size() + 1)
        throw NumericalError("reparametrized solve: time map outruns the base flow", s);
    }
    if (stepper.time() <= s) {
      u = stepper.current();
    } else {
      double const t1 = stepper.time(), t0 = t1 - cfg.dt;
      double const theta = std::clamp((s - t0) / (t1 - t0), 0.0, 1.0);
      u = ScalarField(u0.domain_ptr(), (1.0 - theta) * prev.values() + theta * stepper.current().values());
    }
    rec.record(t, u, n);
    if (rec.traj.diagnostics().back().linf < threshold) {
      rec.traj.extinction_time = refine_extinction(rec.traj, threshold);
      break;
    }
  }
  rec.finish(u, std::min(n, steps));
  return std::move(rec.traj);
}

} // namespace

FlowTrajectory solve_flow(ScalarField const &u0, KirchhoffCoefficient const &coef, SolverConfig const &cfg)
{
  cfg.validate();
  if (cfg.mode == SolverMode::reparametrized) return solve_reparametrized(u0, coef, cfg);
  return solve_direct(u0, coef, cfg);
}

} // namespace ktv
