#include "ktv/timechange.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ktv {

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
  : x_(std::move(x)), y_(std::move(y)), d_(x_.size(), 0.0)
{
  if (x_.size() != y_.size() || x_.empty()) throw std::invalid_argument("MonotoneCubic: bad sample arrays");
  std::size_t const n = x_.size();
  if (n == 1) return;
  std::vector<double> delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(x_[i + 1] > x_[i])) throw std::invalid_argument("MonotoneCubic: knots must increase strictly");
    delta[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
  }
  d_.front() = delta.front();
  d_.back() = delta.back();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) continue;
    double const h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
    double const w1 = 2.0 * h1 + h0, w2 = h1 + 2.0 * h0;
    d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
  }
  limit();
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y, std::vector<double> slopes)
  : x_(std::move(x)), y_(std::move(y)), d_(std::move(slopes))
{
  if (x_.size() != y_.size() || x_.size() != d_.size() || x_.empty())
    throw std::invalid_argument("MonotoneCubic: bad sample arrays");
  for (std::size_t i = 0; i + 1 < x_.size(); ++i)
    if (!(x_[i + 1] > x_[i])) throw std::invalid_argument("MonotoneCubic: knots must increase strictly");
  limit();
}

void MonotoneCubic::limit()
{
  for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
    double const delta = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    if (delta == 0.0) {
      d_[i] = d_[i + 1] = 0.0;
      continue;
    }
    double a = d_[i] / delta, b = d_[i + 1] / delta;
    if (a < 0.0) d_[i] = a = 0.0;
    if (b < 0.0) d_[i + 1] = b = 0.0;
    double const s = a * a + b * b;
    if (s > 9.0) {
      double const tau = 3.0 / std::sqrt(s);
      d_[i] = tau * a * delta;
      d_[i + 1] = tau * b * delta;
    }
  }
}

double MonotoneCubic::operator()(double x) const
{
  if (x_.empty()) throw std::logic_error("MonotoneCubic: empty interpolant");
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  auto const it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t const i = static_cast<std::size_t>(it - x_.begin()) - 1;
  double const h = x_[i + 1] - x_[i];
  double const s = (x - x_[i]) / h;
  double const s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y_[i] + (s3 - 2 * s2 + s) * h * d_[i] + (-2 * s3 + 3 * s2) * y_[i + 1] +
         (s3 - s2) * h * d_[i + 1];
}

Phi build_phi_analytic(RadialSolutionSpec const &base, KirchhoffCoefficient const &coef)
{
  base.validate();
  int const N = base.dim;
  double const r = base.r, k = base.k, per = base.perimeter();
  return [=](double s) { return coef(base_radial_amplitude(N, r, k, std::max(s, 0.0)) * per); };
}

Phi build_phi_from_trajectory(FlowTrajectory const &traj, KirchhoffCoefficient const &coef)
{
  if (traj.empty()) throw std::invalid_argument("build_phi_from_trajectory: empty trajectory");
  std::vector<double> tv;
  tv.reserve(traj.size());
  for (auto const &d : traj.diagnostics()) tv.push_back(d.tv);
  auto interp = std::make_shared<MonotoneCubic const>(traj.times(), std::move(tv));
  return [interp, coef](double s) { return coef(std::max((*interp)(s), 0.0)); };
}

namespace {

double checked(Phi const &phi, double s)
{
  double const v = phi(s);
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("time change: phi must stay positive");
  return v;
}

double simpson_rec(Phi const &phi, double a, double b, double fa, double fm, double fb, double whole, double tol,
                   int depth)
{
  double const m = 0.5 * (a + b);
  double const lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double const flm = 1.0 / checked(phi, lm), frm = 1.0 / checked(phi, rm);
  double const left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double const right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double const diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return simpson_rec(phi, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(phi, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_inverse(Phi const &phi, double a, double b, double tol)
{
  if (b == a) return 0.0;
  double const fa = 1.0 / checked(phi, a), fb = 1.0 / checked(phi, b);
  double const fm = 1.0 / checked(phi, 0.5 * (a + b));
  double const whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(phi, a, b, fa, fm, fb, whole, tol, 50);
}

} // namespace

double psi(Phi const &phi, double s, double tol)
{
  if (s < 0.0) throw std::invalid_argument("psi: requires s >= 0");
  // split so that kinks in φ are resolved by the recursion on each piece
  int const pieces = 16;
  double acc = 0.0;
  for (int i = 0; i < pieces; ++i)
    acc += integrate_inverse(phi, s * i / pieces, s * (i + 1) / pieces, tol / pieces);
  return acc;
}

TimeMap::TimeMap(std::vector<double> t, std::vector<double> alpha, std::vector<double> slope, std::string source)
  : t_(t), alpha_(alpha), interp_(std::move(t), std::move(alpha), std::move(slope)), source_(std::move(source))
{
  if (t_.empty() || t_.front() != 0.0 || alpha_.front() != 0.0)
    throw std::invalid_argument("TimeMap: must start at alpha(0) = 0");
  for (std::size_t i = 1; i < alpha_.size(); ++i)
    if (!(alpha_[i] > alpha_[i - 1])) throw std::invalid_argument("TimeMap: alpha must increase strictly");
}

double TimeMap::operator()(double t) const
{
  if (t < 0.0 || t > t_end() * (1.0 + 1e-12)) throw std::out_of_range("TimeMap: query outside [0, t_end]");
  return interp_(t);
}

TimeMap alpha_by_ode(Phi const &phi, double t_end, double tol)
{
  if (!(t_end > 0.0)) throw std::invalid_argument("solve_alpha: t_end must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_alpha: tol must be positive");
  auto rk4 = [&](double a, double dt) {
    double const k1 = checked(phi, a);
    double const k2 = checked(phi, a + 0.5 * dt * k1);
    double const k3 = checked(phi, a + 0.5 * dt * k2);
    double const k4 = checked(phi, a + dt * k3);
    return a + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };

  std::vector<double> ts{0.0}, as{0.0}, ds{checked(phi, 0.0)};
  double const max_dt = t_end / 64.0;
  double t = 0.0, a = 0.0, dt = t_end / 1024.0;
  while (t < t_end) {
    bool const last = dt >= t_end - t;
    double const step = last ? t_end - t : dt;
    double const coarse = rk4(a, step);
    double const fine = rk4(rk4(a, 0.5 * step), 0.5 * step);
    double const err = std::abs(fine - coarse) / 15.0;
    double const allowed = 0.1 * tol * step / t_end;
    if (err <= allowed) {
      t = last ? t_end : t + step;
      a = fine + (fine - coarse) / 15.0;
      ts.push_back(t);
      as.push_back(a);
      ds.push_back(checked(phi, a));
    }
    double const factor = err > 0.0 ? 0.9 * std::pow(allowed / err, 0.2) : 5.0;
    dt = std::min(max_dt, step * std::clamp(factor, 0.2, 5.0));
    if (dt < 1e-14 * t_end) throw NumericalError("solve_alpha: step size underflow", err);
  }
  return TimeMap(std::move(ts), std::move(as), std::move(ds), "ode");
}

std::vector<double> alpha_by_quadrature(Phi const &phi, std::span<double const> times, double tol)
{
  std::vector<double> out;
  out.reserve(times.size());
  double s_prev = 0.0, psi_prev = 0.0;
  double const itol = 1e-3 * tol;
  for (double t : times) {
    if (t < psi_prev) throw std::invalid_argument("alpha_by_quadrature: times must be nondecreasing from 0");
    if (t == psi_prev) {
      out.push_back(s_prev);
      continue;
    }
    auto F = [&](double s) { return psi_prev + integrate_inverse(phi, s_prev, s, itol) - t; };
    double lo = s_prev, hi = s_prev + (t - psi_prev) * checked(phi, s_prev);
    double fhi = F(hi);
    while (fhi < 0.0) {
      lo = hi;
      hi = s_prev + 2.0 * (hi - s_prev);
      fhi = F(hi);
    }
    double s = hi;
    for (int it = 0; it < 200; ++it) {
      double const f = F(s);
      if (f > 0.0) hi = s;
      else lo = s;
      double next = s - f * checked(phi, s);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - s) <= 1e-2 * tol || hi - lo <= 1e-2 * tol) {
        s = next;
        break;
      }
      s = next;
    }
    psi_prev += integrate_inverse(phi, s_prev, s, itol);
    s_prev = s;
    out.push_back(s);
  }
  return out;
}

TimeMap solve_alpha(Phi const &phi, double t_end, double tol)
{
  TimeMap map = alpha_by_ode(phi, t_end, 0.1 * tol);
  auto const quad = alpha_by_quadrature(phi, map.sample_times(), 0.1 * tol);
  double gap = 0.0;
  for (std::size_t i = 0; i < quad.size(); ++i) gap = std::max(gap, std::abs(quad[i] - map.sample_values()[i]));
  map.route_gap = gap;
  if (gap > tol) throw NumericalError("solve_alpha: ODE and quadrature routes disagree", gap);
  return map;
}

namespace {

void check_query(TimeMap const &alpha, std::span<double const> query_times)
{
  if (query_times.empty()) throw std::invalid_argument("compose: no query times");
  if (query_times.back() > alpha.t_end() * (1.0 + 1e-12)) throw std::out_of_range("compose: query beyond the time map");
}

} // namespace

FlowTrajectory compose(FlowTrajectory const &base, TimeMap const &alpha, std::span<double const> query_times,
                       KirchhoffCoefficient const &coef)
{
  check_query(alpha, query_times);
  auto const &snaps = base.snapshots();
  if (snaps.empty() || base.snapshot_time(snaps.front()) != 0.0)
    throw std::invalid_argument("compose: base trajectory needs a snapshot at time 0");
  std::vector<double> st;
  for (auto const &s : snaps) st.push_back(base.snapshot_time(s));

  FlowTrajectory out(base.domain_ptr());
  for (double tq : query_times) {
    double const s = alpha(tq);
    Eigen::ArrayXd v;
    if (s >= st.back()) {
      if (s > st.back() * (1.0 + 1e-12) && !base.extinction_time)
        throw std::out_of_range("compose: alpha(t) runs past the base trajectory");
      v = snaps.back().field.values();
    } else {
      auto const it = std::upper_bound(st.begin(), st.end(), s);
      std::size_t const j = static_cast<std::size_t>(it - st.begin());
      double const theta = (s - st[j - 1]) / (st[j] - st[j - 1]);
      v = (1.0 - theta) * snaps[j - 1].field.values() + theta * snaps[j].field.values();
    }
    ScalarField u(base.domain_ptr(), std::move(v));
    out.append(tq, measure(u, coef));
    out.add_snapshot(std::move(u));
  }
  return out;
}

FlowTrajectory compose(RadialSolutionSpec const &base, DomainPtr domain, TimeMap const &alpha,
                       std::span<double const> query_times, KirchhoffCoefficient const &coef)
{
  check_query(alpha, query_times);
  base.validate();
  FlowTrajectory out(domain);
  for (double tq : query_times) {
    ScalarField u = indicator_field(domain, base.r, base_radial_amplitude(base.dim, base.r, base.k, alpha(tq)));
    out.append(tq, measure(u, coef));
    out.add_snapshot(std::move(u));
  }
  return out;
}

} // namespace ktv
