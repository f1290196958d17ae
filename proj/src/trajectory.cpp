#include "ktv/trajectory.hpp"
#include "ktv/tv.hpp"

#include <cmath>
#include <stdexcept>

namespace ktv {

Diagnostics measure(ScalarField const &u, KirchhoffCoefficient const &coef)
{
  Diagnostics d;
  auto const n = field_norms(u);
  d.tv = discrete_tv(u);
  d.linf = n.linf;
  d.lN = n.lN;
  d.l2 = n.l2;
  d.energy = coef.antiderivative(d.tv);
  d.max = u.values().maxCoeff();
  d.min = u.values().minCoeff();
  d.support_radius = support_radius(u);
  return d;
}

void FlowTrajectory::append(double t, Diagnostics const &d)
{
  if (times_.empty() ? t != 0.0 : !(t > times_.back()))
    throw std::invalid_argument("FlowTrajectory: times must start at 0 and increase strictly");
  times_.push_back(t);
  diag_.push_back(d);
}

void FlowTrajectory::add_snapshot(ScalarField field)
{
  if (times_.empty()) throw std::logic_error("FlowTrajectory: snapshot before any time sample");
  if (field.domain().size() != domain_->size()) throw std::invalid_argument("FlowTrajectory: snapshot on a different grid");
  snapshots_.push_back({times_.size() - 1, std::move(field)});
}

std::string to_string(CheckStatus s)
{
  switch (s) {
  case CheckStatus::pass: return "pass";
  case CheckStatus::fail: return "fail";
  case CheckStatus::inconclusive: return "inconclusive";
  }
  return "unknown";
}

void VerificationReport::conclude()
{
  status = worst_margin >= -tolerance ? CheckStatus::pass : CheckStatus::fail;
}

} // namespace ktv
