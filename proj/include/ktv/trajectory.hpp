#pragma once

#include "ktv/coefficient.hpp"
#include "ktv/core.hpp"

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ktv {

/// Per-time scalar summary of a field.
struct Diagnostics
{
  double tv = 0.0;     // Φ: total variation including the boundary jump
  double linf = 0.0;
  double lN = 0.0;
  double l2 = 0.0;
  double energy = 0.0; // M(Φ)
  double max = 0.0;
  double min = 0.0;
  double support_radius = 0.0;
};

Diagnostics measure(ScalarField const &u, KirchhoffCoefficient const &coef);

struct Snapshot
{
  std::size_t step = 0; // index into FlowTrajectory::times
  ScalarField field;
};

/// Time-stamped diagnostics at every step plus field snapshots at a stride.
class FlowTrajectory
{
public:
  explicit FlowTrajectory(DomainPtr domain) : domain_(std::move(domain)) {}

  DomainPtr const &domain_ptr() const noexcept { return domain_; }
  GridDomain const &domain() const noexcept { return *domain_; }

  /// Appends a time sample; times must be strictly increasing and start at 0.
  void append(double t, Diagnostics const &d);
  void add_snapshot(ScalarField field);

  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }
  std::vector<double> const &times() const noexcept { return times_; }
  std::vector<Diagnostics> const &diagnostics() const noexcept { return diag_; }
  std::vector<Snapshot> const &snapshots() const noexcept { return snapshots_; }
  double snapshot_time(Snapshot const &s) const { return times_.at(s.step); }

  std::optional<double> extinction_time;

  // Inexact inner solves, if any, are summarised here.
  int prox_warnings = 0;
  double worst_prox_residual = 0.0;

private:
  DomainPtr domain_;
  std::vector<double> times_;
  std::vector<Diagnostics> diag_;
  std::vector<Snapshot> snapshots_;
};

enum class CheckStatus { pass, fail, inconclusive };
std::string to_string(CheckStatus s);

struct SampleRecord
{
  double t = 0.0;
  double measured = 0.0;
  double bound = 0.0;
  double margin = 0.0; // signed slack, negative when violated
};

struct VerificationReport
{
  std::string check_name;
  CheckStatus status = CheckStatus::inconclusive;
  double worst_margin = std::numeric_limits<double>::quiet_NaN();
  double tolerance = 0.0;
  std::vector<SampleRecord> details;
  std::map<std::string, double> metrics;
  std::string message;

  bool passed() const noexcept { return status == CheckStatus::pass; }
  /// Sets the status from worst_margin >= -tolerance.
  void conclude();
};

} // namespace ktv
