#pragma once

// Run configuration: `key = value` lines with `#` comments.

#include "ktv/analytic.hpp"
#include "ktv/coefficient.hpp"
#include "ktv/core.hpp"
#include "ktv/solver.hpp"
#include "ktv/verify.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ktv {

enum class Command { solve, analytic, verify, sweep };
std::string to_string(Command c);
Command parse_command(std::string const &name);

/// Malformed or incomplete configuration; the message carries the line number
/// when one applies.
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct RunConfig
{
  // domain
  int dim = 0;
  double h = 0.0;
  std::string domain = "ball";
  double radius = 0.0;
  std::array<double, 3> half_widths{};

  // initial datum: k·χ_{B_r0} or zero
  std::string initial = "indicator";
  std::optional<double> r0;
  double k = 1.0;

  // coefficient
  CoefficientFamily family = CoefficientFamily::affine;
  double c = 1.0;
  double p = 2.0;
  std::vector<std::pair<double, double>> table;
  std::optional<double> mu;

  // solver
  SolverMode mode = SolverMode::direct_prox;
  std::optional<double> dt;
  double epsilon = 1e-3;
  double prox_tol = 1e-5;
  int max_inner_iters = 20000;
  double extinction_threshold = 1e-6;
  std::optional<double> horizon;
  int snapshot_stride = 10;
  double linear_tol = 1e-8;
  double alpha_tol = 1e-9;

  // verification
  CheckSuiteConfig checks;
  std::optional<double> bound_k, bound_r;

  // analytic output
  int samples = 201;

  // sweep
  std::string sweep_key;
  std::vector<std::string> sweep_values;

  std::string out = "out";
  std::string trajectory; // verify: directory of a previous solve to load

  DomainPtr make_domain() const;
  ScalarField initial_field(DomainPtr const &domain) const;
  KirchhoffCoefficient coefficient() const;
  double initial_radius() const { return r0.value_or(0.5 * radius); }
  /// dt defaults to h/8; the horizon to 1.1 times the extinction bound plus one step.
  SolverConfig solver_config(GridDomain const &domain, ScalarField const &u0) const;
  /// Reference ball for the lower-bound and support checks.
  std::optional<RadialSolutionSpec> bound_spec() const;
  /// The explicit radial solution started from the initial datum.
  RadialSolutionSpec radial_spec() const;

  /// Throws ConfigError naming every key `cmd` needs but which is unset.
  void require(Command cmd) const;

  friend bool operator==(RunConfig const &, RunConfig const &) = default;
};

/// Parses and validates. Value errors are reported before missing keys.
RunConfig parse_config(std::string const &text);
/// Renders every key, so that parse_config(render(c)) == c.
std::string render(RunConfig const &cfg);
/// Copy of `cfg` with one key replaced, re-validated.
RunConfig with_override(RunConfig const &cfg, std::string const &key, std::string const &value);

/// Human-readable table of keys, defaults and meanings.
std::string config_reference();

} // namespace ktv
