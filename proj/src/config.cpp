#include "ktv/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace ktv {

std::string to_string(Command c)
{
  switch (c) {
  case Command::solve: return "solve";
  case Command::analytic: return "analytic";
  case Command::verify: return "verify";
  case Command::sweep: return "sweep";
  }
  return "unknown";
}

Command parse_command(std::string const &name)
{
  for (Command c : {Command::solve, Command::analytic, Command::verify, Command::sweep})
    if (to_string(c) == name) return c;
  throw std::invalid_argument("unknown command '" + name + "'");
}

namespace {

std::string trim(std::string_view s)
{
  auto const b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto const e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string const &s, char sep)
{
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Bad values surface as std::invalid_argument and are rewrapped with the line number.
double parse_real(std::string const &s)
{
  auto const slash = s.find('/');
  if (slash != std::string::npos) {
    double const q = parse_real(trim(s.substr(0, slash))) / parse_real(trim(s.substr(slash + 1)));
    if (!std::isfinite(q)) throw std::invalid_argument("expected a real number, got '" + s + "'");
    return q;
  }
  double v = 0.0;
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw std::invalid_argument("expected a real number, got '" + s + "'");
  return v;
}

int parse_int(std::string const &s)
{
  int v = 0;
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::invalid_argument("expected an integer, got '" + s + "'");
  return v;
}

std::string join(std::vector<std::string> const &v, char const *sep = ", ")
{
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

struct Key
{
  char const *name;
  char const *fallback; // shown in the reference
  char const *help;
  std::function<void(RunConfig &, std::string const &)> set;
  std::function<std::optional<std::string>(RunConfig const &)> get;
};

template <typename F> auto real_key(char const *name, char const *fallback, char const *help, F field)
{
  return Key{name, fallback, help, [field](RunConfig &c, std::string const &v) { field(c) = parse_real(v); },
             [field](RunConfig const &c) -> std::optional<std::string> {
               return fmt(field(c));
             }};
}

template <typename F> auto opt_real_key(char const *name, char const *fallback, char const *help, F field)
{
  return Key{name, fallback, help, [field](RunConfig &c, std::string const &v) { field(c) = parse_real(v); },
             [field](RunConfig const &c) -> std::optional<std::string> {
               auto const &o = field(c);
               if (!o) return std::nullopt;
               return fmt(*o);
             }};
}

template <typename F> auto int_key(char const *name, char const *fallback, char const *help, F field)
{
  return Key{name, fallback, help, [field](RunConfig &c, std::string const &v) { field(c) = parse_int(v); },
             [field](RunConfig const &c) -> std::optional<std::string> {
               return std::to_string(field(c));
             }};
}

std::vector<Key> const &keys()
{
  static std::vector<Key> const table{
    int_key("dim", "required", "spatial dimension N (1, 2 or 3)", [](auto &c) -> auto & { return c.dim; }),
    real_key("h", "required", "grid spacing; fractions such as 1/128 are accepted",
             [](auto &c) -> auto & { return c.h; }),
    Key{"domain", "ball", "ball | box",
        [](RunConfig &c, std::string const &v) {
          if (v != "ball" && v != "box") throw std::invalid_argument("expected ball or box, got '" + v + "'");
          c.domain = v;
        },
        [](RunConfig const &c) -> std::optional<std::string> { return c.domain; }},
    Key{"radius", "required for ball", "radius of the ball domain",
        [](RunConfig &c, std::string const &v) { c.radius = parse_real(v); },
        [](RunConfig const &c) -> std::optional<std::string> {
          if (c.domain == "box") return std::nullopt;
          return fmt(c.radius);
        }},
    Key{"half_widths", "required for box", "comma-separated half widths of the box domain",
        [](RunConfig &c, std::string const &v) {
          auto const parts = split(v, ',');
          if (parts.empty() || parts.size() > 3) throw std::invalid_argument("expected 1 to 3 half widths");
          c.half_widths = {0.0, 0.0, 0.0};
          for (std::size_t i = 0; i < parts.size(); ++i) c.half_widths[i] = parse_real(parts[i]);
        },
        [](RunConfig const &c) -> std::optional<std::string> {
          if (c.domain != "box") return std::nullopt;
          std::vector<std::string> parts;
          for (int a = 0; a < std::max(c.dim, 1); ++a) parts.push_back(fmt(c.half_widths[a]));
          return join(parts);
        }},
    Key{"initial", "indicator", "indicator (k on the ball of radius r0) | zero",
        [](RunConfig &c, std::string const &v) {
          if (v != "indicator" && v != "zero")
            throw std::invalid_argument("expected indicator or zero, got '" + v + "'");
          c.initial = v;
        },
        [](RunConfig const &c) -> std::optional<std::string> { return c.initial; }},
    opt_real_key("r0", "radius/2", "radius of the initial indicator",
                 [](auto &c) -> auto & { return c.r0; }),
    real_key("k", "1", "height of the initial indicator", [](auto &c) -> auto & { return c.k; }),
    Key{"m", "required", "coefficient family: constant | affine | power | tabulated",
        [](RunConfig &c, std::string const &v) { c.family = parse_family(v); },
        [](RunConfig const &c) -> std::optional<std::string> { return to_string(c.family); }},
    real_key("c", "1", "value of the constant coefficient", [](auto &c) -> auto & { return c.c; }),
    real_key("p", "2", "exponent of the power coefficient (1 + s)^p", [](auto &c) -> auto & { return c.p; }),
    Key{"table", "none", "tabulated coefficient as s:m pairs, e.g. 0:1, 1:2, 4:3",
        [](RunConfig &c, std::string const &v) {
          c.table.clear();
          for (auto const &pair : split(v, ',')) {
            auto const colon = pair.find(':');
            if (colon == std::string::npos) throw std::invalid_argument("expected s:m, got '" + pair + "'");
            c.table.emplace_back(parse_real(trim(pair.substr(0, colon))), parse_real(trim(pair.substr(colon + 1))));
          }
        },
        [](RunConfig const &c) -> std::optional<std::string> {
          if (c.table.empty()) return std::nullopt;
          std::vector<std::string> parts;
          for (auto const &[s, m] : c.table) parts.push_back(fmt(s) + ":" + fmt(m));
          return join(parts);
        }},
    opt_real_key("mu", "family value", "growth constant of M(s) >= mu m(s) s; needed for tabulated m",
                 [](auto &c) -> auto & { return c.mu; }),
    Key{"mode", "direct_prox", "direct_prox | direct_regularized | reparametrized",
        [](RunConfig &c, std::string const &v) { c.mode = parse_mode(v); },
        [](RunConfig const &c) -> std::optional<std::string> { return to_string(c.mode); }},
    opt_real_key("dt", "h/8", "time step", [](auto &c) -> auto & { return c.dt; }),
    real_key("epsilon", "1e-3", "regularisation of |grad u| in direct_regularized mode",
             [](auto &c) -> auto & { return c.epsilon; }),
    real_key("prox_tol", "1e-5", "fixed-point residual of the dual prox iteration",
             [](auto &c) -> auto & { return c.prox_tol; }),
    int_key("max_inner_iters", "20000", "iteration cap of the prox solver",
            [](auto &c) -> auto & { return c.max_inner_iters; }),
    real_key("extinction_threshold", "1e-6", "extinction when max|u| < threshold * max|u0|",
             [](auto &c) -> auto & { return c.extinction_threshold; }),
    opt_real_key("horizon", "1.1 * extinction bound + dt", "final time",
                 [](auto &c) -> auto & { return c.horizon; }),
    int_key("snapshot_stride", "10", "steps between field snapshots",
            [](auto &c) -> auto & { return c.snapshot_stride; }),
    real_key("linear_tol", "1e-8", "conjugate-gradient tolerance in direct_regularized mode",
             [](auto &c) -> auto & { return c.linear_tol; }),
    real_key("alpha_tol", "1e-9", "time-map accuracy in reparametrized mode",
             [](auto &c) -> auto & { return c.alpha_tol; }),
    Key{"checks", "all", "comma-separated subset of the verification checks",
        [](RunConfig &c, std::string const &v) { c.checks.checks = v == "all" ? CheckSuiteConfig::all_checks() : split(v, ','); },
        [](RunConfig const &c) -> std::optional<std::string> { return join(c.checks.checks, ","); }},
    real_key("max_principle_tol", "1e-12", "", [](auto &c) -> auto & { return c.checks.max_principle_tol; }),
    real_key("energy_tol", "1e-6", "slack of the energy check, at least 10 prox_tol", [](auto &c) -> auto & { return c.checks.energy_tol; }),
    real_key("comparison_tol", "1e-12", "", [](auto &c) -> auto & { return c.checks.comparison_tol; }),
    real_key("lower_bound_tol", "0.05", "absolute slack of the amplitude lower bound",
             [](auto &c) -> auto & { return c.checks.lower_bound_tol; }),
    real_key("derivative_tol", "1e-6", "relative slack of the derivative bound",
             [](auto &c) -> auto & { return c.checks.derivative_tol; }),
    real_key("decay_r2", "0.98", "minimum R^2 of the linear decay fit",
             [](auto &c) -> auto & { return c.checks.decay_r2; }),
    int_key("support_halo_cells", "2", "cells of support growth tolerated",
            [](auto &c) -> auto & { return c.checks.support_halo_cells; }),
    real_key("derivative_t_min", "10 dt", "first time sampled by the derivative bound",
             [](auto &c) -> auto & { return c.checks.derivative_t_min; }),
    int_key("check_stride", "1", "sampling stride over trajectory times",
            [](auto &c) -> auto & { return c.checks.stride; }),
    opt_real_key("bound_k", "k", "height of the reference indicator for lower bounds",
                 [](auto &c) -> auto & { return c.bound_k; }),
    opt_real_key("bound_r", "r0", "radius of the reference indicator for lower bounds and support",
                 [](auto &c) -> auto & { return c.bound_r; }),
    int_key("samples", "201", "rows of the analytic amplitude table", [](auto &c) -> auto & { return c.samples; }),
    Key{"sweep_key", "required for sweep", "key varied by the sweep command",
        [](RunConfig &c, std::string const &v) { c.sweep_key = v; },
        [](RunConfig const &c) -> std::optional<std::string> {
          if (c.sweep_key.empty()) return std::nullopt;
          return c.sweep_key;
        }},
    Key{"sweep_values", "required for sweep", "comma-separated values of sweep_key",
        [](RunConfig &c, std::string const &v) { c.sweep_values = split(v, ','); },
        [](RunConfig const &c) -> std::optional<std::string> {
          if (c.sweep_values.empty()) return std::nullopt;
          return join(c.sweep_values);
        }},
    Key{"out", "out", "output directory", [](RunConfig &c, std::string const &v) { c.out = v; },
        [](RunConfig const &c) -> std::optional<std::string> { return c.out; }},
    Key{"trajectory", "none", "verify: directory written by a previous solve",
        [](RunConfig &c, std::string const &v) { c.trajectory = v; },
        [](RunConfig const &c) -> std::optional<std::string> {
          if (c.trajectory.empty()) return std::nullopt;
          return c.trajectory;
        }},
  };
  return table;
}

Key const *find_key(std::string const &name)
{
  for (auto const &k : keys())
    if (name == k.name) return &k;
  return nullptr;
}

struct Entry
{
  std::string key, value;
  int line = 0;
};

std::vector<Entry> parse_entries(std::string const &text)
{
  std::vector<Entry> out;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto const hash = raw.find('#');
    std::string const s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    auto const eq = s.find('=');
    auto const where = "line " + std::to_string(line) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    Entry e{trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line};
    if (!find_key(e.key)) throw ConfigError(where + "unknown key '" + e.key + "'");
    if (e.value.empty()) throw ConfigError(where + "empty value for '" + e.key + "'");
    if (!seen.insert(e.key).second) throw ConfigError(where + "duplicate key '" + e.key + "'");
    out.push_back(std::move(e));
  }
  return out;
}

RunConfig build(std::vector<Entry> const &entries)
{
  RunConfig cfg;
  std::map<std::string, int> line_of;
  for (auto const &e : entries) {
    try {
      find_key(e.key)->set(cfg, e.value);
    } catch (std::exception const &ex) {
      throw ConfigError("line " + std::to_string(e.line) + ": " + e.key + ": " + ex.what());
    }
    line_of[e.key] = e.line;
  }
  auto has = [&](char const *k) { return line_of.count(k) > 0; };
  auto fail = [&](char const *k, std::string const &msg) {
    std::string const where = has(k) ? "line " + std::to_string(line_of[k]) + ": " : "";
    throw ConfigError(where + msg);
  };

  if (has("dim") && (cfg.dim < 1 || cfg.dim > 3)) fail("dim", "dim must be 1, 2 or 3");
  if (has("h") && !(cfg.h > 0.0)) fail("h", "h must be positive");
  if (has("radius") && !(cfg.radius > 0.0)) fail("radius", "radius must be positive");
  if (has("half_widths"))
    for (int a = 0; a < std::max(cfg.dim, 1); ++a)
      if (!(cfg.half_widths[a] > 0.0)) fail("half_widths", "half_widths needs a positive entry per axis");
  if (cfg.r0 && !(*cfg.r0 > 0.0)) fail("r0", "r0 must be positive");
  if (!(cfg.k >= 0.0)) fail("k", "k must be non-negative");
  if (cfg.family == CoefficientFamily::power && !(cfg.p > 1.0)) fail("p", "power family requires p > 1");
  if (cfg.family == CoefficientFamily::constant && !(cfg.c > 0.0)) fail("c", "constant coefficient must be positive");
  if (cfg.family == CoefficientFamily::tabulated && has("table")) {
    try {
      (void)KirchhoffCoefficient::tabulated(cfg.table);
    } catch (std::exception const &ex) {
      fail("table", ex.what());
    }
  }
  if (cfg.mu && !(*cfg.mu > 0.0 && *cfg.mu <= 1.0)) fail("mu", "mu must lie in (0, 1]");
  if (cfg.dt && !(*cfg.dt > 0.0)) fail("dt", "dt must be positive");
  if (cfg.horizon && !(*cfg.horizon > 0.0)) fail("horizon", "horizon must be positive");
  if (!(cfg.epsilon > 0.0)) fail("epsilon", "epsilon must be positive");
  if (!(cfg.prox_tol > 0.0)) fail("prox_tol", "prox_tol must be positive");
  if (cfg.max_inner_iters < 1) fail("max_inner_iters", "max_inner_iters must be at least 1");
  if (!(cfg.extinction_threshold > 0.0 && cfg.extinction_threshold < 1.0))
    fail("extinction_threshold", "extinction_threshold must lie in (0, 1)");
  if (cfg.snapshot_stride < 1) fail("snapshot_stride", "snapshot_stride must be at least 1");
  if (!(cfg.linear_tol > 0.0)) fail("linear_tol", "linear_tol must be positive");
  if (!(cfg.alpha_tol > 0.0)) fail("alpha_tol", "alpha_tol must be positive");
  if (cfg.samples < 2) fail("samples", "samples must be at least 2");
  if (cfg.bound_k && !(*cfg.bound_k >= 0.0)) fail("bound_k", "bound_k must be non-negative");
  if (cfg.bound_r && !(*cfg.bound_r > 0.0)) fail("bound_r", "bound_r must be positive");
  try {
    cfg.checks.validate();
  } catch (std::exception const &ex) {
    fail("checks", ex.what());
  }
  if (has("sweep_key")) {
    if (!find_key(cfg.sweep_key) || cfg.sweep_key == "sweep_key" || cfg.sweep_key == "sweep_values" ||
        cfg.sweep_key == "out")
      fail("sweep_key", "cannot sweep over '" + cfg.sweep_key + "'");
  }

  std::vector<std::string> missing;
  for (char const *k : {"dim", "h", "m"})
    if (!has(k)) missing.push_back(k);
  if (cfg.domain == "ball" && !has("radius")) missing.push_back("radius");
  if (cfg.domain == "box" && !has("half_widths")) missing.push_back("half_widths");
  if (cfg.family == CoefficientFamily::tabulated && !has("table")) missing.push_back("table");
  if (!missing.empty()) throw ConfigError("missing required keys: " + join(missing));
  return cfg;
}

} // namespace

DomainPtr RunConfig::make_domain() const
{
  if (domain == "box") return make_box_domain(dim, half_widths, h);
  return make_ball_domain(dim, radius, h);
}

ScalarField RunConfig::initial_field(DomainPtr const &dom) const
{
  if (initial == "zero") return ScalarField(dom);
  return indicator_field(dom, initial_radius(), k);
}

KirchhoffCoefficient RunConfig::coefficient() const
{
  KirchhoffCoefficient m = [&] {
    switch (family) {
    case CoefficientFamily::constant: return KirchhoffCoefficient::constant(c);
    case CoefficientFamily::affine: return KirchhoffCoefficient::affine();
    case CoefficientFamily::power: return KirchhoffCoefficient::power(p);
    case CoefficientFamily::tabulated: break;
    }
    return KirchhoffCoefficient::tabulated(table);
  }();
  return mu ? m.with_mu(*mu) : m;
}

SolverConfig RunConfig::solver_config(GridDomain const &dom, ScalarField const &u0) const
{
  SolverConfig s;
  s.mode = mode;
  s.dt = dt.value_or(default_dt(h));
  s.epsilon = epsilon;
  s.prox_tol = prox_tol;
  s.max_inner_iters = max_inner_iters;
  s.extinction_threshold = extinction_threshold;
  s.snapshot_stride = snapshot_stride;
  s.linear_tol = linear_tol;
  s.alpha_tol = alpha_tol;
  double const bound = extinction_upper_bound(dom, u0, coefficient());
  s.horizon = horizon.value_or(bound > 0.0 ? 1.1 * bound + s.dt : s.dt);
  return s;
}

std::optional<RadialSolutionSpec> RunConfig::bound_spec() const
{
  if (initial != "indicator" && !(bound_k && bound_r)) return std::nullopt;
  if (family == CoefficientFamily::tabulated) return std::nullopt;
  RadialSolutionSpec s{dim, bound_r.value_or(initial_radius()), bound_k.value_or(k), coefficient()};
  s.validate();
  return s;
}

RadialSolutionSpec RunConfig::radial_spec() const
{
  RadialSolutionSpec s{dim, initial_radius(), initial == "zero" ? 0.0 : k, coefficient()};
  s.validate();
  return s;
}

void RunConfig::require(Command cmd) const
{
  std::vector<std::string> missing;
  if (cmd == Command::sweep) {
    if (sweep_key.empty()) missing.push_back("sweep_key");
    if (sweep_values.empty()) missing.push_back("sweep_values");
  }
  if (!missing.empty()) throw ConfigError("missing required keys for " + to_string(cmd) + ": " + join(missing));
  if (cmd == Command::analytic && family == CoefficientFamily::tabulated)
    throw ConfigError("analytic: no explicit solution for the tabulated family");
}

RunConfig parse_config(std::string const &text) { return build(parse_entries(text)); }

std::string render(RunConfig const &cfg)
{
  std::string out;
  for (auto const &k : keys())
    if (auto v = k.get(cfg)) out += std::string(k.name) + " = " + *v + "\n";
  return out;
}

RunConfig with_override(RunConfig const &cfg, std::string const &key, std::string const &value)
{
  auto entries = parse_entries(render(cfg));
  auto it = std::find_if(entries.begin(), entries.end(), [&](Entry const &e) { return e.key == key; });
  if (it != entries.end()) {
    it->value = value;
  } else {
    if (!find_key(key)) throw ConfigError("unknown key '" + key + "'");
    entries.push_back({key, value, 0});
  }
  return build(entries);
}

std::string config_reference()
{
  std::string out = "Configuration keys (key = value, one per line, # starts a comment):\n\n";
  for (auto const &k : keys()) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "  %-22s default: %-28s %s\n", k.name, k.fallback, k.help);
    out += buf;
  }
  out += "\nChecks: " + join(CheckSuiteConfig::all_checks()) + "\n";
  return out;
}

} // namespace ktv
