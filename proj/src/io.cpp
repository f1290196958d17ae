#include "ktv/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ktv {

std::string format_real(double v)
{
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void ensure_directory(fs::path const &dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_text(fs::path const &path, std::string const &text)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out.flush()) throw std::runtime_error("write to " + path.string() + " failed");
}

namespace {

std::string read_text(fs::path const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> fields(std::string const &line)
{
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(line);
  while (std::getline(in, item, ',')) out.push_back(item);
  return out;
}

double to_real(std::string const &s, fs::path const &path)
{
  char *end = nullptr;
  double const v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw std::runtime_error(path.string() + ": bad number '" + s + "'");
  return v;
}

} // namespace

void write_diagnostics(fs::path const &path, FlowTrajectory const &traj)
{
  std::string out = "t,tv,linf,lN,l2,energy,max,min,support_radius\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    auto const &d = traj.diagnostics()[i];
    for (double v : {traj.times()[i], d.tv, d.linf, d.lN, d.l2, d.energy, d.max, d.min})
      out += format_real(v) + ",";
    out += format_real(d.support_radius) + "\n";
  }
  write_text(path, out);
}

void write_snapshot(fs::path const &path, ScalarField const &u)
{
  auto const &dom = u.domain();
  auto const &ext = dom.extent();
  std::string out = "# dims";
  for (int a = 0; a < dom.dim(); ++a) out += " " + std::to_string(ext[a]);
  out += "\n# spacing " + format_real(dom.spacing()) + "\n";
  Index const row = ext[dom.dim() - 1];
  for (Index c = 0; c < dom.size(); ++c) {
    out += format_real(u[c]);
    out += (c + 1) % row == 0 ? '\n' : ',';
  }
  write_text(path, out);
}

ScalarField read_snapshot(fs::path const &path, DomainPtr domain)
{
  std::istringstream in(read_text(path));
  std::string dims, spacing, line;
  std::getline(in, dims);
  std::getline(in, spacing);
  std::string expect = "# dims";
  for (int a = 0; a < domain->dim(); ++a) expect += " " + std::to_string(domain->extent()[a]);
  if (dims != expect) throw std::runtime_error(path.string() + ": grid does not match the configured domain");
  if (spacing.rfind("# spacing ", 0) != 0 || std::abs(to_real(spacing.substr(10), path) - domain->spacing()) >
                                                  1e-12 * domain->spacing())
    throw std::runtime_error(path.string() + ": spacing does not match the configured domain");
  Eigen::ArrayXd values(domain->size());
  Index c = 0;
  while (std::getline(in, line))
    for (auto const &f : fields(line)) {
      if (c >= domain->size()) throw std::runtime_error(path.string() + ": too many values");
      values[c++] = to_real(f, path);
    }
  if (c != domain->size()) throw std::runtime_error(path.string() + ": too few values");
  return ScalarField(std::move(domain), std::move(values));
}

void write_snapshots(fs::path const &dir, FlowTrajectory const &traj)
{
  ensure_directory(dir);
  for (auto const &s : traj.snapshots()) {
    char name[32];
    std::snprintf(name, sizeof name, "t_%06zu.csv", s.step);
    write_snapshot(dir / name, s.field);
  }
}

void write_key_values(fs::path const &path, KeyValues const &rows)
{
  std::string out = "key,value\n";
  for (auto const &[k, v] : rows) out += k + "," + v + "\n";
  write_text(path, out);
}

KeyValues read_key_values(fs::path const &path)
{
  std::istringstream in(read_text(path));
  std::string line;
  KeyValues rows;
  std::getline(in, line);
  while (std::getline(in, line)) {
    auto const comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error(path.string() + ": malformed row '" + line + "'");
    rows.emplace_back(line.substr(0, comma), line.substr(comma + 1));
  }
  return rows;
}

void write_report(fs::path const &path, std::vector<VerificationReport> const &reports)
{
  std::string out = "check,passed,margin,status\n";
  for (auto const &r : reports)
    out += r.check_name + "," + (r.passed() ? "true" : "false") + "," + format_real(r.worst_margin) + "," +
           to_string(r.status) + "\n";
  write_text(path, out);
}

FlowTrajectory load_trajectory(fs::path const &dir, DomainPtr domain)
{
  std::map<std::size_t, fs::path> snaps;
  if (fs::exists(dir / "snapshots"))
    for (auto const &e : fs::directory_iterator(dir / "snapshots")) {
      auto const name = e.path().filename().string();
      if (name.size() > 6 && name.rfind("t_", 0) == 0 && e.path().extension() == ".csv")
        snaps[std::stoul(name.substr(2, name.size() - 6))] = e.path();
    }

  FlowTrajectory traj(domain);
  std::istringstream in(read_text(dir / "diagnostics.csv"));
  std::string line;
  std::getline(in, line);
  if (line.rfind("t,tv,linf,lN,l2,energy", 0) != 0) throw std::runtime_error("diagnostics.csv: unexpected header");
  while (std::getline(in, line)) {
    auto const f = fields(line);
    if (f.size() != 9) throw std::runtime_error("diagnostics.csv: expected 9 columns in '" + line + "'");
    std::vector<double> v;
    for (auto const &s : f) v.push_back(to_real(s, dir / "diagnostics.csv"));
    traj.append(v[0], {v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]});
    if (auto it = snaps.find(traj.size() - 1); it != snaps.end()) traj.add_snapshot(read_snapshot(it->second, domain));
  }
  if (traj.empty()) throw std::runtime_error("diagnostics.csv: no rows");

  for (auto const &[k, v] : read_key_values(dir / "summary.csv")) {
    if (k == "extinction_time" && v != "not reached") traj.extinction_time = to_real(v, dir / "summary.csv");
    if (k == "prox_warnings") traj.prox_warnings = static_cast<int>(to_real(v, dir / "summary.csv"));
  }
  return traj;
}

} // namespace ktv
