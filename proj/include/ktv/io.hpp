#pragma once

// Plain-text CSV output. Reals use 17 significant digits and lines end in
// '\n', so identical runs produce identical bytes.

#include "ktv/core.hpp"
#include "ktv/trajectory.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace ktv {

namespace fs = std::filesystem;

/// %.17g, with "nan"/"inf" spelled out.
std::string format_real(double v);

/// Creates `dir` and parents; throws std::runtime_error on failure.
void ensure_directory(fs::path const &dir);
/// Writes `text` verbatim (binary mode); throws std::runtime_error on failure.
void write_text(fs::path const &path, std::string const &text);

/// Columns t, tv, linf, lN, l2, energy, then max, min, support_radius.
void write_diagnostics(fs::path const &path, FlowTrajectory const &traj);

/// Two comment lines ("# dims n0 n1 ..." and "# spacing h"), then one row per
/// index of the leading axes with the last axis along the row.
void write_snapshot(fs::path const &path, ScalarField const &u);
ScalarField read_snapshot(fs::path const &path, DomainPtr domain);

/// snapshots/t_<step>.csv for every snapshot, <step> zero padded to six digits.
void write_snapshots(fs::path const &dir, FlowTrajectory const &traj);

/// Rows of `key,value`.
using KeyValues = std::vector<std::pair<std::string, std::string>>;
void write_key_values(fs::path const &path, KeyValues const &rows);
KeyValues read_key_values(fs::path const &path);

/// check,passed,margin,status
void write_report(fs::path const &path, std::vector<VerificationReport> const &reports);

/// Rebuilds a trajectory from the files written by a solve into `dir`:
/// diagnostics.csv, snapshots/ and summary.csv (for the extinction time).
FlowTrajectory load_trajectory(fs::path const &dir, DomainPtr domain);

} // namespace ktv
