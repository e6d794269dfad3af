#pragma once

#include <filesystem>
#include <string>

#include "sclaw/grid.hpp"

namespace sclaw {

/// Shortest decimal that round-trips to the same binary64; infinities print as "inf"/"-inf".
std::string format_double(double x);

/// Header `t,cell_0,...,cell_{M-1}`, one row per snapshot.
std::string trajectory_csv(const Trajectory& traj);

/// Writes `content` verbatim; throws std::runtime_error on failure.
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace sclaw
