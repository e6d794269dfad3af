#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace sclaw::cli {

/// Lower-case hex SHA-256 of `data`.
std::string sha256_hex(const std::string& data);

/// Collects emitted files so the manifest can list and hash them.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir);

  void write(const std::string& name, const std::string& content);
  const std::filesystem::path& path() const noexcept { return dir_; }

  /// Writes manifest.json with keys config, seed, files, versions.
  void write_manifest(const nlohmann::json& resolved_config, std::uint64_t seed);

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;  // name, sha256
};

enum class PlotKind { eps_log_p, moment_scan, error_ladder };
std::string to_string(PlotKind kind);

struct PlotTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Writes `<kind>.csv` and `<kind>.plot.txt`. An empty table is a precondition error.
void emit_plot_data(OutputDir& out, PlotKind kind, const PlotTable& table);

/// Descriptor text alone (axis labels, scale hints, one `series:` line per y column).
std::string plot_descriptor(PlotKind kind, const PlotTable& table);

}  // namespace sclaw::cli
