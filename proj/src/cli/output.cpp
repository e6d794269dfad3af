#include "sclaw/cli/output.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <memory>
#include <stdexcept>

#include "sclaw/errors.hpp"
#include "sclaw/io.hpp"

namespace sclaw::cli {

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    throw std::runtime_error("sha256 failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

OutputDir::OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir_.string() + ": " + ec.message());
}

void OutputDir::write(const std::string& name, const std::string& content) {
  write_text_file(dir_ / name, content);
  auto it = std::find_if(files_.begin(), files_.end(), [&](const auto& f) { return f.first == name; });
  if (it != files_.end())
    it->second = sha256_hex(content);
  else
    files_.emplace_back(name, sha256_hex(content));
}

void OutputDir::write_manifest(const nlohmann::json& resolved_config, std::uint64_t seed) {
  auto sorted = files_;
  std::sort(sorted.begin(), sorted.end());
  nlohmann::json files = nlohmann::json::array();
  for (const auto& [name, hash] : sorted) files.push_back({{"name", name}, {"sha256", hash}});
  nlohmann::json versions = {{"sclaw", "0.1.0"},
                             {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                                   std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                                   std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
  nlohmann::json manifest = {{"config", resolved_config}, {"seed", seed}, {"files", files}, {"versions", versions}};
  write_text_file(dir_ / "manifest.json", manifest.dump(2) + "\n");
}

std::string to_string(PlotKind kind) {
  switch (kind) {
    case PlotKind::eps_log_p: return "eps_log_p";
    case PlotKind::moment_scan: return "moment_scan";
    case PlotKind::error_ladder: return "error_ladder";
  }
  return "unknown";
}

std::string plot_descriptor(PlotKind kind, const PlotTable& table) {
  const auto name = to_string(kind);
  std::string x, x_label, x_scale, y_label, y_scale;
  switch (kind) {
    case PlotKind::eps_log_p:
      x = "epsilon", x_label = "epsilon", x_scale = "log";
      y_label = "epsilon * log(p_hat)", y_scale = "linear";
      break;
    case PlotKind::moment_scan:
      x = "epsilon", x_label = "epsilon", x_scale = "log";
      y_label = "E[max_t ||u||_p^p]", y_scale = "log";
      break;
    case PlotKind::error_ladder:
      x = "gamma", x_label = "gamma (= delta on the default ladder)", x_scale = "log";
      y_label = "|E(gamma, delta)|", y_scale = "log";
      break;
  }
  std::string out = "kind: " + name + "\n";
  out += "data: " + name + ".csv\n";
  out += "x: " + x + "\n";
  out += "x_label: " + x_label + "\n";
  out += "x_scale: " + x_scale + "\n";
  out += "y_label: " + y_label + "\n";
  out += "y_scale: " + y_scale + "\n";
  for (const auto& c : table.columns) {
    if (c == x) continue;
    if (kind == PlotKind::error_ladder && c != "abs_E") continue;
    out += "series: " + c + "\n";
  }
  out += "missing: -inf marks an empty estimate and is skipped\n";
  return out;
}

void emit_plot_data(OutputDir& out, PlotKind kind, const PlotTable& table) {
  if (table.rows.empty() || table.columns.empty()) throw PreconditionError("emit_plot_data: empty table");
  std::string csv;
  for (std::size_t c = 0; c < table.columns.size(); ++c) csv += (c ? "," : "") + table.columns[c];
  csv += "\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw PreconditionError("emit_plot_data: ragged table");
    for (std::size_t c = 0; c < row.size(); ++c) csv += (c ? "," : "") + format_double(row[c]);
    csv += "\n";
  }
  const auto name = to_string(kind);
  out.write(name + ".csv", csv);
  out.write(name + ".plot.txt", plot_descriptor(kind, table));
}

}  // namespace sclaw::cli
