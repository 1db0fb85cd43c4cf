#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>  // nlohmann/json, vendored

#include "anng/config.hpp"
#include "anng/experiments.hpp"
#include "anng/io.hpp"
#include "anng/report.hpp"

namespace anng {

inline constexpr const char* kToolVersion = "0.1.0";

struct Artifact {
  std::filesystem::path path;
  std::uint32_t crc32 = 0;
  std::uint64_t bytes = 0;
};

namespace detail {

inline std::string utc_timestamp(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline Artifact emit(const std::filesystem::path& path, const std::string& content) {
  write_file_atomic(path, std::string_view(content));
  const auto* p = reinterpret_cast<const std::uint8_t*>(content.data());
  return {path, crc32(std::span<const std::uint8_t>(p, content.size())), content.size()};
}

}  // namespace detail

/// Runs every suite in `cfg`, writing <suite>.csv, <suite>.json and manifest.json
/// into `out_dir`. On any failure the files written so far are removed and the
/// error is rethrown.
inline std::vector<Artifact> run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                                            unsigned threads, const std::string& command_line) {
  cfg.validate();
  const auto started = std::chrono::system_clock::now();
  std::vector<Artifact> written;
  try {
    std::filesystem::create_directories(out_dir);
    for (const auto& suite : cfg.suites) {
      const Report rep = run_suite(suite, cfg, threads);
      written.push_back(detail::emit(out_dir / (suite + ".csv"), to_csv(rep.table)));
      written.push_back(detail::emit(out_dir / (suite + ".json"), to_json(rep).dump(2) + "\n"));
    }
    nlohmann::json files = nlohmann::json::array();
    for (const auto& a : written)
      files.push_back({{"path", a.path.filename().string()}, {"crc32", a.crc32}, {"bytes", a.bytes}});
    nlohmann::json manifest;
    manifest["command_line"] = command_line;
    manifest["config"] = cfg.to_json();
    manifest["threads"] = threads;
    manifest["artifacts"] = files;
    manifest["tool_version"] = kToolVersion;
    manifest["started_utc"] = detail::utc_timestamp(started);
    manifest["finished_utc"] = detail::utc_timestamp(std::chrono::system_clock::now());
    written.push_back(detail::emit(out_dir / "manifest.json", manifest.dump(2) + "\n"));
  } catch (...) {
    std::error_code ec;
    for (const auto& a : written) std::filesystem::remove(a.path, ec);
    throw;
  }
  return written;
}

}  // namespace anng
