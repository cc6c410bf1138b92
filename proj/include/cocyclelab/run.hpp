#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cocyclelab/config.hpp"
#include "cocyclelab/error.hpp"
#include "cocyclelab/report.hpp"

namespace cocyclelab {

struct RunOptions {
  std::filesystem::path out_dir = "out";
  std::optional<std::uint64_t> seed;  ///< overrides the config seed
  unsigned threads = 1;
};

struct Assertion {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
};

struct RunResult {
  int exit_code = 0;  ///< 0 ok, 1 config error, 2 numerical failure
  ErrorCode error = ErrorCode::Ok;
  std::string message;
  std::string summary;  ///< human-readable, also written to summary.txt
  std::vector<Artifact> artifacts;
  std::vector<Assertion> assertions;
};

/// Runs one experiment and writes its artifacts, summary.json, summary.txt,
/// config.txt and manifest.json under options.out_dir. Never throws: errors
/// are reported through the exit code. A failed assertion counts as a
/// numerical failure (Violation).
RunResult run_experiment(RunConfig config, const RunOptions& options);
RunResult run_config_file(const std::filesystem::path& path, const RunOptions& options);

/// Calls fn(i) for i < n on up to `threads` threads. The first exception is
/// rethrown after all workers finish.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace cocyclelab
