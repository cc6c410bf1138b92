// Command-line front end. Links against the C API only.
#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cocyclelab/cocyclelab.h"

int main(int argc, char** argv) {
  CLI::App app{"cocyclelab: tempered dichotomies and admissibility experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ccl_version()));

  std::string config;
  std::string out = "out";
  std::uint64_t seed = 0;
  unsigned threads = 1;
  auto* run = app.add_subcommand("run", "run one experiment from a config file");
  run->add_option("--config", config, "config file (key = value lines)")->required();
  run->add_option("--out", out, "output directory")->capture_default_str();
  auto* seed_opt = run->add_option("--seed", seed, "overrides the config seed");
  run->add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  ccl_result* result = nullptr;
  const ccl_status st = ccl_run_config(config.c_str(), out.c_str(), seed, seed_opt->count() > 0, threads, &result);
  if (st != CCL_OK) {
    std::cerr << "error: " << ccl_status_name(st) << ": " << ccl_last_error() << "\n";
    return 2;
  }
  const int code = ccl_result_exit_code(result);
  std::cout << ccl_result_summary(result);
  if (code != 0) std::cerr << "error: " << ccl_result_message(result) << "\n";
  ccl_result_free(result);
  return code;
}
