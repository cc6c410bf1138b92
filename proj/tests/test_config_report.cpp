#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "cocyclelab/run.hpp"

using namespace cocyclelab;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Ok;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cocyclelab_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config(
      "# a comment\n"
      "experiment = witness\n"
      "base = bernoulli   # trailing comment\n"
      "cocycle = \"shear\"\n"
      "cocycle_params = []\n"
      "seed = 12345678901234\n"
      "rate = 0.5\n"
      "horizons = [5, 10]\n"
      "weighted_output = true\n");
  CHECK(c.experiment == Experiment::Witness);
  CHECK(c.base == "bernoulli");
  CHECK(c.cocycle == "shear");
  CHECK(c.cocycle_params.empty());
  CHECK(c.seed == 12345678901234ULL);
  CHECK(c.rate == 0.5);
  CHECK(c.horizons == std::vector<std::int64_t>{5, 10});
  CHECK(c.weighted_output);
}

TEST_CASE("config diagnostics carry line numbers") {
  CHECK(message_of([] { parse_config("experiment = spectrum\nstepz = 10\n"); }).find("line 2") != std::string::npos);
  CHECK(code_of([] { parse_config("experiment = spectrum\nstepz = 10\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_config("experiment = spectrum\nsteps 10\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_config("experiment = spectrum\nsteps = 1\nsteps = 2\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_config("experiment = spectrum\nsteps = \"ten\"\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_config("experiment = spectrum\nsteps =\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_config("experiment = nonsense\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_config("steps = 10\n"); }) == ErrorCode::ConfigError);
  CHECK(message_of([] { parse_config("experiment = spectrum\n\n\ngap_tol = [1]\n"); }).find("line 4") !=
        std::string::npos);
}

TEST_CASE("config validation") {
  RunConfig c;
  CHECK(code_of([&] { validate(c); }) == ErrorCode::ConfigError);  // no seed
  c.seed = 1;
  CHECK_NOTHROW(validate(c));
  c.zero_tol = 0.0;
  CHECK(code_of([&] { validate(c); }) == ErrorCode::ConfigError);
  c = RunConfig{};
  c.seed = 1;
  c.tol = -1.0;
  CHECK(code_of([&] { validate(c); }) == ErrorCode::ConfigError);
  c = RunConfig{};
  c.seed = 1;
  c.experiment = Experiment::Report;
  CHECK(code_of([&] { validate(c); }) == ErrorCode::ConfigError);
}

TEST_CASE("config round trip") {
  RunConfig c;
  CHECK(parse_config(serialize_config(c)) == c);
  Rng rng(7);
  const auto keys = config_keys();
  const std::vector<std::pair<std::string, std::string>> samples{
      {"experiment", "\"mane\""},      {"base", "\"bernoulli\""}, {"base_params", "[0.25, 0.75]"},
      {"cocycle", "\"block_mixed\""}, {"cocycle_params", "[0.1, 0.2]"}, {"seed", "18446744073709551615"},
      {"steps", "777"},               {"gap_tol", "0.1"},          {"rate", "0.3333333333333333"},
      {"epsilon", "1e-3"},            {"horizons", "[1, -2, 3]"},  {"weighted_output", "true"},
      {"set", "[0, 1, 1]"},           {"source", "\"dir with, comma\""}, {"target", "2.5e3"}};
  for (int trial = 0; trial < 50; ++trial) {
    RunConfig r;
    for (int j = 0; j < 5; ++j) {
      const auto& [k, v] = samples[rng.below(samples.size())];
      set_config_value(r, k, v);
    }
    CHECK(parse_config(serialize_config(r)) == r);
  }
  CHECK(keys.size() == 38);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1e300) == "1e+300");
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_number(std::int64_t{-42}) == "-42");
  CHECK(std::stod(format_number(0.6931471805599453)) == 0.6931471805599453);
}

TEST_CASE("csv") {
  CHECK(csv_quote("plain") == "plain");
  CHECK(csv_quote("a,b") == "\"a,b\"");
  CHECK(csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CsvTable t({"a", "b"});
  t.add_row({"1", "x,y"});
  t.add_row({"2", "line\nbreak"});
  CHECK(t.str() == "a,b\r\n1,\"x,y\"\r\n2,\"line\nbreak\"\r\n");
  const auto back = CsvTable::parse(t.str());
  CHECK(back.header() == t.header());
  CHECK(back.rows() == t.rows());
  CHECK(t.column("b") == 1);
  CHECK(code_of([&] { t.column("c"); }) == ErrorCode::MissingArtifact);
  CHECK_THROWS_AS(t.add_row({"only one"}), Error);
}

TEST_CASE("report emission") {
  const fs::path src = scratch("report_src");
  const fs::path out = scratch("report_out");
  SUBCASE("spectrum trace") {
    CsvTable t({"n", "lambda_1", "lambda_2"});
    t.add_row({"10", "0.7", "-0.7"});
    t.add_row({"20", "0.69", "-0.69"});
    write_file(src / "trace.csv", t.str());
    write_file(src / "manifest.json", manifest_json({{"trace.csv", "spectrum_trace"}}, "spectrum"));
    const auto written = emit_report(src, out);
    REQUIRE(written.size() == 1);
    const auto plot = CsvTable::parse(read_file(out / written[0].file));
    CHECK(plot.header() == std::vector<std::string>{"n", "lambda_1"});
    CHECK(plot.rows().size() == 2);
    CHECK(read_manifest(out).size() == 1);
  }
  SUBCASE("witness") {
    CsvTable t({"j", "f_norm", "g_norm", "weight", "g_weighted"});
    t.add_row({"0", "1", "1", "2", "2"});
    write_file(src / "witness.csv", t.str());
    write_file(src / "manifest.json", manifest_json({{"witness.csv", "witness"}}, "witness"));
    const auto written = emit_report(src, out);
    const auto plot = CsvTable::parse(read_file(out / written.at(0).file));
    CHECK(plot.header() == std::vector<std::string>{"j", "f_norm", "g_weighted"});
  }
  SUBCASE("nothing to plot") {
    write_file(src / "manifest.json", manifest_json({}, "spectrum"));
    CHECK(code_of([&] { emit_report(src, out); }) == ErrorCode::MissingArtifact);
    CHECK(code_of([&] { emit_report(scratch("absent"), out); }) == ErrorCode::MissingArtifact);
  }
}

TEST_CASE("run writes summaries and respects exit codes") {
  RunConfig c;
  c.experiment = Experiment::Spectrum;
  c.seed = 3;
  c.steps = 1000;
  const fs::path out = scratch("run_ok");
  const auto r = run_experiment(c, {out, std::nullopt, 1});
  CHECK(r.exit_code == 0);
  for (const char* f : {"summary.json", "summary.txt", "config.txt", "manifest.json", "spectrum.csv"})
    CHECK(fs::exists(out / f));
  CHECK(parse_config(read_file(out / "config.txt")) == c);

  RunConfig bad = c;
  bad.cocycle = "no_such_cocycle";
  CHECK(run_experiment(bad, {scratch("run_bad"), std::nullopt, 1}).exit_code == 1);
  RunConfig noseed = c;
  noseed.seed.reset();
  CHECK(run_experiment(noseed, {scratch("run_noseed"), std::nullopt, 1}).exit_code == 1);
  CHECK(run_experiment(noseed, {scratch("run_seeded"), 9, 1}).exit_code == 0);

  RunConfig numerical = c;
  numerical.experiment = Experiment::Dichotomy;
  numerical.cocycle = "shear";
  numerical.cocycle_params = {};
  const auto nr = run_experiment(numerical, {scratch("run_num"), std::nullopt, 1});
  CHECK(nr.exit_code == 2);
  CHECK(nr.error == ErrorCode::NotHyperbolic);
  CHECK(nr.summary.find("NotHyperbolic") != std::string::npos);
}

TEST_CASE("spectrum artifact of the diagonal") {
  RunConfig c;
  c.seed = 1;
  const fs::path out = scratch("run_spectrum");
  REQUIRE(run_experiment(c, {out, std::nullopt, 1}).exit_code == 0);
  const auto t = CsvTable::parse(read_file(out / "spectrum.csv"));
  REQUIRE(t.rows().size() == 2);
  CHECK(std::abs(std::stod(t.rows()[0][0]) - std::log(2.0)) <= 1e-6);
  CHECK(std::abs(std::stod(t.rows()[1][0]) + std::log(2.0)) <= 1e-6);
  CHECK(t.rows()[0][1] == "1");
  CHECK(t.rows()[0][3] == "10000");
}

TEST_CASE("thread count does not change artifacts") {
  RunConfig c;
  c.experiment = Experiment::OracleCompare;
  c.trials = 12;
  c.seed = 5;
  const fs::path a = scratch("threads1"), b = scratch("threads4");
  REQUIRE(run_experiment(c, {a, std::nullopt, 1}).exit_code == 0);
  REQUIRE(run_experiment(c, {b, std::nullopt, 4}).exit_code == 0);
  CHECK(read_file(a / "oracle_compare.csv") == read_file(b / "oracle_compare.csv"));
}

TEST_CASE("parallel_for propagates the first error") {
  std::atomic<int> count{0};
  parallel_for(100, 4, [&](std::size_t) { ++count; });
  CHECK(count == 100);
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) { if (i == 5) fail(ErrorCode::Internal, "boom"); }), Error);
}
