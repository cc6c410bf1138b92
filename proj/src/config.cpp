#include "cocyclelab/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "cocyclelab/error.hpp"
#include "json.hpp"

namespace cocyclelab {

using nlohmann::json;

namespace {

constexpr std::string_view kExperimentNames[] = {
    "spectrum", "splitting", "dichotomy", "solve", "oracle-compare", "mane",
    "induce",   "witness",   "robustness", "report", "birkhoff",
};

struct Field {
  std::string name;
  bool is_string = false;
  std::function<void(RunConfig&, const json&)> set;
  std::function<json(const RunConfig&)> get;
};

[[noreturn]] void bad_value(const std::string& what) { throw std::invalid_argument(what); }

template <class T>
Field integer(const char* name, T RunConfig::*m) {
  return {name, false,
          [m](RunConfig& c, const json& v) {
            if (!v.is_number_integer()) bad_value("expects an integer");
            c.*m = v.get<T>();
          },
          [m](const RunConfig& c) { return json(c.*m); }};
}

Field real(const char* name, double RunConfig::*m) {
  return {name, false,
          [m](RunConfig& c, const json& v) {
            if (!v.is_number()) bad_value("expects a number");
            c.*m = v.get<double>();
          },
          [m](const RunConfig& c) { return json(c.*m); }};
}

Field optional_real(const char* name, std::optional<double> RunConfig::*m) {
  return {name, false,
          [m](RunConfig& c, const json& v) {
            if (v.is_null()) {
              c.*m = std::nullopt;
              return;
            }
            if (!v.is_number()) bad_value("expects a number or null");
            c.*m = v.get<double>();
          },
          [m](const RunConfig& c) { return (c.*m) ? json(*(c.*m)) : json(nullptr); }};
}

Field text(const char* name, std::string RunConfig::*m) {
  return {name, true,
          [m](RunConfig& c, const json& v) {
            if (!v.is_string()) bad_value("expects a string");
            c.*m = v.get<std::string>();
          },
          [m](const RunConfig& c) { return json(c.*m); }};
}

Field flag(const char* name, bool RunConfig::*m) {
  return {name, false,
          [m](RunConfig& c, const json& v) {
            if (!v.is_boolean()) bad_value("expects true or false");
            c.*m = v.get<bool>();
          },
          [m](const RunConfig& c) { return json(c.*m); }};
}

template <class T>
Field list(const char* name, std::vector<T> RunConfig::*m) {
  return {name, false,
          [m](RunConfig& c, const json& v) {
            if (!v.is_array()) bad_value("expects an array");
            std::vector<T> out;
            for (const auto& e : v) {
              if constexpr (std::is_integral_v<T>) {
                if (!e.is_number_integer()) bad_value("expects an array of integers");
              } else {
                if (!e.is_number()) bad_value("expects an array of numbers");
              }
              out.push_back(e.get<T>());
            }
            c.*m = std::move(out);
          },
          [m](const RunConfig& c) { return json(c.*m); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({"experiment", true,
                 [](RunConfig& c, const json& v) {
                   if (!v.is_string()) bad_value("expects a string");
                   c.experiment = parse_experiment(v.get<std::string>());
                 },
                 [](const RunConfig& c) { return json(std::string(experiment_name(c.experiment))); }});
    f.push_back(text("base", &RunConfig::base));
    f.push_back(list("base_params", &RunConfig::base_params));
    f.push_back(text("cocycle", &RunConfig::cocycle));
    f.push_back(list("cocycle_params", &RunConfig::cocycle_params));
    f.push_back({"seed", false,
                 [](RunConfig& c, const json& v) {
                   if (v.is_null()) {
                     c.seed = std::nullopt;
                     return;
                   }
                   if (!v.is_number_unsigned()) bad_value("expects a non-negative integer");
                   c.seed = v.get<std::uint64_t>();
                 },
                 [](const RunConfig& c) { return c.seed ? json(*c.seed) : json(nullptr); }});
    f.push_back(integer("steps", &RunConfig::steps));
    f.push_back(integer("reorth", &RunConfig::reorth));
    f.push_back(real("gap_tol", &RunConfig::gap_tol));
    f.push_back(real("zero_tol", &RunConfig::zero_tol));
    f.push_back(integer("samples", &RunConfig::samples));
    f.push_back(integer("splitting_window", &RunConfig::splitting_window));
    f.push_back(integer("window", &RunConfig::window));
    f.push_back(integer("n_tail", &RunConfig::n_tail));
    f.push_back(integer("n_max", &RunConfig::n_max));
    f.push_back(integer("warmup", &RunConfig::warmup));
    f.push_back(real("cert_safety", &RunConfig::cert_safety));
    f.push_back(optional_real("rate", &RunConfig::rate));
    f.push_back(optional_real("epsilon", &RunConfig::epsilon));
    f.push_back(list("horizons", &RunConfig::horizons));
    f.push_back(real("slack", &RunConfig::slack));
    f.push_back(real("tol", &RunConfig::tol));
    f.push_back(integer("period", &RunConfig::period));
    f.push_back(integer("dimension", &RunConfig::dimension));
    f.push_back(real("target", &RunConfig::target));
    f.push_back(real("ratio", &RunConfig::ratio));
    f.push_back(real("weight", &RunConfig::weight));
    f.push_back(flag("weighted_output", &RunConfig::weighted_output));
    f.push_back(list("set", &RunConfig::set));
    f.push_back(integer("set_samples", &RunConfig::set_samples));
    f.push_back(integer("horizon", &RunConfig::horizon));
    f.push_back(integer("search_horizon", &RunConfig::search_horizon));
    f.push_back(integer("grid", &RunConfig::grid));
    f.push_back(integer("rokhlin_samples", &RunConfig::rokhlin_samples));
    f.push_back(integer("trials", &RunConfig::trials));
    f.push_back(real("safety", &RunConfig::safety));
    f.push_back(integer("max_iters", &RunConfig::max_iters));
    f.push_back(text("source", &RunConfig::source));
    return f;
  }();
  return table;
}

const Field* find_field(std::string_view key) {
  for (const auto& f : fields())
    if (f.name == key) return &f;
  return nullptr;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Drops a trailing comment, ignoring '#' inside double-quoted strings.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

bool bare_word(std::string_view v) {
  if (v.empty()) return false;
  for (char ch : v)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.' || ch == '/'))
      return false;
  return true;
}

void apply(RunConfig& c, const Field& f, std::string_view value) {
  json v;
  try {
    v = json::parse(value);
  } catch (const json::exception&) {
    if (!(f.is_string && bare_word(value))) bad_value("is not a valid value: " + std::string(value));
    v = std::string(value);
  }
  f.set(c, v);
}

}  // namespace

Experiment parse_experiment(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kExperimentNames); ++i)
    if (kExperimentNames[i] == name) return static_cast<Experiment>(i);
  fail(ErrorCode::UnknownName, "unknown experiment '" + std::string(name) + "'");
}

std::string_view experiment_name(Experiment e) { return kExperimentNames[static_cast<std::size_t>(e)]; }

void set_config_value(RunConfig& config, std::string_view key, std::string_view value) {
  const Field* f = find_field(key);
  if (!f) fail(ErrorCode::ConfigError, "unknown key '" + std::string(key) + "'");
  try {
    apply(config, *f, trim(value));
  } catch (const std::invalid_argument& e) {
    fail(ErrorCode::ConfigError, std::string(key) + " " + e.what());
  } catch (const Error& e) {
    fail(ErrorCode::ConfigError, std::string(key) + ": " + e.what());
  }
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(ErrorCode::ConfigError, where + "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const Field* f = find_field(key);
    if (!f) fail(ErrorCode::ConfigError, where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) fail(ErrorCode::ConfigError, where + "repeated key '" + key + "'");
    if (value.empty()) fail(ErrorCode::ConfigError, where + key + " has no value");
    try {
      apply(c, *f, value);
    } catch (const std::invalid_argument& e) {
      fail(ErrorCode::ConfigError, where + key + " " + e.what());
    } catch (const Error& e) {
      fail(ErrorCode::ConfigError, where + key + ": " + e.what());
    }
  }
  if (!seen.count("experiment")) fail(ErrorCode::ConfigError, "missing key 'experiment'");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ConfigError, "cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const auto& f : fields()) out += f.name + " = " + f.get(config).dump() + "\n";
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.push_back(f.name);
  return keys;
}

void validate(const RunConfig& c) {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) fail(ErrorCode::ConfigError, what);
  };
  check(c.seed.has_value(), "seed missing (set it in the config or pass --seed)");
  check(c.steps >= 100, "steps must be >= 100");
  check(c.reorth >= 1, "reorth must be >= 1");
  check(c.gap_tol > 0.0, "gap_tol must be > 0");
  check(c.zero_tol > 0.0, "zero_tol must be > 0");
  check(c.tol > 0.0, "tol must be > 0");
  check(c.slack > 0.0, "slack must be > 0");
  check(c.samples >= 1, "samples must be >= 1");
  check(c.splitting_window >= 1, "splitting_window must be >= 1");
  check(c.window >= 1, "window must be >= 1");
  check(c.n_tail >= 0, "n_tail must be >= 0");
  check(c.n_max >= 1, "n_max must be >= 1");
  check(c.warmup >= 0, "warmup must be >= 0");
  check(c.cert_safety >= 0.0 && c.cert_safety < 1.0, "cert_safety must lie in [0, 1)");
  check(!c.rate || *c.rate > 0.0, "rate must be > 0");
  check(!c.epsilon || *c.epsilon > 0.0, "epsilon must be > 0");
  check(!c.horizons.empty(), "horizons must not be empty");
  for (auto h : c.horizons) check(h != 0, "horizons must be non-zero");
  check(c.period >= 0 && c.period <= 64, "period must lie in [0, 64]");
  check(c.dimension >= 0 && c.dimension <= 16, "dimension must lie in [0, 16]");
  check(c.target >= 0.0 && std::isfinite(c.target), "target must be finite and >= 0");
  check(c.ratio > 0.0, "ratio must be > 0");
  check(c.weight > 0.0, "weight must be > 0");
  check(c.horizon >= 1 && c.search_horizon >= 1, "horizons must be >= 1");
  check(c.grid >= 1 && c.rokhlin_samples >= 1, "grid and rokhlin_samples must be >= 1");
  check(c.set_samples >= 1, "set_samples must be >= 1");
  check(c.trials >= 1, "trials must be >= 1");
  check(c.safety > 0.0 && c.safety < 1.0, "safety must lie in (0, 1)");
  check(c.max_iters >= 1, "max_iters must be >= 1");
  check(c.experiment != Experiment::Report || !c.source.empty(), "report needs a source directory");
}

BaseSystem make_base(const RunConfig& c) {
  if (c.base == "rotation") {
    if (c.base_params.empty()) return BaseSystem::rotation();
    if (c.base_params.size() != 1) fail(ErrorCode::ConfigError, "rotation takes one parameter (gamma)");
    return BaseSystem::rotation(c.base_params[0]);
  }
  if (c.base == "bernoulli") {
    if (c.base_params.empty()) return BaseSystem::bernoulli({0.5, 0.5});
    return BaseSystem::bernoulli(c.base_params);
  }
  if (c.base == "periodic") {
    if (c.base_params.size() != 1 || c.base_params[0] < 1 || c.base_params[0] != std::floor(c.base_params[0]))
      fail(ErrorCode::ConfigError, "periodic takes one integer parameter (the period)");
    return BaseSystem::periodic(static_cast<std::uint32_t>(c.base_params[0]));
  }
  fail(ErrorCode::UnknownName, "unknown base '" + c.base + "'");
}

CocyclePtr make_cocycle(const RunConfig& c, const BaseSystem& base) {
  auto square = [](const std::vector<double>& p, std::size_t count) {
    const auto per = count == 0 ? 0 : p.size() / count;
    const auto d = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(per))));
    if (count == 0 || d == 0 || d * d * count != p.size())
      fail(ErrorCode::ConfigError, "cocycle_params must hold " + std::to_string(count) + " square matrices");
    std::vector<Mat> mats;
    for (std::size_t i = 0; i < count; ++i) {
      Mat m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t q = 0; q < d; ++q)
          m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(q)) = p[i * d * d + r * d + q];
      mats.push_back(std::move(m));
    }
    return mats;
  };
  if (c.cocycle == "constant") return constant_cocycle(square(c.cocycle_params, 1).front());
  if (c.cocycle == "symbol_table") {
    const std::size_t count =
        base.kind() == BaseSystem::Kind::Periodic ? base.period() : base.alphabet_size();
    return symbol_table(base, square(c.cocycle_params, count));
  }
  return builtin(c.cocycle, c.cocycle_params, &base);
}

SetIndicator make_set(const RunConfig& c, const BaseSystem& base) {
  switch (base.kind()) {
    case BaseSystem::Kind::Rotation:
      if (c.set.empty()) return SetIndicator::arc(0.0, 0.5);
      if (c.set.size() != 2) fail(ErrorCode::ConfigError, "set must be [lo, hi] on the rotation");
      return SetIndicator::arc(c.set[0], c.set[1]);
    case BaseSystem::Kind::Bernoulli: {
      std::vector<std::size_t> word;
      if (c.set.empty()) word.push_back(0);
      for (double s : c.set) {
        if (s < 0 || s != std::floor(s)) fail(ErrorCode::ConfigError, "set must be a word of symbols");
        word.push_back(static_cast<std::size_t>(s));
      }
      return SetIndicator::cylinder(base, 0, std::move(word));
    }
    case BaseSystem::Kind::Periodic: {
      std::vector<std::uint32_t> states;
      if (c.set.empty()) states.push_back(0);
      for (double s : c.set) {
        if (s < 0 || s != std::floor(s)) fail(ErrorCode::ConfigError, "set must list periodic states");
        states.push_back(static_cast<std::uint32_t>(s));
      }
      return SetIndicator::periodic_states(std::move(states));
    }
  }
  fail(ErrorCode::Internal, "unhandled base kind");
}

}  // namespace cocyclelab
