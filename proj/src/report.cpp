#include "cocyclelab/report.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cocyclelab/error.hpp"
#include "json.hpp"

namespace cocyclelab {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // also folds -0
  std::array<char, 64> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), r.ptr);
}

std::string format_number(std::int64_t v) { return std::to_string(v); }
std::string format_number(std::uint64_t v) { return std::to_string(v); }

std::string csv_quote(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  require(!header_.empty(), "CSV header must not be empty");
}

void CsvTable::add_row(std::vector<std::string> cells) {
  require(cells.size() == header_.size(), "CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                                              std::to_string(header_.size()));
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_quote(cells[i]);
    }
    out += "\r\n";
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i)
    if (header_[i] == name) return i;
  fail(ErrorCode::MissingArtifact, "CSV has no column '" + std::string(name) + "'");
}

CsvTable CsvTable::parse(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> rec;
  std::string cell;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      rec.push_back(std::move(cell));
      cell.clear();
      any = true;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      rec.push_back(std::move(cell));
      cell.clear();
      records.push_back(std::move(rec));
      rec.clear();
      any = false;
    } else {
      cell += c;
      any = true;
    }
  }
  if (quoted) fail(ErrorCode::MissingArtifact, "unterminated quoted CSV field");
  if (any || !cell.empty()) {
    rec.push_back(std::move(cell));
    records.push_back(std::move(rec));
  }
  if (records.empty()) fail(ErrorCode::MissingArtifact, "empty CSV");
  CsvTable t(records.front());
  for (std::size_t i = 1; i < records.size(); ++i) t.add_row(std::move(records[i]));
  return t;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::MissingArtifact, "missing " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string manifest_json(const std::vector<Artifact>& artifacts, std::string_view experiment) {
  nlohmann::ordered_json j;
  j["experiment"] = std::string(experiment);
  j["artifacts"] = nlohmann::ordered_json::array();
  for (const auto& a : artifacts) j["artifacts"].push_back({{"file", a.file}, {"kind", a.kind}});
  return j.dump(2) + "\n";
}

std::vector<Artifact> read_manifest(const std::filesystem::path& dir) {
  const auto text = read_file(dir / "manifest.json");
  std::vector<Artifact> out;
  try {
    const auto j = nlohmann::json::parse(text);
    for (const auto& a : j.at("artifacts")) out.push_back({a.at("file").get<std::string>(), a.at("kind").get<std::string>()});
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::MissingArtifact, "malformed manifest in " + dir.string() + ": " + e.what());
  }
  if (out.empty()) fail(ErrorCode::MissingArtifact, "no artifacts listed in " + (dir / "manifest.json").string());
  return out;
}

namespace {

struct PlotRule {
  std::string_view kind;
  std::string_view output;
  std::vector<std::string_view> columns;
};

const std::vector<PlotRule>& plot_rules() {
  static const std::vector<PlotRule> rules = {
      {"spectrum_trace", "plot_spectrum.csv", {"n", "lambda_1"}},
      {"k_profile", "plot_k_envelope.csv", {"k", "K", "K_eps"}},
      {"witness", "plot_witness.csv", {"j", "f_norm", "g_weighted"}},
      {"birkhoff_trajectory", "plot_birkhoff.csv", {"n", "S_n"}},
      {"contraction", "plot_contraction.csv", {"trial", "iteration", "step"}},
      {"mane", "plot_mane.csv", {"n", "x_norm", "y_norm"}},
      {"solve", "plot_solve.csv", {"k", "f_norm", "g_norm"}},
  };
  return rules;
}

}  // namespace

std::vector<Artifact> emit_report(const std::filesystem::path& source, const std::filesystem::path& out) {
  const auto artifacts = read_manifest(source);
  std::vector<Artifact> written;
  for (const auto& a : artifacts) {
    for (const auto& rule : plot_rules()) {
      if (rule.kind != a.kind) continue;
      const CsvTable in = CsvTable::parse(read_file(source / a.file));
      std::vector<std::size_t> idx;
      std::vector<std::string> header;
      for (auto c : rule.columns) {
        idx.push_back(in.column(c));
        header.emplace_back(c);
      }
      CsvTable t(header);
      for (const auto& r : in.rows()) {
        std::vector<std::string> cells;
        for (auto i : idx) cells.push_back(r[i]);
        t.add_row(std::move(cells));
      }
      write_file(out / rule.output, t.str());
      written.push_back({std::string(rule.output), "plot_" + a.kind});
    }
  }
  if (written.empty())
    fail(ErrorCode::MissingArtifact, "no plottable artifacts in " + source.string());
  write_file(out / "manifest.json", manifest_json(written, "report"));
  return written;
}

}  // namespace cocyclelab
