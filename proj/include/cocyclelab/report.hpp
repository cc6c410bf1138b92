#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cocyclelab {

/// Shortest decimal that reads back to the same double ("nan", "inf", "-inf"
/// for non-finite values). Independent of locale.
std::string format_number(double v);
std::string format_number(std::int64_t v);
std::string format_number(std::uint64_t v);
inline std::string format_number(int v) { return format_number(static_cast<std::int64_t>(v)); }

/// RFC 4180 quoting: fields containing separators, quotes or line breaks are
/// wrapped in quotes with inner quotes doubled.
std::string csv_quote(std::string_view field);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  const std::vector<std::string>& header() const noexcept { return header_; }
  const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }

  /// Cells must already be formatted; the count must match the header.
  void add_row(std::vector<std::string> cells);
  std::string str() const;
  /// Column index by name; throws MissingArtifact.
  std::size_t column(std::string_view name) const;

  static CsvTable parse(std::string_view text);

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes bytes exactly (no newline translation). Throws IoError.
void write_file(const std::filesystem::path& path, std::string_view content);
/// Throws MissingArtifact if the file is absent.
std::string read_file(const std::filesystem::path& path);

struct Artifact {
  std::string file;  ///< relative to the run directory
  std::string kind;  ///< e.g. spectrum_trace, witness, contraction

  friend bool operator==(const Artifact&, const Artifact&) = default;
};

std::string manifest_json(const std::vector<Artifact>& artifacts, std::string_view experiment);
/// Reads manifest.json of a run directory. Throws MissingArtifact when the
/// manifest is absent or lists nothing.
std::vector<Artifact> read_manifest(const std::filesystem::path& dir);

/// Plot-ready columnar files derived from a previous run's artifacts, written
/// to `out` with their own manifest. Throws MissingArtifact if no artifact of
/// a known kind is present.
std::vector<Artifact> emit_report(const std::filesystem::path& source, const std::filesystem::path& out);

}  // namespace cocyclelab
