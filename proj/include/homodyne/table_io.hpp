#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace homodyne {

struct TableRow {
  double q = 0.0;
  double p = 0.0;
  double w = 0.0;
  long long iterations = 0;
  double final_loglik = 0.0;
};

/// Reconstruction/evaluation table: `# key=value` header lines, then
/// `q<TAB>p<TAB>W<TAB>iterations<TAB>final_loglik` rows at 17 significant digits.
struct ResultTable {
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<TableRow> rows;

  void add_header(std::string key, std::string value) { header.emplace_back(std::move(key), std::move(value)); }
  /// First header value for `key`, or empty.
  [[nodiscard]] std::string header_value(const std::string& key) const;
};

void write_table(std::ostream& out, const ResultTable& table);
/// Throws DataError on malformed input.
ResultTable read_table(std::istream& in);

void save_table(const std::filesystem::path& path, const ResultTable& table);
ResultTable load_table(const std::filesystem::path& path);

}  // namespace homodyne
