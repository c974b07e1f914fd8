#include "homodyne/table_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "homodyne/error.hpp"
#include "homodyne/format.hpp"

namespace homodyne {

std::string ResultTable::header_value(const std::string& key) const {
  for (const auto& [k, v] : header) {
    if (k == key) return v;
  }
  return {};
}

void write_table(std::ostream& out, const ResultTable& table) {
  for (const auto& [k, v] : table.header) out << "# " << k << '=' << v << '\n';
  for (const auto& r : table.rows) {
    out << format_real(r.q) << '\t' << format_real(r.p) << '\t' << format_real(r.w) << '\t' << r.iterations << '\t'
        << format_real(r.final_loglik) << '\n';
  }
}

ResultTable read_table(std::istream& in) {
  ResultTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.starts_with("# ")) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw DataError("malformed table header on line " + std::to_string(line_no));
      table.add_header(line.substr(2, eq - 2), line.substr(eq + 1));
      continue;
    }
    const auto cols = split_view(line, '\t');
    if (cols.size() != 5) throw DataError("table line " + std::to_string(line_no) + " does not have 5 columns");
    const auto q = parse_real(cols[0]);
    const auto p = parse_real(cols[1]);
    const auto w = parse_real(cols[2]);
    const auto it = parse_integer<long long>(cols[3]);
    const auto ll = parse_real(cols[4]);
    if (!q || !p || !w || !it || !ll) throw DataError("malformed table row on line " + std::to_string(line_no));
    table.rows.push_back({*q, *p, *w, *it, *ll});
  }
  return table;
}

void save_table(const std::filesystem::path& path, const ResultTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  write_table(out, table);
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

ResultTable load_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return read_table(in);
}

}  // namespace homodyne
