#include "homodyne/dataset_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "homodyne/error.hpp"
#include "homodyne/format.hpp"

namespace homodyne {
namespace {

const std::string& require(const std::map<std::string, std::string>& header, const std::string& key) {
  const auto it = header.find(key);
  if (it == header.end()) throw DataError("dataset header is missing '" + key + "'");
  return it->second;
}

template <typename Int>
Int require_integer(const std::map<std::string, std::string>& header, const std::string& key) {
  const auto value = parse_integer<Int>(require(header, key));
  if (!value) throw DataError("dataset header '" + key + "' is not an integer");
  return *value;
}

}  // namespace

void write_dataset(std::ostream& out, const Dataset& data) {
  out << "# format_version=" << kDatasetFormatVersion << '\n';
  out << "# eta=" << format_real(data.eta) << '\n';
  out << "# state=" << data.state_desc << '\n';
  out << "# seed=" << data.seed << '\n';
  out << "# phases=" << data.phases << '\n';
  out << "# per_phase=" << data.per_phase << '\n';
  std::string line;
  for (const auto& r : data.records) {
    line = format_real(r.theta);
    line += '\t';
    line += format_real(r.x);
    line += '\n';
    out << line;
  }
}

Dataset read_dataset(std::istream& in) {
  std::map<std::string, std::string> header;
  Dataset data;
  std::string line;
  std::size_t line_no = 0;
  bool in_header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') throw DataError("dataset must use LF line endings");
    if (in_header && line.starts_with("# ")) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw DataError("malformed header line " + std::to_string(line_no));
      header[line.substr(2, eq - 2)] = line.substr(eq + 1);
      continue;
    }
    if (in_header) {
      in_header = false;
      if (require_integer<int>(header, "format_version") != kDatasetFormatVersion) {
        throw DataError("unsupported dataset format_version");
      }
      const auto eta = parse_real(require(header, "eta"));
      if (!eta || !(*eta > 0.0 && *eta <= 1.0)) throw DataError("dataset eta must lie in (0, 1]");
      data.eta = *eta;
      data.state_desc = require(header, "state");
      data.seed = require_integer<std::uint64_t>(header, "seed");
      data.phases = require_integer<int>(header, "phases");
      data.per_phase = require_integer<int>(header, "per_phase");
      if (data.phases < 1 || data.per_phase < 1) throw DataError("dataset phases/per_phase must be positive");
      data.records.reserve(static_cast<std::size_t>(data.phases) * static_cast<std::size_t>(data.per_phase));
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError("record line " + std::to_string(line_no) + " has no tab");
    const auto theta = parse_real(std::string_view(line).substr(0, tab));
    const auto x = parse_real(std::string_view(line).substr(tab + 1));
    if (!theta || !x || !std::isfinite(*theta) || !std::isfinite(*x)) {
      throw DataError("malformed record on line " + std::to_string(line_no));
    }
    data.records.push_back({*theta, *x});
  }
  if (in_header) throw DataError("dataset has no records");
  const auto expected = static_cast<std::size_t>(data.phases) * static_cast<std::size_t>(data.per_phase);
  if (data.records.size() != expected) {
    throw DataError("dataset holds " + std::to_string(data.records.size()) + " records, header declares " +
                    std::to_string(expected));
  }
  return data;
}

void save_dataset(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  write_dataset(out, data);
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return read_dataset(in);
}

}  // namespace homodyne
