#pragma once

#include <filesystem>
#include <iosfwd>

#include "homodyne/simulator.hpp"

namespace homodyne {

inline constexpr int kDatasetFormatVersion = 1;

/// Text format: `# key=value` header lines (format_version, eta, state, seed, phases,
/// per_phase), then one `theta<TAB>x` line per record, LF endings, 17 significant digits.
void write_dataset(std::ostream& out, const Dataset& data);

/// Throws DataError on malformed headers or records.
Dataset read_dataset(std::istream& in);

void save_dataset(const std::filesystem::path& path, const Dataset& data);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace homodyne
