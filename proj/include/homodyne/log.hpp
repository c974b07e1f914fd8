#pragma once

#include <functional>
#include <string>

namespace homodyne {

using WarningSink = std::function<void(const std::string&)>;

// Replaces the process-wide warning sink (default: one line on stderr).
// Passing an empty function silences warnings.
void set_warning_sink(WarningSink sink);

void warn(const std::string& message);

}  // namespace homodyne
