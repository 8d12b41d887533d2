#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace respert {

/// Shortest decimal string that parses back to exactly the same double.
/// All CSV output goes through this, which is what makes repeated runs
/// byte-identical.
inline std::string fmt_double(double x) {
  char buf[40];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

}  // namespace respert
