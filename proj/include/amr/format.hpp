#pragma once

#include <cstdio>
#include <string>

namespace amr {

// Shortest-enough decimal form that round-trips a double exactly.
inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace amr
