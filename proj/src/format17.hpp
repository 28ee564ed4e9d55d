// Internal: full-precision number formatting shared by the file and CSV
// writers.
#pragma once

#include <cstdio>
#include <string>

namespace frameq::detail {

inline std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace frameq::detail
