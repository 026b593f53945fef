#pragma once

#include <cstdio>
#include <string>

namespace trotterforge {

/// Round-trippable decimal form of a double (17 significant digits).
inline std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace trotterforge
