#pragma once

#include <cstdio>
#include <string>

// Fixed float formatting (6 significant digits) shared by every CSV/JSON
// emitter so repeated invocations are byte-identical.

namespace tmacap {

inline std::string format_sig(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
  return buf;
}

// Round through the fixed text form; JSON trees carry these so dumps match
// the CSV emitters digit-for-digit.
inline double round_sig(double x, int digits = 6) {
  return std::strtod(format_sig(x, digits).c_str(), nullptr);
}

}  // namespace tmacap
