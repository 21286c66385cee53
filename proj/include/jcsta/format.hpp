#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace jcsta {

// CSV number formatting: 12 significant digits, '.' decimal.
inline std::string fmt_num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);
  return buf;
}

inline std::string csv_row(const std::vector<double>& values) {
  std::string line;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) line += ',';
    line += fmt_num(values[i]);
  }
  line += '\n';
  return line;
}

}  // namespace jcsta
