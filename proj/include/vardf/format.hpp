#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>

#include <json.hpp>

namespace vardf {

// Fixed 6-significant-digit rendering used everywhere a report prints a real
// number, so that identical inputs produce byte-identical files.
inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// A JSON number carrying exactly the 6-significant-digit value, so dumps are
// stable regardless of how the value was computed.
inline nlohmann::json json_number(double v) {
  return nlohmann::json(std::strtod(format_number(v).c_str(), nullptr));
}

inline nlohmann::json json_number(std::optional<double> v) {
  if (!v) return nullptr;
  return json_number(*v);
}

// Round half up at the given number of decimal places.
inline double round_half_up(double v, int decimals) {
  double scale = std::pow(10.0, decimals);
  return std::floor(v * scale + 0.5) / scale;
}

// Renders a fraction as a percentage with one decimal place, half up;
// an undefined value renders as "n/a", never as 0.
inline std::string format_percent(std::optional<double> fraction) {
  if (!fraction) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f%%", round_half_up(*fraction * 100.0, 1));
  return buf;
}

}  // namespace vardf
