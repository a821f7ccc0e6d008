#pragma once

#include <sstream>
#include <string>

namespace lhsis::detail {

/// Round-trippable decimal rendering for error messages.
inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace lhsis::detail
