#include "textmag/format.hpp"

#include <fmt/format.h>

namespace textmag {

std::string format_real(double value) {
  if (value == 0.0) return "0";  // no "-0"
  return fmt::format("{:.12g}", value);
}

}  // namespace textmag
