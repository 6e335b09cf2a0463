#pragma once

#include <string>

namespace textmag {

/// 12 significant digits, '.' separator, "inf"/"-inf"/"nan"; locale independent.
std::string format_real(double value);

}  // namespace textmag
