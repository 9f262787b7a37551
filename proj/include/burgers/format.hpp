#pragma once

#include <string>

namespace burgers {

/// Shortest round-trip-safe text for a double: 17 significant digits, '.'
/// decimal point, independent of the locale. Negative zero prints as "0".
std::string format_double(double v);

}  // namespace burgers
