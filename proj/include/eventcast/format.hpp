#pragma once

#include <string>

namespace eventcast {

// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

// Fixed number of significant digits ("%.{digits}g").
std::string format_double(double value, int digits);

}  // namespace eventcast
