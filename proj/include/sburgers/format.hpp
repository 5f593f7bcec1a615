#pragma once

#include <string>

namespace sburgers {

/// Shortest representation that round-trips to the same double.
std::string format_double(double v);

}  // namespace sburgers
