#pragma once

#include <string>
#include <string_view>

namespace embedshape {

// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

// Strict decimal parse of the whole field; false on trailing garbage or overflow.
bool parse_double(std::string_view text, double& out);

}  // namespace embedshape
