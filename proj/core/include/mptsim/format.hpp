#pragma once

#include <string>

namespace mptsim {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_real(double value);

/// `%.6g`, the CSV convention for measured quantities.
std::string format_sig6(double value);

}  // namespace mptsim
