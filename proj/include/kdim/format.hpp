#pragma once

#include <string>

namespace kdim {

// Shortest of %.15g / %.16g / %.17g that round-trips; deterministic, so CSV
// output is byte-identical across runs.
std::string format_real(double value);

}  // namespace kdim
