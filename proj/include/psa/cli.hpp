#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace psa {

enum ExitStatus : int { kExitOk = 0, kExitInput = 1, kExitInvariant = 2 };

// Entry point of the psa tool. args excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// 17 significant digits, so the text reads back to the same double.
std::string format_double(double v);

}  // namespace psa
