#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace comte {

/// Entry point of the `comte` tool. args[0] is the program name.
/// Failures print {"error": {"code": ..., "message": ...}} to `err` and return nonzero.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace comte
