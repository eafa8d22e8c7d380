#pragma once

#include <iosfwd>

namespace wqn {

/// Entry point of the `wqn` tool. Returns 0 on success, 2 on usage or
/// configuration errors and 1 on runtime failures; every failure prints a
/// single "error: ..." line to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wqn
