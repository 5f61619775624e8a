#pragma once

#include <iosfwd>

namespace simm {

/// Entry point of the `simm` command. Returns 0 on success, 2 on usage
/// errors and 1 on runtime faults; diagnostics go to `err`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace simm
