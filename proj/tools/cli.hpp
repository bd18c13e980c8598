#pragma once

#include <iosfwd>

namespace qpool::cli {

/// Entry point of the `qpool` command. Returns the process exit code; errors
/// are written to `err` as "<ErrorName>: <message>".
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qpool::cli
