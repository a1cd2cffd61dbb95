#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace synvol::cli {

/// Runs one `synvol` invocation. args[0] is the program name. Errors are
/// reported on `err` as a single JSON object {"error":{"code","message"[,"stage"]}}.
/// Returns 0 on success, 2 on usage errors, 1 on any other failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace synvol::cli
