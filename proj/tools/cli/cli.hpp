#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gasrom::cli {

/// Runs one `gasrom` invocation. `args` excludes the program name. Returns
/// the process exit code: 0 ok, 2 config/schema/IO, 3 solver, 4 fit,
/// 5 rollout divergence.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gasrom::cli
