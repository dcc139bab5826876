#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace wnl {

/// Exit codes: 0 success, 1 a checked inequality failed (or report found no records), 2 usage or input error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Default JSON-lines store path.
inline constexpr const char* kDefaultStore = "wnl_results.jsonl";

}  // namespace wnl
