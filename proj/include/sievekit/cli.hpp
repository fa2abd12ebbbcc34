#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sievekit::cli {

/// Runs one sievekit invocation. Exit codes: 0 success, 1 usage/parse
/// error, 2 validation failure (e.g. selfcheck mismatch or fuzz
/// counterexample).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sievekit::cli
