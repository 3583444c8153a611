#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace bfree::cli {

/// Exit codes: 0 success, 1 domain error (JSON on err), 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace bfree::cli
