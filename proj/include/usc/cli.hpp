#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace usc {

// Exit codes: 0 ok, 1 physics failure, 2 bad config or usage.
int cli_main(int argc, char** argv);
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace usc
