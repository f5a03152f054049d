#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace meetplay {

/// Entry point of the `meetplay` binary. args excludes the program name.
/// Returns 0 on success, 1 on runtime errors and 2 on usage errors.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace meetplay
