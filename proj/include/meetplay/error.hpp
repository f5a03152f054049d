#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace meetplay {

// Every failure surfaced by the library carries a stable kebab-case code
// ("stale-frame", "too-few-participants", ...) that is also what goes out on
// the wire in `error` messages.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  explicit Error(std::string code) : Error(code, code) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace meetplay
