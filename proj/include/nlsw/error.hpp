#pragma once

#include <stdexcept>
#include <string>

namespace nlsw {

// Domain error carrying a short machine-readable code ("no_wave",
// "not_defocusing", ...) that the CLI forwards verbatim.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& msg)
      : std::runtime_error(msg), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

}  // namespace nlsw
