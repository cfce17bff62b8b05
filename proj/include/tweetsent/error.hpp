#pragma once

#include <stdexcept>
#include <string>

namespace tweetsent {

// Single exception type for data/config/runtime failures. Messages are
// one-line diagnostics suitable for CLI error output.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace tweetsent
