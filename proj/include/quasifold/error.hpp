#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace quasifold {

/// Library error carrying a stable machine-readable code such as
/// "dimension-mismatch" or "not-composable".
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace quasifold
