#pragma once

#include <stdexcept>
#include <string>

namespace dioph {

// Error categories map one-to-one onto the CLI exit codes:
// invalid input -> 2, budget exceeded -> 3, broken internal invariant -> 4.
enum class Errc {
  InvalidInput,
  BudgetExceeded,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void throw_invalid(const std::string& what) {
  throw Error(Errc::InvalidInput, what);
}

[[noreturn]] inline void throw_budget(const std::string& what) {
  throw Error(Errc::BudgetExceeded, what);
}

[[noreturn]] inline void throw_internal(const std::string& what) {
  throw Error(Errc::Internal, what);
}

// Internal cross-checks (two algorithms that must agree, certificate
// validation before emission). Failures indicate a bug, never bad input.
inline void check_internal(bool ok, const std::string& what) {
  if (!ok) throw_internal(what);
}

}  // namespace dioph
