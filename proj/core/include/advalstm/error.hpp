#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace advalstm {

enum class ErrorKind {
  kParse,      // malformed input row or config line
  kData,       // value violates a domain precondition
  kAlignment,  // no common trading days
  kWindow,     // not enough history for a feature or indicator
  kShape,      // tensor / parameter dimension mismatch
  kNumeric,    // NaN or Inf produced
  kContract,   // caller violated an operation precondition
  kIo,         // file missing or unreadable
  kMismatch,   // artifacts produced from different inputs
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` lets callers map
/// failures onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace advalstm
