#include "advalstm/error.hpp"

namespace advalstm {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kData: return "data error";
    case ErrorKind::kAlignment: return "alignment error";
    case ErrorKind::kWindow: return "window error";
    case ErrorKind::kShape: return "shape error";
    case ErrorKind::kNumeric: return "numeric error";
    case ErrorKind::kContract: return "contract error";
    case ErrorKind::kIo: return "io error";
    case ErrorKind::kMismatch: return "artifact mismatch";
  }
  return "error";
}

void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

}  // namespace advalstm
