#include "teamlog/errors.hpp"

namespace teamlog {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kSymbol: return "unknown_symbol";
    case ErrorKind::kUnbound: return "unbound_variable";
    case ErrorKind::kArity: return "arity";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kCapture: return "capture";
    case ErrorKind::kFragment: return "fragment";
    case ErrorKind::kBudget: return "budget_exceeded";
    case ErrorKind::kShape: return "shape";
    case ErrorKind::kPrecondition: return "precondition";
    case ErrorKind::kNoUltrafilter: return "no_ultrafilter";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace teamlog
