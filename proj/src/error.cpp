#include "occ/error.hpp"

namespace occ {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::IllScoped: return "IllScoped";
    case ErrorKind::NotPrefix: return "NotPrefix";
    case ErrorKind::EscapeError: return "EscapeError";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::NotAFunction: return "NotAFunction";
    case ErrorKind::UnboundVariable: return "UnboundVariable";
    case ErrorKind::PrefixError: return "PrefixError";
    case ErrorKind::StuckError: return "StuckError";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::MalformedPending: return "MalformedPending";
    case ErrorKind::ValueTypeMismatch: return "ValueTypeMismatch";
    case ErrorKind::WitnessNotFound: return "WitnessNotFound";
    case ErrorKind::CombinatorialLimit: return "CombinatorialLimit";
    case ErrorKind::GenerationExhausted: return "GenerationExhausted";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::Internal: return "InternalError";
  }
  return "Unknown";
}

std::string SourceLocation::to_string() const {
  return std::to_string(line) + ":" + std::to_string(column);
}

Error::Error(ErrorKind kind, std::string message, SourceLocation loc)
    : std::runtime_error(message), kind_(kind), message_(std::move(message)), loc_(loc) {
  refresh();
}

Error& Error::with_subject(std::string subject) {
  subject_ = std::move(subject);
  return *this;
}

void Error::push_path(std::string step) {
  path_.insert(path_.begin(), std::move(step));
  refresh();
}

void Error::set_location_if_unknown(SourceLocation loc) {
  if (!loc_.known() && loc.known()) {
    loc_ = loc;
    refresh();
  }
}

std::string Error::describe() const {
  std::string out(error_kind_name(kind_));
  if (loc_.known()) out += " at " + loc_.to_string();
  out += ": " + message_;
  if (!path_.empty()) {
    out += "\n  derivation path: ";
    for (std::size_t i = 0; i < path_.size(); ++i) {
      if (i) out += " > ";
      out += path_[i];
    }
  }
  return out;
}

void Error::refresh() { what_ = describe(); }

void fail(ErrorKind kind, std::string message) { throw Error(kind, std::move(message)); }

void internal_error(std::string message) { throw Error(ErrorKind::Internal, std::move(message)); }

}  // namespace occ
