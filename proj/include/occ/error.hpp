#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace occ {

enum class ErrorKind {
  IllScoped,
  NotPrefix,
  EscapeError,
  TypeMismatch,
  NotAFunction,
  UnboundVariable,
  PrefixError,
  StuckError,
  BudgetExceeded,
  MalformedPending,
  ValueTypeMismatch,
  WitnessNotFound,
  CombinatorialLimit,
  GenerationExhausted,
  SyntaxError,
  Internal,
};

std::string_view error_kind_name(ErrorKind kind);

struct SourceLocation {
  int line = 0;
  int column = 0;

  bool known() const { return line > 0; }
  std::string to_string() const;
};

// Every failure of a judgment is reported through this exception. `path`
// lists the derivation nodes (rule tag plus subterm position) leading to the
// failing node, outermost first.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, SourceLocation loc = {});

  ErrorKind kind() const { return kind_; }
  const std::string& message() const { return message_; }
  const SourceLocation& location() const { return loc_; }
  const std::vector<std::string>& path() const { return path_; }

  // Names the error is about (the escaping variable, the unbound name...).
  const std::string& subject() const { return subject_; }
  Error& with_subject(std::string subject);

  // Prepends a path element; used while unwinding the recursion.
  void push_path(std::string step);
  void set_location_if_unknown(SourceLocation loc);

  std::string describe() const;
  const char* what() const noexcept override { return what_.c_str(); }

 private:
  void refresh();

  ErrorKind kind_;
  std::string message_;
  SourceLocation loc_;
  std::vector<std::string> path_;
  std::string subject_;
  std::string what_;
};

[[noreturn]] void fail(ErrorKind kind, std::string message);
[[noreturn]] void internal_error(std::string message);

}  // namespace occ
