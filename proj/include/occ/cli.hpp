#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "occ/eval.hpp"
#include "occ/parse.hpp"
#include "occ/print.hpp"
#include "occ/runtime.hpp"
#include "occ/typing.hpp"

namespace occ {

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitSyntax = 2, kExitHarness = 3 };

struct CliOptions {
  bool typing_derivation = false;
  bool reduction_derivation = false;
  bool check_noninterference = false;
  bool classic = false;
  bool ascii = false;
  bool strict = false;  // no auto-binding of free variables
  std::size_t max_steps = 1000000;
  std::string report_format = "text";  // or "json"
};

struct CliOutcome {
  int exit_code = kExitOk;
  std::string out;
  std::string err;
};

// Free variables bound to fresh atoms: x : ty_x, x ↦ val_x.
struct AutoEnvironment {
  Context context;
  Valuation valuation;
};
AutoEnvironment auto_environment(const std::vector<std::string>& names);

CliOutcome run(const CliOptions& options, std::string_view src);

// One node per line, "[Rule] judgment", premises indented below.
std::string render_typing_derivation(const TypingDerivation& d, const PrintOptions& o = {});
std::string render_reduction_derivation(const ReductionDerivation& d, const PrintOptions& o = {});
std::string render_classic_derivation(const ClassicDerivation& d, const PrintOptions& o = {});

}  // namespace occ
