#include "occ/cli.hpp"

#include <functional>

#include "occ/analysis.hpp"

namespace occ {

AutoEnvironment auto_environment(const std::vector<std::string>& names) {
  AutoEnvironment env;
  for (const auto& n : names) {
    env.context.push_back(n, Type::atom("ty_" + n));
    env.valuation.push_back(n, Value::atom("ty_" + n, "val_" + n));
  }
  return env;
}

namespace {

const char* turnstile(const PrintOptions& o) { return o.ascii ? "|-" : "⊢"; }
const char* evaluates(const PrintOptions& o) { return o.ascii ? "=>" : "⇒"; }

std::string join(const std::vector<std::string>& xs, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
  return out;
}

std::string names_with(const std::vector<std::string>& names, const std::string& prefix) {
  std::vector<std::string> xs;
  for (const auto& n : names) xs.push_back(prefix + n);
  return "(" + join(xs, ", ") + ")";
}

std::string unbound_note(const std::vector<std::string>& names) {
  bool one = names.size() == 1;
  return std::string(one ? "The variable " : "The variables ") + names_with(names, "") +
         (one ? " was" : " were") + " unbound; we add " + (one ? "it" : "them") +
         " to the default\nenvironment with dummy " + (one ? "type " : "types ") + names_with(names, "ty_") +
         " and " + (one ? "value" : "values") + "\n" + names_with(names, "val_") + ".\n";
}

std::string render_error(const Error& e) {
  std::string out = "error: " + std::string(error_kind_name(e.kind())) + ": " + e.message() + "\n";
  if (e.location().known()) out += "  at " + e.location().to_string() + "\n";
  if (!e.path().empty()) out += "  in " + join(e.path(), " / ") + "\n";
  return out;
}

bool uses_fix(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Fix:
      return true;
    case Term::Kind::Var:
      return false;
    case Term::Kind::Lam:
      return uses_fix(t.body());
    case Term::Kind::Proj:
      return uses_fix(t.first());
    default:
      return uses_fix(t.first()) || uses_fix(t.second());
  }
}

}  // namespace

std::string render_typing_derivation(const TypingDerivation& d, const PrintOptions& o) {
  std::string out;
  std::function<void(const TypingDerivation&, int)> go = [&](const TypingDerivation& n, int depth) {
    std::string ctx = print_annotated_context(AnnotatedContext(n.context, n.phi), o);
    out += std::string(2 * depth, ' ') + "[" + n.rule + "] " + ctx + (ctx.empty() ? "" : " ") + turnstile(o) + " " +
           print_term(n.term, o) + " : " + print_type(n.type, o) + "\n";
    for (const auto& p : n.premises) go(*p, depth + 1);
  };
  go(d, 0);
  return out;
}

std::string render_reduction_derivation(const ReductionDerivation& d, const PrintOptions& o) {
  std::string out;
  std::function<void(const ReductionDerivation&, int)> go = [&](const ReductionDerivation& n, int depth) {
    std::string pad(2 * depth, ' ');
    out += pad + "[" + n.rule + "] " + print_valuation(n.env, o) + " " + turnstile(o) + " " + print_term(n.term, o) +
           " " + evaluates(o) + " " + print_value(n.value, o) + "\n";
    for (const auto& p : n.premises) go(*p, depth + 1);
    for (const auto& s : n.substitutions) {
      out += pad + "  [Subst-Value] " + print_value(s.before, o) + (o.ascii ? " ->[" : " →[") + s.var + "\\" +
             print_value(s.bound, o) + "] " + print_value(s.after, o) + "\n";
    }
  };
  go(d, 0);
  return out;
}

std::string render_classic_derivation(const ClassicDerivation& d, const PrintOptions& o) {
  std::string out;
  std::function<void(const ClassicDerivation&, int)> go = [&](const ClassicDerivation& n, int depth) {
    out += std::string(2 * depth, ' ') + "[" + n.rule + "] " + print_classic_env(n.env, o) + " " + turnstile(o) +
           " " + print_term(n.term, o) + " " + evaluates(o) + " " + print_classic_value(n.value, o) + "\n";
    for (const auto& p : n.premises) go(*p, depth + 1);
  };
  go(d, 0);
  return out;
}

CliOutcome run(const CliOptions& options, std::string_view src) {
  CliOutcome res;
  PrintOptions po{options.ascii};
  ParsedProgram prog;
  try {
    prog = parse_program(src);
  } catch (const Error& e) {
    res.err = render_error(e);
    res.exit_code = e.kind() == ErrorKind::SyntaxError ? kExitSyntax : kExitHarness;
    return res;
  }
  res.out += "Parsed expression: " + print_term(prog.term, po) + "\n\n";
  for (const auto& [from, to] : prog.renamed) res.out += "Binder " + from + " renamed to " + to + ".\n\n";

  try {
    if (options.strict && !prog.free.empty()) {
      throw Error(ErrorKind::UnboundVariable, "unbound variables " + names_with(prog.free, ""))
          .with_subject(prog.free.front());
    }
    AutoEnvironment env = auto_environment(prog.free);
    if (!prog.free.empty()) res.out += unbound_note(prog.free) + "\n";

    InferResult typing = infer(env.context, prog.term);
    std::string ctx = print_annotated_context(AnnotatedContext(env.context, typing.phi), po);
    res.out += "Inferred typing:\n  " + ctx + (ctx.empty() ? "" : " ") + turnstile(po) + "\n    " +
               print_term(prog.term, po) + "\n    : " + print_type(typing.type, po) + "\n\n";
    if (options.typing_derivation) {
      res.out += "Typing derivation:\n" + render_typing_derivation(*typing.derivation, po) + "\n";
    }

    EvalOptions eo;
    eo.max_steps = options.max_steps;
    eo.record_derivation = options.reduction_derivation;
    if (options.classic) {
      ClassicResult r = eval_classic(classic_env_of(env.valuation), prog.term, eo);
      res.out += "Result value:\n    " + print_classic_value(r.value, po) + "\n";
      if (options.reduction_derivation) {
        res.out += "\nReduction derivation:\n" + render_classic_derivation(*r.derivation, po);
      }
    } else {
      eo.typing = env.context;
      eo.self_check = true;
      EvalResult r = eval_open(env.valuation, prog.term, eo);
      res.out += "Result value:\n    " + print_value(r.value, po) + "\n";
      if (options.reduction_derivation) {
        res.out += "\nReduction derivation:\n" + render_reduction_derivation(*r.derivation, po);
      }
      // Harness checks on the result.
      std::vector<std::string> problems = r.self_check.failures;
      try {
        check_value(env.context, r.value, typing.type);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::Internal) throw;
        problems.push_back("result value does not have the inferred type: " + e.message());
      }
      if (!problems.empty()) {
        bool fix = uses_fix(prog.term);
        for (const auto& p : problems) res.err += (fix ? "note (fix application): " : "harness violation: ") + p + "\n";
        if (!fix) res.exit_code = kExitHarness;
      }
    }

    if (options.check_noninterference) {
      NonInterferenceOptions no;
      no.max_steps = options.max_steps;
      NonInterferenceReport rep = check_noninterference(env.context, prog.term, AtomDomain{}, no);
      res.out += "\n" + (options.report_format == "json" ? report_json(rep) + "\n" : report_text(rep, po));
      if (!rep.holds()) res.exit_code = kExitHarness;
    }
  } catch (const Error& e) {
    res.err += render_error(e);
    switch (e.kind()) {
      case ErrorKind::SyntaxError:
        res.exit_code = kExitSyntax;
        break;
      case ErrorKind::Internal:
      case ErrorKind::ValueTypeMismatch:
      case ErrorKind::WitnessNotFound:
      case ErrorKind::MalformedPending:
      case ErrorKind::CombinatorialLimit:
        res.exit_code = kExitHarness;
        break;
      default:
        res.exit_code = kExitError;
    }
  }
  return res;
}

}  // namespace occ
