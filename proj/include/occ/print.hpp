#pragma once

#include <string>

#include "occ/eval.hpp"
#include "occ/runtime.hpp"
#include "occ/syntax.hpp"

namespace occ {

struct PrintOptions {
  bool ascii = false;
};

std::string print_dep(Dep d, const PrintOptions& o = {});
std::string print_type(const Type& t, const PrintOptions& o = {});
// x:T,y:U   (no annotations)
std::string print_context(const Context& c, const PrintOptions& o = {});
// x:T¹,y:U⁰
std::string print_annotated_context(const AnnotatedContext& c, const PrintOptions& o = {});
// {x:1, y:0}
std::string print_deps(const DepVector& d);
std::string print_term(const Term& e, const PrintOptions& o = {});
std::string print_value(const Value& v, const PrintOptions& o = {});
std::string print_valuation(const Valuation& v, const PrintOptions& o = {});
std::string print_classic_value(const ClassicValue& v, const PrintOptions& o = {});
std::string print_classic_env(const ClassicEnv& env, const PrintOptions& o = {});

}  // namespace occ
