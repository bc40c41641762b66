#pragma once

#include <initializer_list>
#include <string>
#include <tuple>

#include "occ/syntax.hpp"

namespace build {

using occ::Context;
using occ::Dep;
using occ::DepVector;
using occ::Type;

inline Type at(const std::string& n) { return Type::atom(n); }
inline Type prod(Type a, Type b) { return Type::product(std::move(a), std::move(b)); }

struct Entry {
  std::string name;
  Type type;
  int dep = 0;
};

inline Type clos(std::initializer_list<Entry> captured, const std::string& x, int phi, Type sigma, Type tau) {
  Context c;
  DepVector d;
  for (const auto& e : captured) {
    c.push_back(e.name, e.type);
    d.push_back(e.name, occ::dep_of(e.dep != 0));
  }
  occ::ClosureData data;
  data.captured = occ::AnnotatedContext(std::move(c), std::move(d));
  data.param = x;
  data.param_dep = occ::dep_of(phi != 0);
  data.param_type = std::move(sigma);
  data.result = std::move(tau);
  return Type::closure(std::move(data));
}

inline Context ctx(std::initializer_list<std::pair<std::string, Type>> entries) {
  Context c;
  for (const auto& [n, t] : entries) c.push_back(n, t);
  return c;
}

inline DepVector deps(std::initializer_list<std::pair<std::string, int>> entries) {
  DepVector v;
  for (const auto& [n, d] : entries) v.push_back(n, occ::dep_of(d != 0));
  return v;
}

}  // namespace build
