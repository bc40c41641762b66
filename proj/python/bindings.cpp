#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "occ/analysis.hpp"
#include "occ/cli.hpp"

namespace py = pybind11;
using namespace occ;

namespace {

Type as_type(const py::object& o) {
  if (py::isinstance<py::str>(o)) return parse_type(o.cast<std::string>());
  return o.cast<Type>();
}

Context make_context(const std::vector<std::pair<std::string, py::object>>& entries) {
  Context c;
  for (const auto& [name, ty] : entries) c.push_back(name, as_type(ty));
  return c;
}

Valuation make_valuation(const std::vector<std::pair<std::string, Value>>& entries) {
  Valuation v;
  for (const auto& [name, val] : entries) v.push_back(name, val);
  return v;
}

py::list deps_list(const DepVector& d) {
  py::list out;
  for (const auto& e : d) out.append(py::make_tuple(e.name, static_cast<int>(e.dep)));
  return out;
}

Term as_term(const py::object& o) {
  if (py::isinstance<py::str>(o)) return parse_term(o.cast<std::string>());
  return o.cast<Term>();
}

}  // namespace

PYBIND11_MODULE(_occ, m) {
  static py::exception<Error> occ_error(m, "OccError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::tuple args = py::make_tuple(std::string(error_kind_name(e.kind())), e.message(), e.subject());
      PyErr_SetObject(occ_error.ptr(), args.ptr());
    }
  });

  py::class_<Type>(m, "Type")
      .def_static("parse", [](const std::string& s) { return parse_type(s); })
      .def_static("atom", &Type::atom)
      .def_static("product", &Type::product)
      .def("is_atom", &Type::is_atom)
      .def("text", [](const Type& t, bool ascii) { return print_type(t, PrintOptions{ascii}); }, py::arg("ascii") = false)
      .def("__str__", [](const Type& t) { return print_type(t); })
      .def("__repr__", [](const Type& t) { return "Type(" + print_type(t, PrintOptions{true}) + ")"; })
      .def("__eq__", [](const Type& a, const Type& b) { return alpha_equal(a, b); });

  py::class_<Term>(m, "Term")
      .def_static("parse", [](const std::string& s) { return parse_term(s); })
      .def("text", [](const Term& t, bool ascii) { return print_term(t, PrintOptions{ascii}); }, py::arg("ascii") = false)
      .def("__str__", [](const Term& t) { return print_term(t); })
      .def("__repr__", [](const Term& t) { return "Term(" + print_term(t, PrintOptions{true}) + ")"; })
      .def("__eq__", [](const Term& a, const Term& b) { return alpha_equal(a, b); });

  py::class_<Context>(m, "Context")
      .def(py::init(&make_context), py::arg("entries") = std::vector<std::pair<std::string, py::object>>{})
      .def("names", &Context::names)
      .def("type_of", [](const Context& c, const std::string& n) { return c.type_of(n); })
      .def("__len__", &Context::size)
      .def("__str__", [](const Context& c) { return print_context(c); });

  py::class_<Value>(m, "Value")
      .def_static("atom", &Value::atom, py::arg("atom_type"), py::arg("constant"))
      .def_static("pair", &Value::pair)
      .def("is_atom", &Value::is_atom)
      .def("is_pair", &Value::is_pair)
      .def("is_closure", &Value::is_closure)
      .def_property_readonly("constant", [](const Value& v) { return v.constant(); })
      .def_property_readonly("first", [](const Value& v) { return v.first(); })
      .def_property_readonly("second", [](const Value& v) { return v.second(); })
      .def_property_readonly("pending", [](const Value& v) { return v.pending(); })
      .def_property_readonly("captured", [](const Value& v) {
        py::list out;
        for (const auto& c : v.captured()) out.append(py::make_tuple(c.name, c.value));
        return out;
      })
      .def("text", [](const Value& v, bool ascii) { return print_value(v, PrintOptions{ascii}); }, py::arg("ascii") = false)
      .def("__str__", [](const Value& v) { return print_value(v); })
      .def("__repr__", [](const Value& v) { return "Value(" + print_value(v, PrintOptions{true}) + ")"; })
      .def("__eq__", &same_value);

  py::class_<InferResult>(m, "Typing")
      .def_property_readonly("phi", [](const InferResult& r) { return deps_list(r.phi); })
      .def_readonly("type", &InferResult::type)
      .def("derivation", [](const InferResult& r, bool ascii) { return render_typing_derivation(*r.derivation, PrintOptions{ascii}); },
           py::arg("ascii") = false);

  m.def("parse_term", [](const std::string& s) { return parse_term(s); });
  m.def("parse_type", [](const std::string& s) { return parse_type(s); });
  m.def(
      "infer", [](const Context& c, const py::object& e) { return infer(c, as_term(e)); }, py::arg("context"),
      py::arg("term"));

  m.def(
      "eval_open",
      [](const std::vector<std::pair<std::string, Value>>& vals, const py::object& e, std::optional<Context> typing,
         std::size_t max_steps) {
        EvalOptions o;
        o.typing = std::move(typing);
        o.self_check = o.typing.has_value();
        o.max_steps = max_steps;
        EvalResult r = eval_open(make_valuation(vals), as_term(e), o);
        py::dict check;
        check["checks"] = r.self_check.checks;
        check["failures"] = r.self_check.failures;
        check["premise_failures"] = r.self_check.premise_failures;
        check["typing_lost"] = r.self_check.typing_lost;
        return py::make_tuple(r.value, check);
      },
      py::arg("valuation"), py::arg("term"), py::arg("typing") = py::none(), py::arg("max_steps") = 1000000);
  m.def(
      "eval_classic",
      [](const std::vector<std::pair<std::string, Value>>& vals, const py::object& e, bool ascii) {
        return print_classic_value(eval_classic(classic_env_of(make_valuation(vals)), as_term(e)).value,
                                   PrintOptions{ascii});
      },
      py::arg("valuation"), py::arg("term"), py::arg("ascii") = false);
  m.def(
      "equivalent",
      [](const std::vector<std::pair<std::string, Value>>& vals, const py::object& e) {
        Valuation v = make_valuation(vals);
        Term t = as_term(e);
        ClassicEnv w = classic_env_of(v);
        return values_equiv_semantics(v, eval_open(v, t).value, w, eval_classic(w, t).value);
      },
      py::arg("valuation"), py::arg("term"));
  m.def(
      "value_has_type",
      [](const Context& c, const Value& v, const py::object& t) { return value_has_type(c, v, as_type(t)); },
      py::arg("context"), py::arg("value"), py::arg("type"));

  m.def(
      "check_noninterference",
      [](const Context& c, const py::object& e, const std::string& fmt, bool ascii) {
        NonInterferenceReport r = check_noninterference(c, as_term(e), AtomDomain{});
        return fmt == "json" ? report_json(r) : report_text(r, PrintOptions{ascii});
      },
      py::arg("context"), py::arg("term"), py::arg("report_format") = "json", py::arg("ascii") = false);
  m.def(
      "gen_typed_term",
      [](const Context& c, int depth, std::uint64_t seed, bool allow_fix) {
        GenOptions o;
        o.allow_fix = allow_fix;
        return gen_typed_term(c, std::nullopt, depth, seed, o);
      },
      py::arg("context"), py::arg("depth"), py::arg("seed"), py::arg("allow_fix") = false);

  m.def(
      "run",
      [](const std::string& src, bool ascii, bool noninterference, bool classic, const std::string& fmt) {
        CliOptions o;
        o.ascii = ascii;
        o.check_noninterference = noninterference;
        o.classic = classic;
        o.report_format = fmt;
        CliOutcome r = run(o, src);
        return py::make_tuple(r.exit_code, r.out, r.err);
      },
      py::arg("source"), py::arg("ascii") = false, py::arg("check_noninterference") = false,
      py::arg("classic") = false, py::arg("report_format") = "text");
}
