#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sobv/errors.hpp"
#include "sobv/harness.hpp"
#include "sobv/reduction.hpp"
#include "sobv/smtlib.hpp"

namespace py = pybind11;
using namespace sobv;

namespace {

// Python ints of any size go through their decimal text.
Natural to_natural(const py::int_& v) {
  auto n = parse_decimal(py::str(v).cast<std::string>());
  if (!n) throw py::value_error("expected a non-negative integer");
  return *n;
}

py::dict verdict_dict(const Verdict& v) {
  py::dict d;
  d["status"] = std::string(to_string(v.status));
  d["diagnostic"] = v.diagnostic;
  py::dict w;
  for (const auto& e : v.witness) w[py::str(e.name)] = e.bits;
  d["witness"] = w;
  return d;
}

so2::Interpretation to_interp(const std::map<std::string, std::string>& tables) {
  so2::Interpretation I;
  for (const auto& [name, bits] : tables) {
    unsigned arity = 0;
    while ((std::size_t{1} << arity) < bits.size()) ++arity;
    I[name] = so2::TruthTable::from_msb_string(arity, bits);
  }
  return I;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "SO2 / BV2 decision procedures and the reduction between them";

  auto base = py::register_exception<Error>(m, "SobvError", PyExc_RuntimeError);
  py::register_exception<SyntaxError>(m, "ParseError", base.ptr());
  py::register_exception<ArityError>(m, "ArityError", base.ptr());
  py::register_exception<UnboundSymbolError>(m, "UnboundSymbolError", base.ptr());
  py::register_exception<SortError>(m, "SortError", base.ptr());
  py::register_exception<ResourceExceeded>(m, "ResourceExceeded", base.ptr());

  py::class_<so2::Formula>(m, "So2Formula")
      .def("__str__", [](const so2::Formula& f) { return so2::to_string(f); })
      .def("__repr__", [](const so2::Formula& f) { return "<So2Formula " + so2::to_string(f) + ">"; })
      .def("__eq__", [](const so2::Formula& a, const so2::Formula& b) { return a == b; })
      .def_property_readonly("prefix", [](const so2::Formula& f) {
        py::list out;
        for (const auto& q : so2::prefix(f)) {
          out.append(py::make_tuple(q.universal ? "forall" : "exists", q.symbol.name, q.symbol.arity));
        }
        return out;
      });

  py::class_<bv::Formula>(m, "BvFormula")
      .def("__str__", [](const bv::Formula& f) { return bv::to_string(f); })
      .def("__repr__", [](const bv::Formula& f) { return "<BvFormula " + bv::to_string(f) + ">"; })
      .def("__eq__", [](const bv::Formula& a, const bv::Formula& b) { return a == b; })
      .def("alpha_equivalent", &bv::alpha_equivalent)
      .def("lower", [](const bv::Formula& f) { return bv::lower_indexing(f); })
      .def("prenex", &bv::prenex);

  m.def("parse_so2", [](const std::string& text, bool allow_free) { return so2::parse(text, {allow_free}); },
        py::arg("text"), py::arg("allow_free") = false);

  m.def(
      "validate",
      [](const so2::Formula& f, bool relax_ordering) {
        py::list out;
        for (const auto& d : so2::validate_prenex_closed(f, {relax_ordering})) {
          out.append(py::make_tuple(d.warning ? "warning" : "error", d.message));
        }
        return out;
      },
      py::arg("formula"), py::arg("relax_ordering") = false,
      "List of (severity, message); empty when the formula is closed and prenex.");

  m.def(
      "eval_so2",
      [](const so2::Formula& f, const std::map<std::string, std::string>& tables, unsigned arity_cap) {
        so2::Limits lim;
        lim.max_quantified_arity = arity_cap;
        return so2::eval(f, to_interp(tables), lim);
      },
      py::arg("formula"), py::arg("tables") = std::map<std::string, std::string>{}, py::arg("arity_cap") = 4,
      "tables maps a symbol to its truth table, most significant entry first.");

  m.def(
      "decide_so2",
      [](const so2::Formula& f, std::uint64_t bit_budget, unsigned arity_cap, bool relax_ordering) {
        so2::Limits lim{arity_cap, bit_budget, relax_ordering};
        Verdict v;
        {
          py::gil_scoped_release nogil;
          v = so2::decide_bruteforce(f, lim);
        }
        return verdict_dict(v);
      },
      py::arg("formula"), py::arg("bit_budget") = 24, py::arg("arity_cap") = 4, py::arg("relax_ordering") = false);

  m.def(
      "reduce",
      [](const so2::Formula& f, bool relax_ordering, bool lower) {
        auto r = reduction::reduce(f, {relax_ordering});
        return lower ? bv::lower_indexing(r.formula) : r.formula;
      },
      py::arg("formula"), py::arg("relax_ordering") = false, py::arg("lower") = false);

  m.def(
      "solve_bv2",
      [](const bv::Formula& f, std::uint64_t bit_budget) {
        bv::Limits lim;
        lim.bit_budget = bit_budget;
        Verdict v;
        {
          py::gil_scoped_release nogil;
          v = bv::solve(f, lim);
        }
        return verdict_dict(v);
      },
      py::arg("formula"), py::arg("bit_budget") = 24);

  m.def("formula_size", [](const so2::Formula& f) { return so2::formula_size(f); });
  m.def("formula_size", [](const bv::Formula& f) { return bv::formula_size(f); });

  m.def("emit_smt2", [](const bv::Formula& f) { return smtlib::emit_smt2(f).text; });
  m.def("parse_smt2", [](const std::string& text) { return smtlib::parse_smt2(text); });

  m.def("scalar_length", [](const py::int_& n) { return scalar_length(to_natural(n)); });

  m.def(
      "gen_random_so2",
      [](std::uint64_t seed, unsigned max_arity, unsigned max_symbols, unsigned max_depth) {
        harness::GeneratorConfig cfg;
        cfg.seed = seed;
        cfg.max_arity = max_arity;
        cfg.max_symbols = max_symbols;
        cfg.max_depth = max_depth;
        return harness::gen_random_so2(cfg);
      },
      py::arg("seed"), py::arg("max_arity") = 3, py::arg("max_symbols") = 3, py::arg("max_depth") = 4);

  m.def(
      "cross_check",
      [](const so2::Formula& f) {
        harness::InstanceRecord r;
        {
          py::gil_scoped_release nogil;
          r = harness::cross_check(f, {});
        }
        py::dict d;
        d["so2"] = std::string(to_string(r.so2));
        d["bv2"] = std::string(to_string(r.bv));
        d["agree"] = r.agrees();
        d["skipped"] = r.skipped();
        d["so2_size"] = r.so2_size;
        d["bv2_size"] = r.bv_size;
        d["diagnostic"] = r.diagnostic;
        return d;
      },
      py::arg("formula"));
}
