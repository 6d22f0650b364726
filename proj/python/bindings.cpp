#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>

#include "actrchr/bisim.hpp"
#include "actrchr/parser.hpp"
#include "actrchr/semantics.hpp"
#include "actrchr/translator.hpp"

namespace py = pybind11;

namespace {

actr::FailRequest fail_mode(const std::string& s) {
  if (s == "nil") return actr::FailRequest::Nil;
  if (s == "stuck") return actr::FailRequest::Stuck;
  throw py::value_error("fail_request must be 'nil' or 'stuck'");
}

actr::Semantics semantics(const actr::Model& m, const std::string& fail) {
  return actr::Semantics(m, actr::ArchitectureConfig::abstract_semantics(m.buffer_names(), fail_mode(fail)));
}

}  // namespace

PYBIND11_MODULE(_actrchr, m) {
  m.doc() = "ACT-R abstract semantics, CHR translation and bisimulation checking";

  py::register_exception<actr::ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<actr::Model>(m, "Model")
      .def_property_readonly("buffers", [](const actr::Model& model) {
        std::vector<std::string> out;
        for (const auto& b : model.buffer_names()) out.push_back(b.str());
        return out;
      })
      .def_property_readonly("rule_names", [](const actr::Model& model) {
        std::vector<std::string> out;
        for (const auto& r : model.rules) out.push_back(r.name.str());
        return out;
      })
      .def("__str__", &actr::print_model);

  py::class_<actr::AbstractState>(m, "State")
      .def("__str__", [](const actr::AbstractState& s) { return actr::to_string(s); })
      .def("__eq__", [](const actr::AbstractState& a, const actr::AbstractState& b) { return a == b; })
      .def_property_readonly("gamma", [](const actr::AbstractState& s) {
        std::vector<std::tuple<std::string, std::string, bool>> out;
        for (const auto& [b, c] : s.gamma) out.emplace_back(b.str(), c.chunk.str(), c.pending);
        return out;
      })
      .def("chunk", [](const actr::AbstractState& s, const std::string& id) -> py::object {
        const actr::Chunk* c = s.store.find(actr::Symbol(id));
        if (!c) return py::none();
        py::dict vals;
        for (const auto& sv : c->val) vals[py::str(sv.slot.str())] = sv.value.str();
        return py::make_tuple(c->type.str(), vals);
      });

  m.def("parse_model", [](const std::string& text, const std::string& file) { return actr::parse_model(text, file); },
        py::arg("text"), py::arg("file") = "<input>");
  m.def("print_model", &actr::print_model);
  m.def("validate", [](const actr::Model& model) {
    std::vector<std::string> out;
    for (const auto& d : actr::validate(model)) out.push_back(d.str());
    return out;
  });
  m.def("normalize", [](const actr::Model& model) {
    actr::Model out = model;
    out.rules = actr::Semantics(model).rules();
    return out;
  });
  m.def("initial_state", &actr::initial_state);
  m.def("canonical", &actr::canonical);
  m.def("state_hash", &actr::state_hash);
  m.def(
      "successors",
      [](const actr::Model& model, const actr::AbstractState& s, const std::string& fail) {
        std::vector<std::pair<std::string, actr::AbstractState>> out;
        for (auto& t : semantics(model, fail).successors(s)) out.emplace_back(t.label.str(), std::move(t.target));
        return out;
      },
      py::arg("model"), py::arg("state"), py::arg("fail_request") = "nil");
  m.def(
      "run",
      [](const actr::Model& model, std::uint64_t seed, std::size_t depth, const std::string& fail) {
        const auto sem = semantics(model, fail);
        std::mt19937_64 rng(seed);
        actr::AbstractState state = actr::initial_state(model);
        std::vector<std::string> trace;
        for (std::size_t i = 0; i < depth; ++i) {
          auto next = sem.successors(state);
          if (next.empty()) break;
          auto& chosen = next[rng() % next.size()];
          trace.push_back(chosen.label.str());
          state = std::move(chosen.target);
        }
        return std::make_pair(trace, state);
      },
      py::arg("model"), py::arg("seed") = 0, py::arg("depth") = 16, py::arg("fail_request") = "nil");
  m.def("translate", [](const actr::Model& model) { return actr::chr::print_program(actr::chr::chr_of_model(model)); });
  m.def("chr_of_state",
        [](const actr::AbstractState& s) { return actr::chr::to_string(actr::chr::chr_of_state(s)); });
  m.def(
      "check",
      [](const actr::Model& model, std::size_t depth, const std::string& fail) {
        actr::chr::BisimOptions options;
        options.fail_request = fail_mode(fail);
        const auto report = actr::chr::bisim_check(model, actr::initial_state(model), depth, options);
        py::dict out;
        out["passed"] = report.pass();
        out["nodes"] = report.nodes;
        out["effect_checks"] = report.effect_checks;
        out["text"] = report.text();
        out["records"] = report.records();
        return out;
      },
      py::arg("model"), py::arg("depth") = 3, py::arg("fail_request") = "nil");
}
