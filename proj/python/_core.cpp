#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "netinfer/datalog/engine.hpp"
#include "netinfer/datalog/parser.hpp"
#include "netinfer/inference/pipeline.hpp"
#include "netinfer/io/io.hpp"
#include "netinfer/nim/schema.hpp"
#include "netinfer/sim/landscape.hpp"

namespace py = pybind11;
using namespace netinfer;

namespace {

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::vector<std::string> evaluate(const std::string& source, bool naive, unsigned threads) {
    auto program = dl::parse_program(source);
    auto sp = dl::stratify(program);
    dl::FactStore store;
    for (const auto& fact : program.facts) store.insert(fact, dl::Origin::Discovered);
    py::gil_scoped_release release;
    auto result = naive ? dl::evaluate_naive(sp, store) : dl::evaluate_seminaive(sp, store, {threads});
    return lines(io::format_facts(result.derived_facts()));
}

py::list validate(const std::string& facts) {
    auto report = nim::validate_facts(nim::Catalog::standard(), dl::parse_fact_file(facts));
    py::list out;
    for (const auto& v : report.violations) out.append(py::make_tuple(v.fact_index, nim::to_string(v.kind), v.message));
    return out;
}

std::string run_infer(const std::string& facts_text, std::optional<std::string> rules_dir, bool lenient) {
    const auto& catalog = nim::Catalog::standard();
    auto facts = dl::parse_fact_file(facts_text);
    auto validation = nim::validate_facts(catalog, facts);
    if (!validation.ok()) {
        if (!lenient) {
            const auto& v = validation.violations.front();
            throw nim::SchemaError("fact " + std::to_string(v.fact_index + 1) + ": " + nim::to_string(v.kind) + ": " +
                                   v.message);
        }
        facts = validation.valid;
    }
    auto rules = rules_dir ? infer::RuleSet::load(*rules_dir) : infer::RuleSet::bundled();
    py::gil_scoped_release release;
    return io::export_network(infer::run_pipeline(infer::make_store(facts, catalog), rules, catalog));
}

py::list score(const std::string& network_json, const std::string& truth_json) {
    auto report = sim::score(io::import_network(network_json), io::import_truth(truth_json));
    py::list out;
    for (const auto* row : report.rows()) {
        py::dict d;
        d["label"] = row->label;
        d["expected"] = row->expected;
        d["found"] = row->found;
        d["correct"] = row->correct;
        d["unexpected"] = row->unexpected;
        d["percentage"] = row->percentage();
        out.append(d);
    }
    return out;
}

py::tuple simulate(std::int64_t systems, std::int64_t hosts, std::int64_t middlewares, std::int64_t flows,
                   double duplication, double attr_loss, std::uint64_t seed) {
    auto s = sim::generate({systems, hosts, middlewares, flows, duplication, attr_loss, seed});
    return py::make_tuple(io::format_facts(s.facts), io::export_truth(s.truth));
}

py::dict fixtures() {
    auto fx = sim::build_fixtures();
    py::dict out;
    out["hxp"] = py::make_tuple(io::format_facts(fx.hxp.facts), io::export_truth(fx.hxp.truth));
    out["h73"] = py::make_tuple(io::format_facts(fx.h73.facts), io::export_truth(fx.h73.truth));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Datalog evaluation and integration network inference";
    m.attr("SCHEMA_VERSION") = io::kSchemaVersion;

    py::register_exception<dl::ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<dl::UnstratifiableError>(m, "UnstratifiableError", PyExc_ValueError);
    py::register_exception<dl::UnsafeRuleError>(m, "UnsafeRuleError", PyExc_ValueError);
    py::register_exception<dl::ArityError>(m, "ArityError", PyExc_ValueError);
    py::register_exception<nim::SchemaError>(m, "SchemaError", PyExc_ValueError);
    py::register_exception<io::FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<io::IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<sim::InfeasibleConfig>(m, "InfeasibleConfig", PyExc_ValueError);

    m.def("evaluate", &evaluate, py::arg("source"), py::arg("naive") = false, py::arg("threads") = 1,
          "Evaluate a program with inline facts; returns the derived facts, sorted, one per string.");
    m.def("validate", &validate, py::arg("facts"),
          "Check facts against the catalog; returns (fact_index, kind, message) per violation.");
    m.def("infer", &run_infer, py::arg("facts"), py::arg("rules_dir") = py::none(), py::arg("lenient") = false,
          "Run the inference pipeline; returns the network as JSON.");
    m.def("to_dot", [](const std::string& network_json) { return io::to_dot(io::import_network(network_json)); },
          py::arg("network_json"));
    m.def(
        "report",
        [](const std::string& network_json, std::optional<std::string> truth_json) {
            auto graph = io::import_network(network_json);
            if (!truth_json) return io::format_report(graph);
            auto s = sim::score(graph, io::import_truth(*truth_json));
            return io::format_report(graph, &s);
        },
        py::arg("network_json"), py::arg("truth_json") = py::none());
    m.def("score", &score, py::arg("network_json"), py::arg("truth_json"));
    m.def("simulate", &simulate, py::arg("systems") = 0, py::arg("hosts") = 0, py::arg("middlewares") = 0,
          py::arg("flows") = 0, py::arg("duplication") = 0.0, py::arg("attr_loss") = 0.0, py::arg("seed") = 0,
          "Generate a synthetic landscape; returns (facts, truth_json).");
    m.def("schema", [](bool markdown) { return nim::catalog_as_declarations(nim::Catalog::standard(), markdown); },
          py::arg("markdown") = false);
    m.def("fixtures", &fixtures, "The bundled middleware fixtures as {name: (facts, truth_json)}.");
}
