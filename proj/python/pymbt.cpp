#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mbt/cli.hpp"
#include "mbt/expr.hpp"
#include "mbt/generator.hpp"
#include "mbt/mapping.hpp"
#include "mbt/model_io.hpp"
#include "mbt/refsut.hpp"
#include "mbt/runner.hpp"
#include "mbt/serialize.hpp"

namespace py = pybind11;
using namespace mbt;

namespace {

// json <-> python through the stdlib json module
py::object to_py(const json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

json from_py(const py::handle& o) {
    return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::dict ledger_dict(const CoverageLedger& l) {
    py::dict d;
    d["visited_states"] = l.visitedStates;
    d["traversed_transitions"] = l.traversedTransitions;
    d["reachable_states"] = l.reachableStates;
    d["reachable_transitions"] = l.reachableTransitions;
    d["state_percent"] = l.state_percent();
    d["transition_percent"] = l.transition_percent();
    return d;
}

py::list suite_list(const std::vector<AbstractTestCase>& tests) {
    py::list out;
    std::istringstream in(suite_to_jsonl(tests));
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) out.append(to_py(json::parse(line)));
    return out;
}

std::vector<AbstractTestCase> suite_from_py(const py::list& tests) {
    std::string text;
    for (const auto& t : tests) text += from_py(t).dump() + "\n";
    return suite_from_jsonl(text);
}

}  // namespace

PYBIND11_MODULE(_pymbt, m) {
    m.doc() = "EFSM model-based testing: models, generation, instantiation, execution";

    py::register_exception<Error>(m, "MbtError");

    m.def("parse_expr", [](const std::string& src) { return pretty_print(*parse_expr(src)); }, py::arg("source"),
          "Parses an expression and returns its canonical text.");
    m.def(
        "evaluate",
        [](const std::string& src, const py::dict& variables) {
            Context ctx = context_from_json(from_py(variables));
            return to_py(to_json(eval_expr(*parse_expr(src), ctx)));
        },
        py::arg("source"), py::arg("variables") = py::dict());

    py::class_<EfsmModel>(m, "Model")
        .def_property_readonly("states", [](const EfsmModel& e) {
            std::vector<std::string> out;
            for (const auto& s : e.states()) out.push_back(s.label);
            return out;
        })
        .def_property_readonly("transitions", [](const EfsmModel& e) {
            std::vector<std::string> out;
            for (const auto& t : e.transitions()) out.push_back(edge_key(t));
            return out;
        })
        .def_property_readonly("content_hash", [](const EfsmModel& e) { return content_hash(e); })
        .def("labels", [](const EfsmModel& e) { return extract_labels(e).all(); })
        .def("validate", [](const EfsmModel& e) {
            py::list out;
            for (const auto& f : validate(e).findings) {
                py::dict d;
                d["kind"] = f.kind;
                d["subject"] = f.subject;
                d["message"] = f.message;
                out.append(d);
            }
            return out;
        });

    m.def("load_model", [](const std::string& path) { return load_model(path); }, py::arg("path"),
          "Loads and flattens a model file or bundle directory.");
    m.def("parse_dsl", [](const std::string& text) { return flatten(parse_dsl(text)); }, py::arg("text"));

    m.def(
        "generate",
        [](const EfsmModel& model, std::uint64_t seed, const std::string& criteria, std::size_t maxSteps) {
            auto crit = StoppingCriterion::parse(criteria);
            crit.maxStepsPerTest = maxSteps;
            auto suite = generate_suite(model, crit, seed, model.initial_context());
            py::dict d;
            d["tests"] = suite_list(suite.tests);
            d["coverage"] = ledger_dict(suite.ledger);
            d["warnings"] = suite.warnings;
            return d;
        },
        py::arg("model"), py::arg("seed"), py::arg("criteria") = "tests(100) && states(100) && transitions(100)",
        py::arg("max_steps") = 200);

    m.def(
        "measure_coverage",
        [](const py::list& tests, const EfsmModel& model) { return ledger_dict(measure_coverage(suite_from_py(tests), model)); },
        py::arg("tests"), py::arg("model"));

    m.def(
        "instantiate",
        [](const py::list& tests, const EfsmModel& model, const std::string& tableText) {
            auto table = parse_table(tableText);
            auto hash = extract_labels(model).contentHash;
            std::vector<ConcreteTestCase> out;
            for (const auto& t : suite_from_py(tests)) out.push_back(instantiate(t, table, default_group_for(table), hash));
            return concrete_to_jsonl(out);
        },
        py::arg("tests"), py::arg("model"), py::arg("table"), "Returns the concrete suite as JSON Lines.");

    m.def(
        "run_reference",
        [](const std::string& concreteJsonl, const py::dict& config, std::size_t jobs) {
            auto tests = concrete_from_jsonl(concreteJsonl);
            auto driver = make_refsut_driver();
            json cfg = from_py(config);
            TestReport report;
            {
                py::gil_scoped_release nogil;
                report = run_suite(tests, *driver, cfg, jobs);
            }
            return to_py(report_to_json(report));
        },
        py::arg("concrete"), py::arg("config"), py::arg("jobs") = 1,
        "Runs a concrete suite against the in-process reference app and returns the report.");

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code = run_cli(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the mbt command line in-process; returns (exit code, stdout, stderr).");
}
