#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mbt/cli.hpp"
#include "mbt/generator.hpp"
#include "mbt/mapping.hpp"
#include "mbt/model_io.hpp"
#include "mbt/refsut.hpp"
#include "mbt/runner.hpp"

namespace mbt {

namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot read '" + p.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + p.string() + "'");
    out << text;
    if (!out) throw Error("write to '" + p.string() + "' failed");
}

json read_json(const fs::path& p) {
    try {
        return json::parse(read_text(p));
    } catch (const json::exception& e) {
        throw Error("'" + p.string() + "' is not valid JSON: " + e.what());
    }
}

fs::path meta_path(const fs::path& suite) {
    return fs::path(suite.string() + ".meta.json");
}

// Model, mapping, and generation problems exit 3; everything else is I/O.
bool is_validation_error(const std::exception& e) {
    return dynamic_cast<const ModelError*>(&e) || dynamic_cast<const ParseError*>(&e) ||
           dynamic_cast<const LabelGrammarError*>(&e) || dynamic_cast<const DslSyntaxError*>(&e) ||
           dynamic_cast<const CycleError*>(&e) || dynamic_cast<const NoExitError*>(&e) ||
           dynamic_cast<const SyntaxError*>(&e) || dynamic_cast<const TypeError*>(&e) ||
           dynamic_cast<const TableError*>(&e) || dynamic_cast<const MissingLabel*>(&e) ||
           dynamic_cast<const UnresolvedPlaceholder*>(&e) || dynamic_cast<const TodoFragment*>(&e) ||
           dynamic_cast<const HashMismatch*>(&e) || dynamic_cast<const BudgetExhausted*>(&e) ||
           dynamic_cast<const GuardTrap*>(&e) || dynamic_cast<const UnknownLabel*>(&e);
}

struct Opts {
    std::string model, suite, concrete, table, out, criteria = "tests(100) && states(100) && transitions(100)";
    std::string qtds, maturity, flavor = "exec", mode = "exec", driver = "refsut", config, report, format = "json";
    std::uint64_t seed = 0;
    std::size_t maxSteps = 200, budget = 10000, jobs = 1;
    bool update = false;
};

int cmd_validate(const Opts& o, std::ostream& out) {
    EfsmModel m = load_model(o.model);
    ValidationReport rep = validate(m);
    for (const auto& f : rep.findings) out << f.kind << " " << f.subject << ": " << f.message << "\n";
    if (!rep.clean()) return kExitInvalid;
    out << "ok: " << m.states().size() << " states, " << m.transitions().size() << " transitions\n";
    return kExitOk;
}

int cmd_generate(const Opts& o, std::ostream& out, std::ostream& err) {
    EfsmModel m = load_model(o.model);
    int bad = 0;
    for (const auto& f : validate(m).findings) {
        if (f.kind.rfind("unreachable-", 0) == 0) continue;
        err << f.kind << " " << f.subject << ": " << f.message << "\n";
        ++bad;
    }
    if (bad) return kExitInvalid;

    Context ctx = m.initial_context();
    if (!o.qtds.empty()) {
        std::optional<Maturity> filter;
        if (!o.maturity.empty()) filter = maturity_from_string(o.maturity);
        std::size_t cursor = 0;
        User u = qtds_get_user(fs::path(o.qtds), filter, cursor);
        std::pair<const char*, std::string> bind[] = {{"userEmail", u.email},
                                                      {"userPassword", u.password},
                                                      {"userName", u.name},
                                                      {"userMaturity", std::string(to_string(u.maturity))}};
        for (auto& [k, v] : bind)
            if (ctx.has(k)) ctx.set(k, v);
    }

    StoppingCriterion crit = StoppingCriterion::parse(o.criteria);
    crit.maxStepsPerTest = o.maxSteps;
    GeneratorOptions gopt;
    gopt.budgetTests = o.budget;
    GeneratedSuite suite = generate_suite(m, crit, o.seed, ctx, gopt);
    for (const auto& w : suite.warnings) err << "warning: " << w << "\n";

    write_text(o.out, suite_to_jsonl(suite.tests));
    json meta = {{"modelHash", content_hash(m)},
                 {"model", m.name()},
                 {"seed", o.seed},
                 {"criterion", crit.to_string()},
                 {"maxSteps", crit.maxStepsPerTest},
                 {"tests", suite.tests.size()},
                 {"discarded", suite.discarded},
                 {"coverage",
                  {{"states", suite.ledger.visitedStates.size()},
                   {"reachableStates", suite.ledger.reachableStates},
                   {"transitions", suite.ledger.traversedTransitions.size()},
                   {"reachableTransitions", suite.ledger.reachableTransitions}}}};
    write_text(meta_path(o.out), meta.dump(2) + "\n");
    out << suite.tests.size() << " tests; state coverage " << suite.ledger.state_percent() << "%, transition coverage "
        << suite.ledger.transition_percent() << "%\n";
    return kExitOk;
}

int cmd_labels(const Opts& o, std::ostream& out) {
    EfsmModel m = load_model(o.model);
    LabelInventory inv = extract_labels(m);
    if (!o.update) {
        for (const auto& l : inv.all()) out << l << "\n";
        return kExitOk;
    }
    MappingTable table(flavor_from_string(o.flavor));
    if (fs::exists(o.table)) table = parse_table(read_text(o.table));
    auto [updated, report] = update_table(std::move(table), inv);
    write_text(o.table, dump_table(updated));
    out << "added " << report.added.size() << ", stale " << report.stale.size() << "\n";
    for (const auto& l : report.added) out << "  + " << l << "\n";
    for (const auto& l : report.stale) out << "  ? " << l << "\n";
    return kExitOk;
}

int cmd_instantiate(const Opts& o, std::ostream& out) {
    auto suite = suite_from_jsonl(read_text(o.suite));
    json meta = read_json(meta_path(o.suite));
    MappingTable table = parse_table(read_text(o.table));
    GroupFor groups = default_group_for(table);
    std::string hash = meta.at("modelHash").get<std::string>();
    std::vector<ConcreteTestCase> concrete;
    for (const auto& t : suite) concrete.push_back(instantiate(t, table, groups, hash));

    if (o.mode == "emit") {
        if (table.flavor() != Flavor::Raw) throw TableError("emit mode needs a raw-flavor table");
        fs::create_directories(o.out);
        for (const auto& c : concrete) write_text(fs::path(o.out) / ("test-" + std::to_string(c.id) + ".txt"), emit_text(c));
    } else {
        if (table.flavor() != Flavor::Exec) throw TableError("exec mode needs an exec-flavor table");
        write_text(o.out, concrete_to_jsonl(concrete));
    }
    out << concrete.size() << " concrete tests written to " << o.out << "\n";
    return kExitOk;
}

int cmd_run(const Opts& o, std::ostream& out) {
    auto tests = concrete_from_jsonl(read_text(o.concrete));
    json config = json::object();
    if (!o.config.empty()) {
        config = read_json(o.config);
        if (config.contains("qtdsPath")) {
            fs::path q = config.at("qtdsPath").get<std::string>();
            if (q.is_relative()) config["qtdsPath"] = (fs::path(o.config).parent_path() / q).string();
        }
    }
    auto driver = DriverRegistry::standard().make(o.driver);
    TestReport report = run_suite(tests, *driver, config, o.jobs);
    if (!o.report.empty()) write_text(o.report, write_report(report, ReportFormat::Json));
    ReportSummary s = report.summary();
    out << s.total << " tests: " << s.passed << " passed, " << s.failed << " failed, " << s.errored << " errored\n";
    for (const auto& t : report.tests) {
        if (t.verdict == Verdict::Passed) continue;
        out << "  test " << t.id << " " << to_string(t.verdict);
        if (t.failingStep) out << " at step " << *t.failingStep << " " << t.label;
        out << "\n";
        for (const auto& [k, d] : t.diff)
            out << "    " << k << ": expected \"" << d.expected << "\", actual \"" << d.actual << "\"\n";
        if (!t.message.empty()) out << "    " << t.message << "\n";
    }
    return s.failed + s.errored > 0 ? kExitTestFailures : kExitOk;
}

int cmd_report(const Opts& o, std::ostream& out) {
    TestReport r = report_from_json(read_json(o.report));
    out << write_report(r, o.format == "junit" ? ReportFormat::JUnit : ReportFormat::Json);
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Model-based testing toolchain: EFSM models to executable tests", "mbt"};
    app.require_subcommand(1);
    Opts o;

    auto* validate_cmd = app.add_subcommand("validate", "Check a model for structural and type errors");
    validate_cmd->add_option("model", o.model, "Model file or directory")->required();

    auto* gen = app.add_subcommand("generate", "Generate abstract test cases by random traversal");
    gen->add_option("model", o.model, "Model file or directory")->required();
    gen->add_option("--seed", o.seed, "Suite seed")->required();
    gen->add_option("--criteria", o.criteria, "Stopping criterion")->capture_default_str();
    gen->add_option("--out", o.out, "Suite file (JSON Lines)")->required();
    gen->add_option("--max-steps", o.maxSteps, "Transitions per test")->capture_default_str()->check(CLI::PositiveNumber);
    gen->add_option("--budget", o.budget, "Tests before giving up on the criterion")->capture_default_str();
    gen->add_option("--qtds", o.qtds, "Test data store used to seed user variables");
    gen->add_option("--maturity", o.maturity, "User maturity filter for --qtds")
        ->check(CLI::IsMember({"new", "intermediate", "advanced"}));

    auto* labels = app.add_subcommand("labels", "List labels or update a mapping table");
    labels->add_option("model", o.model, "Model file or directory")->required();
    labels->add_option("--table", o.table, "Mapping table file");
    labels->add_flag("--update", o.update, "Add TODO templates for new labels");
    labels->add_option("--flavor", o.flavor, "Flavor of a new table")->check(CLI::IsMember({"exec", "raw"}));

    auto* inst = app.add_subcommand("instantiate", "Turn abstract tests into concrete ones");
    inst->add_option("suite", o.suite, "Abstract suite file")->required();
    inst->add_option("--table", o.table, "Mapping table file")->required();
    inst->add_option("--out", o.out, "Concrete suite file (exec) or directory (emit)")->required();
    inst->add_option("--mode", o.mode, "exec or emit")->check(CLI::IsMember({"exec", "emit"}));

    auto* run = app.add_subcommand("run", "Execute concrete tests against a driver");
    run->add_option("concrete", o.concrete, "Concrete suite file")->required();
    run->add_option("--driver", o.driver, "Driver name")->capture_default_str();
    run->add_option("--config", o.config, "Driver config (JSON)");
    run->add_option("--jobs", o.jobs, "Parallel sessions")->capture_default_str()->check(CLI::PositiveNumber);
    run->add_option("--report", o.report, "Report file (JSON)");

    auto* rep = app.add_subcommand("report", "Convert a report");
    rep->add_option("file", o.report, "Report file (JSON)")->required();
    rep->add_option("--format", o.format, "json or junit")->check(CLI::IsMember({"json", "junit"}));

    labels->callback([&] {
        if (o.update && o.table.empty()) throw CLI::RequiredError("--table (with --update)");
    });

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*validate_cmd) return cmd_validate(o, out);
        if (*gen) return cmd_generate(o, out, err);
        if (*labels) return cmd_labels(o, out);
        if (*inst) return cmd_instantiate(o, out);
        if (*run) return cmd_run(o, out);
        if (*rep) return cmd_report(o, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        if (const auto* b = dynamic_cast<const BudgetExhausted*>(&e)) {
            for (const auto& u : b->uncovered()) err << "  uncovered: " << u << "\n";
        }
        return is_validation_error(e) ? kExitInvalid : kExitUsage;
    }
    return kExitUsage;
}

}  // namespace mbt
