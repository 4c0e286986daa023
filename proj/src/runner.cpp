#include <algorithm>
#include <atomic>
#include <sstream>
#include <thread>

#include "mbt/refsut.hpp"
#include "mbt/runner.hpp"

namespace mbt {

DriverRegistry& DriverRegistry::standard() {
    static DriverRegistry reg = [] {
        DriverRegistry r;
        r.add("refsut", [] { return make_refsut_driver(); });
        return r;
    }();
    return reg;
}

void DriverRegistry::add(std::string name, DriverFactory factory) {
    factories_[std::move(name)] = std::move(factory);
}

std::unique_ptr<Driver> DriverRegistry::make(const std::string& name) const {
    auto it = factories_.find(name);
    if (it == factories_.end()) {
        std::string known;
        for (const auto& [n, f] : factories_) known += (known.empty() ? "" : ", ") + n;
        throw DriverUnavailable("no driver named '" + name + "' (available: " + known + ")");
    }
    return it->second();
}

std::vector<std::string> DriverRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [n, f] : factories_) out.push_back(n);
    return out;
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Passed: return "passed";
        case Verdict::Failed: return "failed";
        case Verdict::Errored: return "errored";
    }
    return "?";
}

namespace {

Verdict verdict_from_string(std::string_view s) {
    if (s == "passed") return Verdict::Passed;
    if (s == "failed") return Verdict::Failed;
    if (s == "errored") return Verdict::Errored;
    throw Error("unknown verdict '" + std::string(s) + "'");
}

constexpr const char* kAbsent = "<absent>";

std::map<std::string, FieldDiff> compare(const DriverCommand& cmd, const Response& r) {
    std::map<std::string, FieldDiff> diff;
    std::string status = r.ok ? "ok" : "error";
    bool status_checked = false;
    if (cmd.expect) {
        for (const auto& [k, want] : *cmd.expect) {
            if (k == "status") {
                status_checked = true;
                if (want != status) diff[k] = {want, r.ok ? status : status + ": " + r.error};
                continue;
            }
            auto it = r.fields.find(k);
            std::string got = it == r.fields.end() ? kAbsent : it->second;
            if (got != want) diff[k] = {want, got};
        }
    }
    if (!status_checked && !r.ok) diff["status"] = {"ok", "error: " + r.error};
    return diff;
}

}  // namespace

ReportSummary TestReport::summary() const {
    ReportSummary s;
    s.total = tests.size();
    for (const auto& t : tests) {
        if (t.verdict == Verdict::Passed) ++s.passed;
        else if (t.verdict == Verdict::Failed) ++s.failed;
        else ++s.errored;
    }
    return s;
}

std::vector<Verdict> TestReport::verdicts() const {
    std::vector<Verdict> out;
    for (const auto& t : tests) out.push_back(t.verdict);
    return out;
}

TestResult run_test(Driver& driver, const json& config, const ConcreteTestCase& test) {
    TestResult res;
    res.id = test.id;
    std::unique_ptr<Session> session;
    try {
        session = driver.start_session(config);
    } catch (const Error& e) {
        res.verdict = Verdict::Errored;
        res.message = e.what();
        return res;
    }
    for (std::size_t i = 0; i < test.steps.size() && res.verdict == Verdict::Passed; ++i) {
        const ResolvedStep& step = test.steps[i];
        for (const auto& cmd : step.fragment.commands) {
            Response r;
            try {
                r = session->apply(cmd.name, cmd.args);
            } catch (const Error& e) {
                res.verdict = Verdict::Errored;
                res.failingStep = i;
                res.label = step.label;
                res.message = e.what();
                break;
            }
            res.trace.push_back(TraceEntry{i, step.label, cmd.name, cmd.args, r.ok, r.error, r.fields});
            auto diff = compare(cmd, r);
            if (!diff.empty()) {
                res.verdict = Verdict::Failed;
                res.failingStep = i;
                res.label = step.label;
                res.diff = std::move(diff);
                break;
            }
        }
    }
    driver.end_session(*session);
    return res;
}

TestReport run_suite(const std::vector<ConcreteTestCase>& tests, Driver& driver, const json& config,
                     std::size_t jobs) {
    TestReport report;
    report.tests.resize(tests.size());
    jobs = std::max<std::size_t>(1, std::min(jobs, tests.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < tests.size();) report.tests[i] = run_test(driver, config, tests[i]);
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return report;
}

// --- serialization ---------------------------------------------------------

json report_to_json(const TestReport& report) {
    ReportSummary s = report.summary();
    json tests = json::array();
    for (const auto& t : report.tests) {
        json tj = {{"id", t.id}, {"verdict", to_string(t.verdict)}};
        if (t.failingStep) tj["failingStep"] = *t.failingStep;
        if (!t.label.empty()) tj["label"] = t.label;
        if (!t.message.empty()) tj["message"] = t.message;
        json diff = json::object();
        for (const auto& [k, d] : t.diff) diff[k] = {{"expected", d.expected}, {"actual", d.actual}};
        tj["diff"] = std::move(diff);
        json trace = json::array();
        for (const auto& e : t.trace) {
            json ej = {{"step", e.step}, {"label", e.label}, {"command", e.command},
                       {"args", e.args}, {"ok", e.ok},       {"fields", e.fields}};
            if (!e.error.empty()) ej["error"] = e.error;
            trace.push_back(std::move(ej));
        }
        tj["trace"] = std::move(trace);
        tests.push_back(std::move(tj));
    }
    return {{"summary", {{"total", s.total}, {"passed", s.passed}, {"failed", s.failed}, {"errored", s.errored}}},
            {"tests", std::move(tests)}};
}

TestReport report_from_json(const json& j) {
    TestReport r;
    try {
        for (const auto& tj : j.at("tests")) {
            TestResult t;
            t.id = tj.at("id").get<std::size_t>();
            t.verdict = verdict_from_string(tj.at("verdict").get<std::string>());
            if (tj.contains("failingStep")) t.failingStep = tj.at("failingStep").get<std::size_t>();
            t.label = tj.value("label", "");
            t.message = tj.value("message", "");
            const json diff = tj.value("diff", json::object());
            for (const auto& [k, d] : diff.items())
                t.diff[k] = {d.at("expected").get<std::string>(), d.at("actual").get<std::string>()};
            const json trace = tj.value("trace", json::array());
            for (const auto& ej : trace) {
                TraceEntry e;
                e.step = ej.at("step").get<std::size_t>();
                e.label = ej.at("label").get<std::string>();
                e.command = ej.at("command").get<std::string>();
                e.args = ej.at("args").get<StringMap>();
                e.ok = ej.at("ok").get<bool>();
                e.error = ej.value("error", "");
                e.fields = ej.at("fields").get<StringMap>();
                t.trace.push_back(std::move(e));
            }
            r.tests.push_back(std::move(t));
        }
    } catch (const json::exception& e) {
        throw Error(std::string("malformed report: ") + e.what());
    }
    return r;
}

namespace {

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string junit(const TestReport& report) {
    ReportSummary s = report.summary();
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<testsuite name=\"mbt\" tests=\"" << s.total << "\" failures=\"" << s.failed << "\" errors=\"" << s.errored
        << "\">\n";
    for (const auto& t : report.tests) {
        out << "  <testcase classname=\"mbt\" name=\"test-" << t.id << "\"";
        if (t.verdict == Verdict::Passed) {
            out << "/>\n";
            continue;
        }
        out << ">\n";
        std::string where = t.failingStep ? "step " + std::to_string(*t.failingStep) + " " + t.label : "session";
        std::string body;
        for (const auto& [k, d] : t.diff) body += k + ": expected \"" + d.expected + "\", actual \"" + d.actual + "\"\n";
        if (!t.message.empty()) body += t.message + "\n";
        const char* tag = t.verdict == Verdict::Failed ? "failure" : "error";
        out << "    <" << tag << " message=\"" << xml_escape(where) << "\">" << xml_escape(body) << "</" << tag
            << ">\n";
        out << "  </testcase>\n";
    }
    out << "</testsuite>\n";
    return out.str();
}

}  // namespace

std::string write_report(const TestReport& report, ReportFormat format) {
    if (format == ReportFormat::JUnit) return junit(report);
    return report_to_json(report).dump(2) + "\n";
}

}  // namespace mbt
