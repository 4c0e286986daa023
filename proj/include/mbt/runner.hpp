#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mbt/driver.hpp"
#include "mbt/mapping.hpp"

namespace mbt {

enum class Verdict { Passed, Failed, Errored };

std::string_view to_string(Verdict v);

struct FieldDiff {
    std::string expected;
    std::string actual;

    friend bool operator==(const FieldDiff&, const FieldDiff&) = default;
};

struct TraceEntry {
    std::size_t step = 0;
    std::string label;
    std::string command;
    StringMap args;
    bool ok = true;
    std::string error;
    StringMap fields;

    friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct TestResult {
    std::size_t id = 0;
    Verdict verdict = Verdict::Passed;
    std::optional<std::size_t> failingStep;
    std::string label;                       // label of the failing step
    std::map<std::string, FieldDiff> diff;   // mismatched fields
    std::string message;                     // session errors
    std::vector<TraceEntry> trace;

    friend bool operator==(const TestResult&, const TestResult&) = default;
};

struct ReportSummary {
    std::size_t total = 0, passed = 0, failed = 0, errored = 0;

    friend bool operator==(const ReportSummary&, const ReportSummary&) = default;
};

struct TestReport {
    std::vector<TestResult> tests;  // ordered by id

    ReportSummary summary() const;
    std::vector<Verdict> verdicts() const;

    friend bool operator==(const TestReport&, const TestReport&) = default;
};

/// Runs one test in a fresh session. Session failures yield Errored.
TestResult run_test(Driver& driver, const json& config, const ConcreteTestCase& test);

/// Runs tests on `jobs` worker threads; the report is in input order and
/// does not depend on `jobs`.
TestReport run_suite(const std::vector<ConcreteTestCase>& tests, Driver& driver, const json& config,
                     std::size_t jobs = 1);

json report_to_json(const TestReport& report);
TestReport report_from_json(const json& j);

enum class ReportFormat { Json, JUnit };

std::string write_report(const TestReport& report, ReportFormat format);

}  // namespace mbt
