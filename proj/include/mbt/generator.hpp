#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mbt/efsm.hpp"

namespace mbt {

struct CoverageLedger {
    std::set<std::string> visitedStates;
    std::set<std::string> traversedTransitions;  // edge keys
    std::size_t reachableStates = 0;
    std::size_t reachableTransitions = 0;

    double state_percent() const;
    double transition_percent() const;

    friend bool operator==(const CoverageLedger&, const CoverageLedger&) = default;
};

/// Suite-level stopping condition. Leaves test coverage percentages or the
/// number of accepted tests; And/Or compose.
class StoppingCriterion {
public:
    enum class Kind { StateCoverage, TransitionCoverage, MaxTestCases, And, Or };

    static StoppingCriterion state_coverage(double percent = 100.0);
    static StoppingCriterion transition_coverage(double percent = 100.0);
    static StoppingCriterion max_tests(std::size_t n);
    static StoppingCriterion all_of(std::vector<StoppingCriterion> parts);
    static StoppingCriterion any_of(std::vector<StoppingCriterion> parts);

    /// "tests(100) && states(100) && transitions(100)"; && binds tighter
    /// than ||, parentheses group.
    static StoppingCriterion parse(std::string_view text);

    Kind kind() const noexcept { return kind_; }
    std::string to_string() const;

    bool satisfied(const CoverageLedger& ledger, std::size_t tests) const;

    /// Per-test transition budget.
    std::size_t maxStepsPerTest = 200;

private:
    StoppingCriterion() = default;
    void check() const;

    Kind kind_ = Kind::MaxTestCases;
    double percent_ = 100.0;
    std::size_t count_ = 0;
    std::vector<StoppingCriterion> parts_;
};

struct Step {
    LabelKind kind = LabelKind::State;
    std::string label;
    /// For a state step: the context on arrival. For a transition step: the
    /// context after its actions ran.
    Context ctx;

    friend bool operator==(const Step&, const Step&) = default;
};

struct AbstractTestCase {
    std::size_t id = 0;
    std::uint64_t seed = 0;
    std::vector<Step> steps;

    friend bool operator==(const AbstractTestCase&, const AbstractTestCase&) = default;
};

/// Per-test seed: splitmix64(suiteSeed ^ splitmix64(index)).
std::uint64_t mix64(std::uint64_t suiteSeed, std::uint64_t index);

/// mt19937_64 with an unbiased bounded draw that does not depend on the
/// standard library's distribution implementation.
class WalkRng {
public:
    explicit WalkRng(std::uint64_t seed) : engine_(seed) {}
    std::size_t below(std::size_t n);

private:
    std::mt19937_64 engine_;
};

/// One random walk from the start state: uniform choice among enabled
/// transitions; stops on entering an EXIT state after at least one
/// transition, or after maxSteps transitions. Throws DeadEnd when a state
/// has no enabled transition.
AbstractTestCase generate_one(const EfsmModel& model, std::uint64_t seed, std::size_t maxSteps,
                              const Context& initialCtx);

struct GeneratorOptions {
    /// Accepted tests after which an unsatisfied criterion is reported as
    /// BudgetExhausted.
    std::size_t budgetTests = 10000;
    /// Consecutive DeadEnd discards that abort generation with GuardTrap.
    std::size_t maxConsecutiveDeadEnds = 100;
};

struct GeneratedSuite {
    std::vector<AbstractTestCase> tests;
    CoverageLedger ledger;
    std::vector<std::string> warnings;  // unreachable elements left out of the denominators
    std::size_t discarded = 0;          // DeadEnd aborts
};

GeneratedSuite generate_suite(const EfsmModel& model, const StoppingCriterion& criterion, std::uint64_t seed,
                              const Context& initialCtx, const GeneratorOptions& options = {});

/// Recomputes coverage from the steps alone. Throws UnknownLabel.
CoverageLedger measure_coverage(const std::vector<AbstractTestCase>& suite, const EfsmModel& model);

/// Reachable labels not yet covered (states, then edge keys).
std::vector<std::string> uncovered(const CoverageLedger& ledger, const EfsmModel& model);

/// JSON Lines, one {id, seed, steps:[{ctx, kind, label}]} per test, sorted keys.
std::string suite_to_jsonl(const std::vector<AbstractTestCase>& suite);
std::vector<AbstractTestCase> suite_from_jsonl(std::string_view text);

}  // namespace mbt
