#include <cctype>
#include <cmath>
#include <sstream>

#include "mbt/generator.hpp"
#include "mbt/model_io.hpp"
#include "mbt/serialize.hpp"

namespace mbt {

double CoverageLedger::state_percent() const {
    if (reachableStates == 0) return 0.0;
    return 100.0 * static_cast<double>(visitedStates.size()) / static_cast<double>(reachableStates);
}

double CoverageLedger::transition_percent() const {
    if (reachableTransitions == 0) return 0.0;
    return 100.0 * static_cast<double>(traversedTransitions.size()) / static_cast<double>(reachableTransitions);
}

// --- stopping criteria -----------------------------------------------------

StoppingCriterion StoppingCriterion::state_coverage(double percent) {
    StoppingCriterion c;
    c.kind_ = Kind::StateCoverage;
    c.percent_ = percent;
    c.check();
    return c;
}

StoppingCriterion StoppingCriterion::transition_coverage(double percent) {
    StoppingCriterion c;
    c.kind_ = Kind::TransitionCoverage;
    c.percent_ = percent;
    c.check();
    return c;
}

StoppingCriterion StoppingCriterion::max_tests(std::size_t n) {
    StoppingCriterion c;
    c.kind_ = Kind::MaxTestCases;
    c.count_ = n;
    c.check();
    return c;
}

StoppingCriterion StoppingCriterion::all_of(std::vector<StoppingCriterion> parts) {
    StoppingCriterion c;
    c.kind_ = Kind::And;
    c.parts_ = std::move(parts);
    c.check();
    return c;
}

StoppingCriterion StoppingCriterion::any_of(std::vector<StoppingCriterion> parts) {
    StoppingCriterion c;
    c.kind_ = Kind::Or;
    c.parts_ = std::move(parts);
    c.check();
    return c;
}

void StoppingCriterion::check() const {
    switch (kind_) {
        case Kind::StateCoverage:
        case Kind::TransitionCoverage:
            if (!(percent_ > 0.0 && percent_ <= 100.0))
                throw Error("coverage target must be in (0, 100], got " + std::to_string(percent_));
            break;
        case Kind::MaxTestCases:
            if (count_ == 0) throw Error("test count must be positive");
            break;
        case Kind::And:
        case Kind::Or:
            if (parts_.empty()) throw Error("empty criterion composition");
            break;
    }
}

bool StoppingCriterion::satisfied(const CoverageLedger& ledger, std::size_t tests) const {
    // Integer comparison avoids rounding at exactly 100%.
    auto reached = [](std::size_t have, std::size_t of, double pct) {
        return static_cast<double>(have) * 100.0 >= pct * static_cast<double>(of) - 1e-9;
    };
    switch (kind_) {
        case Kind::StateCoverage:
            return reached(ledger.visitedStates.size(), ledger.reachableStates, percent_);
        case Kind::TransitionCoverage:
            return reached(ledger.traversedTransitions.size(), ledger.reachableTransitions, percent_);
        case Kind::MaxTestCases:
            return tests >= count_;
        case Kind::And:
            for (const auto& p : parts_)
                if (!p.satisfied(ledger, tests)) return false;
            return true;
        case Kind::Or:
            for (const auto& p : parts_)
                if (p.satisfied(ledger, tests)) return true;
            return false;
    }
    return false;
}

std::string StoppingCriterion::to_string() const {
    auto num = [](double v) {
        std::ostringstream ss;
        ss << v;
        return ss.str();
    };
    switch (kind_) {
        case Kind::StateCoverage: return "states(" + num(percent_) + ")";
        case Kind::TransitionCoverage: return "transitions(" + num(percent_) + ")";
        case Kind::MaxTestCases: return "tests(" + std::to_string(count_) + ")";
        case Kind::And:
        case Kind::Or: {
            std::string out = "(";
            for (std::size_t i = 0; i < parts_.size(); ++i) {
                if (i) out += kind_ == Kind::And ? " && " : " || ";
                out += parts_[i].to_string();
            }
            return out + ")";
        }
    }
    return {};
}

namespace {

class CriterionParser {
public:
    explicit CriterionParser(std::string_view s) : s_(s) {}

    StoppingCriterion parse() {
        StoppingCriterion c = disjunction();
        ws();
        if (pos_ != s_.size()) fail("trailing input");
        return c;
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        throw Error("bad criterion '" + std::string(s_) + "' at " + std::to_string(pos_) + ": " + why);
    }

    void ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(std::string_view tok) {
        ws();
        if (s_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    StoppingCriterion disjunction() {
        std::vector<StoppingCriterion> parts{conjunction()};
        while (eat("||")) parts.push_back(conjunction());
        return parts.size() == 1 ? parts.front() : StoppingCriterion::any_of(std::move(parts));
    }

    StoppingCriterion conjunction() {
        std::vector<StoppingCriterion> parts{term()};
        while (eat("&&")) parts.push_back(term());
        return parts.size() == 1 ? parts.front() : StoppingCriterion::all_of(std::move(parts));
    }

    StoppingCriterion term() {
        if (eat("(")) {
            StoppingCriterion c = disjunction();
            if (!eat(")")) fail("expected ')'");
            return c;
        }
        ws();
        std::size_t b = pos_;
        while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        std::string name(s_.substr(b, pos_ - b));
        if (!eat("(")) fail("expected '('");
        ws();
        std::size_t nb = pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
        std::string num(s_.substr(nb, pos_ - nb));
        if (num.empty()) fail("expected a number");
        if (!eat(")")) fail("expected ')'");
        if (name == "states") return StoppingCriterion::state_coverage(std::stod(num));
        if (name == "transitions") return StoppingCriterion::transition_coverage(std::stod(num));
        if (name == "tests") {
            if (num.find('.') != std::string::npos) fail("tests() takes an integer");
            return StoppingCriterion::max_tests(std::stoull(num));
        }
        fail("unknown criterion '" + name + "'");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

StoppingCriterion StoppingCriterion::parse(std::string_view text) {
    return CriterionParser(text).parse();
}

// --- walks -----------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix64(std::uint64_t suiteSeed, std::uint64_t index) {
    return splitmix64(suiteSeed ^ splitmix64(index));
}

std::size_t WalkRng::below(std::size_t n) {
    if (n == 0) throw Error("WalkRng::below(0)");
    const std::uint64_t bound = n;
    const std::uint64_t threshold = (0 - bound) % bound;
    while (true) {
        std::uint64_t r = engine_();
        if (r >= threshold) return static_cast<std::size_t>(r % bound);
    }
}

AbstractTestCase generate_one(const EfsmModel& model, std::uint64_t seed, std::size_t maxSteps,
                              const Context& initialCtx) {
    const State* start = model.start_state();
    if (!start) throw ModelError("model '" + model.name() + "' has no start state");
    WalkRng rng(seed);
    AbstractTestCase tc;
    tc.seed = seed;
    std::string cur = start->label;
    Context ctx = initialCtx;
    tc.steps.push_back(Step{LabelKind::State, cur, ctx});

    for (std::size_t taken = 0; taken < maxSteps; ++taken) {
        auto enabled = enabled_transitions(model, cur, ctx);
        if (enabled.empty()) {
            std::vector<std::string> values;
            for (std::size_t i : model.outgoing(cur)) {
                const auto& t = model.transitions()[i];
                values.push_back(t.label + " [" + (t.guard ? pretty_print(*t.guard) : "true") + "] = false");
            }
            throw DeadEnd(cur, std::move(values));
        }
        const Transition& t = *enabled[rng.below(enabled.size())];
        Applied next = apply_transition(model, t, ctx);
        ctx = std::move(next.context);
        cur = std::move(next.target);
        tc.steps.push_back(Step{LabelKind::Transition, t.label, ctx});
        tc.steps.push_back(Step{LabelKind::State, cur, ctx});
        if (model.find_state(cur)->isExit) break;
    }
    return tc;
}

namespace {

void record(CoverageLedger& ledger, const AbstractTestCase& tc) {
    for (std::size_t i = 0; i < tc.steps.size(); ++i) {
        const Step& s = tc.steps[i];
        if (s.kind == LabelKind::State) {
            ledger.visitedStates.insert(s.label);
        } else {
            ledger.traversedTransitions.insert(edge_key(tc.steps[i - 1].label, s.label, tc.steps[i + 1].label));
        }
    }
}

}  // namespace

std::vector<std::string> uncovered(const CoverageLedger& ledger, const EfsmModel& model) {
    Reachability r = reachable(model);
    std::vector<std::string> out;
    for (const auto& s : r.states)
        if (!ledger.visitedStates.count(s)) out.push_back(s);
    std::set<std::string> edges;
    for (std::size_t i : r.transitions) edges.insert(edge_key(model.transitions()[i]));
    for (const auto& e : edges)
        if (!ledger.traversedTransitions.count(e)) out.push_back(e);
    return out;
}

GeneratedSuite generate_suite(const EfsmModel& model, const StoppingCriterion& criterion, std::uint64_t seed,
                              const Context& initialCtx, const GeneratorOptions& options) {
    GeneratedSuite out;
    Reachability r = reachable(model);
    out.ledger.reachableStates = r.states.size();
    out.ledger.reachableTransitions = r.transitions.size();
    for (const auto& s : model.states())
        if (!r.states.count(s.label)) out.warnings.push_back("unreachable state " + s.label + " excluded from coverage");
    for (std::size_t i = 0; i < model.transitions().size(); ++i)
        if (!r.transitions.count(i))
            out.warnings.push_back("unreachable transition " + edge_key(model.transitions()[i]) + " excluded from coverage");

    std::uint64_t attempt = 0;
    std::size_t consecutive = 0;
    while (!criterion.satisfied(out.ledger, out.tests.size())) {
        if (out.tests.size() >= options.budgetTests) {
            auto missing = uncovered(out.ledger, model);
            std::string msg = "criterion " + criterion.to_string() + " unmet after " +
                              std::to_string(out.tests.size()) + " tests; uncovered:";
            for (const auto& m : missing) msg += " " + m + ";";
            throw BudgetExhausted(std::move(missing), msg);
        }
        std::uint64_t test_seed = mix64(seed, attempt++);
        AbstractTestCase tc;
        try {
            tc = generate_one(model, test_seed, criterion.maxStepsPerTest, initialCtx);
        } catch (const DeadEnd& e) {
            ++out.discarded;
            if (++consecutive >= options.maxConsecutiveDeadEnds)
                throw GuardTrap(std::to_string(consecutive) + " consecutive dead ends; last at '" + e.state() + "'");
            continue;
        }
        consecutive = 0;
        tc.id = out.tests.size();
        record(out.ledger, tc);
        out.tests.push_back(std::move(tc));
    }
    return out;
}

CoverageLedger measure_coverage(const std::vector<AbstractTestCase>& suite, const EfsmModel& model) {
    CoverageLedger ledger;
    Reachability r = reachable(model);
    ledger.reachableStates = r.states.size();
    ledger.reachableTransitions = r.transitions.size();
    for (const auto& tc : suite) {
        for (std::size_t i = 0; i < tc.steps.size(); ++i) {
            const Step& s = tc.steps[i];
            if (s.kind == LabelKind::State) {
                if (!model.find_state(s.label))
                    throw UnknownLabel("test " + std::to_string(tc.id) + " visits unknown state '" + s.label + "'");
                ledger.visitedStates.insert(s.label);
                continue;
            }
            if (i == 0 || i + 1 >= tc.steps.size())
                throw UnknownLabel("test " + std::to_string(tc.id) + ": transition '" + s.label + "' lacks neighbours");
            const Transition* t = model.find_transition(tc.steps[i - 1].label, s.label, tc.steps[i + 1].label);
            if (!t)
                throw UnknownLabel("test " + std::to_string(tc.id) + " takes unknown transition '" +
                                   edge_key(tc.steps[i - 1].label, s.label, tc.steps[i + 1].label) + "'");
            ledger.traversedTransitions.insert(edge_key(*t));
        }
    }
    return ledger;
}

// --- suite files -----------------------------------------------------------

std::string suite_to_jsonl(const std::vector<AbstractTestCase>& suite) {
    std::string out;
    for (const auto& tc : suite) {
        json steps = json::array();
        for (const auto& s : tc.steps)
            steps.push_back({{"ctx", to_json(s.ctx)},
                             {"kind", s.kind == LabelKind::State ? "state" : "transition"},
                             {"label", s.label}});
        json line = {{"id", tc.id}, {"seed", tc.seed}, {"steps", std::move(steps)}};
        out += line.dump();
        out += '\n';
    }
    return out;
}

std::vector<AbstractTestCase> suite_from_jsonl(std::string_view text) {
    std::vector<AbstractTestCase> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            json j = json::parse(line);
            AbstractTestCase tc;
            tc.id = j.at("id").get<std::size_t>();
            tc.seed = j.at("seed").get<std::uint64_t>();
            for (const auto& s : j.at("steps")) {
                std::string kind = s.at("kind").get<std::string>();
                if (kind != "state" && kind != "transition") throw Error("bad step kind '" + kind + "'");
                tc.steps.push_back(Step{kind == "state" ? LabelKind::State : LabelKind::Transition,
                                        s.at("label").get<std::string>(), context_from_json(s.at("ctx"))});
            }
            out.push_back(std::move(tc));
        } catch (const json::exception& e) {
            throw Error("suite line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace mbt
