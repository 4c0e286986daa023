#include <random>

#include "doctest.h"
#include "mbt/efsm.hpp"
#include "mbt/serialize.hpp"
#include "support.hpp"

using namespace mbt;
using testing::dsl_model;

namespace {

std::vector<std::string> labels(const std::vector<const Transition*>& ts) {
    std::vector<std::string> out;
    for (const auto* t : ts) out.push_back(t->label);
    return out;
}

const char* kLogin = R"m(
model Login {
  var emailType: string = 'NONE';
  var passwordType: string = 'NONE';
  state v_Login start exit;
  state v_Home;
  state v_Err;
  trans e_SubmitValid: v_Login -> v_Home guard "emailType == 'VALID' && passwordType == 'VALID'";
  trans e_SubmitInvalid: v_Login -> v_Err guard "emailType == 'MALFORMED'";
  trans e_SubmitInvalid: v_Login -> v_Err guard "emailType == 'NONEXISTENT'";
  trans e_SubmitInvalid: v_Login -> v_Err guard "emailType == 'VALID' && passwordType == 'INVALID'";
  trans e_Back: v_Err -> v_Login;
}
)m";

}  // namespace

TEST_CASE("label kinds") {
    CHECK(label_kind("v_A") == LabelKind::State);
    CHECK(label_kind("e_Go") == LabelKind::Transition);
    CHECK(label_kind("InGame.Home.v_Home") == LabelKind::State);
    CHECK_FALSE(label_kind("Home").has_value());
    CHECK_FALSE(label_kind("").has_value());
    CHECK(local_label("InGame.Home.v_Home") == "v_Home");
    CHECK(local_label("Chat#2.v_Chat") == "v_Chat");
    CHECK(local_label("v_A") == "v_A");
    CHECK(edge_key("v_A", "e_Go", "v_B") == "v_A --e_Go--> v_B");
}

TEST_CASE("construction rejects dangling endpoints") {
    std::vector<State> states{{"v_A", "v_A", true, false, std::nullopt}};
    CHECK_THROWS_AS(EfsmModel("m", states, {Transition{"e_Go", "v_A", "v_Z", nullptr, {}}}, {}), ModelError);
    CHECK_THROWS_AS(EfsmModel("m", states, {Transition{"e_Go", "v_Z", "v_A", nullptr, {}}}, {}), ModelError);
}

TEST_CASE("enabled_transitions") {
    SUBCASE("single unguarded edge") {
        auto m = dsl_model("model m { state v_A start; state v_B exit; trans e_Go: v_A -> v_B; }");
        CHECK(labels(enabled_transitions(m, "v_A", m.initial_context())) == std::vector<std::string>{"e_Go"});
        CHECK(enabled_transitions(m, "v_B", m.initial_context()).empty());
    }
    SUBCASE("false guard disables") {
        auto m = dsl_model(
            "model m { var loggedIn: bool = false; state v_A start; state v_B exit; trans e_Go: v_A -> v_B guard \"loggedIn\"; }");
        CHECK(enabled_transitions(m, "v_A", m.initial_context()).empty());
    }
    SUBCASE("login guard picks the valid sibling only") {
        auto m = dsl_model(kLogin);
        Context c = m.initial_context();
        c.set("emailType", std::string("VALID"));
        c.set("passwordType", std::string("VALID"));
        auto en = enabled_transitions(m, "v_Login", c);
        REQUIRE(en.size() == 1);
        CHECK(en[0]->label == "e_SubmitValid");
        CHECK(en[0]->target == "v_Home");
    }
    SUBCASE("unknown state") {
        auto m = dsl_model("model m { state v_A start exit; }");
        CHECK_THROWS_AS(enabled_transitions(m, "v_Nope", m.initial_context()), UnknownState);
    }
    SUBCASE("non-boolean guard") {
        // bypasses validation by building the model directly
        std::vector<State> st{{"v_A", "v_A", true, false, std::nullopt}, {"v_B", "v_B", false, true, std::nullopt}};
        EfsmModel m("m", st, {Transition{"e_Go", "v_A", "v_B", parse_expr("x + 1"), {}}},
                    {{"x", Type::Int, std::int64_t{0}}});
        CHECK_THROWS_AS(enabled_transitions(m, "v_A", m.initial_context()), GuardTypeError);
    }
}

TEST_CASE("apply_transition") {
    auto m = dsl_model(R"m(
model m {
  var count: int = 0;
  var history: list = [];
  state v_A start; state v_B exit;
  trans e_Inc: v_A -> v_B do "count = count + 1;";
  trans e_Push: v_A -> v_B do "push(history, 'Topics');";
  trans e_Nop: v_A -> v_A;
  trans e_Never: v_B -> v_A guard "count > 100";
}
)m");
    Context c0 = m.initial_context();
    const auto& ts = m.transitions();

    Applied a = apply_transition(m, ts[0], c0);
    CHECK(a.target == "v_B");
    CHECK(std::get<std::int64_t>(a.context.get("count")) == 1);
    CHECK(std::get<std::int64_t>(c0.get("count")) == 0);

    Applied p = apply_transition(m, ts[1], c0);
    CHECK(std::get<StringList>(p.context.get("history")) == StringList{"Topics"});

    Applied n = apply_transition(m, ts[2], c0);
    CHECK(n.target == "v_A");
    CHECK(n.context == c0);

    CHECK_THROWS_AS(apply_transition(m, ts[3], c0), GuardViolation);

    Transition foreign{"e_Inc", "v_A", "v_A", nullptr, {}};
    CHECK_THROWS_AS(apply_transition(m, foreign, c0), ModelError);
}

TEST_CASE("apply_transition: failing action") {
    auto m = dsl_model(R"m(
model m {
  var history: list = [];
  var s: string = '';
  state v_A start exit;
  trans e_Bad: v_A -> v_A do "push(history, 'x'); s = last(history); s = last(history) + last(history)";
  trans e_Empty: v_A -> v_A do "s = last(history)";
}
)m");
    CHECK_NOTHROW(apply_transition(m, m.transitions()[0], m.initial_context()));
    CHECK_THROWS_AS(apply_transition(m, m.transitions()[1], m.initial_context()), ActionError);
}

TEST_CASE("property: enabled transitions are a guarded subset of outgoing") {
    auto m = dsl_model(R"m(
model m {
  var x: int = 0;
  var flag: bool = false;
  state v_A start; state v_B; state v_C exit;
  trans e_1: v_A -> v_B guard "x > 2";
  trans e_2: v_A -> v_C guard "flag";
  trans e_3: v_A -> v_A do "x = x + 1";
  trans e_4: v_A -> v_C guard "x < 2 || flag";
  trans e_5: v_B -> v_C;
  trans e_6: v_B -> v_A;
}
)m");
    std::mt19937_64 rng(5);
    for (int i = 0; i < 300; ++i) {
        Context c = m.initial_context();
        c.set("x", static_cast<std::int64_t>(rng() % 6));
        c.set("flag", rng() % 2 == 1);
        for (const char* st : {"v_A", "v_B", "v_C"}) {
            auto en = enabled_transitions(m, st, c);
            std::vector<const Transition*> expected;
            bool anyGuard = false;
            for (std::size_t idx : m.outgoing(st)) {
                const Transition& t = m.transitions()[idx];
                anyGuard |= static_cast<bool>(t.guard);
                CHECK(t.source == st);
                if (!t.guard || std::get<bool>(eval_expr(*t.guard, c))) expected.push_back(&t);
            }
            CHECK(en == expected);
            if (!anyGuard) CHECK(en.size() == m.outgoing(st).size());
            for (const auto* t : en) {
                Applied a1 = apply_transition(m, *t, c);
                Applied a2 = apply_transition(m, *t, c);
                CHECK(dump_canonical(to_json(a1.context)) == dump_canonical(to_json(a2.context)));
                CHECK(a1.target == t->target);
            }
        }
    }
}
