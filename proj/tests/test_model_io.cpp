#include <algorithm>
#include <cstdlib>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "mbt/model_io.hpp"
#include "mbt/serialize.hpp"
#include "support.hpp"

using namespace mbt;
using testing::dsl_model;
using testing::quizup_dir;
using testing::slurp;

namespace {

std::string plain_graphml(const std::string& body, const std::string& graphData = "") {
    return R"(<?xml version="1.0" encoding="UTF-8"?>
<graphml xmlns="http://graphml.graphdrawing.org/xmlns">
  <key id="v" for="graph" attr.name="variables" attr.type="string"/>
  <key id="l" for="node" attr.name="label" attr.type="string"/>
  <key id="el" for="edge" attr.name="label" attr.type="string"/>
  <graph id="G" edgedefault="directed">)" +
           graphData + body + "</graph></graphml>";
}

std::set<std::string> edge_keys(const EfsmModel& m) {
    std::set<std::string> out;
    for (const auto& t : m.transitions()) out.insert(edge_key(t));
    return out;
}

std::map<std::string, std::pair<bool, bool>> state_flags(const EfsmModel& m) {
    std::map<std::string, std::pair<bool, bool>> out;
    for (const auto& s : m.states()) out[s.label] = {s.isStart, s.isExit};
    return out;
}

std::string inventory_text(const EfsmModel& m) {
    LabelInventory inv = extract_labels(m);
    std::ostringstream o;
    o << "states " << m.states().size() << "\n";
    o << "transitions " << m.transitions().size() << "\n";
    for (const auto& l : inv.stateLabels) o << l << "\n";
    for (const auto& l : inv.transitionLabels) o << l << "\n";
    return o.str();
}

}  // namespace

TEST_CASE("parse_graphml: two nodes one edge") {
    auto m = parse_graphml(plain_graphml(R"(
    <node id="a"><data key="l">v_A
START</data></node>
    <node id="b"><data key="l">v_B</data></node>
    <edge id="x" source="a" target="b"><data key="el">e_Go</data></edge>)"));
    CHECK(m.name() == "G");
    REQUIRE(m.states().size() == 2);
    REQUIRE(m.transitions().size() == 1);
    CHECK(m.find_state("v_A")->isStart);
    CHECK_FALSE(m.find_state("v_B")->isStart);
    CHECK(m.transitions()[0].label == "e_Go");
    CHECK_FALSE(m.transitions()[0].guard);
    CHECK(m.transitions()[0].actions.empty());
}

TEST_CASE("parse_graphml: edge label grammar") {
    auto m = parse_graphml(plain_graphml(R"(
    <node id="a"><data key="l">v_A
START
EXIT</data></node>
    <node id="b"><data key="l">v_B
SUBMODEL Other</data></node>
    <node id="c"><data key="l"></data></node>
    <edge id="x" source="a" target="b"><data key="el">e_TypePassword [loggedIn == false] / tries = tries + 1;</data></edge>)",
                                         R"(<data key="v">var loggedIn: bool = false;
var tries: int = 0;</data>)"));
    // unlabeled node dropped
    CHECK(m.states().size() == 2);
    const auto& t = m.transitions().at(0);
    REQUIRE(t.guard);
    CHECK(*t.guard == *parse_expr("loggedIn == false"));
    REQUIRE(t.actions.size() == 1);
    CHECK(t.actions[0] == parse_actions("tries = tries + 1;")[0]);
    CHECK(m.find_state("v_A")->isExit);
    CHECK(m.find_state("v_B")->submodel == std::optional<std::string>("Other"));
    CHECK(m.variables().size() == 2);
}

TEST_CASE("parse_graphml: errors") {
    CHECK_THROWS_AS(parse_graphml("<graphml><graph id='g'><node id='a'>"), ParseError);
    CHECK_THROWS_AS(parse_graphml("<other/>"), ParseError);
    try {
        parse_graphml(plain_graphml(R"(<node id="a"><data key="l">A
START</data></node>)"));
        FAIL("expected LabelGrammarError");
    } catch (const LabelGrammarError& e) {
        CHECK(e.label().find("A") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_graphml(plain_graphml(R"(<node id="a"><data key="l">v_A
BOGUS</data></node>)")),
                    LabelGrammarError);
    CHECK_THROWS_AS(parse_graphml(plain_graphml(R"(
    <node id="a"><data key="l">v_A</data></node>
    <edge id="x" source="a" target="a"><data key="el">Go [x</data></edge>)")),
                    LabelGrammarError);
    try {
        parse_graphml(plain_graphml(R"(
    <node id="a"><data key="l">v_A</data></node>
    <edge id="e7" source="a" target="zz"><data key="el">e_Go</data></edge>)"));
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.element() == "e7");
    }
}

TEST_CASE("bundled login layer: 3 email edges and 2 password edges out of the form") {
    auto m = parse_graphml(slurp(quizup_dir() / "email_login.graphml"));
    std::set<std::string> email, password;
    for (const auto& t : m.transitions()) {
        if (t.source != "v_EmailLogin") continue;
        if (t.label.rfind("e_Type", 0) == 0 && t.label.find("Email") != std::string::npos) email.insert(t.label);
        if (t.label.rfind("e_Type", 0) == 0 && t.label.find("Password") != std::string::npos) password.insert(t.label);
    }
    CHECK(email.size() == 3);
    CHECK(password.size() == 2);
}

TEST_CASE("front-end equivalence: GraphML and DSL email login") {
    auto g = parse_graphml(slurp(quizup_dir() / "email_login.graphml"));
    auto d = parse_dsl(slurp(testing::source_dir() / "tests" / "data" / "email_login.efsm"));
    REQUIRE(d.models.count("EmailLogin"));
    CHECK(g == d.models.at("EmailLogin"));
    CHECK(content_hash(g) == content_hash(d.models.at("EmailLogin")));
}

TEST_CASE("parse_dsl") {
    SUBCASE("minimal") {
        auto b = parse_dsl("model m { state v_A start; state v_B exit; trans e_Go: v_A -> v_B; }");
        CHECK(b.mainModel == "m");
        CHECK(b.models.at("m").states().size() == 2);
        CHECK(b.models.at("m").transitions().size() == 1);
    }
    SUBCASE("guard and action") {
        auto b = parse_dsl(R"m(model m { var x: int = 3; state v_A start exit;
            trans e_Dec: v_A -> v_A guard "x > 0" do "x = x - 1;"; })m");
        const auto& t = b.models.at("m").transitions()[0];
        CHECK(*t.guard == *parse_expr("x > 0"));
        CHECK(t.actions.size() == 1);
    }
    SUBCASE("submodel reference") {
        auto b = parse_dsl("model Main { state v_A start; state v_InGame submodel InGame; trans e_In: v_A -> v_InGame; }\n"
                           "model InGame { state v_H start exit; }");
        CHECK(b.models.at("Main").find_state("v_InGame")->submodel == std::optional<std::string>("InGame"));
        CHECK(b.mainModel == "Main");
    }
    SUBCASE("syntax error position") {
        try {
            parse_dsl("model m {\n  state v_A start;\n  trans e_Go v_A -> v_A;\n}");
            FAIL("expected DslSyntaxError");
        } catch (const DslSyntaxError& e) {
            CHECK(e.line() == 3);
            CHECK(e.column() == 14);
        }
        CHECK_THROWS_AS(parse_dsl("model m { state v_A start; trans e_Go: v_A -> v_A guard \"x >\"; }"), Error);
        CHECK_THROWS_AS(parse_dsl("model m { var x: float = 1; }"), DslSyntaxError);
    }
}

TEST_CASE("flatten") {
    SUBCASE("single-state submodel splices into a chain") {
        auto m = dsl_model(R"(
model Main { state v_A start; state v_Sub submodel Sub; state v_B exit;
  trans e_In: v_A -> v_Sub; trans e_Out: v_Sub -> v_B; }
model Sub { state v_S start exit; })");
        CHECK(m.states().size() == 3);
        CHECK(m.transitions().size() == 2);
        CHECK(edge_keys(m) == std::set<std::string>{"v_A --e_In--> Sub.v_S", "Sub.v_S --e_Out--> v_B"});
        CHECK(m.start_state()->label == "v_A");
    }
    SUBCASE("each exit inherits the referencing state's edges") {
        auto m = dsl_model(R"(
model Main { state v_A start; state v_Sub submodel Sub; state v_B exit;
  trans e_In: v_A -> v_Sub; trans e_Out: v_Sub -> v_B; }
model Sub { state v_X start; state v_Y exit; state v_Z exit;
  trans e_1: v_X -> v_Y; trans e_2: v_X -> v_Z; })");
        std::set<std::string> expected{"v_A --e_In--> Sub.v_X", "Sub.v_X --e_1--> Sub.v_Y", "Sub.v_X --e_2--> Sub.v_Z",
                                       "Sub.v_Y --e_Out--> v_B", "Sub.v_Z --e_Out--> v_B"};
        CHECK(edge_keys(m) == expected);
        std::map<std::string, std::pair<bool, bool>> flags{{"v_A", {true, false}},     {"Sub.v_X", {false, false}},
                                                           {"Sub.v_Y", {false, false}}, {"Sub.v_Z", {false, false}},
                                                           {"v_B", {false, true}}};
        CHECK(state_flags(m) == flags);
    }
    SUBCASE("second reference gets #2") {
        auto m = dsl_model(R"(
model Main { state v_A start; state v_S1 submodel Sub; state v_S2 submodel Sub;
  trans e_1: v_A -> v_S1; trans e_2: v_S1 -> v_S2; trans e_3: v_S2 -> v_A; }
model Sub { state v_S start exit; })");
        CHECK(m.find_state("Sub.v_S"));
        CHECK(m.find_state("Sub#2.v_S"));
    }
    SUBCASE("variables merge across layers") {
        auto m = dsl_model(R"(
model Main { var a: int = 0; state v_A start; state v_S submodel Sub; trans e_1: v_A -> v_S; }
model Sub { var b: bool = true; state v_S start exit; })");
        CHECK(m.variables().size() == 2);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(dsl_model(R"(
model Main { state v_A start; state v_S submodel A; trans e_1: v_A -> v_S; }
model A { state v_X start; state v_Y submodel B; trans e_1: v_X -> v_Y; }
model B { state v_X start; state v_Y submodel A; trans e_1: v_X -> v_Y; })"),
                        Error);  // no root: every model is referenced except Main, A<->B cycle
        ModelBundle cyc = parse_dsl(R"(
model Main { state v_A start; state v_S submodel A; trans e_1: v_A -> v_S; }
model A { state v_X start; state v_Y submodel B; trans e_1: v_X -> v_Y; }
model B { state v_X start; state v_Y submodel A; trans e_1: v_X -> v_Y; })");
        cyc.mainModel = "Main";
        CHECK_THROWS_AS(flatten(cyc), CycleError);

        CHECK_THROWS_AS(dsl_model(R"(
model Main { state v_A start; state v_S submodel Sub; state v_B exit;
  trans e_1: v_A -> v_S; trans e_2: v_S -> v_B; }
model Sub { state v_X start; })"),
                        NoExitError);
        // no outgoing edges from the reference: an exit-less submodel is fine
        CHECK_NOTHROW(dsl_model(R"(
model Main { state v_A start; state v_S submodel Sub; trans e_1: v_A -> v_S; }
model Sub { state v_X start; })"));
        CHECK_THROWS_AS(dsl_model(R"(
model Main { state v_A start; state v_S submodel Nope; trans e_1: v_A -> v_S; })"),
                        ModelError);
    }
}

TEST_CASE("validate") {
    SUBCASE("island state") {
        auto m = dsl_model("model m { state v_A start exit; state v_X; trans e_Self: v_X -> v_X; }");
        auto r = validate(m);
        CHECK(r.subjects("unreachable-state") == std::vector<std::string>{"v_X"});
        CHECK(r.subjects("unreachable-transition") == std::vector<std::string>{"v_X --e_Self--> v_X"});
    }
    SUBCASE("ill-typed guard names the transition") {
        std::vector<State> st{{"v_A", "v_A", true, true, std::nullopt}};
        EfsmModel m("m", st, {Transition{"e_Go", "v_A", "v_A", parse_expr("1 + true"), {}}}, {});
        auto r = validate(m);
        CHECK(r.subjects("type-error") == std::vector<std::string>{"e_Go"});
    }
    SUBCASE("duplicate state and missing start") {
        std::vector<State> st{{"v_A", "v_A", false, false, std::nullopt}, {"v_A", "v_A", false, false, std::nullopt}};
        EfsmModel m("m", st, {}, {});
        auto r = validate(m);
        CHECK(r.subjects("duplicate-state") == std::vector<std::string>{"v_A"});
        CHECK(r.subjects("missing-start") == std::vector<std::string>{"m"});
    }
    SUBCASE("bundled reference model is clean") {
        auto r = validate(load_model(quizup_dir()));
        for (const auto& f : r.findings) INFO(f.kind << " " << f.subject << ": " << f.message);
        CHECK(r.clean());
    }
    SUBCASE("bundled demo model is clean") {
        CHECK(validate(load_model(testing::source_dir() / "models" / "demo" / "door.efsm")).clean());
    }
}

TEST_CASE("extract_labels") {
    auto m = dsl_model("model m { state v_B exit; state v_A start; trans e_Go: v_A -> v_B; }");
    auto inv = extract_labels(m);
    CHECK(inv.stateLabels == std::vector<std::string>{"v_A", "v_B"});
    CHECK(inv.transitionLabels == std::vector<std::string>{"e_Go"});
    CHECK(inv.sourceModel == "m");
    CHECK(inv.contentHash.size() == 64);
    CHECK(extract_labels(m) == inv);

    auto backs = dsl_model(R"(model m { state v_A start exit; state v_B; state v_C; state v_D; state v_E; state v_F;
      trans e_Go: v_A -> v_B; trans e_Go: v_A -> v_C; trans e_Go: v_A -> v_D; trans e_Go: v_A -> v_E; trans e_Go: v_A -> v_F;
      trans e_Back: v_B -> v_A; trans e_Back: v_C -> v_A; trans e_Back: v_D -> v_A; trans e_Back: v_E -> v_A; trans e_Back: v_F -> v_A; })");
    CHECK(extract_labels(backs).transitionLabels == std::vector<std::string>{"e_Back", "e_Go"});

    auto more = dsl_model("model m { state v_B exit; state v_A start; trans e_Go: v_A -> v_B; trans e_Back: v_B -> v_A; }");
    auto inv2 = extract_labels(more);
    std::vector<std::string> added;
    std::set_difference(inv2.transitionLabels.begin(), inv2.transitionLabels.end(), inv.transitionLabels.begin(),
                        inv.transitionLabels.end(), std::back_inserter(added));
    CHECK(added == std::vector<std::string>{"e_Back"});
    CHECK(inv2.contentHash != inv.contentHash);
}

TEST_CASE("property: inventory and hash ignore declaration order") {
    std::vector<std::string> lines{
        "var x: int = 0;",     "var flag: bool = true;", "var names: list = ['a', 'b'];",
        "state v_A start;",    "state v_B;",             "state v_C exit;",
        "trans e_1: v_A -> v_B guard \"x < 3\" do \"x = x + 1;\";",
        "trans e_2: v_B -> v_A;", "trans e_2: v_B -> v_C guard \"flag\";", "trans e_3: v_C -> v_A;"};
    auto build = [&](const std::vector<std::string>& ls) {
        std::string text = "model shuffled {\n";
        for (const auto& l : ls) text += "  " + l + "\n";
        return dsl_model(text + "}\n");
    };
    auto ref = extract_labels(build(lines));
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        auto ls = lines;
        std::shuffle(ls.begin(), ls.end(), rng);
        CHECK(extract_labels(build(ls)) == ref);
    }
}

TEST_CASE("bundled reference model matches the golden inventory") {
    auto golden = testing::source_dir() / "tests" / "golden" / "quizup_labels.txt";
    std::string actual = inventory_text(load_model(quizup_dir()));
    if (std::getenv("MBT_UPDATE_GOLDEN")) testing::spill(golden, actual);
    CHECK(actual == slurp(golden));
}

TEST_CASE("load_bundle") {
    auto b = load_bundle(quizup_dir());
    CHECK(b.mainModel == "Main");
    CHECK(b.models.size() == 9);
    CHECK_THROWS_AS(load_bundle(testing::source_dir() / "no-such-dir"), Error);
}
