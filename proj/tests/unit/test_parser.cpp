#include <doctest.h>

#include "testutil.hpp"
#include "wellform/parser.hpp"

using namespace wellform;
using testsupport::fixture_path;
using testsupport::read_file;

TEST_SUITE("parser") {

TEST_CASE("minimal activity: nodes, edges, labels") {
    auto parsed = parse_activity(
        "activity \"a\" {\n"
        "  start s\n"
        "  action x \"do it\"\n"
        "  end e\n"
        "  flow s -> x\n"
        "  flow x -> e\n"
        "}\n");
    REQUIRE(parse_ok(parsed));
    const auto& g = std::get<ActivityGraph>(parsed);
    CHECK(g.name == "a");
    REQUIRE(g.nodes.size() == 3);
    CHECK(g.nodes[0].kind == NodeKind::Initial);
    CHECK(g.nodes[1].kind == NodeKind::Action);
    CHECK(g.nodes[1].label == "do it");
    CHECK(g.nodes[2].kind == NodeKind::ActivityFinal);
    REQUIRE(g.edges.size() == 2);
    CHECK(g.edges[0].id == "s->x");
    CHECK(g.edges[1].id == "x->e");
}

TEST_CASE("semicolons and newlines both terminate statements") {
    auto parsed = parse_activity("activity \"a\" { start s; end e; flow s -> e }");
    REQUIRE(parse_ok(parsed));
    CHECK(std::get<ActivityGraph>(parsed).nodes.size() == 2);
}

TEST_CASE("comments are skipped but #<digit> is a number token") {
    auto parsed = parse_activity(
        "activity \"a\" { # header comment\n"
        "  start s  # trailing\n"
        "  end e\n"
        "  flow s -> e\n"
        "}\n");
    REQUIRE(parse_ok(parsed));
}

TEST_CASE("unknown keyword reports position and snippet") {
    auto parsed = parse_activity("activity \"a\" {\n  strat s\n}\n");
    REQUIRE_FALSE(parse_ok(parsed));
    const auto& e = parse_error(parsed);
    CHECK(e.line == 2);
    CHECK(e.message == "unknown keyword 'strat'");
    CHECK(e.snippet.find("strat") != std::string::npos);
}

TEST_CASE("malformed guard expressions are rejected at parse time") {
    auto parsed = parse_activity(
        "activity \"a\" { start s; decision d; end e\n"
        "  flow s -> d\n"
        "  flow d -> e guard \"i <\"\n"
        "}\n");
    REQUIRE_FALSE(parse_ok(parsed));
    CHECK(parse_error(parsed).message.find("malformed guard") != std::string::npos);
}

TEST_CASE("duplicate node ids are rejected") {
    auto parsed = parse_activity("activity \"a\" { start s; action s \"x\"; }");
    REQUIRE_FALSE(parse_ok(parsed));
    CHECK(parse_error(parsed).message.find("duplicate") != std::string::npos);
}

TEST_CASE("while fixture: annotation and effect round out the model") {
    auto g = testsupport::load_activity_fixture("activities/while_loop.act");
    REQUIRE(g.nodes.size() == 5);
    CHECK(g.find_node("m1")->kind == NodeKind::Merge);
    CHECK(g.find_node("d1")->kind == NodeKind::Decision);
    CHECK(g.find_node("body")->effect == "i = i + 1");
    REQUIRE(g.edges.size() == 5);
    CHECK(g.find_edge("d1->body")->guard == "i < 3");
    REQUIRE(g.annotations.size() == 1);
    const auto& a = g.annotations[0];
    CHECK(a.construct == ControlConstruct::While);
    CHECK(a.number == 1);
    CHECK(a.open_node == "d1");
    CHECK(a.close_node == "m1");
    CHECK(a.condition == "i < 3");
}

TEST_CASE("loop node bodies parse as nested graphs") {
    auto g = testsupport::load_activity_fixture("activities/loopnode.act");
    const Node* ln = g.find_node("l1");
    REQUIRE(ln != nullptr);
    CHECK(ln->kind == NodeKind::LoopNode);
    CHECK(ln->label == "retry loop");
    REQUIRE(ln->has_body());
    const ActivityGraph& body = ln->body.front();
    CHECK(body.name == "l1");
    CHECK(body.nodes.size() == 3);
    CHECK(body.edges.size() == 2);
}

TEST_CASE("annotation numbers must be positive") {
    auto parsed = parse_activity(
        "activity \"a\" { start s; decision d; merge m; end e\n"
        "  annot if #0 open d close m cond \"x > 0\"\n"
        "}\n");
    REQUIRE_FALSE(parse_ok(parsed));
    CHECK(parse_error(parsed).message.find("positive") != std::string::npos);
}

TEST_CASE("sequence fixture: events and fragment spans") {
    auto m = testsupport::load_sequence_fixture("sequences/while_loop.seq");
    REQUIRE(m.lifelines.size() == 2);
    CHECK(m.lifelines[0].id == "u");
    REQUIRE(m.events.size() == 1);
    CHECK(m.events[0].order == 0);
    CHECK(m.events[0].label == "work");
    CHECK(m.events[0].kind == MessageKind::Sync);
    REQUIRE(m.fragments.size() == 1);
    CHECK(m.fragments[0].kind == FragmentKind::Loop);
    CHECK(m.fragments[0].number == 1);
    CHECK(m.fragments[0].span == Span{0, 0});
    CHECK(m.fragments[0].id == "frag1");
}

TEST_CASE("alt operands tile the fragment span") {
    auto m = testsupport::load_sequence_fixture("sequences/branch.seq");
    REQUIRE(m.fragments.size() == 1);
    const Fragment& f = m.fragments[0];
    CHECK(f.kind == FragmentKind::Alt);
    CHECK(f.span == Span{0, 1});
    REQUIRE(f.operands.size() == 2);
    CHECK(f.operands[0] == Span{0, 0});
    CHECK(f.operands[1] == Span{1, 1});
}

TEST_CASE("messages to undeclared lifelines are rejected") {
    auto parsed = parse_sequence(
        "sequence \"x\" { lifeline a \"A\"\n  msg m1 a -> z \"hi\" sync }\n");
    REQUIRE_FALSE(parse_ok(parsed));
    CHECK(parse_error(parsed).message == "undeclared lifeline 'z'");
}

TEST_CASE("operand outside an alt fragment is rejected") {
    auto parsed = parse_sequence(
        "sequence \"x\" { lifeline a \"A\"; lifeline b \"B\"\n"
        "  fragment loop #1 cond \"x < 1\" {\n"
        "    msg m1 a -> b \"hi\" sync\n"
        "    operand \"y\"\n"
        "  }\n"
        "}\n");
    REQUIRE_FALSE(parse_ok(parsed));
    CHECK(parse_error(parsed).message.find("alt") != std::string::npos);
}

TEST_CASE("fragments may not be empty") {
    auto parsed = parse_sequence(
        "sequence \"x\" { lifeline a \"A\"\n"
        "  fragment opt #1 cond \"x < 1\" {\n"
        "  }\n"
        "}\n");
    REQUIRE_FALSE(parse_ok(parsed));
    CHECK(parse_error(parsed).message == "fragment contains no messages");
}

TEST_CASE("rubric fixture: items, competency, taxonomy") {
    auto parsed = parse_rubric(read_file(fixture_path("rubrics/annotation_extend.rub")));
    REQUIRE(parse_ok(parsed));
    const Rubric& r = std::get<Rubric>(parsed);
    CHECK(r.name == "uc-annotation");
    CHECK(r.mode == RubricMode::Annotation);
    REQUIRE(r.items.size() == 2);
    CHECK(r.items[0].key == "extend");
    CHECK(r.items[1].key == "uc-1");
    CHECK(r.max_points() == doctest::Approx(2.0));
    CHECK(r.competency == std::vector<char>{'A', 'B'});
    CHECK(r.taxonomy == Taxonomy::Remember);
}

TEST_CASE("rubric item keys are normalized and points accumulate") {
    auto parsed = parse_rubric(
        "rubric \"r\" mode hotspot { item \"  Fancy   KEY \" points 2; item \"b\" points 5 }");
    REQUIRE(parse_ok(parsed));
    const Rubric& r = std::get<Rubric>(parsed);
    CHECK(r.mode == RubricMode::Hotspot);
    CHECK(r.items[0].key == "fancy key");
    CHECK(r.max_points() == doctest::Approx(7.0));
}

TEST_CASE("rubric defaults: no items, apply taxonomy") {
    auto parsed = parse_rubric("rubric \"r\" mode element_diff { }");
    REQUIRE(parse_ok(parsed));
    const Rubric& r = std::get<Rubric>(parsed);
    CHECK(r.mode == RubricMode::ElementDiff);
    CHECK(r.items.empty());
    CHECK(r.max_points() == doctest::Approx(0.0));
    CHECK(r.taxonomy == Taxonomy::Apply);
}

TEST_CASE("activity serialization round-trips exactly") {
    for (const char* name :
         {"activities/while_loop.act", "activities/if_else.act",
          "activities/loop_with_branch.act", "activities/dowhile.act",
          "activities/fork_join.act", "activities/loopnode.act"}) {
        auto g = testsupport::load_activity_fixture(name);
        auto reparsed = parse_activity(serialize_activity(g));
        REQUIRE_MESSAGE(parse_ok(reparsed), name);
        CHECK_MESSAGE(std::get<ActivityGraph>(reparsed) == g, name);
    }
}

TEST_CASE("sequence serialization round-trips exactly") {
    for (const char* name :
         {"sequences/while_loop.seq", "sequences/branch.seq"}) {
        auto m = testsupport::load_sequence_fixture(name);
        auto reparsed = parse_sequence(serialize_sequence(m));
        REQUIRE_MESSAGE(parse_ok(reparsed), name);
        CHECK_MESSAGE(std::get<SequenceModel>(reparsed) == m, name);
    }
}

}  // TEST_SUITE
