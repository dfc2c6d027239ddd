#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "testutil.hpp"
#include "wellform/cli.hpp"

using namespace wellform;
using testsupport::fixture_path;

namespace {

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
};

CliRun run_tool(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    CliRun result;
    result.code = run_cli(args, out, err);
    result.out = out.str();
    result.err = err.str();
    return result;
}

// Temp file that cleans up after itself.
struct TempFile {
    std::filesystem::path path;

    TempFile(const std::string& name, const std::string& content) {
        path = std::filesystem::temp_directory_path() / name;
        std::ofstream sink(path, std::ios::binary);
        sink << content;
    }
    ~TempFile() { std::filesystem::remove(path); }

    std::string str() const { return path.string(); }
};

nlohmann::ordered_json parse_json(const std::string& text) {
    return nlohmann::ordered_json::parse(text);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("--version prints the bare version") {
    CliRun r = run_tool({"--version"});
    CHECK(r.code == 0);
    CHECK(r.out == "0.1.0\n");
    CHECK(r.err.empty());
}

TEST_CASE("a missing subcommand is a usage error") {
    CliRun r = run_tool({});
    CHECK(r.code == 3);
    CHECK(r.err.find("usage error") != std::string::npos);

    CliRun no_file = run_tool({"lint"});
    CHECK(no_file.code == 3);
    CHECK(no_file.err == "usage error: files is required\n");
}

TEST_CASE("lint: clean file, one line, exit zero") {
    CliRun r = run_tool({"lint", fixture_path("activities/while_loop.act")});
    CHECK(r.code == 0);
    CHECK(r.out == "well-formed: true\n");
    CHECK(r.err.empty());
}

TEST_CASE("lint: findings print rule, locus and message") {
    CliRun r = run_tool({"lint", fixture_path("mutations/extra_end_01.act")});
    CHECK(r.code == 1);
    CHECK(r.out ==
          "W2-SINGLE-FINAL error at e2: more than one end symbol: extra node "
          "'e2'\n"
          "well-formed: false\n");
}

TEST_CASE("lint: multiple files get banner headers and the worst exit code") {
    std::string clean = fixture_path("activities/while_loop.act");
    std::string also_clean = fixture_path("activities/if_else.act");
    CliRun r = run_tool({"lint", clean, also_clean});
    CHECK(r.code == 0);
    CHECK(r.out == "== " + clean + " ==\nwell-formed: true\n== " + also_clean +
                       " ==\nwell-formed: true\n");

    CliRun mixed = run_tool({"lint", clean, "/nonexistent/nope.act"});
    CHECK(mixed.code == 2);
    CHECK(mixed.out == "== " + clean + " ==\nwell-formed: true\n");
    CHECK(mixed.err == "cannot read '/nonexistent/nope.act'\n");
}

TEST_CASE("lint: unreadable and unparsable files exit 2") {
    CliRun missing = run_tool({"lint", "/nonexistent/nope.act"});
    CHECK(missing.code == 2);
    CHECK(missing.out.empty());
    CHECK(missing.err == "cannot read '/nonexistent/nope.act'\n");

    TempFile bad("wellform_cli_bad.act", "activity \"x\" {\n  strat s\n}\n");
    CliRun broken = run_tool({"lint", bad.str()});
    CHECK(broken.code == 2);
    CHECK(broken.err ==
          bad.str() + ":2:3: unknown keyword 'strat'\n    strat s\n");
}

TEST_CASE("lint: json envelope") {
    std::string file = fixture_path("mutations/extra_end_01.act");
    CliRun r = run_tool({"lint", "--format", "json", file});
    CHECK(r.code == 1);
    auto doc = parse_json(r.out);
    CHECK(doc["tool"] == "wellform");
    CHECK(doc["version"] == "0.1.0");
    CHECK(doc["command"] == "lint");
    CHECK(doc["file"] == file);
    CHECK(doc["wellFormed"] == false);
    REQUIRE(doc["diagnostics"].size() == 1);
    CHECK(doc["diagnostics"][0]["rule"] == "W2-SINGLE-FINAL");
    CHECK(doc["diagnostics"][0]["severity"] == "error");
    CHECK(doc["diagnostics"][0]["locus"] == "e2");
    CHECK(doc["diagnostics"][0]["message"] ==
          "more than one end symbol: extra node 'e2'");
}

TEST_CASE("codegen: text, file output and json") {
    std::string file = fixture_path("activities/while_loop.act");
    const std::string expected =
        "while (i < 3) {\n  do work; // i = i + 1\n} // #1\n";

    CliRun text = run_tool({"codegen", file});
    CHECK(text.code == 0);
    CHECK(text.out == expected);

    TempFile sink("wellform_cli_out.pc", "");
    CliRun redirected = run_tool({"codegen", "--output", sink.str(), file});
    CHECK(redirected.code == 0);
    CHECK(redirected.out.empty());
    CHECK(testsupport::read_file(sink.str()) == expected);

    CliRun json = run_tool({"codegen", "--format", "json", file});
    auto doc = parse_json(json.out);
    CHECK(doc["command"] == "codegen");
    CHECK(doc["pseudocode"] == expected);
}

TEST_CASE("codegen: an irreducible diagram reports its residue") {
    TempFile resid("wellform_cli_resid.act",
                   "activity \"resid\" { start s; merge m1; decision d1; "
                   "action body \"work\"; end e\n"
                   "  flow s -> m1; flow m1 -> d1; "
                   "flow d1 -> body guard \"i < 3\"; flow body -> d1; "
                   "flow d1 -> e guard \"i >= 3\"\n"
                   "  annot while #1 open d1 close m1 cond \"i < 3\" }\n");
    CliRun text = run_tool({"codegen", resid.str()});
    CHECK(text.code == 1);
    CHECK(text.out.empty());
    CHECK(text.err.find("not reducible") != std::string::npos);

    CliRun json = run_tool({"codegen", "--format", "json", resid.str()});
    CHECK(json.code == 1);
    auto doc = parse_json(json.out);
    REQUIRE(doc.contains("residue"));
    auto nodes = doc["residue"]["remainingNodes"];
    CHECK(nodes == nlohmann::ordered_json::array({"body", "d1", "m1"}));
    CHECK(doc["residue"]["remainingEdges"] ==
          nlohmann::ordered_json::array({"body->d1", "d1->body", "m1->d1"}));
    CHECK(doc["residue"]["stuckReason"].get<std::string>().find(
              "annotation #1 (while)") != std::string::npos);
}

TEST_CASE("simulate: trace lines, terminated line, env lines") {
    std::string file = fixture_path("activities/while_loop.act");
    CliRun r = run_tool({"simulate", "--set", "i=0", file});
    CHECK(r.code == 0);
    CHECK(r.out ==
          "work\nwork\nwork\nterminated: Completed\nenv: i = 3\n");

    CliRun unbound = run_tool({"simulate", file});
    CHECK(unbound.code == 1);
    CHECK(unbound.out ==
          "terminated: GuardError\n"
          "message: guard \"i < 3\" on edge 'd1->body': unbound identifier "
          "'i'\n");

    CliRun bad_set = run_tool({"simulate", "--set", "i=maybe", file});
    CHECK(bad_set.code == 3);
    CHECK(bad_set.err ==
          "--set value 'maybe' is neither an integer nor true/false\n");

    CliRun json = run_tool({"simulate", "--format", "json", "--set", "i=0", file});
    auto doc = parse_json(json.out);
    CHECK(doc["trace"]["steps"] ==
          nlohmann::ordered_json::array({"work", "work", "work"}));
    CHECK(doc["trace"]["finalEnv"]["i"] == 3);
    CHECK(doc["trace"]["terminated"] == "Completed");
}

TEST_CASE("simulate: budget flag beats the environment variable") {
    std::string file = fixture_path("activities/while_loop.act");
    setenv("WELLFORM_BUDGET", "2", 1);
    CliRun from_env = run_tool({"simulate", "--set", "i=0", file});
    CHECK(from_env.code == 1);
    CHECK(from_env.out.find("terminated: BudgetExhausted") != std::string::npos);

    CliRun from_flag =
        run_tool({"simulate", "--budget", "10000", "--set", "i=0", file});
    CHECK(from_flag.code == 0);
    CHECK(from_flag.out.find("terminated: Completed") != std::string::npos);

    setenv("WELLFORM_BUDGET", "not-a-number", 1);
    CliRun fallback = run_tool({"simulate", "--set", "i=0", file});
    CHECK(fallback.code == 0);
    unsetenv("WELLFORM_BUDGET");
}

TEST_CASE("check-seq: ok and broken nesting") {
    CliRun ok = run_tool({"check-seq", fixture_path("sequences/branch.seq")});
    CHECK(ok.code == 0);
    CHECK(ok.out == "nesting: ok\n");

    TempFile dup("wellform_cli_dup.seq",
                 "sequence \"dup\" {\n"
                 "  lifeline u \"User\"\n"
                 "  lifeline sys \"System\"\n"
                 "  fragment loop #1 cond \"a\" { msg m1 u -> sys \"x\" sync }\n"
                 "  fragment loop #1 cond \"b\" { msg m2 u -> sys \"y\" sync }\n"
                 "}\n");
    CliRun broken = run_tool({"check-seq", dup.str()});
    CHECK(broken.code == 1);
    CHECK(broken.out ==
          "S3-NUMBER-DUP error at frag2: fragment number #1 is already used "
          "by 'frag1'\n"
          "nesting: broken\n");
}

TEST_CASE("check-consistency: text and json on a consistent pair") {
    std::string act = fixture_path("activities/if_else.act");
    std::string seq = fixture_path("sequences/branch.seq");
    CliRun text = run_tool({"check-consistency", act, seq});
    CHECK(text.code == 0);
    CHECK(text.out == "consistent: true\n");

    CliRun json = run_tool({"check-consistency", "--format", "json", act, seq});
    auto doc = parse_json(json.out);
    CHECK(doc["consistent"] == true);
    CHECK(doc["matchedPairs"] ==
          nlohmann::ordered_json::array(
              {nlohmann::ordered_json::array({"d1", "frag1"}),
               nlohmann::ordered_json::array({"a1", "m1"}),
               nlohmann::ordered_json::array({"a2", "m2"})}));
    CHECK(doc["diagnostics"].empty());
}

TEST_CASE("check-consistency: mismatched pair exits one") {
    CliRun r = run_tool({"check-consistency",
                         fixture_path("activities/while_loop.act"),
                         fixture_path("sequences/branch.seq")});
    CHECK(r.code == 1);
    CHECK(r.out ==
          "C4-KIND error at d1: loop #1 is paired with alt fragment #1 but "
          "their kinds disagree\n"
          "consistent: false\n");
}

TEST_CASE("check-consistency: precondition failures name the lint errors") {
    CliRun r = run_tool({"check-consistency",
                         fixture_path("mutations/extra_end_01.act"),
                         fixture_path("sequences/while_loop.seq")});
    CHECK(r.code == 1);
    CHECK(r.out.find("W2-SINGLE-FINAL") != std::string::npos);
    CHECK(r.err ==
          "consistency requires a well-formed activity diagram and a cleanly "
          "nested sequence diagram\n");

    // A while-shaped loop annotated as dowhile lints clean (all degree and
    // pairing rules hold) yet cannot reduce, so the precondition diagnostic
    // is synthesized rather than borrowed from the linter.
    TempFile trap("wellform_cli_c0.act",
                  "activity \"c0trap\" { start s; merge m1; decision d1; "
                  "action body \"work\"; end e\n"
                  "  flow s -> m1; flow m1 -> d1; "
                  "flow d1 -> body guard \"i < 3\"; flow body -> m1; "
                  "flow d1 -> e guard \"i >= 3\"\n"
                  "  annot dowhile #1 open d1 close m1 cond \"i < 3\" }\n");
    CliRun c0 = run_tool({"check-consistency", trap.str(),
                          fixture_path("sequences/while_loop.seq")});
    CHECK(c0.code == 1);
    CHECK(c0.out ==
          "C0-PRECONDITION error at c0trap: activity diagram does not reduce "
          "to structured form\n");
}

TEST_CASE("grade: annotation and element_diff text reports") {
    CliRun ann = run_tool(
        {"grade", "--mode", "annotation", "--rubric",
         fixture_path("rubrics/annotation_multiplicity.rub"), "--submission",
         fixture_path("submissions/multiplicity_correct.txt")});
    CHECK(ann.code == 0);
    CHECK(ann.out == "[x] 1 1/1\n[x] n 1/1\nscore: 2/2\n");

    CliRun diff = run_tool(
        {"grade", "--mode", "element_diff", "--rubric",
         fixture_path("rubrics/elementdiff_while.rub"), "--reference",
         fixture_path("activities/while_loop.act"), "--submission",
         fixture_path("mutations/missing_guard_01.act")});
    CHECK(diff.code == 0);
    CHECK(diff.out ==
          "[x] start 1/1\n"
          "[x] merge 1/1\n"
          "[x] decision 1/1\n"
          "[x] action:work 1/1\n"
          "[x] end 1/1\n"
          "[x] flow:start->merge 1/1\n"
          "[x] flow:merge->decision 1/1\n"
          "[x] flow:decision->action:work 1/1\n"
          "[ ] flow:decision->end 0/1\n"
          "[x] flow:action:work->merge 1/1\n"
          "[ ] missing:flow:decision->end 0/0\n"
          "[ ] extra:flow:decision->end 0/0\n"
          "[ ] lint:W5-GUARDS-TOTAL -1/0\n"
          "score: 8/10\n");
}

TEST_CASE("grade: json report carries every line") {
    std::string submission = fixture_path("submissions/hotspot_extraneous.txt");
    CliRun r = run_tool({"grade", "--format", "json", "--mode", "hotspot",
                         "--rubric", fixture_path("rubrics/hotspot_arrows.rub"),
                         "--submission", submission});
    CHECK(r.code == 0);
    auto doc = parse_json(r.out);
    CHECK(doc["rubric"] == "uc-arrows");
    CHECK(doc["submission"] == submission);
    CHECK(doc["grade"]["earned"] == 0.0);
    CHECK(doc["grade"]["max"] == 2.0);
    CHECK(doc["grade"]["mode"] == "hotspot");
    CHECK(doc["grade"]["taxonomy"] == "understand");
    REQUIRE(doc["grade"]["items"].size() == 3);
    CHECK(doc["grade"]["items"][2]["key"] == "extraneous:association");
    CHECK(doc["grade"]["items"][2]["earned"] == -1.0);
}

TEST_CASE("grade: mode mismatch and malformed placement lines") {
    CliRun mismatch = run_tool(
        {"grade", "--mode", "hotspot", "--rubric",
         fixture_path("rubrics/annotation_multiplicity.rub"), "--submission",
         fixture_path("submissions/multiplicity_correct.txt")});
    CHECK(mismatch.code == 3);
    CHECK(mismatch.err.find("declares mode 'annotation'") != std::string::npos);

    TempFile bad("wellform_cli_bad_place.txt", "just-a-spot-no-kind\n");
    CliRun malformed = run_tool(
        {"grade", "--mode", "placement", "--rubric",
         fixture_path("rubrics/placement_seven.rub"), "--submission",
         bad.str()});
    CHECK(malformed.code == 2);
    CHECK(malformed.err.find("is not <spot>:<kind>") != std::string::npos);

    CliRun no_ref = run_tool(
        {"grade", "--mode", "element_diff", "--rubric",
         fixture_path("rubrics/elementdiff_while.rub"), "--submission",
         fixture_path("activities/while_loop.act")});
    CHECK(no_ref.code == 3);
    CHECK(no_ref.err.find("requires --reference") != std::string::npos);
}

TEST_CASE("every command is byte-deterministic across runs") {
    const std::vector<std::vector<std::string>> commands = {
        {"lint", fixture_path("activities/loop_with_branch.act")},
        {"lint", "--format", "json", fixture_path("mutations/extra_end_01.act")},
        {"codegen", fixture_path("activities/fork_join.act")},
        {"codegen", "--format", "json", fixture_path("activities/dowhile.act")},
        {"simulate", "--set", "i=0",
         fixture_path("activities/loop_with_branch.act")},
        {"simulate", "--format", "json", "--set", "n=0",
         fixture_path("activities/dowhile.act")},
        {"check-seq", fixture_path("sequences/while_loop.seq")},
        {"check-consistency", fixture_path("activities/if_else.act"),
         fixture_path("sequences/branch.seq")},
        {"grade", "--mode", "placement", "--rubric",
         fixture_path("rubrics/placement_seven.rub"), "--submission",
         fixture_path("submissions/placement_correct.txt")},
        {"grade", "--format", "json", "--mode", "element_diff", "--rubric",
         fixture_path("rubrics/elementdiff_while.rub"), "--reference",
         fixture_path("activities/while_loop.act"), "--submission",
         fixture_path("mutations/extra_end_01.act")},
    };
    for (const auto& args : commands) {
        CAPTURE(args[0]);
        CliRun first = run_tool(args);
        CliRun second = run_tool(args);
        CHECK(first.code == second.code);
        CHECK(first.out == second.out);
        CHECK(first.err == second.err);
    }
}

}  // TEST_SUITE
