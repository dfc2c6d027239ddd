// Well-formedness linter: checks an activity graph against the guideline
// catalog (rules W1..W9) and reports diagnostics with stable rule ids.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wellform/model.hpp"

namespace wellform {

struct LintReport {
    std::vector<Diagnostic> diagnostics;  // sorted by (rule, locus)
    bool well_formed = false;  // no Error diagnostics and reduce() succeeds
};

// Total: never fails. If validate_refs(graph) is non-empty, those REF-*
// diagnostics are returned as-is and no W-rule runs (the rules assume a
// referentially intact graph). Loop-node bodies are linted recursively;
// their loci are prefixed with "<loopnode id>/".
LintReport lint(const ActivityGraph& graph);

// Human-readable guideline text for a rule id; std::nullopt signals a
// catalog miss.
std::optional<std::string> explain(const std::string& rule_id);

// Fork -> Join pairing at one graph level (bodies are not entered). A pair
// appears iff the join is the nearest join post-dominator of the fork, the
// pairing is one-to-one, the join's in-degree equals the fork's out-degree
// and all join inputs come from inside the fork's region. Forks and joins
// missing from the map are exactly the W4 violations.
std::map<std::string, std::string> match_fork_join(const ActivityGraph& graph);

}  // namespace wellform
