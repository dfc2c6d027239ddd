#include "wellform/linter.hpp"

#include <algorithm>
#include <set>

#include "wellform/structuring.hpp"

namespace wellform {

namespace {

struct Degrees {
    int in = 0;
    int out = 0;
};

std::map<std::string, Degrees> count_degrees(const ActivityGraph& g) {
    std::map<std::string, Degrees> d;
    for (const Node& n : g.nodes) d[n.id];
    for (const Edge& e : g.edges) {
        d[e.source].out++;
        d[e.target].in++;
    }
    return d;
}

std::map<std::string, std::vector<std::string>> successors(const ActivityGraph& g) {
    std::map<std::string, std::vector<std::string>> succ;
    for (const Node& n : g.nodes) succ[n.id];
    for (const Edge& e : g.edges) succ[e.source].push_back(e.target);
    return succ;
}

std::set<std::string> reach(const std::map<std::string, std::vector<std::string>>& adj,
                            const std::vector<std::string>& seeds) {
    std::set<std::string> seen(seeds.begin(), seeds.end());
    std::vector<std::string> work(seeds.begin(), seeds.end());
    while (!work.empty()) {
        std::string cur = work.back();
        work.pop_back();
        auto it = adj.find(cur);
        if (it == adj.end()) continue;
        for (const std::string& next : it->second) {
            if (seen.insert(next).second) work.push_back(next);
        }
    }
    return seen;
}

// Nodes reachable from the fork without passing through the join; the fork
// itself is included (it sources direct fork->join arms).
std::set<std::string> fork_region(const ActivityGraph& g, const std::string& fork,
                                  const std::string& join) {
    auto succ = successors(g);
    std::set<std::string> seen{fork};
    std::vector<std::string> work{fork};
    while (!work.empty()) {
        std::string cur = work.back();
        work.pop_back();
        for (const std::string& next : succ[cur]) {
            if (next == join) continue;
            if (seen.insert(next).second) work.push_back(next);
        }
    }
    return seen;
}

// Post-dominator sets over the graph plus a virtual exit that every final
// node and every sink feeds into. The virtual exit is the empty id.
std::map<std::string, std::set<std::string>> post_dominators(const ActivityGraph& g) {
    const std::string exit_id;
    std::map<std::string, std::vector<std::string>> succ = successors(g);
    auto deg = count_degrees(g);
    for (const Node& n : g.nodes) {
        if (n.kind == NodeKind::ActivityFinal || n.kind == NodeKind::FlowFinal ||
            deg[n.id].out == 0) {
            succ[n.id].push_back(exit_id);
        }
    }

    std::set<std::string> everything{exit_id};
    for (const Node& n : g.nodes) everything.insert(n.id);

    std::map<std::string, std::set<std::string>> pdom;
    pdom[exit_id] = {exit_id};
    for (const Node& n : g.nodes) pdom[n.id] = everything;

    bool changed = true;
    while (changed) {
        changed = false;
        for (const Node& n : g.nodes) {
            std::set<std::string> meet = everything;
            bool first = true;
            for (const std::string& s : succ[n.id]) {
                if (first) {
                    meet = pdom[s];
                    first = false;
                } else {
                    std::set<std::string> inter;
                    std::set_intersection(meet.begin(), meet.end(), pdom[s].begin(),
                                          pdom[s].end(), std::inserter(inter, inter.begin()));
                    meet = std::move(inter);
                }
            }
            meet.insert(n.id);
            if (meet != pdom[n.id]) {
                pdom[n.id] = std::move(meet);
                changed = true;
            }
        }
    }
    return pdom;
}

std::vector<std::string> ids_of_kind(const ActivityGraph& g, NodeKind kind) {
    std::vector<std::string> out;
    for (const Node& n : g.nodes) {
        if (n.kind == kind) out.push_back(n.id);
    }
    return out;
}

void lint_level(const ActivityGraph& g, const std::string& scope,
                std::vector<Diagnostic>& out) {
    auto locus_of = [&](const std::string& id) {
        return scope.empty() ? id : scope + "/" + id;
    };
    auto add = [&](const std::string& rule, const std::string& locus,
                   const std::string& message) {
        out.push_back({rule, Severity::Error, locus, message});
    };

    auto deg = count_degrees(g);

    // W1 / W2: unique start and end symbols. With several candidates the
    // id-smallest one is kept and each extra is reported.
    auto check_unique = [&](NodeKind kind, const char* rule, const char* what) {
        std::vector<std::string> ids = ids_of_kind(g, kind);
        std::sort(ids.begin(), ids.end());
        if (ids.empty()) {
            add(rule, scope, std::string("no ") + what + " node in the diagram");
        }
        for (std::size_t i = 1; i < ids.size(); i++) {
            add(rule, locus_of(ids[i]),
                std::string("more than one ") + what + " symbol: extra node '" + ids[i] + "'");
        }
    };
    check_unique(NodeKind::Initial, "W1-SINGLE-INITIAL", "start");
    check_unique(NodeKind::ActivityFinal, "W2-SINGLE-FINAL", "end");

    // W3: degree discipline per node kind.
    for (const Node& n : g.nodes) {
        const Degrees& d = deg[n.id];
        std::string need;
        switch (n.kind) {
            case NodeKind::Action:
                if (d.in != 1 || d.out != 1) need = "exactly one incoming and one outgoing flow";
                break;
            case NodeKind::Decision:
                if (d.in != 1 || d.out < 2) need = "one incoming and at least two outgoing flows";
                break;
            case NodeKind::Merge:
                if (d.in < 2 || d.out != 1) need = "at least two incoming and one outgoing flow";
                break;
            case NodeKind::Fork:
                if (d.in != 1 || d.out < 2) need = "one incoming and at least two outgoing flows";
                break;
            case NodeKind::Join:
                if (d.in < 2 || d.out != 1) need = "at least two incoming and one outgoing flow";
                break;
            default:
                break;
        }
        if (!need.empty()) {
            add("W3-TOKEN-DISCIPLINE", locus_of(n.id),
                std::string(to_keyword(n.kind)) + " '" + n.id + "' must have " + need +
                    " (found " + std::to_string(d.in) + " in, " + std::to_string(d.out) +
                    " out); a single token flows through each control flow");
        }
    }

    // W4: fork/join pairing.
    {
        auto matching = match_fork_join(g);
        std::set<std::string> matched_joins;
        for (const auto& [fork, join] : matching) matched_joins.insert(join);
        for (const Node& n : g.nodes) {
            if (n.kind == NodeKind::Fork && !matching.count(n.id)) {
                add("W4-FORK-JOIN-MATCHED", locus_of(n.id),
                    "fork '" + n.id +
                        "' has no matching join collecting all of its concurrent flows");
            }
            if (n.kind == NodeKind::Join && !matched_joins.count(n.id)) {
                add("W4-FORK-JOIN-MATCHED", locus_of(n.id),
                    "join '" + n.id + "' does not pair with exactly one fork");
            }
        }
    }

    // W5: every decision exit carries a guard.
    for (const Node& n : g.nodes) {
        if (n.kind != NodeKind::Decision) continue;
        for (const Edge& e : g.edges) {
            if (e.source == n.id && e.guard.empty()) {
                add("W5-GUARDS-TOTAL", locus_of(e.id),
                    "edge '" + e.id + "' leaves decision '" + n.id +
                        "' without a guard; the decision node description is missing");
            }
        }
    }

    // W6: every decision and loop node opens exactly one annotation.
    for (const Node& n : g.nodes) {
        if (n.kind != NodeKind::Decision && n.kind != NodeKind::LoopNode) continue;
        int opens = 0;
        for (const ControlAnnotation& a : g.annotations) {
            if (a.open_node == n.id) opens++;
        }
        if (opens == 0) {
            add("W6-ANNOT-PRESENT", locus_of(n.id),
                std::string(to_keyword(n.kind)) + " '" + n.id +
                    "' has no annotation naming its control structure type");
        } else if (opens > 1) {
            add("W6-ANNOT-PRESENT", locus_of(n.id),
                std::string(to_keyword(n.kind)) + " '" + n.id + "' opens " +
                    std::to_string(opens) + " annotations; exactly one is required");
        }
    }

    // W7: annotations are correctly paired and uniquely numbered.
    {
        std::set<int> seen_numbers;
        for (const ControlAnnotation& a : g.annotations) {
            const std::string tag = "#" + std::to_string(a.number);
            const Node* open = g.find_node(a.open_node);
            const Node* close = g.find_node(a.close_node);
            if (!open) {
                add("W7-ANNOT-PAIRED", locus_of(tag),
                    "annotation " + tag + ": open node '" + a.open_node + "' does not exist");
            } else if (open->kind != NodeKind::Decision && open->kind != NodeKind::LoopNode) {
                add("W7-ANNOT-PAIRED", locus_of(a.open_node),
                    "annotation " + tag + ": open node '" + a.open_node +
                        "' is not a decision or loop node");
            }
            if (!close) {
                add("W7-ANNOT-PAIRED", locus_of(tag),
                    "annotation " + tag + ": close node '" + a.close_node + "' does not exist");
            } else if (close->kind != NodeKind::Merge &&
                       !(close->kind == NodeKind::LoopNode && a.close_node == a.open_node)) {
                add("W7-ANNOT-PAIRED", locus_of(a.close_node),
                    "annotation " + tag + ": close node '" + a.close_node +
                        "' is not a merge (or the loop node itself)");
            }
            if (!seen_numbers.insert(a.number).second) {
                add("W7-ANNOT-PAIRED", locus_of(tag),
                    "annotation number " + tag +
                        " is used more than once; pair numbers must be unique");
            }
        }
    }

    // W8: every node lies on some start-to-final path. Skipped entirely
    // without a start node, and the final-reaching half is skipped without
    // any final node, to avoid flooding a report whose real finding is
    // W1/W2. A flow-final counts as a final here: tokens may legitimately
    // end there inside fork regions, and W9 polices where those may sit.
    {
        std::vector<std::string> initials = ids_of_kind(g, NodeKind::Initial);
        if (!initials.empty()) {
            auto succ = successors(g);
            std::map<std::string, std::vector<std::string>> pred;
            for (const Node& n : g.nodes) pred[n.id];
            for (const Edge& e : g.edges) pred[e.target].push_back(e.source);

            std::vector<std::string> finals = ids_of_kind(g, NodeKind::ActivityFinal);
            for (const std::string& id : ids_of_kind(g, NodeKind::FlowFinal)) {
                finals.push_back(id);
            }
            std::set<std::string> fwd = reach(succ, initials);
            std::set<std::string> back =
                finals.empty() ? std::set<std::string>{} : reach(pred, finals);
            for (const Node& n : g.nodes) {
                if (!fwd.count(n.id)) {
                    add("W8-REACHABLE", locus_of(n.id),
                        "node '" + n.id + "' is not reachable from the start symbol");
                } else if (!finals.empty() && !back.count(n.id)) {
                    add("W8-REACHABLE", locus_of(n.id),
                        "no path from node '" + n.id + "' reaches a final symbol");
                }
            }
        }
    }

    // W9: flow-finals only strictly inside matched fork regions.
    {
        std::vector<std::string> flowfinals = ids_of_kind(g, NodeKind::FlowFinal);
        if (!flowfinals.empty()) {
            auto matching = match_fork_join(g);
            std::set<std::string> allowed;
            for (const auto& [fork, join] : matching) {
                std::set<std::string> region = fork_region(g, fork, join);
                region.erase(fork);
                allowed.insert(region.begin(), region.end());
            }
            for (const std::string& id : flowfinals) {
                if (!allowed.count(id)) {
                    add("W9-FLOWFINAL-SCOPE", locus_of(id),
                        "flow final '" + id +
                            "' sits outside any matched fork/join region; outside such a "
                            "region it would discard the only control token");
                }
            }
        }
    }

    // Loop-node bodies are full sub-diagrams; lint them recursively.
    for (const Node& n : g.nodes) {
        if (n.kind == NodeKind::LoopNode && n.has_body()) {
            lint_level(n.body.front(), locus_of(n.id), out);
        }
    }
}

}  // namespace

std::map<std::string, std::string> match_fork_join(const ActivityGraph& g) {
    std::map<std::string, std::string> result;
    std::vector<std::string> forks = ids_of_kind(g, NodeKind::Fork);
    if (forks.empty()) return result;

    auto deg = count_degrees(g);
    auto pdom = post_dominators(g);

    // Candidate join per fork: nearest join post-dominator. On the
    // post-dominator chain the nearest element has the largest set.
    std::map<std::string, std::string> candidate;
    std::map<std::string, int> join_claims;
    for (const std::string& f : forks) {
        const Node* best = nullptr;
        std::size_t best_size = 0;
        for (const std::string& id : pdom[f]) {
            if (id == f || id.empty()) continue;
            const Node* n = g.find_node(id);
            if (!n || n->kind != NodeKind::Join) continue;
            if (!best || pdom[id].size() > best_size) {
                best = n;
                best_size = pdom[id].size();
            }
        }
        if (best) {
            candidate[f] = best->id;
            join_claims[best->id]++;
        }
    }

    for (const auto& [f, j] : candidate) {
        if (join_claims[j] != 1) continue;  // ambiguous pairing
        if (deg[j].in != deg[f].out) continue;  // token count mismatch
        std::set<std::string> region = fork_region(g, f, j);
        bool inputs_ok = true;
        for (const Edge& e : g.edges) {
            if (e.target == j && !region.count(e.source)) {
                inputs_ok = false;
                break;
            }
        }
        if (inputs_ok) result[f] = j;
    }
    return result;
}

LintReport lint(const ActivityGraph& g) {
    LintReport report;
    report.diagnostics = validate_refs(g);
    if (!report.diagnostics.empty()) {
        sort_diagnostics(report.diagnostics);
        report.well_formed = false;
        return report;
    }
    lint_level(g, "", report.diagnostics);
    sort_diagnostics(report.diagnostics);
    bool has_error = std::any_of(report.diagnostics.begin(), report.diagnostics.end(),
                                 [](const Diagnostic& d) { return d.severity == Severity::Error; });
    report.well_formed =
        !has_error && std::holds_alternative<ReductionTree>(reduce(g));
    return report;
}

std::optional<std::string> explain(const std::string& rule_id) {
    if (rule_id == "W1-SINGLE-INITIAL")
        return "A diagram needs exactly one start symbol: the single control token must have "
               "one unambiguous source.";
    if (rule_id == "W2-SINGLE-FINAL")
        return "The guidelines allow for only one end symbol; extra final nodes make the "
               "control flow ambiguous and the diagram untranslatable.";
    if (rule_id == "W3-TOKEN-DISCIPLINE")
        return "Only one token flows through a single control flow: an action has exactly one "
               "incoming and one outgoing edge (multiple control flows may not enter one "
               "action node), decisions and forks split one flow, merges and joins reunite "
               "several.";
    if (rule_id == "W4-FORK-JOIN-MATCHED")
        return "Concurrent regions are the sanctioned exception to single-token flow, but "
               "every fork must pair with exactly one join that synchronizes all of its "
               "outgoing flows.";
    if (rule_id == "W5-GUARDS-TOTAL")
        return "Every edge leaving a decision needs a clear condition; a missing decision "
               "node description leaves the branch outcome undefined.";
    if (rule_id == "W6-ANNOT-PRESENT")
        return "A comment annotation naming the control structure type (if, while, dowhile, "
               "for) is essential on every decision or loop node that opens a branch or "
               "loop.";
    if (rule_id == "W7-ANNOT-PAIRED")
        return "Branches and loops are delimited by using the same number in the opening and "
               "closing diamond symbols; the numbering is mandatory and each number is used "
               "for exactly one pair.";
    if (rule_id == "W8-REACHABLE")
        return "Every node must lie on some path from the start symbol to a final symbol; "
               "unreachable or dead-end nodes cannot be translated to structured code.";
    if (rule_id == "W9-FLOWFINAL-SCOPE")
        return "A flow final may only consume a token strictly inside a matched fork/join "
               "region, where other concurrent tokens keep the diagram alive.";
    return std::nullopt;
}

}  // namespace wellform
