#include "wellform/grading.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "wellform/linter.hpp"

namespace wellform {

const char* to_keyword(RubricMode mode) {
    switch (mode) {
        case RubricMode::ElementDiff: return "element_diff";
        case RubricMode::Annotation: return "annotation";
        case RubricMode::Hotspot: return "hotspot";
        case RubricMode::Placement: return "placement";
    }
    return "?";
}

const char* to_keyword(Taxonomy level) {
    switch (level) {
        case Taxonomy::Remember: return "remember";
        case Taxonomy::Understand: return "understand";
        case Taxonomy::Apply: return "apply";
        case Taxonomy::Analyze: return "analyze";
        case Taxonomy::Evaluate: return "evaluate";
        case Taxonomy::Create: return "create";
    }
    return "?";
}

namespace {

void require_mode(const Rubric& rubric, RubricMode mode) {
    if (rubric.mode != mode) {
        throw std::invalid_argument("rubric '" + rubric.name + "' has mode " +
                                    to_keyword(rubric.mode) + ", expected " +
                                    to_keyword(mode));
    }
}

GradeReport report_shell(const Rubric& rubric) {
    GradeReport report;
    report.max = rubric.max_points();
    report.mode = rubric.mode;
    report.competency = rubric.competency;
    report.taxonomy = rubric.taxonomy;
    return report;
}

// Smallest keyed point value: the cost of one extraneous mark.
double penalty_unit(const Rubric& rubric) {
    double unit = 0.0;
    bool any = false;
    for (const RubricItem& item : rubric.items) {
        if (!any || item.points < unit) {
            unit = item.points;
            any = true;
        }
    }
    return unit;
}

void finish(GradeReport& report) {
    double total = 0.0;
    for (const GradeLine& line : report.items) total += line.earned;
    report.earned = std::clamp(total, 0.0, report.max);
}

}  // namespace

GradeReport grade_annotation(const Rubric& rubric,
                             const std::vector<std::string>& answers) {
    require_mode(rubric, RubricMode::Annotation);
    GradeReport report = report_shell(rubric);
    for (std::size_t i = 0; i < rubric.items.size(); i++) {
        const RubricItem& item = rubric.items[i];
        bool matched =
            i < answers.size() && normalize_label(answers[i]) == item.key;
        report.items.push_back(
            {item.key, matched ? item.points : 0.0, item.points, matched});
    }
    finish(report);
    return report;
}

GradeReport grade_hotspot(const Rubric& rubric,
                          const std::vector<std::string>& marks) {
    require_mode(rubric, RubricMode::Hotspot);
    GradeReport report = report_shell(rubric);

    std::vector<std::string> pool;  // normalized marks, duplicates dropped
    for (const std::string& mark : marks) {
        std::string norm = normalize_label(mark);
        if (std::find(pool.begin(), pool.end(), norm) == pool.end()) {
            pool.push_back(norm);
        }
    }

    std::vector<bool> consumed(pool.size(), false);
    for (const RubricItem& item : rubric.items) {
        bool matched = false;
        for (std::size_t m = 0; m < pool.size(); m++) {
            if (!consumed[m] && pool[m] == item.key) {
                consumed[m] = true;
                matched = true;
                break;
            }
        }
        report.items.push_back(
            {item.key, matched ? item.points : 0.0, item.points, matched});
    }
    double unit = penalty_unit(rubric);
    for (std::size_t m = 0; m < pool.size(); m++) {
        if (!consumed[m]) {
            report.items.push_back({"extraneous:" + pool[m], -unit, 0.0, false});
        }
    }
    finish(report);
    return report;
}

GradeReport grade_placement(
    const Rubric& rubric,
    const std::vector<std::pair<std::string, std::string>>& placements) {
    require_mode(rubric, RubricMode::Placement);
    GradeReport report = report_shell(rubric);

    struct Placed {
        std::string spot;
        std::string kind;
    };
    std::vector<Placed> placed;
    for (const auto& [spot, kind] : placements) {
        placed.push_back({normalize_label(spot), normalize_label(kind)});
    }
    std::map<std::string, int> per_spot;
    for (const Placed& p : placed) per_spot[p.spot]++;

    std::vector<std::string> keyed_spots;
    for (const RubricItem& item : rubric.items) {
        std::size_t colon = item.key.find(':');
        std::string spot = item.key.substr(0, colon);
        std::string kind =
            colon == std::string::npos ? "" : item.key.substr(colon + 1);
        keyed_spots.push_back(spot);
        // A spot scores only when marked exactly once, with the right kind.
        bool matched = false;
        if (per_spot[spot] == 1) {
            for (const Placed& p : placed) {
                if (p.spot == spot && p.kind == kind) {
                    matched = true;
                    break;
                }
            }
        }
        report.items.push_back(
            {item.key, matched ? item.points : 0.0, item.points, matched});
    }

    double unit = penalty_unit(rubric);
    for (const Placed& p : placed) {
        if (std::find(keyed_spots.begin(), keyed_spots.end(), p.spot) ==
            keyed_spots.end()) {
            report.items.push_back(
                {"extraneous:" + p.spot + ":" + p.kind, -unit, 0.0, false});
        }
    }
    finish(report);
    return report;
}

std::string element_descriptor(const Node& node) {
    std::string desc = to_keyword(node.kind);
    if (!node.label.empty()) desc += ":" + normalize_label(node.label);
    return desc;
}

std::string element_descriptor(const ActivityGraph& graph, const Edge& edge) {
    const Node* src = graph.find_node(edge.source);
    const Node* tgt = graph.find_node(edge.target);
    std::string from = src ? element_descriptor(*src) : edge.source;
    std::string to = tgt ? element_descriptor(*tgt) : edge.target;
    return "flow:" + from + "->" + to;
}

namespace {

// A diagram element in deterministic enumeration order, carrying the key
// used for matching (descriptor, plus the normalized guard for edges).
struct Element {
    std::string descriptor;
    std::string match_key;
};

// Breadth-first order from the first Initial node; unreachable nodes keep
// declaration order at the end. Edges follow their source's position.
std::vector<Element> enumerate_elements(const ActivityGraph& g) {
    std::vector<std::string> node_order;
    std::vector<std::string> queue;
    auto seen = [&](const std::string& id) {
        return std::find(node_order.begin(), node_order.end(), id) !=
               node_order.end();
    };
    for (const Node& n : g.nodes) {
        if (n.kind == NodeKind::Initial) {
            node_order.push_back(n.id);
            queue.push_back(n.id);
            break;
        }
    }
    std::size_t head = 0;
    while (head < queue.size()) {
        std::string id = queue[head++];
        for (const Edge& e : g.edges) {
            if (e.source == id && !seen(e.target) && g.find_node(e.target)) {
                node_order.push_back(e.target);
                queue.push_back(e.target);
            }
        }
    }
    for (const Node& n : g.nodes) {
        if (!seen(n.id)) node_order.push_back(n.id);
    }

    auto rank = [&](const std::string& id) {
        return std::find(node_order.begin(), node_order.end(), id) -
               node_order.begin();
    };

    std::vector<Element> out;
    for (const std::string& id : node_order) {
        const Node* n = g.find_node(id);
        std::string desc = element_descriptor(*n);
        out.push_back({desc, desc});
    }
    std::vector<std::size_t> edge_idx(g.edges.size());
    for (std::size_t i = 0; i < g.edges.size(); i++) edge_idx[i] = i;
    std::stable_sort(edge_idx.begin(), edge_idx.end(),
                     [&](std::size_t a, std::size_t b) {
                         return rank(g.edges[a].source) < rank(g.edges[b].source);
                     });
    for (std::size_t i : edge_idx) {
        const Edge& e = g.edges[i];
        std::string desc = element_descriptor(g, e);
        out.push_back({desc, desc + "\x01" + normalize_label(e.guard)});
    }
    return out;
}

}  // namespace

GradeReport grade_element_diff(const ActivityGraph& reference,
                               const ActivityGraph& student,
                               const Rubric& rubric,
                               double lint_penalty) {
    require_mode(rubric, RubricMode::ElementDiff);
    if (!validate_refs(reference).empty()) {
        throw std::invalid_argument("reference graph '" + reference.name +
                                    "' has unresolved references");
    }
    if (!validate_refs(student).empty()) {
        throw std::invalid_argument("student graph '" + student.name +
                                    "' has unresolved references");
    }
    GradeReport report = report_shell(rubric);

    std::vector<Element> ref_elems = enumerate_elements(reference);
    std::vector<Element> stu_elems = enumerate_elements(student);

    std::vector<bool> ref_matched(ref_elems.size(), false);
    std::vector<bool> stu_matched(stu_elems.size(), false);
    std::map<std::string, int> matched_by_descriptor;
    for (std::size_t r = 0; r < ref_elems.size(); r++) {
        for (std::size_t s = 0; s < stu_elems.size(); s++) {
            if (!stu_matched[s] && stu_elems[s].match_key == ref_elems[r].match_key) {
                ref_matched[r] = true;
                stu_matched[s] = true;
                matched_by_descriptor[ref_elems[r].descriptor]++;
                break;
            }
        }
    }

    for (const RubricItem& item : rubric.items) {
        bool matched = false;
        auto it = matched_by_descriptor.find(item.key);
        if (it != matched_by_descriptor.end() && it->second > 0) {
            it->second--;
            matched = true;
        }
        report.items.push_back(
            {item.key, matched ? item.points : 0.0, item.points, matched});
    }
    for (std::size_t r = 0; r < ref_elems.size(); r++) {
        if (!ref_matched[r]) {
            report.items.push_back({"missing:" + ref_elems[r].descriptor, 0.0, 0.0, false});
        }
    }
    for (std::size_t s = 0; s < stu_elems.size(); s++) {
        if (!stu_matched[s]) {
            report.items.push_back({"extra:" + stu_elems[s].descriptor, 0.0, 0.0, false});
        }
    }
    for (const Diagnostic& d : lint(student).diagnostics) {
        if (d.severity == Severity::Error) {
            report.items.push_back({"lint:" + d.rule, -lint_penalty, 0.0, false});
        }
    }
    finish(report);
    return report;
}

}  // namespace wellform
