#include "wellform/model.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace wellform {

const char* to_keyword(NodeKind kind) {
    switch (kind) {
        case NodeKind::Initial: return "start";
        case NodeKind::ActivityFinal: return "end";
        case NodeKind::FlowFinal: return "flowfinal";
        case NodeKind::Action: return "action";
        case NodeKind::Decision: return "decision";
        case NodeKind::Merge: return "merge";
        case NodeKind::Fork: return "fork";
        case NodeKind::Join: return "join";
        case NodeKind::LoopNode: return "loopnode";
    }
    return "?";
}

const char* to_keyword(ControlConstruct c) {
    switch (c) {
        case ControlConstruct::If: return "if";
        case ControlConstruct::While: return "while";
        case ControlConstruct::DoWhile: return "dowhile";
        case ControlConstruct::For: return "for";
    }
    return "?";
}

const char* to_keyword(MessageKind kind) {
    switch (kind) {
        case MessageKind::Sync: return "sync";
        case MessageKind::Async: return "async";
        case MessageKind::Reply: return "reply";
    }
    return "?";
}

const char* to_keyword(FragmentKind kind) {
    switch (kind) {
        case FragmentKind::Alt: return "alt";
        case FragmentKind::Opt: return "opt";
        case FragmentKind::Loop: return "loop";
        case FragmentKind::Par: return "par";
    }
    return "?";
}

const Node* ActivityGraph::find_node(const std::string& id) const {
    for (const Node& n : nodes) {
        if (n.id == id) return &n;
    }
    return nullptr;
}

const Edge* ActivityGraph::find_edge(const std::string& id) const {
    for (const Edge& e : edges) {
        if (e.id == id) return &e;
    }
    return nullptr;
}

void sort_diagnostics(std::vector<Diagnostic>& diagnostics) {
    std::stable_sort(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& a, const Diagnostic& b) {
                         if (a.rule != b.rule) return a.rule < b.rule;
                         return a.locus < b.locus;
                     });
}

std::string normalize_label(const std::string& raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char c : raw) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

namespace {

void validate_into(const ActivityGraph& graph, std::vector<Diagnostic>& out) {
    std::map<std::string, int> id_count;
    std::map<std::string, NodeKind> kind_of;
    for (const Node& n : graph.nodes) {
        id_count[n.id]++;
        kind_of.emplace(n.id, n.kind);
    }

    for (const auto& [id, count] : id_count) {
        if (count > 1) {
            out.push_back({"REF-DUP", Severity::Error, id,
                           "node id '" + id + "' declared " + std::to_string(count) + " times"});
        }
    }

    for (const Node& n : graph.nodes) {
        if (!n.effect.empty() && n.kind != NodeKind::Action) {
            out.push_back({"REF-EFFECT", Severity::Error, n.id,
                           "effect on non-action node '" + n.id + "'"});
        }
        if (n.has_body() && n.kind != NodeKind::LoopNode) {
            out.push_back({"REF-BODY", Severity::Error, n.id,
                           "body on non-loop node '" + n.id + "'"});
        }
        if (n.has_body()) {
            validate_into(n.body.front(), out);
        }
    }

    for (const Edge& e : graph.edges) {
        auto src = kind_of.find(e.source);
        auto dst = kind_of.find(e.target);
        if (src == kind_of.end()) {
            out.push_back({"REF-SOURCE", Severity::Error, e.id,
                           "edge '" + e.id + "' leaves unknown node '" + e.source + "'"});
        }
        if (dst == kind_of.end()) {
            out.push_back({"REF-TARGET", Severity::Error, e.id,
                           "edge '" + e.id + "' targets unknown node '" + e.target + "'"});
        }
        if (!e.guard.empty() && src != kind_of.end() &&
            src->second != NodeKind::Decision && src->second != NodeKind::LoopNode) {
            out.push_back({"REF-GUARD", Severity::Error, e.id,
                           "guard on edge '" + e.id + "' leaving a " +
                               std::string(to_keyword(src->second)) + " node"});
        }
    }
}

}  // namespace

std::vector<Diagnostic> validate_refs(const ActivityGraph& graph) {
    std::vector<Diagnostic> out;
    validate_into(graph, out);
    sort_diagnostics(out);
    return out;
}

}  // namespace wellform
