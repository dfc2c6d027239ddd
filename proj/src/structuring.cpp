#include "wellform/structuring.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

#include "wellform/linter.hpp"

namespace wellform {

namespace {

StructNode make_skip() {
    StructNode n;
    n.kind = StructKind::Skip;
    return n;
}

// Appends frag's statements to a Seq child list, flattening nested Seqs so
// reduction order cannot influence the tree shape.
void flatten_into(std::vector<StructNode>& children, const StructNode& frag) {
    if (frag.kind == StructKind::Seq) {
        for (const StructNode& c : frag.children) children.push_back(c);
    } else {
        children.push_back(frag);
    }
}

struct WEdge {
    std::string id;
    std::string source;
    std::string target;
    std::string guard;
};

struct WNode {
    std::string id;  // representative: smallest absorbed original id
    NodeKind kind = NodeKind::Action;
    bool stmt = false;
    StructNode frag;  // meaningful iff stmt
    const Node* original = nullptr;  // raw nodes only
};

struct Instance {
    enum Pattern { Seq, Loop, Branch, WhileLoop, DoWhileLoop, Par };
    Pattern pattern = Seq;
    std::string desc;
    std::string a;  // SEQ: first stmt; Loop: loop node; Par: fork
    std::string b;  // SEQ: second stmt; Par: join
    std::size_t ann_index = 0;  // Branch/WhileLoop/DoWhileLoop
};

// One arm of a branch/loop/par shape: the edge leaving the opening node
// and, unless the arm jumps straight to the closing node, the single
// statement node it passes through.
struct Arm {
    std::size_t edge = 0;  // index into Engine::edges
    std::optional<std::string> via;
};

struct Engine {
    const ActivityGraph& g;
    std::map<std::string, WNode> nodes;
    std::vector<WEdge> edges;
    std::map<std::string, ReduceResult> body_memo;

    explicit Engine(const ActivityGraph& graph) : g(graph) {
        for (const Node& n : graph.nodes) {
            WNode w;
            w.id = n.id;
            w.kind = n.kind;
            w.original = &n;
            if (n.kind == NodeKind::Action) {
                w.stmt = true;
                w.frag.kind = StructKind::Act;
                w.frag.action_id = n.id;
                w.frag.label = n.label;
                w.frag.effect = n.effect;
                w.frag.origin_id = n.id;
            }
            nodes.emplace(n.id, std::move(w));
        }
        for (const Edge& e : graph.edges) {
            edges.push_back({e.id, e.source, e.target, e.guard});
        }
    }

    const WNode* find(const std::string& id) const {
        auto it = nodes.find(id);
        return it == nodes.end() ? nullptr : &it->second;
    }

    std::vector<std::size_t> out_of(const std::string& id) const {
        std::vector<std::size_t> r;
        for (std::size_t i = 0; i < edges.size(); i++) {
            if (edges[i].source == id) r.push_back(i);
        }
        return r;
    }

    std::vector<std::size_t> in_of(const std::string& id) const {
        std::vector<std::size_t> r;
        for (std::size_t i = 0; i < edges.size(); i++) {
            if (edges[i].target == id) r.push_back(i);
        }
        return r;
    }

    bool is_raw(const std::string& id, NodeKind kind) const {
        const WNode* n = find(id);
        return n && !n->stmt && n->kind == kind;
    }

    bool is_stmt(const std::string& id) const {
        const WNode* n = find(id);
        return n && n->stmt;
    }

    const ReduceResult& body_result(const std::string& loop_id) {
        auto it = body_memo.find(loop_id);
        if (it == body_memo.end()) {
            const Node* orig = nodes.at(loop_id).original;
            ReduceResult r = orig && orig->has_body()
                                 ? reduce(orig->body.front())
                                 : ReduceResult(Residue{{}, {}, "loop node has no body"});
            it = body_memo.emplace(loop_id, std::move(r)).first;
        }
        return it->second;
    }

    // The unique annotation opened and closed by the loop node, if any.
    const ControlAnnotation* loop_annotation(const std::string& id) const {
        const ControlAnnotation* found = nullptr;
        for (const ControlAnnotation& a : g.annotations) {
            if (a.open_node == id && a.close_node == id) {
                if (found) return nullptr;
                found = &a;
            }
        }
        if (found && found->construct == ControlConstruct::If) return nullptr;
        return found;
    }

    // Arm = "direct edge to close" or "edge to a 1-in/1-out statement whose
    // only exit reaches close".
    std::optional<Arm> classify_arm(std::size_t edge_index, const std::string& close) const {
        const WEdge& e = edges[edge_index];
        if (e.target == close) return Arm{edge_index, std::nullopt};
        const WNode* x = find(e.target);
        if (!x || !x->stmt) return std::nullopt;
        auto outs = out_of(x->id);
        if (in_of(x->id).size() != 1 || outs.size() != 1) return std::nullopt;
        if (edges[outs[0]].target != close) return std::nullopt;
        return Arm{edge_index, x->id};
    }

    bool match_branch(const ControlAnnotation& ann, std::vector<Arm>* arms_out) const {
        const std::string& d = ann.open_node;
        const std::string& m = ann.close_node;
        if (d == m || !is_raw(d, NodeKind::Decision) || !is_raw(m, NodeKind::Merge)) return false;
        auto d_out = out_of(d);
        if (in_of(d).size() != 1 || d_out.size() != 2) return false;
        if (in_of(m).size() != 2 || out_of(m).size() != 1) return false;
        std::vector<Arm> arms;
        for (std::size_t ei : d_out) {
            if (edges[ei].guard.empty()) return false;
            auto arm = classify_arm(ei, m);
            if (!arm) return false;
            arms.push_back(*arm);
        }
        if (arms_out) *arms_out = std::move(arms);
        return true;
    }

    bool match_while(const ControlAnnotation& ann, Arm* body_out, std::size_t* exit_out,
                     std::size_t* entry_out) const {
        const std::string& d = ann.open_node;
        const std::string& m = ann.close_node;
        if (d == m || !is_raw(d, NodeKind::Decision) || !is_raw(m, NodeKind::Merge)) return false;
        auto m_out = out_of(m);
        auto m_in = in_of(m);
        if (m_in.size() != 2 || m_out.size() != 1) return false;
        if (edges[m_out[0]].target != d) return false;
        auto d_out = out_of(d);
        if (in_of(d).size() != 1 || d_out.size() != 2) return false;
        std::optional<Arm> body;
        std::optional<std::size_t> exit;
        for (std::size_t ei : d_out) {
            if (edges[ei].guard.empty()) return false;
            auto arm = classify_arm(ei, m);
            if (arm) {
                if (body) return false;  // both exits loop back: no way out
                body = arm;
            } else {
                if (exit) return false;
                exit = ei;
            }
        }
        if (!body || !exit) return false;
        // The back edge into the merge is the body arm's terminal edge; the
        // merge's other input is the loop entry.
        std::size_t back = body->via ? out_of(*body->via)[0] : body->edge;
        std::optional<std::size_t> entry;
        for (std::size_t ei : m_in) {
            if (ei != back) entry = ei;
        }
        if (!entry) return false;
        if (body_out) *body_out = *body;
        if (exit_out) *exit_out = *exit;
        if (entry_out) *entry_out = *entry;
        return true;
    }

    bool match_dowhile(const ControlAnnotation& ann, Arm* body_out, std::size_t* exit_out,
                       std::size_t* entry_out) const {
        const std::string& d = ann.open_node;
        const std::string& m = ann.close_node;
        if (d == m || !is_raw(d, NodeKind::Decision) || !is_raw(m, NodeKind::Merge)) return false;
        auto m_out = out_of(m);
        auto m_in = in_of(m);
        if (m_in.size() != 2 || m_out.size() != 1) return false;
        auto body = classify_arm(m_out[0], d);
        if (!body) return false;
        auto d_out = out_of(d);
        if (in_of(d).size() != 1 || d_out.size() != 2) return false;
        std::optional<std::size_t> back;
        std::optional<std::size_t> exit;
        for (std::size_t ei : d_out) {
            if (edges[ei].guard.empty()) return false;
            if (edges[ei].target == m) {
                if (back) return false;
                back = ei;
            } else {
                if (exit) return false;
                exit = ei;
            }
        }
        if (!back || !exit) return false;
        std::optional<std::size_t> entry;
        for (std::size_t ei : m_in) {
            if (ei != *back) entry = ei;
        }
        if (!entry) return false;
        if (body_out) *body_out = *body;
        if (exit_out) *exit_out = *exit;
        if (entry_out) *entry_out = *entry;
        return true;
    }

    bool match_par(const std::string& f, std::string* join_out,
                   std::vector<Arm>* arms_out) const {
        if (!is_raw(f, NodeKind::Fork)) return false;
        auto f_out = out_of(f);
        if (in_of(f).size() != 1 || f_out.size() < 2) return false;
        // Find the join every arm funnels into.
        std::string join;
        for (std::size_t ei : f_out) {
            const WEdge& e = edges[ei];
            std::string candidate;
            if (is_raw(e.target, NodeKind::Join)) {
                candidate = e.target;
            } else {
                const WNode* x = find(e.target);
                if (!x || !x->stmt) return false;
                auto outs = out_of(x->id);
                if (in_of(x->id).size() != 1 || outs.size() != 1) return false;
                if (!is_raw(edges[outs[0]].target, NodeKind::Join)) return false;
                candidate = edges[outs[0]].target;
            }
            if (join.empty()) join = candidate;
            if (join != candidate) return false;
        }
        if (in_of(join).size() != f_out.size() || out_of(join).size() != 1) return false;
        std::vector<Arm> arms;
        for (std::size_t ei : f_out) {
            auto arm = classify_arm(ei, join);
            if (!arm) return false;
            arms.push_back(*arm);
        }
        if (join_out) *join_out = join;
        if (arms_out) *arms_out = std::move(arms);
        return true;
    }

    std::vector<Instance> instances() {
        std::vector<Instance> list;

        std::vector<Instance> seqs;
        for (std::size_t i = 0; i < edges.size(); i++) {
            const WEdge& e = edges[i];
            if (e.source == e.target) continue;
            if (!is_stmt(e.source) || !is_stmt(e.target)) continue;
            if (out_of(e.source).size() != 1 || in_of(e.target).size() != 1) continue;
            seqs.push_back({Instance::Seq, "SEQ@" + e.source, e.source, e.target, 0});
        }
        std::sort(seqs.begin(), seqs.end(),
                  [](const Instance& x, const Instance& y) { return x.a < y.a; });
        list.insert(list.end(), seqs.begin(), seqs.end());

        for (const auto& [id, n] : nodes) {
            if (n.stmt || n.kind != NodeKind::LoopNode) continue;
            if (in_of(id).size() != 1 || out_of(id).size() != 1) continue;
            if (!loop_annotation(id)) continue;
            if (!std::holds_alternative<ReductionTree>(body_result(id))) continue;
            list.push_back({Instance::Loop, "LOOPNODE@" + id, id, "", 0});
        }

        std::vector<Instance> anns;
        for (std::size_t ai = 0; ai < g.annotations.size(); ai++) {
            const ControlAnnotation& a = g.annotations[ai];
            switch (a.construct) {
                case ControlConstruct::If:
                    if (match_branch(a, nullptr)) {
                        anns.push_back({Instance::Branch, "IF@" + a.open_node, a.open_node,
                                        a.close_node, ai});
                    }
                    break;
                case ControlConstruct::While:
                case ControlConstruct::For:
                    if (match_while(a, nullptr, nullptr, nullptr)) {
                        anns.push_back({Instance::WhileLoop, "WHILE@" + a.open_node, a.open_node,
                                        a.close_node, ai});
                    }
                    break;
                case ControlConstruct::DoWhile:
                    if (match_dowhile(a, nullptr, nullptr, nullptr)) {
                        anns.push_back({Instance::DoWhileLoop, "DOWHILE@" + a.open_node,
                                        a.open_node, a.close_node, ai});
                    }
                    break;
            }
        }
        std::stable_sort(anns.begin(), anns.end(),
                         [](const Instance& x, const Instance& y) { return x.a < y.a; });
        list.insert(list.end(), anns.begin(), anns.end());

        for (const auto& [id, n] : nodes) {
            if (n.stmt || n.kind != NodeKind::Fork) continue;
            std::string join;
            if (match_par(id, &join, nullptr)) {
                list.push_back({Instance::Par, "PAR@" + id, id, join, 0});
            }
        }
        return list;
    }

    void erase_edges(const std::set<std::size_t>& dead) {
        std::vector<WEdge> next;
        next.reserve(edges.size() - dead.size());
        for (std::size_t i = 0; i < edges.size(); i++) {
            if (!dead.count(i)) next.push_back(edges[i]);
        }
        edges = std::move(next);
    }

    StructNode arm_frag(const Arm& arm) const {
        return arm.via ? nodes.at(*arm.via).frag : make_skip();
    }

    // Replaces the consumed nodes with one statement node carrying frag.
    // entry/exit edges are rewired by index before any edge is erased.
    void collapse(const std::vector<std::string>& consumed, StructNode frag,
                  std::optional<std::size_t> entry, std::optional<std::size_t> exit,
                  bool drop_exit_guard, const std::set<std::size_t>& dead_edges) {
        std::string rep = *std::min_element(consumed.begin(), consumed.end());
        if (entry) edges[*entry].target = rep;
        if (exit) {
            edges[*exit].source = rep;
            if (drop_exit_guard) edges[*exit].guard.clear();
        }
        for (const std::string& id : consumed) nodes.erase(id);
        WNode w;
        w.id = rep;
        w.stmt = true;
        w.frag = std::move(frag);
        nodes.emplace(rep, std::move(w));
        erase_edges(dead_edges);
    }

    void apply(const Instance& inst) {
        switch (inst.pattern) {
            case Instance::Seq: {
                const WNode& u = nodes.at(inst.a);
                const WNode& v = nodes.at(inst.b);
                StructNode seq;
                seq.kind = StructKind::Seq;
                flatten_into(seq.children, u.frag);
                flatten_into(seq.children, v.frag);
                std::size_t link = out_of(inst.a)[0];
                std::string rep = std::min(inst.a, inst.b);
                for (WEdge& e : edges) {
                    if (e.target == inst.a) e.target = rep;
                    if (e.source == inst.b) e.source = rep;
                }
                nodes.erase(inst.a);
                nodes.erase(inst.b);
                WNode w;
                w.id = rep;
                w.stmt = true;
                w.frag = std::move(seq);
                nodes.emplace(rep, std::move(w));
                erase_edges({link});
                break;
            }
            case Instance::Loop: {
                const ControlAnnotation* ann = loop_annotation(inst.a);
                const auto& body = std::get<ReductionTree>(body_result(inst.a));
                StructNode loop;
                loop.kind = ann->construct == ControlConstruct::DoWhile ? StructKind::DoWhile
                                                                        : StructKind::While;
                loop.number = ann->number;
                loop.condition = ann->condition;
                loop.origin_id = inst.a;
                loop.children.push_back(body.root);
                std::size_t entry = in_of(inst.a)[0];
                std::size_t exit = out_of(inst.a)[0];
                collapse({inst.a}, std::move(loop), entry, exit, false, {});
                break;
            }
            case Instance::Branch: {
                const ControlAnnotation& ann = g.annotations[inst.ann_index];
                std::vector<Arm> arms;
                match_branch(ann, &arms);
                std::size_t then_index = 0;
                for (std::size_t i = 0; i < arms.size(); i++) {
                    if (normalize_label(edges[arms[i].edge].guard) ==
                        normalize_label(ann.condition)) {
                        then_index = i;
                        break;
                    }
                }
                StructNode then_frag = arm_frag(arms[then_index]);
                StructNode else_frag = arm_frag(arms[1 - then_index]);
                StructNode branch;
                branch.kind = StructKind::If;
                branch.number = ann.number;
                branch.condition = ann.condition;
                branch.origin_id = ann.open_node;
                branch.children.push_back(std::move(then_frag));
                if (else_frag.kind != StructKind::Skip) {
                    branch.children.push_back(std::move(else_frag));
                }
                std::size_t entry = in_of(ann.open_node)[0];
                std::size_t exit = out_of(ann.close_node)[0];
                std::vector<std::string> consumed{ann.open_node, ann.close_node};
                std::set<std::size_t> dead;
                for (const Arm& arm : arms) {
                    dead.insert(arm.edge);
                    if (arm.via) {
                        dead.insert(out_of(*arm.via)[0]);
                        consumed.push_back(*arm.via);
                    }
                }
                collapse(consumed, std::move(branch), entry, exit, false, dead);
                break;
            }
            case Instance::WhileLoop:
            case Instance::DoWhileLoop: {
                const ControlAnnotation& ann = g.annotations[inst.ann_index];
                Arm body;
                std::size_t exit = 0;
                std::size_t entry = 0;
                bool matched = inst.pattern == Instance::WhileLoop
                                   ? match_while(ann, &body, &exit, &entry)
                                   : match_dowhile(ann, &body, &exit, &entry);
                (void)matched;
                StructNode loop;
                loop.kind = inst.pattern == Instance::WhileLoop ? StructKind::While
                                                                : StructKind::DoWhile;
                if (ann.construct == ControlConstruct::DoWhile) loop.kind = StructKind::DoWhile;
                loop.number = ann.number;
                loop.condition = ann.condition;
                loop.origin_id = ann.open_node;
                loop.children.push_back(arm_frag(body));
                std::vector<std::string> consumed{ann.open_node, ann.close_node};
                std::set<std::size_t> dead;
                // merge<->decision link
                if (inst.pattern == Instance::WhileLoop) {
                    dead.insert(out_of(ann.close_node)[0]);
                } else {
                    dead.insert(out_of(ann.close_node)[0]);
                }
                dead.insert(body.edge);
                if (body.via) {
                    dead.insert(out_of(*body.via)[0]);
                    consumed.push_back(*body.via);
                }
                if (inst.pattern == Instance::DoWhileLoop) {
                    // The body arm hangs off the merge; the decision's back
                    // edge to the merge is separate and also internal.
                    for (std::size_t ei : out_of(ann.open_node)) {
                        if (edges[ei].target == ann.close_node) dead.insert(ei);
                    }
                }
                collapse(consumed, std::move(loop), entry, exit, true, dead);
                break;
            }
            case Instance::Par: {
                std::string join;
                std::vector<Arm> arms;
                match_par(inst.a, &join, &arms);
                StructNode par;
                par.kind = StructKind::Par;
                par.origin_id = inst.a;
                for (const Arm& arm : arms) par.children.push_back(arm_frag(arm));
                std::size_t entry = in_of(inst.a)[0];
                std::size_t exit = out_of(join)[0];
                std::vector<std::string> consumed{inst.a, join};
                std::set<std::size_t> dead;
                for (const Arm& arm : arms) {
                    dead.insert(arm.edge);
                    if (arm.via) {
                        dead.insert(out_of(*arm.via)[0]);
                        consumed.push_back(*arm.via);
                    }
                }
                collapse(consumed, std::move(par), entry, exit, false, dead);
                break;
            }
        }
    }

    bool finished(StructNode* root) const {
        const WNode* initial = nullptr;
        const WNode* final_node = nullptr;
        const WNode* stmt = nullptr;
        for (const auto& [id, n] : nodes) {
            if (n.stmt) {
                if (stmt) return false;
                stmt = &n;
            } else if (n.kind == NodeKind::Initial) {
                if (initial) return false;
                initial = &n;
            } else if (n.kind == NodeKind::ActivityFinal) {
                if (final_node) return false;
                final_node = &n;
            } else {
                return false;
            }
        }
        if (!initial || !final_node) return false;
        if (stmt) {
            if (edges.size() != 2) return false;
            bool entry_ok = false;
            bool exit_ok = false;
            for (const WEdge& e : edges) {
                if (e.source == initial->id && e.target == stmt->id) entry_ok = true;
                if (e.source == stmt->id && e.target == final_node->id) exit_ok = true;
            }
            if (!entry_ok || !exit_ok) return false;
            if (root) {
                if (stmt->frag.kind == StructKind::Seq) {
                    *root = stmt->frag;
                } else {
                    root->kind = StructKind::Seq;
                    root->children = {stmt->frag};
                }
            }
            return true;
        }
        if (edges.size() != 1 || edges[0].source != initial->id ||
            edges[0].target != final_node->id) {
            return false;
        }
        if (root) {
            root->kind = StructKind::Seq;
            root->children = {make_skip()};
        }
        return true;
    }

    Residue residue() {
        Residue r;
        std::vector<std::string> initials;
        std::vector<std::string> finals;
        for (const auto& [id, n] : nodes) {
            if (!n.stmt && n.kind == NodeKind::Initial) initials.push_back(id);
            if (!n.stmt && n.kind == NodeKind::ActivityFinal) finals.push_back(id);
        }
        std::set<std::string> keep;
        if (initials.size() == 1) keep.insert(initials[0]);
        if (finals.size() == 1) keep.insert(finals[0]);
        for (const auto& [id, n] : nodes) {
            if (!keep.count(id)) r.remaining_nodes.push_back(id);
        }
        std::set<std::string> remaining(r.remaining_nodes.begin(), r.remaining_nodes.end());
        for (const WEdge& e : edges) {
            if (remaining.count(e.source) && remaining.count(e.target)) {
                r.remaining_edges.push_back(e.id);
            }
        }
        std::sort(r.remaining_edges.begin(), r.remaining_edges.end());

        if (initials.empty()) {
            r.stuck_reason = "the diagram has no start node";
        } else if (initials.size() > 1) {
            r.stuck_reason = "more than one start symbol remains";
        } else if (finals.empty()) {
            r.stuck_reason = "the diagram has no end node";
        } else if (finals.size() > 1) {
            r.stuck_reason = "more than one end symbol remains";
        }
        if (r.stuck_reason.empty()) {
            for (const auto& [id, n] : nodes) {
                if (n.stmt || n.kind != NodeKind::LoopNode) continue;
                if (body_memo.count(id) &&
                    std::holds_alternative<Residue>(body_memo.at(id))) {
                    r.stuck_reason = "loop node '" + id + "' has a body that is not reducible";
                    break;
                }
            }
        }
        if (r.stuck_reason.empty()) {
            for (const ControlAnnotation& a : g.annotations) {
                const WNode* open = find(a.open_node);
                if (open && !open->stmt) {
                    r.stuck_reason = "annotation #" + std::to_string(a.number) + " (" +
                                     to_keyword(a.construct) + ") does not reduce: the shape "
                                     "between '" +
                                     a.open_node + "' and '" + a.close_node + "' matches no " +
                                     "branch or loop pattern";
                    break;
                }
            }
        }
        if (r.stuck_reason.empty()) {
            r.stuck_reason = "no reduction pattern applies to the remaining " +
                             std::to_string(r.remaining_nodes.size()) + " node(s)";
        }
        return r;
    }
};

}  // namespace

ReduceResult reduce_with_chooser(const ActivityGraph& graph, const ReductionChooser& choose) {
    if (!validate_refs(graph).empty()) {
        Residue r;
        std::vector<std::string> initials;
        std::vector<std::string> finals;
        for (const Node& n : graph.nodes) {
            if (n.kind == NodeKind::Initial) initials.push_back(n.id);
            if (n.kind == NodeKind::ActivityFinal) finals.push_back(n.id);
        }
        std::set<std::string> keep;
        if (initials.size() == 1) keep.insert(initials[0]);
        if (finals.size() == 1) keep.insert(finals[0]);
        for (const Node& n : graph.nodes) {
            if (!keep.count(n.id)) r.remaining_nodes.push_back(n.id);
        }
        std::sort(r.remaining_nodes.begin(), r.remaining_nodes.end());
        std::set<std::string> remaining(r.remaining_nodes.begin(), r.remaining_nodes.end());
        for (const Edge& e : graph.edges) {
            if (remaining.count(e.source) && remaining.count(e.target)) {
                r.remaining_edges.push_back(e.id);
            }
        }
        std::sort(r.remaining_edges.begin(), r.remaining_edges.end());
        r.stuck_reason = "the diagram has unresolved references";
        return r;
    }

    Engine engine(graph);
    for (;;) {
        std::vector<Instance> insts = engine.instances();
        if (insts.empty()) {
            StructNode root;
            if (engine.finished(&root)) return ReductionTree{std::move(root)};
            return engine.residue();
        }
        std::vector<std::string> descs;
        descs.reserve(insts.size());
        for (const Instance& i : insts) descs.push_back(i.desc);
        std::size_t pick = choose(descs);
        if (pick >= insts.size()) pick = 0;
        engine.apply(insts[pick]);
    }
}

ReduceResult reduce(const ActivityGraph& graph) {
    return reduce_with_chooser(graph,
                               [](const std::vector<std::string>&) { return std::size_t{0}; });
}

namespace {

void emit_stmt(const StructNode& n, int depth, std::string& out);

void emit_block(const StructNode& n, int depth, std::string& out) {
    if (n.kind == StructKind::Seq) {
        for (const StructNode& c : n.children) emit_stmt(c, depth, out);
    } else {
        emit_stmt(n, depth, out);
    }
}

void emit_stmt(const StructNode& n, int depth, std::string& out) {
    const std::string ind(static_cast<std::size_t>(depth) * 2, ' ');
    switch (n.kind) {
        case StructKind::Seq:
            for (const StructNode& c : n.children) emit_stmt(c, depth, out);
            break;
        case StructKind::Act:
            out += ind + "do " + n.label + ";";
            if (!n.effect.empty()) out += " // " + n.effect;
            out += "\n";
            break;
        case StructKind::Skip:
            out += ind + "skip;\n";
            break;
        case StructKind::If:
            out += ind + "if (" + n.condition + ") {\n";
            emit_block(n.children.at(0), depth + 1, out);
            out += ind + "}";
            if (n.children.size() > 1) {
                out += " else {\n";
                emit_block(n.children.at(1), depth + 1, out);
                out += ind + "}";
            }
            out += " // #" + std::to_string(n.number) + "\n";
            break;
        case StructKind::While:
            out += ind + "while (" + n.condition + ") {\n";
            emit_block(n.children.at(0), depth + 1, out);
            out += ind + "} // #" + std::to_string(n.number) + "\n";
            break;
        case StructKind::DoWhile:
            out += ind + "dowhile {\n";
            emit_block(n.children.at(0), depth + 1, out);
            out += ind + "} (" + n.condition + ") // #" + std::to_string(n.number) + "\n";
            break;
        case StructKind::Par:
            out += ind + "par {\n";
            for (std::size_t i = 0; i < n.children.size(); i++) {
                if (i > 0) out += ind + "||\n";
                emit_block(n.children[i], depth + 1, out);
            }
            out += ind + "}\n";
            break;
    }
}

}  // namespace

std::string emit_pseudocode(const ReductionTree& tree) {
    std::string out;
    for (const StructNode& c : tree.root.children) emit_stmt(c, 0, out);
    return out;
}

bool is_well_formed(const ActivityGraph& graph) { return lint(graph).well_formed; }

}  // namespace wellform
