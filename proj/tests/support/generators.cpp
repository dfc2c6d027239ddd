#include "generators.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <stdexcept>

#include "wellform/expr.hpp"

namespace testsupport {

using namespace wellform;

namespace {

// Generated loop nodes are ordinary While/DoWhile tree nodes carrying this
// marker in origin_id; the flatteners turn them into LoopNode elements and
// normalize_tree clears the marker before comparison.
constexpr const char* kLoopNodeMarker = "@loopnode";

int draw(std::mt19937& rng, int lo, int hi) {
    std::uniform_int_distribution<int> dist(lo, hi);
    return dist(rng);
}

std::string negate(const std::string& condition) {
    return "not (" + condition + ")";
}

struct TreeGen {
    std::mt19937& rng;
    const GenConfig& cfg;
    int actions = 0;
    int scalars = 0;
    int loop_vars = 0;
    int numbers = 0;
    int stmts_left;
    std::vector<std::string> pool;  // variables usable in conditions/effects

    TreeGen(std::mt19937& r, const GenConfig& c)
        : rng(r), cfg(c), stmts_left(c.max_total_stmts) {}

    std::string some_scalar() {
        if (pool.empty() || draw(rng, 0, 2) == 0) {
            pool.push_back("x" + std::to_string(++scalars));
            return pool.back();
        }
        return pool[static_cast<std::size_t>(
            draw(rng, 0, static_cast<int>(pool.size()) - 1))];
    }

    std::string comparison() {
        static const char* ops[] = {"<", "<=", ">", ">=", "==", "!="};
        return some_scalar() + " " + ops[draw(rng, 0, 5)] + " " +
               std::to_string(draw(rng, 0, 3));
    }

    StructNode act() {
        StructNode n;
        n.kind = StructKind::Act;
        n.label = "t" + std::to_string(++actions);
        if (cfg.with_effects && draw(rng, 0, 1) == 0) {
            std::string v = some_scalar();
            n.effect = v + " = " + v + " + 1";
        }
        return n;
    }

    StructNode increment_act(const std::string& var) {
        StructNode n;
        n.kind = StructKind::Act;
        n.label = "t" + std::to_string(++actions);
        n.effect = var + " = " + var + " + 1";
        return n;
    }

    static StructNode wrap(std::vector<StructNode> items) {
        assert(!items.empty());
        if (items.size() == 1) return std::move(items.front());
        StructNode seq;
        seq.kind = StructKind::Seq;
        seq.children = std::move(items);
        return seq;
    }

    // A block of 1..max_stmts statements; bare statement when single.
    StructNode block(int depth) {
        int want = draw(rng, 1, cfg.max_stmts);
        std::vector<StructNode> items;
        items.push_back(stmt(depth));
        for (int i = 1; i < want && stmts_left > 0; ++i) {
            items.push_back(stmt(depth));
        }
        return wrap(std::move(items));
    }

    StructNode stmt(int depth) {
        --stmts_left;
        if (depth >= cfg.max_depth || stmts_left <= 0) return act();
        int roll = draw(rng, 0, 99);
        if (roll < 45) return act();
        if (roll < 65) return make_if(depth);
        if (roll < 78) return make_loop(depth, StructKind::While, false);
        if (roll < 86) {
            return cfg.allow_dowhile ? make_loop(depth, StructKind::DoWhile, false)
                                     : act();
        }
        if (roll < 93) return cfg.allow_par ? make_par(depth) : act();
        if (cfg.allow_loopnode) {
            StructKind kind = (cfg.allow_dowhile && draw(rng, 0, 1) == 0)
                                  ? StructKind::DoWhile
                                  : StructKind::While;
            return make_loop(depth, kind, true);
        }
        return make_if(depth);
    }

    StructNode make_if(int depth) {
        StructNode n;
        n.kind = StructKind::If;
        n.number = ++numbers;
        n.condition = comparison();
        n.children.push_back(block(depth + 1));
        if (draw(rng, 0, 1) == 0) n.children.push_back(block(depth + 1));
        return n;
    }

    StructNode make_loop(int depth, StructKind kind, bool as_loop_node) {
        StructNode n;
        n.kind = kind;
        n.number = ++numbers;
        if (as_loop_node) n.origin_id = kLoopNodeMarker;
        std::string v = "v" + std::to_string(++loop_vars);
        n.condition = v + " < " + std::to_string(draw(rng, 1, 3));
        std::vector<StructNode> body;
        int extra = draw(rng, 0, cfg.max_stmts - 1);
        for (int i = 0; i < extra && stmts_left > 0; ++i) {
            body.push_back(stmt(depth + 1));
        }
        --stmts_left;
        body.push_back(increment_act(v));
        n.children.push_back(wrap(std::move(body)));
        return n;
    }

    StructNode make_par(int depth) {
        StructNode n;
        n.kind = StructKind::Par;
        int arms = draw(rng, 2, 3);
        for (int i = 0; i < arms; ++i) {
            n.children.push_back(block(depth + 1));
        }
        return n;
    }
};

bool is_loop_node(const StructNode& n) {
    return (n.kind == StructKind::While || n.kind == StructKind::DoWhile) &&
           n.origin_id == kLoopNodeMarker;
}

struct GraphBuilder {
    ActivityGraph g;
    int act_seq = 0;
    int fork_seq = 0;
    std::string prev;
    std::string pending;

    void add_node(const std::string& id, NodeKind kind,
                  const std::string& label = "",
                  const std::string& effect = "") {
        Node n;
        n.id = id;
        n.kind = kind;
        n.label = label;
        n.effect = effect;
        g.nodes.push_back(std::move(n));
    }

    void add_edge(const std::string& source, const std::string& target,
                  const std::string& guard) {
        Edge e;
        e.source = source;
        e.target = target;
        e.guard = guard;
        std::string base = source + "->" + target;
        int count = 1;
        for (const Edge& other : g.edges) {
            if (other.source == source && other.target == target) count++;
        }
        e.id = count == 1 ? base : base + "~" + std::to_string(count);
        g.edges.push_back(std::move(e));
    }

    void link_to(const std::string& target) {
        add_edge(prev, target, pending);
        pending.clear();
        prev = target;
    }

    void visit(const StructNode& n) {
        switch (n.kind) {
            case StructKind::Skip:
                return;
            case StructKind::Seq:
                for (const StructNode& c : n.children) visit(c);
                return;
            case StructKind::Act: {
                std::string id = "a" + std::to_string(++act_seq);
                add_node(id, NodeKind::Action, n.label, n.effect);
                link_to(id);
                return;
            }
            case StructKind::If:
                visit_if(n);
                return;
            case StructKind::While:
            case StructKind::DoWhile:
                if (is_loop_node(n)) {
                    visit_loop_node(n);
                } else if (n.kind == StructKind::While) {
                    visit_while(n);
                } else {
                    visit_dowhile(n);
                }
                return;
            case StructKind::Par:
                visit_par(n);
                return;
        }
    }

    void annotate(ControlConstruct construct, int number,
                  const std::string& open, const std::string& close,
                  const std::string& condition) {
        ControlAnnotation a;
        a.construct = construct;
        a.number = number;
        a.open_node = open;
        a.close_node = close;
        a.condition = condition;
        g.annotations.push_back(std::move(a));
    }

    void visit_if(const StructNode& n) {
        std::string d = "d" + std::to_string(n.number);
        std::string m = "m" + std::to_string(n.number);
        add_node(d, NodeKind::Decision);
        add_node(m, NodeKind::Merge);
        link_to(d);
        prev = d;
        pending = n.condition;
        visit(n.children.front());
        link_to(m);
        prev = d;
        pending = negate(n.condition);
        if (n.children.size() == 2) {
            visit(n.children.back());
            link_to(m);
        } else {
            link_to(m);
        }
        annotate(ControlConstruct::If, n.number, d, m, n.condition);
    }

    void visit_while(const StructNode& n) {
        std::string d = "d" + std::to_string(n.number);
        std::string m = "m" + std::to_string(n.number);
        add_node(m, NodeKind::Merge);
        add_node(d, NodeKind::Decision);
        link_to(m);
        link_to(d);
        prev = d;
        pending = n.condition;
        visit(n.children.front());
        link_to(m);  // back edge into the loop head
        prev = d;
        pending = negate(n.condition);  // exit edge, emitted by the next link
        annotate(ControlConstruct::While, n.number, d, m, n.condition);
    }

    void visit_dowhile(const StructNode& n) {
        std::string d = "d" + std::to_string(n.number);
        std::string m = "m" + std::to_string(n.number);
        add_node(m, NodeKind::Merge);
        add_node(d, NodeKind::Decision);
        link_to(m);
        visit(n.children.front());
        link_to(d);
        add_edge(d, m, n.condition);  // back edge guarded by the condition
        prev = d;
        pending = negate(n.condition);
        annotate(ControlConstruct::DoWhile, n.number, d, m, n.condition);
    }

    void visit_par(const StructNode& n) {
        std::string f = "f" + std::to_string(++fork_seq);
        std::string j = "j" + std::to_string(fork_seq);
        add_node(f, NodeKind::Fork);
        add_node(j, NodeKind::Join);
        link_to(f);
        for (const StructNode& arm : n.children) {
            prev = f;
            pending.clear();
            visit(arm);
            link_to(j);
        }
        prev = j;
        pending.clear();
    }

    void visit_loop_node(const StructNode& n) {
        std::string id = "ln" + std::to_string(n.number);
        StructNode body_root;
        if (n.children.front().kind == StructKind::Seq) {
            body_root = n.children.front();
        } else {
            body_root.kind = StructKind::Seq;
            body_root.children.push_back(n.children.front());
        }
        Node node;
        node.id = id;
        node.kind = NodeKind::LoopNode;
        node.label = "loop";
        node.body.push_back(flatten_to_graph(body_root, id));
        g.nodes.push_back(std::move(node));
        link_to(id);
        annotate(n.kind == StructKind::While ? ControlConstruct::While
                                             : ControlConstruct::DoWhile,
                 n.number, id, id, n.condition);
    }
};

struct SeqBuilder {
    SequenceModel m;
    int next_order = 0;
    int next_par_number = 0;

    void emit(const StructNode& n) {
        switch (n.kind) {
            case StructKind::Skip:
                return;
            case StructKind::Seq:
                for (const StructNode& c : n.children) emit(c);
                return;
            case StructKind::Act: {
                MessageEvent ev;
                ev.id = "msg" + std::to_string(next_order + 1);
                ev.from = "u";
                ev.to = "sys";
                ev.label = n.label;
                ev.kind = MessageKind::Sync;
                ev.order = next_order++;
                m.events.push_back(std::move(ev));
                return;
            }
            case StructKind::If: {
                std::size_t slot = reserve();
                Fragment f;
                f.kind = n.children.size() == 2 ? FragmentKind::Alt
                                                : FragmentKind::Opt;
                f.number = n.number;
                f.condition = n.condition;
                int start = next_order;
                emit(n.children.front());
                int mid = next_order;
                if (n.children.size() == 2) emit(n.children.back());
                f.span = {start, next_order - 1};
                if (f.kind == FragmentKind::Alt) {
                    f.operands = {{start, mid - 1}, {mid, next_order - 1}};
                }
                f.id = "fr" + std::to_string(n.number);
                m.fragments[slot] = std::move(f);
                return;
            }
            case StructKind::While:
            case StructKind::DoWhile: {
                std::size_t slot = reserve();
                Fragment f;
                f.kind = FragmentKind::Loop;
                f.number = n.number;
                f.condition = n.condition;
                int start = next_order;
                emit(n.children.front());
                f.span = {start, next_order - 1};
                f.id = "fr" + std::to_string(n.number);
                m.fragments[slot] = std::move(f);
                return;
            }
            case StructKind::Par: {
                std::size_t slot = reserve();
                Fragment f;
                f.kind = FragmentKind::Par;
                f.number = next_par_number++;
                int start = next_order;
                for (const StructNode& arm : n.children) emit(arm);
                f.span = {start, next_order - 1};
                f.id = "fr" + std::to_string(f.number);
                m.fragments[slot] = std::move(f);
                return;
            }
        }
    }

    std::size_t reserve() {
        m.fragments.emplace_back();
        return m.fragments.size() - 1;
    }
};

int max_number(const StructNode& n) {
    int best = n.number;
    for (const StructNode& c : n.children) best = std::max(best, max_number(c));
    return best;
}

void collect_expr_vars(const ExprPtr& e, std::set<std::string>& out) {
    if (!e) return;
    if (e->op == Expr::Op::Var) out.insert(e->name);
    collect_expr_vars(e->lhs, out);
    collect_expr_vars(e->rhs, out);
}

void collect_vars(const StructNode& n, std::set<std::string>& out) {
    if (!n.condition.empty()) {
        auto parsed = parse_expression(n.condition);
        if (parsed.ok()) collect_expr_vars(*parsed.value, out);
    }
    if (!n.effect.empty()) {
        auto parsed = parse_assignments(n.effect);
        if (parsed.ok()) {
            for (const Assignment& a : *parsed.value) {
                out.insert(a.variable);
                collect_expr_vars(a.value, out);
            }
        }
    }
    for (const StructNode& c : n.children) collect_vars(c, out);
}

StructNode normalize_rec(const StructNode& n, bool is_root) {
    StructNode out = n;
    out.action_id.clear();
    out.origin_id.clear();
    for (StructNode& c : out.children) c = normalize_rec(c, false);
    if (!is_root && out.kind == StructKind::Seq && out.children.size() == 1) {
        return out.children.front();
    }
    return out;
}

void repr_rec(const StructNode& n, std::string& out) {
    switch (n.kind) {
        case StructKind::Skip: out += "Skip"; break;
        case StructKind::Act:
            out += "Act(" + n.label + ")";
            return;
        case StructKind::Seq: out += "Seq"; break;
        case StructKind::If: out += "If#" + std::to_string(n.number); break;
        case StructKind::While: out += "While#" + std::to_string(n.number); break;
        case StructKind::DoWhile:
            out += "DoWhile#" + std::to_string(n.number);
            break;
        case StructKind::Par: out += "Par"; break;
    }
    if (!n.condition.empty()) out += "<" + n.condition + ">";
    if (n.children.empty()) return;
    out += "(";
    for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) out += ", ";
        repr_rec(n.children[i], out);
    }
    out += ")";
}

}  // namespace

StructNode random_tree(std::mt19937& rng, const GenConfig& cfg) {
    TreeGen gen(rng, cfg);
    StructNode root;
    root.kind = StructKind::Seq;
    int want = draw(rng, 1, cfg.max_stmts);
    root.children.push_back(gen.stmt(0));
    for (int i = 1; i < want && gen.stmts_left > 0; ++i) {
        root.children.push_back(gen.stmt(0));
    }
    return root;
}

ActivityGraph flatten_to_graph(const StructNode& tree, const std::string& name) {
    assert(tree.kind == StructKind::Seq);
    GraphBuilder b;
    b.g.name = name;
    b.add_node("s", NodeKind::Initial);
    b.prev = "s";
    for (const StructNode& c : tree.children) b.visit(c);
    b.add_node("e", NodeKind::ActivityFinal);
    b.link_to("e");
    return std::move(b.g);
}

SequenceModel flatten_to_sequence(const StructNode& tree,
                                  const std::string& name) {
    SeqBuilder b;
    b.m.name = name;
    b.m.lifelines.push_back({"u", "User"});
    b.m.lifelines.push_back({"sys", "System"});
    b.next_par_number = max_number(tree) + 1;
    b.emit(tree);
    return std::move(b.m);
}

std::vector<std::string> tree_variables(const StructNode& tree) {
    std::set<std::string> vars;
    collect_vars(tree, vars);
    return {vars.begin(), vars.end()};
}

Env random_env(std::mt19937& rng, const std::vector<std::string>& vars) {
    Env env;
    for (const std::string& v : vars) {
        env.bindings[v] = static_cast<std::int64_t>(draw(rng, 0, 3));
    }
    return env;
}

StructNode normalize_tree(const StructNode& node) {
    return normalize_rec(node, true);
}

bool tree_equal(const StructNode& a, const StructNode& b) {
    return normalize_tree(a) == normalize_tree(b);
}

std::string tree_repr(const StructNode& node) {
    std::string out;
    repr_rec(node, out);
    return out;
}

int count_annotated(const StructNode& tree) {
    int n = 0;
    if (tree.kind == StructKind::If || tree.kind == StructKind::While ||
        tree.kind == StructKind::DoWhile) {
        n = 1;
    }
    for (const StructNode& c : tree.children) n += count_annotated(c);
    return n;
}

std::string break_random_pairing(ActivityGraph& graph, std::mt19937& rng) {
    if (graph.annotations.empty()) {
        throw std::logic_error("break_random_pairing: graph has no annotations");
    }
    std::size_t pick = static_cast<std::size_t>(
        draw(rng, 0, static_cast<int>(graph.annotations.size()) - 1));
    ControlAnnotation& ann = graph.annotations[pick];
    Node stray;
    stray.id = "mx";
    stray.kind = NodeKind::Merge;
    graph.nodes.push_back(std::move(stray));
    ann.close_node = "mx";
    return ann.open_node;
}

void delete_event(SequenceModel& model, std::size_t index) {
    auto it = std::find_if(
        model.events.begin(), model.events.end(),
        [&](const MessageEvent& ev) { return ev.order == static_cast<int>(index); });
    if (it == model.events.end()) {
        throw std::out_of_range("delete_event: no event with that order");
    }
    model.events.erase(it);
    for (MessageEvent& ev : model.events) {
        if (ev.order > static_cast<int>(index)) --ev.order;
    }
    auto shrink = [&](Span& s) {
        if (s.first > static_cast<int>(index)) --s.first;
        if (s.last >= static_cast<int>(index)) --s.last;
    };
    for (Fragment& f : model.fragments) {
        shrink(f.span);
        for (Span& o : f.operands) shrink(o);
        std::erase_if(f.operands, [](const Span& o) { return o.last < o.first; });
    }
    std::erase_if(model.fragments,
                  [](const Fragment& f) { return f.span.last < f.span.first; });
}

}  // namespace testsupport
