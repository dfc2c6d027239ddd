#include "wellform/simulator.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>

namespace wellform {

std::string to_keyword(Termination t) {
    switch (t) {
        case Termination::Completed: return "Completed";
        case Termination::BudgetExhausted: return "BudgetExhausted";
        case Termination::GuardError: return "GuardError";
        case Termination::Deadlock: return "Deadlock";
    }
    return "Completed";
}

ExprResult<bool> eval_guard(const std::string& expr, const Env& env) {
    auto parsed = parse_expression(expr);
    if (!parsed.ok()) return {std::nullopt, parsed.error};
    auto value = eval(**parsed.value, env);
    if (!value.ok()) return {std::nullopt, value.error};
    if (!std::holds_alternative<bool>(*value.value)) {
        return {std::nullopt, {"guard does not evaluate to a boolean", 0}};
    }
    return {std::get<bool>(*value.value), {}};
}

namespace {

// Shared accounting for both interpreters: environment, trace, budget.
struct RunState {
    Env env;
    std::vector<std::string> steps;
    long budget = 0;
    bool ended = false;
    Termination term = Termination::Completed;
    std::string message;

    void end(Termination t, std::string msg = "") {
        if (ended) return;
        ended = true;
        term = t;
        message = std::move(msg);
    }

    // One unit of work (a node visit or an executed statement). False means
    // the run just ended on budget exhaustion.
    bool spend() {
        if (budget <= 0) {
            end(Termination::BudgetExhausted, "execution budget exhausted");
            return false;
        }
        budget--;
        return true;
    }

    Trace trace() const { return {steps, env, term, message}; }
};

// ---------------------------------------------------------------------------
// Graph interpreter.
// ---------------------------------------------------------------------------

struct GToken {
    // Frame stack for loop-node bodies; back() is where the token sits.
    std::vector<std::pair<const ActivityGraph*, std::string>> at;
    bool entered = false;     // current node already visited; next move exits it
    bool after_body = false;  // back at a loop node after its body completed
    bool blocked = false;     // parked at a join or stuck at a sink
};

struct GraphRunner {
    RunState st;
    std::vector<GToken> ring;
    std::size_t cursor = 0;
    // (body graph, join id) -> tokens arrived so far
    std::map<std::pair<const void*, std::string>, int> arrivals;
    std::map<std::string, ExprResult<ExprPtr>> guard_cache;
    std::map<const Node*, ExprResult<std::vector<Assignment>>> effect_cache;

    const Edge* first_out(const ActivityGraph* g, const std::string& id) const {
        for (const Edge& e : g->edges) {
            if (e.source == id) return &e;
        }
        return nullptr;
    }

    int in_degree(const ActivityGraph* g, const std::string& id) const {
        int n = 0;
        for (const Edge& e : g->edges) {
            if (e.target == id) n++;
        }
        return n;
    }

    bool eval_guard_text(const std::string& text, const std::string& where, bool& out) {
        auto it = guard_cache.find(text);
        if (it == guard_cache.end()) {
            it = guard_cache.emplace(text, parse_expression(text)).first;
        }
        if (!it->second.ok()) {
            st.end(Termination::GuardError,
                   "malformed guard \"" + text + "\" " + where + ": " + it->second.error.message);
            return false;
        }
        auto value = eval(**it->second.value, st.env);
        if (!value.ok()) {
            st.end(Termination::GuardError,
                   "guard \"" + text + "\" " + where + ": " + value.error.message);
            return false;
        }
        if (!std::holds_alternative<bool>(*value.value)) {
            st.end(Termination::GuardError,
                   "guard \"" + text + "\" " + where + " does not evaluate to a boolean");
            return false;
        }
        out = std::get<bool>(*value.value);
        return true;
    }

    void run_turn(std::size_t idx);
    Trace run(const ActivityGraph& g, Env init, long budget);
};

void GraphRunner::run_turn(std::size_t idx) {
    for (;;) {
        GToken& t = ring[idx];
        const ActivityGraph* g = t.at.back().first;
        const std::string node_id = t.at.back().second;
        const Node* node = g->find_node(node_id);
        if (!node) {
            st.end(Termination::Deadlock, "token reached unknown node '" + node_id + "'");
            return;
        }

        if (t.entered) {
            // Leave the node. Non-decision nodes always take the first
            // declared outgoing edge.
            const Edge* out = first_out(g, node_id);
            if (!out) {
                t.blocked = true;
                cursor = idx + 1;
                return;
            }
            t.at.back().second = out->target;
            t.entered = false;
            continue;
        }

        if (!st.spend()) return;
        t.entered = true;

        switch (node->kind) {
            case NodeKind::Action: {
                st.steps.push_back(node->label);
                if (!node->effect.empty()) {
                    auto it = effect_cache.find(node);
                    if (it == effect_cache.end()) {
                        it = effect_cache.emplace(node, parse_assignments(node->effect)).first;
                    }
                    if (!it->second.ok()) {
                        st.end(Termination::GuardError,
                               "malformed effect \"" + node->effect + "\" at action '" +
                                   node_id + "': " + it->second.error.message);
                        return;
                    }
                    std::string err;
                    apply_assignments(*it->second.value, st.env, err);
                    if (!err.empty()) {
                        st.end(Termination::GuardError, "effect \"" + node->effect +
                                                            "\" at action '" + node_id +
                                                            "': " + err);
                        return;
                    }
                }
                cursor = idx + 1;
                return;  // the turn's observable event happened
            }
            case NodeKind::Initial:
            case NodeKind::Merge: {
                const Edge* out = first_out(g, node_id);
                if (!out) {
                    t.blocked = true;
                    cursor = idx + 1;
                    return;
                }
                t.at.back().second = out->target;
                t.entered = false;
                continue;
            }
            case NodeKind::Decision: {
                const Edge* chosen = nullptr;
                int truths = 0;
                for (const Edge& e : g->edges) {
                    if (e.source != node_id) continue;
                    if (e.guard.empty()) {
                        st.end(Termination::GuardError,
                               "edge '" + e.id + "' leaving decision '" + node_id +
                                   "' has no guard");
                        return;
                    }
                    bool value = false;
                    if (!eval_guard_text(e.guard, "on edge '" + e.id + "'", value)) return;
                    if (value) {
                        truths++;
                        if (!chosen) chosen = &e;
                    }
                }
                if (truths == 0) {
                    st.end(Termination::GuardError,
                           "no guard is true at decision '" + node_id + "'");
                    return;
                }
                if (truths > 1) {
                    st.end(Termination::GuardError,
                           "guards at decision '" + node_id + "' are not exclusive");
                    return;
                }
                t.at.back().second = chosen->target;
                t.entered = false;
                continue;
            }
            case NodeKind::Fork: {
                std::vector<GToken> children;
                for (const Edge& e : g->edges) {
                    if (e.source != node_id) continue;
                    GToken c;
                    c.at = t.at;
                    c.at.back().second = e.target;
                    children.push_back(std::move(c));
                }
                if (children.empty()) {
                    t.blocked = true;
                    cursor = idx + 1;
                    return;
                }
                ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(idx));
                ring.insert(ring.begin() + static_cast<std::ptrdiff_t>(idx),
                            children.begin(), children.end());
                cursor = idx;  // the first concurrent flow moves next
                return;
            }
            case NodeKind::Join: {
                auto key = std::make_pair(static_cast<const void*>(g), node_id);
                int expected = in_degree(g, node_id);
                int arrived = ++arrivals[key];
                if (arrived < expected) {
                    t.blocked = true;
                    cursor = idx + 1;
                    return;
                }
                arrivals.erase(key);
                std::vector<std::size_t> members;
                for (std::size_t j = 0; j < ring.size(); j++) {
                    if (j == idx || (ring[j].blocked && ring[j].at.back().first == g &&
                                     ring[j].at.back().second == node_id)) {
                        members.push_back(j);
                    }
                }
                if (static_cast<int>(members.size()) != expected) {
                    throw std::logic_error(
                        "token conservation violated at join '" + node_id + "': expected " +
                        std::to_string(expected) + " tokens, found " +
                        std::to_string(members.size()));
                }
                GToken continuation;
                continuation.at = t.at;
                continuation.entered = true;  // the join itself was just visited
                std::size_t minpos = members.front();
                for (auto it = members.rbegin(); it != members.rend(); ++it) {
                    ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(*it));
                }
                ring.insert(ring.begin() + static_cast<std::ptrdiff_t>(minpos),
                            std::move(continuation));
                idx = minpos;
                continue;  // same turn: run on from the join
            }
            case NodeKind::ActivityFinal: {
                if (t.at.size() == 1) {
                    st.end(Termination::Completed);
                    return;
                }
                t.at.pop_back();  // loop body iteration complete
                t.entered = false;
                t.after_body = true;
                continue;
            }
            case NodeKind::FlowFinal: {
                ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(idx));
                cursor = idx;
                return;
            }
            case NodeKind::LoopNode: {
                bool again = t.after_body;
                t.after_body = false;
                const ControlAnnotation* ann = nullptr;
                for (const ControlAnnotation& a : g->annotations) {
                    if (a.open_node == node_id && a.close_node == node_id) {
                        ann = &a;
                        break;
                    }
                }
                if (!ann) {
                    st.end(Termination::GuardError,
                           "loop node '" + node_id + "' has no controlling annotation");
                    return;
                }
                if (!node->has_body()) {
                    st.end(Termination::GuardError,
                           "loop node '" + node_id + "' has no body");
                    return;
                }
                bool enter = false;
                if (ann->construct == ControlConstruct::DoWhile && !again) {
                    enter = true;  // run-first loop: no test before the first pass
                } else {
                    if (!eval_guard_text(ann->condition, "at loop node '" + node_id + "'",
                                         enter)) {
                        return;
                    }
                }
                if (enter) {
                    const ActivityGraph* body = &node->body.front();
                    const Node* start = nullptr;
                    for (const Node& bn : body->nodes) {
                        if (bn.kind == NodeKind::Initial) {
                            start = &bn;
                            break;
                        }
                    }
                    if (!start) {
                        st.end(Termination::GuardError,
                               "loop node '" + node_id + "' body has no start node");
                        return;
                    }
                    t.at.emplace_back(body, start->id);
                    t.entered = false;
                    continue;
                }
                const Edge* out = first_out(g, node_id);
                if (!out) {
                    t.blocked = true;
                    cursor = idx + 1;
                    return;
                }
                t.at.back().second = out->target;
                t.entered = false;
                continue;
            }
        }
    }
}

Trace GraphRunner::run(const ActivityGraph& g, Env init, long budget) {
    st.env = std::move(init);
    st.budget = budget;

    const Node* start = nullptr;
    for (const Node& n : g.nodes) {
        if (n.kind == NodeKind::Initial) {
            start = &n;
            break;
        }
    }
    if (!start) {
        st.end(Termination::Deadlock, "the diagram has no start node");
        return st.trace();
    }
    GToken first;
    first.at.emplace_back(&g, start->id);
    ring.push_back(std::move(first));

    while (!st.ended) {
        if (ring.empty()) {
            st.end(Termination::Deadlock,
                   "all tokens were consumed before the end node was reached");
            break;
        }
        std::size_t n = ring.size();
        std::size_t idx = n;
        for (std::size_t k = 0; k < n; k++) {
            std::size_t c = (cursor + k) % n;
            if (!ring[c].blocked) {
                idx = c;
                break;
            }
        }
        if (idx == n) {
            st.end(Termination::Deadlock,
                   "no token can move: tokens are parked at joins or stuck at sinks");
            break;
        }
        run_turn(idx);
    }
    return st.trace();
}

// ---------------------------------------------------------------------------
// Pseudocode interpreter.
// ---------------------------------------------------------------------------

struct PStmt;
using PBlock = std::vector<PStmt>;

struct PStmt {
    enum class K { Do, Skip, If, While, DoWhile, Par };
    K k = K::Skip;
    std::string label;
    std::vector<Assignment> effects;
    std::string cond_text;
    ExprPtr cond;
    PBlock a;  // then-branch / loop body
    PBlock b;  // else-branch
    bool has_else = false;
    std::vector<PBlock> arms;
    int number = 0;
};

struct PLine {
    std::string text;
    int number = 0;  // 1-based source line
};

struct PProgramParser {
    std::vector<PLine> lines;
    std::size_t pos = 0;
    bool failed = false;
    ParseError error;

    explicit PProgramParser(const std::string& text) {
        int number = 0;
        std::string current;
        auto flush = [&]() {
            number++;
            std::size_t b = current.find_first_not_of(" \t\r");
            if (b != std::string::npos) {
                std::size_t e = current.find_last_not_of(" \t\r");
                lines.push_back({current.substr(b, e - b + 1), number});
            }
            current.clear();
        };
        for (char c : text) {
            if (c == '\n') {
                flush();
            } else {
                current.push_back(c);
            }
        }
        if (!current.empty()) flush();
    }

    bool fail(const std::string& message) {
        if (failed) return false;
        failed = true;
        if (pos < lines.size()) {
            error = {lines[pos].number, 1, message, lines[pos].text};
        } else {
            error = {lines.empty() ? 1 : lines.back().number + 1, 1, message, ""};
        }
        return false;
    }

    static bool starts_with(const std::string& s, const char* prefix) {
        return s.rfind(prefix, 0) == 0;
    }

    bool parse_number_suffix(const std::string& tail, int& out) {
        if (tail.empty()) return false;
        long v = 0;
        for (char c : tail) {
            if (c < '0' || c > '9') return false;
            v = v * 10 + (c - '0');
        }
        out = static_cast<int>(v);
        return true;
    }

    bool parse_condition(const std::string& text, PStmt& stmt) {
        stmt.cond_text = text;
        auto parsed = parse_expression(text);
        if (!parsed.ok()) {
            return fail("malformed condition \"" + text + "\": " + parsed.error.message);
        }
        stmt.cond = *parsed.value;
        return true;
    }

    bool parse_block(PBlock& out) {
        while (pos < lines.size()) {
            const std::string& line = lines[pos].text;
            if (!line.empty() && line[0] == '}') return true;
            if (line == "||") return true;
            PStmt stmt;
            if (line == "skip;") {
                stmt.k = PStmt::K::Skip;
                pos++;
            } else if (starts_with(line, "do ")) {
                stmt.k = PStmt::K::Do;
                std::string rest = line.substr(3);
                std::size_t marker = rest.find("; // ");
                if (marker != std::string::npos) {
                    stmt.label = rest.substr(0, marker);
                    std::string effect = rest.substr(marker + 5);
                    auto parsed = parse_assignments(effect);
                    if (!parsed.ok()) {
                        return fail("malformed effect \"" + effect +
                                    "\": " + parsed.error.message);
                    }
                    stmt.effects = *parsed.value;
                } else if (!rest.empty() && rest.back() == ';') {
                    stmt.label = rest.substr(0, rest.size() - 1);
                } else {
                    return fail("expected ';' after do-statement");
                }
                if (stmt.label.empty()) return fail("do-statement has an empty label");
                pos++;
            } else if (starts_with(line, "if (") && line.size() >= 7 &&
                       line.compare(line.size() - 3, 3, ") {") == 0) {
                stmt.k = PStmt::K::If;
                if (!parse_condition(line.substr(4, line.size() - 7), stmt)) return false;
                pos++;
                if (!parse_block(stmt.a)) return false;
                if (pos >= lines.size()) return fail("unterminated if-statement");
                if (lines[pos].text == "} else {") {
                    stmt.has_else = true;
                    pos++;
                    if (!parse_block(stmt.b)) return false;
                    if (pos >= lines.size()) return fail("unterminated else-branch");
                }
                if (!starts_with(lines[pos].text, "} // #") ||
                    !parse_number_suffix(lines[pos].text.substr(6), stmt.number)) {
                    return fail("expected '} // #<number>' closing the if-statement");
                }
                pos++;
            } else if (starts_with(line, "while (") && line.size() >= 10 &&
                       line.compare(line.size() - 3, 3, ") {") == 0) {
                stmt.k = PStmt::K::While;
                if (!parse_condition(line.substr(7, line.size() - 10), stmt)) return false;
                pos++;
                if (!parse_block(stmt.a)) return false;
                if (pos >= lines.size() || !starts_with(lines[pos].text, "} // #") ||
                    !parse_number_suffix(lines[pos].text.substr(6), stmt.number)) {
                    return fail("expected '} // #<number>' closing the while-loop");
                }
                pos++;
            } else if (line == "dowhile {") {
                stmt.k = PStmt::K::DoWhile;
                pos++;
                if (!parse_block(stmt.a)) return false;
                bool ok = false;
                if (pos < lines.size() && starts_with(lines[pos].text, "} (")) {
                    const std::string& close = lines[pos].text;
                    std::size_t marker = close.rfind(") // #");
                    if (marker != std::string::npos && marker > 3 &&
                        parse_number_suffix(close.substr(marker + 6), stmt.number) &&
                        parse_condition(close.substr(3, marker - 3), stmt)) {
                        ok = true;
                    }
                }
                if (!ok) {
                    return failed ? false
                                  : fail("expected '} (<cond>) // #<number>' closing the "
                                         "dowhile-loop");
                }
                pos++;
            } else if (line == "par {") {
                stmt.k = PStmt::K::Par;
                pos++;
                stmt.arms.emplace_back();
                if (!parse_block(stmt.arms.back())) return false;
                while (pos < lines.size() && lines[pos].text == "||") {
                    pos++;
                    stmt.arms.emplace_back();
                    if (!parse_block(stmt.arms.back())) return false;
                }
                if (pos >= lines.size() || lines[pos].text != "}") {
                    return fail("expected '}' closing the par-block");
                }
                if (stmt.arms.size() < 2) return fail("par-block needs at least two arms");
                pos++;
            } else {
                return fail("unrecognized statement '" + line + "'");
            }
            out.push_back(std::move(stmt));
        }
        return true;
    }
};

struct PFrame {
    const PBlock* block = nullptr;
    std::size_t pc = 0;
    const PStmt* loop = nullptr;  // set when block is a While/DoWhile body
};

struct PThread {
    std::vector<PFrame> stack;
    int group = -1;
    bool done = false;
};

struct PGroup {
    PThread parent;
    int remaining = 0;
};

struct PseudoRunner {
    RunState st;
    std::vector<PThread> ring;
    std::vector<PGroup> groups;
    std::size_t cursor = 0;

    bool eval_cond(const PStmt& s, bool& out) {
        auto value = eval(*s.cond, st.env);
        if (!value.ok()) {
            st.end(Termination::GuardError, "condition \"" + s.cond_text +
                                                "\": " + value.error.message);
            return false;
        }
        if (!std::holds_alternative<bool>(*value.value)) {
            st.end(Termination::GuardError, "condition \"" + s.cond_text +
                                                "\" does not evaluate to a boolean");
            return false;
        }
        out = std::get<bool>(*value.value);
        return true;
    }

    void run_turn(std::size_t idx);
    Trace run(const PBlock& program, Env init, long budget);
};

void PseudoRunner::run_turn(std::size_t idx) {
    for (;;) {
        PThread& t = ring[idx];
        if (t.stack.empty()) {
            // Program end for this thread.
            if (t.group < 0) {
                st.end(Termination::Completed);
                return;
            }
            PGroup& group = groups[static_cast<std::size_t>(t.group)];
            group.remaining--;
            if (group.remaining > 0) {
                t.done = true;  // wait for sibling arms
                cursor = idx + 1;
                return;
            }
            std::vector<std::size_t> members;
            for (std::size_t j = 0; j < ring.size(); j++) {
                if (ring[j].group == t.group) members.push_back(j);
            }
            for (std::size_t j : members) {
                if (j != idx && !ring[j].done) {
                    throw std::logic_error("par bookkeeping violated: live sibling arm");
                }
            }
            std::size_t minpos = members.front();
            PThread parent = std::move(group.parent);
            for (auto it = members.rbegin(); it != members.rend(); ++it) {
                ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(*it));
            }
            ring.insert(ring.begin() + static_cast<std::ptrdiff_t>(minpos), std::move(parent));
            idx = minpos;
            continue;  // same turn: the suspended thread resumes
        }

        PFrame& f = t.stack.back();
        if (f.pc >= f.block->size()) {
            if (f.loop) {
                if (!st.spend()) return;
                bool again = false;
                if (!eval_cond(*f.loop, again)) return;
                if (again) {
                    f.pc = 0;
                } else {
                    t.stack.pop_back();
                    t.stack.back().pc++;  // move past the loop statement
                }
            } else {
                t.stack.pop_back();  // plain branch block; parent pc already advanced
            }
            continue;
        }

        const PStmt& s = (*f.block)[f.pc];
        switch (s.k) {
            case PStmt::K::Skip:
                if (!st.spend()) return;
                f.pc++;
                continue;
            case PStmt::K::Do: {
                if (!st.spend()) return;
                st.steps.push_back(s.label);
                if (!s.effects.empty()) {
                    std::string err;
                    apply_assignments(s.effects, st.env, err);
                    if (!err.empty()) {
                        st.end(Termination::GuardError, "effect at \"do " + s.label +
                                                            "\": " + err);
                        return;
                    }
                }
                f.pc++;
                cursor = idx + 1;
                return;
            }
            case PStmt::K::If: {
                if (!st.spend()) return;
                bool taken = false;
                if (!eval_cond(s, taken)) return;
                f.pc++;
                const PBlock* chosen = taken ? &s.a : (s.has_else ? &s.b : nullptr);
                if (chosen && !chosen->empty()) t.stack.push_back({chosen, 0, nullptr});
                continue;
            }
            case PStmt::K::While: {
                if (!st.spend()) return;
                bool enter = false;
                if (!eval_cond(s, enter)) return;
                if (enter) {
                    t.stack.push_back({&s.a, 0, &s});  // pc stays at the loop head
                } else {
                    f.pc++;
                }
                continue;
            }
            case PStmt::K::DoWhile:
                t.stack.push_back({&s.a, 0, &s});  // run-first: no test, no cost
                continue;
            case PStmt::K::Par: {
                if (!st.spend()) return;
                f.pc++;  // the suspended thread resumes after the par-block
                int gi = static_cast<int>(groups.size());
                PGroup group;
                group.remaining = static_cast<int>(s.arms.size());
                group.parent = std::move(t);
                groups.push_back(std::move(group));
                std::vector<PThread> children;
                for (const PBlock& arm : s.arms) {
                    PThread c;
                    c.stack.push_back({&arm, 0, nullptr});
                    c.group = gi;
                    children.push_back(std::move(c));
                }
                ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(idx));
                ring.insert(ring.begin() + static_cast<std::ptrdiff_t>(idx),
                            std::make_move_iterator(children.begin()),
                            std::make_move_iterator(children.end()));
                cursor = idx;  // the first arm moves next
                return;
            }
        }
    }
}

Trace PseudoRunner::run(const PBlock& program, Env init, long budget) {
    st.env = std::move(init);
    st.budget = budget;
    PThread main;
    main.stack.push_back({&program, 0, nullptr});
    ring.push_back(std::move(main));

    while (!st.ended) {
        if (ring.empty()) {
            st.end(Termination::Deadlock, "no runnable thread remains");
            break;
        }
        std::size_t n = ring.size();
        std::size_t idx = n;
        for (std::size_t k = 0; k < n; k++) {
            std::size_t c = (cursor + k) % n;
            if (!ring[c].done) {
                idx = c;
                break;
            }
        }
        if (idx == n) {
            st.end(Termination::Deadlock, "all threads are waiting");
            break;
        }
        run_turn(idx);
    }
    return st.trace();
}

}  // namespace

Trace run(const ActivityGraph& graph, Env init, long budget) {
    GraphRunner runner;
    return runner.run(graph, std::move(init), budget);
}

Parsed<Trace> run_pseudocode(const std::string& program, Env init, long budget) {
    PProgramParser parser(program);
    PBlock block;
    if (!parser.parse_block(block)) return parser.error;
    if (parser.pos < parser.lines.size()) {
        parser.fail("unexpected '" + parser.lines[parser.pos].text + "' at top level");
        return parser.error;
    }
    PseudoRunner runner;
    return runner.run(block, std::move(init), budget);
}

}  // namespace wellform
