// In-memory model of activity diagrams, sequence diagrams and lint
// diagnostics. Everything here is plain value types; once built, graphs are
// treated as immutable and may be shared freely between analyses.
#pragma once

#include <string>
#include <vector>

namespace wellform {

enum class NodeKind {
    Initial,
    ActivityFinal,
    FlowFinal,
    Action,
    Decision,
    Merge,
    Fork,
    Join,
    LoopNode,
};

const char* to_keyword(NodeKind kind);

enum class ControlConstruct { If, While, DoWhile, For };

const char* to_keyword(ControlConstruct c);

struct ActivityGraph;

struct Node {
    std::string id;
    NodeKind kind = NodeKind::Action;
    std::string label;
    // Assignment list ("i = i + 1; j = 0"), Action nodes only.
    std::string effect;
    // Loop body sub-diagram, LoopNode only; empty or one element.
    std::vector<ActivityGraph> body;

    bool has_body() const { return !body.empty(); }

    bool operator==(const Node&) const = default;
};

struct Edge {
    std::string id;
    std::string source;
    std::string target;
    std::string guard;  // empty = unguarded

    bool operator==(const Edge&) const = default;
};

// Pairs the opening diamond (or loop node) of a branch/loop with its closing
// merge, carrying the construct keyword, the shared number and the condition.
struct ControlAnnotation {
    ControlConstruct construct = ControlConstruct::If;
    int number = 0;
    std::string open_node;
    std::string close_node;
    std::string condition;

    bool operator==(const ControlAnnotation&) const = default;
};

struct ActivityGraph {
    std::string name;
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    std::vector<ControlAnnotation> annotations;

    const Node* find_node(const std::string& id) const;
    const Edge* find_edge(const std::string& id) const;

    bool operator==(const ActivityGraph&) const = default;
};

enum class MessageKind { Sync, Async, Reply };

const char* to_keyword(MessageKind kind);

struct Lifeline {
    std::string id;
    std::string label;

    bool operator==(const Lifeline&) const = default;
};

struct MessageEvent {
    std::string id;
    std::string from;
    std::string to;
    std::string label;
    MessageKind kind = MessageKind::Sync;
    int order = 0;

    bool operator==(const MessageEvent&) const = default;
};

enum class FragmentKind { Alt, Opt, Loop, Par };

const char* to_keyword(FragmentKind kind);

// Inclusive range of event order indices.
struct Span {
    int first = 0;
    int last = 0;

    bool contains(const Span& other) const {
        return first <= other.first && other.last <= last;
    }
    bool disjoint(const Span& other) const {
        return last < other.first || other.last < first;
    }

    bool operator==(const Span&) const = default;
};

struct Fragment {
    std::string id;
    FragmentKind kind = FragmentKind::Opt;
    int number = 0;
    std::string condition;
    Span span;
    // Alt only: operand sub-ranges tiling the span, in order.
    std::vector<Span> operands;

    bool operator==(const Fragment&) const = default;
};

struct SequenceModel {
    std::string name;
    std::vector<Lifeline> lifelines;
    std::vector<MessageEvent> events;  // order indices 0..n-1, gapless
    std::vector<Fragment> fragments;

    bool operator==(const SequenceModel&) const = default;
};

enum class Severity { Error, Warning };

// One rule violation. Rule ids are stable strings (REF-*, W*, S*, C*);
// locus names a node/edge/fragment id, or is empty when the violation is
// about something missing from the graph altogether.
struct Diagnostic {
    std::string rule;
    Severity severity = Severity::Error;
    std::string locus;
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

void sort_diagnostics(std::vector<Diagnostic>& diagnostics);

// Lowercases, trims and collapses internal whitespace runs to single spaces.
std::string normalize_label(const std::string& raw);

// Checks the structural invariants of a graph: unique node ids, edges that
// reference declared nodes, guards only on decision/loop-node edges, effects
// only on actions, bodies only on loop nodes. Recurses into loop-node bodies.
std::vector<Diagnostic> validate_refs(const ActivityGraph& graph);

}  // namespace wellform
