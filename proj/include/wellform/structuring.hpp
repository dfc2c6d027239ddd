// Structuredness analysis: reduces an activity graph to a tree of
// sequence/branch/loop/parallel constructs (innermost-first pattern
// reduction) and prints that tree as structured pseudocode.
#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "wellform/model.hpp"

namespace wellform {

enum class StructKind { Seq, Act, If, While, DoWhile, Par, Skip };

struct StructNode {
    StructKind kind = StructKind::Skip;
    std::string action_id;  // Act: source graph node id
    std::string label;      // Act: text printed after "do"
    std::string effect;     // Act: assignment list, printed as a comment
    int number = 0;         // If/While/DoWhile: annotation number
    std::string condition;  // If/While/DoWhile
    std::string origin_id;  // graph node that anchors the construct
                            // (decision for If/While/DoWhile, fork for Par)
    std::vector<StructNode> children;

    bool operator==(const StructNode&) const = default;
};

// Invariants: root is Seq with >= 1 children; If has 1 or 2 children
// (then / then+else); While/DoWhile have exactly 1; Par has >= 2; every
// Action id of the source graph appears exactly once.
struct ReductionTree {
    StructNode root;

    bool operator==(const ReductionTree&) const = default;
};

// Witness that a graph is not structured: the irreducible core left after
// the pattern fixpoint.
struct Residue {
    std::vector<std::string> remaining_nodes;
    std::vector<std::string> remaining_edges;
    std::string stuck_reason;

    bool operator==(const Residue&) const = default;
};

using ReduceResult = std::variant<ReductionTree, Residue>;

ReduceResult reduce(const ActivityGraph& graph);

// Deterministic multi-line rendering; two-space indent, newline after
// every statement. Action effects ride along as "// <effect>" comments so
// the pseudocode stays executable by the simulator.
std::string emit_pseudocode(const ReductionTree& tree);

// True iff lint(graph) reports no Error and reduce(graph) yields a tree.
bool is_well_formed(const ActivityGraph& graph);

// Test hook: run the reduction but let the caller pick which applicable
// pattern instance fires at each step. The chooser receives the
// deterministically ordered instance descriptors (e.g. "SEQ@a", "IF@d1")
// and returns an index into that list. reduce() is reduce_with_chooser
// with a chooser that always returns 0.
using ReductionChooser =
    std::function<std::size_t(const std::vector<std::string>&)>;
ReduceResult reduce_with_chooser(const ActivityGraph& graph,
                                 const ReductionChooser& choose);

}  // namespace wellform
