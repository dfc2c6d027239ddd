// Token-semantics execution of activity graphs and of the structured
// pseudocode emitted by the structuring pass. Both interpreters share the
// same deterministic round-robin schedule, which makes their action traces
// directly comparable.
#pragma once

#include <string>
#include <vector>

#include "wellform/expr.hpp"
#include "wellform/model.hpp"
#include "wellform/parser.hpp"

namespace wellform {

enum class Termination { Completed, BudgetExhausted, GuardError, Deadlock };

std::string to_keyword(Termination t);

struct Trace {
    std::vector<std::string> steps;  // executed Action labels, in order
    Env final_env;
    Termination terminated = Termination::Completed;
    std::string message;  // non-empty for GuardError/Deadlock details

    bool operator==(const Trace&) const = default;
};

inline constexpr long kDefaultBudget = 10000;

// Guard evaluation with the simulator's error policy: unbound identifier,
// type mismatch, or a non-boolean result all surface as errors.
ExprResult<bool> eval_guard(const std::string& expr, const Env& env);

// Runs the graph from its Initial node. The budget counts node visits;
// exhaustion, guard failures and deadlocks end the run via `terminated`,
// never via exceptions. Requires validate_refs(graph) to be empty.
Trace run(const ActivityGraph& graph, Env init, long budget = kDefaultBudget);

// Runs a pseudocode program (the emit_pseudocode format). The budget
// counts executed statements and condition evaluations. A malformed
// program is a parse error, distinct from any Trace outcome.
Parsed<Trace> run_pseudocode(const std::string& program, Env init,
                             long budget = kDefaultBudget);

}  // namespace wellform
