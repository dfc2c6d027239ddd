// Text format for activity diagrams, sequence diagrams and grading rubrics.
//
// Statements are terminated by ';' or end of line. '#' begins a comment
// unless immediately followed by a digit ("#3" is the paired number of an
// annotation or fragment). Keywords are contextual; any word may be reused
// as a node identifier.
#pragma once

#include <string>
#include <variant>

#include "wellform/grading_types.hpp"
#include "wellform/model.hpp"

namespace wellform {

struct ParseError {
    int line = 1;    // 1-based
    int column = 1;  // 1-based
    std::string message;
    std::string snippet;  // text of the offending line
};

template <typename T>
using Parsed = std::variant<T, ParseError>;

template <typename T>
bool parse_ok(const Parsed<T>& p) {
    return std::holds_alternative<T>(p);
}

template <typename T>
const ParseError& parse_error(const Parsed<T>& p) {
    return std::get<ParseError>(p);
}

Parsed<ActivityGraph> parse_activity(const std::string& input);
Parsed<SequenceModel> parse_sequence(const std::string& input);
Parsed<Rubric> parse_rubric(const std::string& input);

// Canonical text forms; parsing the output reproduces the input model
// exactly (declaration order, synthesized edge and fragment ids included).
std::string serialize_activity(const ActivityGraph& graph);
std::string serialize_sequence(const SequenceModel& model);

}  // namespace wellform
