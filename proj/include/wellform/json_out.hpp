// JSON fragments for the CLI envelope. Ordered documents keep key order
// stable so repeated runs are byte-identical.
#pragma once

#include <json.hpp>

#include "wellform/grading_types.hpp"
#include "wellform/model.hpp"
#include "wellform/simulator.hpp"
#include "wellform/structuring.hpp"

namespace wellform {

using ordered_json = nlohmann::ordered_json;

ordered_json diagnostics_to_json(const std::vector<Diagnostic>& diagnostics);
ordered_json trace_to_json(const Trace& trace);
ordered_json grade_to_json(const GradeReport& report);
ordered_json residue_to_json(const Residue& residue);

}  // namespace wellform
