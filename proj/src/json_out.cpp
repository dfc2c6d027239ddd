#include "wellform/json_out.hpp"

namespace wellform {

ordered_json diagnostics_to_json(const std::vector<Diagnostic>& diagnostics) {
    ordered_json arr = ordered_json::array();
    for (const Diagnostic& d : diagnostics) {
        ordered_json one;
        one["rule"] = d.rule;
        one["severity"] = d.severity == Severity::Error ? "error" : "warning";
        one["locus"] = d.locus;
        one["message"] = d.message;
        arr.push_back(std::move(one));
    }
    return arr;
}

ordered_json trace_to_json(const Trace& trace) {
    ordered_json doc;
    doc["steps"] = trace.steps;
    ordered_json env = ordered_json::object();
    for (const auto& [name, value] : trace.final_env.bindings) {
        if (std::holds_alternative<bool>(value)) {
            env[name] = std::get<bool>(value);
        } else {
            env[name] = std::get<std::int64_t>(value);
        }
    }
    doc["finalEnv"] = std::move(env);
    doc["terminated"] = to_keyword(trace.terminated);
    doc["message"] = trace.message;
    return doc;
}

ordered_json grade_to_json(const GradeReport& report) {
    ordered_json doc;
    doc["earned"] = report.earned;
    doc["max"] = report.max;
    doc["mode"] = to_keyword(report.mode);
    doc["competency"] = ordered_json::array();
    for (char tag : report.competency) doc["competency"].push_back(std::string(1, tag));
    doc["taxonomy"] = to_keyword(report.taxonomy);
    ordered_json items = ordered_json::array();
    for (const GradeLine& line : report.items) {
        ordered_json one;
        one["key"] = line.key;
        one["earned"] = line.earned;
        one["expected"] = line.expected;
        one["matched"] = line.matched;
        items.push_back(std::move(one));
    }
    doc["items"] = std::move(items);
    return doc;
}

ordered_json residue_to_json(const Residue& residue) {
    ordered_json doc;
    doc["remainingNodes"] = residue.remaining_nodes;
    doc["remainingEdges"] = residue.remaining_edges;
    doc["stuckReason"] = residue.stuck_reason;
    return doc;
}

}  // namespace wellform
