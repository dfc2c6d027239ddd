// Point-grading-scale scoring for the four machine-checkable exercise
// modes. All graders clamp the total to [0, max]; per-line penalties may
// still be negative so reports can show them.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "wellform/grading_types.hpp"
#include "wellform/model.hpp"

namespace wellform {

// Fill-in-the-blank answers, compared positionally after normalization.
// Throws std::invalid_argument on a rubric of the wrong mode (same for the
// other graders).
GradeReport grade_annotation(const Rubric& rubric,
                             const std::vector<std::string>& answers);

// Mark-the-elements: each keyed element found earns its points; every
// extraneous mark costs the smallest keyed point value.
GradeReport grade_hotspot(const Rubric& rubric,
                          const std::vector<std::string>& marks);

// Spot-filling: rubric keys are "spot:kind". A keyed spot earns its points
// iff exactly one placement targets it and the kind matches; duplicate
// placements on a spot void it; placements on unkeyed spots are penalized
// like extraneous hotspot marks.
GradeReport grade_placement(
    const Rubric& rubric,
    const std::vector<std::pair<std::string, std::string>>& placements);

// Draw-the-diagram: student elements are matched to reference elements by
// (kind, normalized label) — for edges also the normalized guard — and the
// rubric items (keyed by element descriptors, see element_descriptor) are
// earned in order. Each lint Error on the student graph deducts
// lint_penalty points; the total is floored at zero.
GradeReport grade_element_diff(const ActivityGraph& reference,
                               const ActivityGraph& student,
                               const Rubric& rubric,
                               double lint_penalty = 1.0);

// Descriptor vocabulary used by element-diff rubric keys:
//   node: "<kindword>" or "<kindword>:<normalized label>"
//   edge: "flow:<source desc>-><target desc>"
std::string element_descriptor(const Node& node);
std::string element_descriptor(const ActivityGraph& graph, const Edge& edge);

}  // namespace wellform
