// Rubric and grade-report value types, shared by the parser and the graders.
#pragma once

#include <string>
#include <vector>

namespace wellform {

enum class RubricMode { ElementDiff, Annotation, Hotspot, Placement };

const char* to_keyword(RubricMode mode);

enum class Taxonomy { Remember, Understand, Apply, Analyze, Evaluate, Create };

const char* to_keyword(Taxonomy level);

struct RubricItem {
    std::string key;  // normalized expected value
    double points = 1.0;

    bool operator==(const RubricItem&) const = default;
};

struct Rubric {
    std::string name;
    RubricMode mode = RubricMode::Annotation;
    std::vector<RubricItem> items;
    std::vector<char> competency;  // tags 'A'..'O', inert metadata
    Taxonomy taxonomy = Taxonomy::Apply;

    double max_points() const {
        double sum = 0.0;
        for (const RubricItem& item : items) sum += item.points;
        return sum;
    }

    bool operator==(const Rubric&) const = default;
};

struct GradeLine {
    std::string key;
    double earned = 0.0;
    double expected = 0.0;
    bool matched = false;

    bool operator==(const GradeLine&) const = default;
};

struct GradeReport {
    double earned = 0.0;  // clamped to [0, max]
    double max = 0.0;
    std::vector<GradeLine> items;
    RubricMode mode = RubricMode::Annotation;
    std::vector<char> competency;
    Taxonomy taxonomy = Taxonomy::Apply;

    bool operator==(const GradeReport&) const = default;
};

}  // namespace wellform
