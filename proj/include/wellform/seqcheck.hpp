// Sequence-diagram checks: combined-fragment nesting (fragments must nest
// like boxes) and one-to-one consistency between an activity diagram and a
// sequence diagram.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "wellform/model.hpp"

namespace wellform {

// Rules:
//  S1-CROSSOVER   two fragment spans overlap without containment
//  S2-OPERAND-GAP alt operands do not tile the fragment span
//  S3-NUMBER-DUP  a fragment number is used more than once
// Equal spans count as containment (a loop directly wrapping an alt covers
// the same messages), so they do not trigger S1.
std::vector<Diagnostic> check_nesting(const SequenceModel& model);

struct ConsistencyReport {
    // (activity element id, sequence element id) for every structural match:
    // action<->message, decision<->alt/opt, loop decision<->loop fragment,
    // fork<->par fragment.
    std::vector<std::pair<std::string, std::string>> matched_pairs;
    std::vector<Diagnostic> mismatches;  // rules C1..C5
    bool consistent = false;
};

// Rules:
//  C1-MISSING    activity element with no sequence counterpart
//  C2-EXTRA      sequence element with no activity counterpart
//  C3-ORDER      both elements exist but appear out of order
//  C4-KIND       paired elements disagree on kind or number
//  C5-CONDITION  paired elements disagree on the condition text
// Reporting is first-divergence per nesting level: a C3/C4 stops the
// affected subtree, C5 is reported but the subtree is still compared.
// Throws std::invalid_argument unless is_well_formed(activity) holds and
// check_nesting(sequence) is empty.
ConsistencyReport check_consistency(const ActivityGraph& activity,
                                    const SequenceModel& sequence);

}  // namespace wellform
