#include "wellform/seqcheck.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

#include "wellform/structuring.hpp"

namespace wellform {

namespace {

std::string span_text(const Span& s) {
    return std::to_string(s.first) + ".." + std::to_string(s.last);
}

}  // namespace

std::vector<Diagnostic> check_nesting(const SequenceModel& model) {
    std::vector<Diagnostic> out;

    for (std::size_t i = 0; i < model.fragments.size(); i++) {
        for (std::size_t j = i + 1; j < model.fragments.size(); j++) {
            const Fragment& a = model.fragments[i];
            const Fragment& b = model.fragments[j];
            if (a.span.disjoint(b.span) || a.span.contains(b.span) ||
                b.span.contains(a.span)) {
                continue;
            }
            out.push_back({"S1-CROSSOVER", Severity::Error, a.id,
                           "fragment '" + a.id + "' (" + span_text(a.span) +
                               ") overlaps fragment '" + b.id + "' (" + span_text(b.span) +
                               ") without either containing the other"});
        }
    }

    for (const Fragment& f : model.fragments) {
        if (f.kind != FragmentKind::Alt) continue;
        bool tiles = !f.operands.empty();
        int expect = f.span.first;
        for (const Span& op : f.operands) {
            if (op.first != expect || op.last < op.first || op.last > f.span.last) {
                tiles = false;
                break;
            }
            expect = op.last + 1;
        }
        if (tiles && expect != f.span.last + 1) tiles = false;
        if (!tiles) {
            out.push_back({"S2-OPERAND-GAP", Severity::Error, f.id,
                           "operands of alt fragment '" + f.id +
                               "' do not tile its span " + span_text(f.span)});
        }
    }

    std::map<int, std::string> first_use;
    for (const Fragment& f : model.fragments) {
        auto [it, fresh] = first_use.emplace(f.number, f.id);
        if (!fresh) {
            out.push_back({"S3-NUMBER-DUP", Severity::Error, f.id,
                           "fragment number #" + std::to_string(f.number) +
                               " is already used by '" + it->second + "'"});
        }
    }

    sort_diagnostics(out);
    return out;
}

namespace {

// One position in the sequence diagram: either a message or a whole
// fragment with its nested content.
struct SeqItem {
    const MessageEvent* event = nullptr;
    const Fragment* fragment = nullptr;
    std::vector<SeqItem> children;
    int pos = 0;

    bool is_fragment() const { return fragment != nullptr; }
};

struct ForestBuilder {
    const SequenceModel& model;
    std::vector<const Fragment*> sorted;
    std::size_t next = 0;

    explicit ForestBuilder(const SequenceModel& m) : model(m) {
        for (const Fragment& f : m.fragments) sorted.push_back(&f);
        std::stable_sort(sorted.begin(), sorted.end(),
                         [](const Fragment* a, const Fragment* b) {
                             if (a->span.first != b->span.first)
                                 return a->span.first < b->span.first;
                             return a->span.last > b->span.last;
                         });
    }

    std::vector<SeqItem> build(int lo, int hi) {
        std::vector<SeqItem> items;
        int pos = lo;
        while (pos <= hi) {
            if (next < sorted.size() && sorted[next]->span.first == pos &&
                sorted[next]->span.last <= hi) {
                const Fragment* f = sorted[next];
                next++;
                SeqItem item;
                item.fragment = f;
                item.pos = f->span.first;
                item.children = build(f->span.first, f->span.last);
                items.push_back(std::move(item));
                pos = f->span.last + 1;
            } else {
                SeqItem item;
                item.event = &model.events[static_cast<std::size_t>(pos)];
                item.pos = pos;
                items.push_back(std::move(item));
                pos++;
            }
        }
        return items;
    }
};

std::string describe(const StructNode& n) {
    switch (n.kind) {
        case StructKind::Act: return "action \"" + n.label + "\"";
        case StructKind::If: return "branch #" + std::to_string(n.number);
        case StructKind::While:
        case StructKind::DoWhile: return "loop #" + std::to_string(n.number);
        case StructKind::Par: return "parallel block at '" + n.origin_id + "'";
        default: return "sequence";
    }
}

std::string describe(const SeqItem& s) {
    if (!s.is_fragment()) return "message \"" + s.event->label + "\"";
    std::string head = to_keyword(s.fragment->kind);
    return head + " fragment #" + std::to_string(s.fragment->number);
}

std::string act_id(const StructNode& n) {
    return n.kind == StructKind::Act ? n.action_id : n.origin_id;
}

std::string seq_id(const SeqItem& s) {
    return s.is_fragment() ? s.fragment->id : s.event->id;
}

bool same_class(const StructNode& a, const SeqItem& s) {
    if (a.kind == StructKind::Act) return !s.is_fragment();
    if (!s.is_fragment()) return false;
    FragmentKind k = s.fragment->kind;
    switch (a.kind) {
        case StructKind::If: return k == FragmentKind::Alt || k == FragmentKind::Opt;
        case StructKind::While:
        case StructKind::DoWhile: return k == FragmentKind::Loop;
        case StructKind::Par: return k == FragmentKind::Par;
        default: return false;
    }
}

bool identity_matches(const StructNode& a, const SeqItem& s) {
    if (!same_class(a, s)) return false;
    if (a.kind == StructKind::Act) {
        return normalize_label(a.label) == normalize_label(s.event->label);
    }
    if (a.kind == StructKind::Par) return true;
    return a.number == s.fragment->number;
}

struct Comparer {
    ConsistencyReport report;

    void add(const std::string& rule, const std::string& locus, std::string message) {
        report.mismatches.push_back({rule, Severity::Error, locus, std::move(message)});
    }

    // Flattens one statement into the list of comparable elements at its
    // level: Seq contributes its children, Skip contributes nothing.
    static void flatten(const StructNode& n, std::vector<const StructNode*>& out) {
        if (n.kind == StructKind::Skip) return;
        if (n.kind == StructKind::Seq) {
            for (const StructNode& c : n.children) flatten(c, out);
            return;
        }
        out.push_back(&n);
    }

    static std::vector<const StructNode*> as_list(const StructNode& n) {
        std::vector<const StructNode*> out;
        flatten(n, out);
        return out;
    }

    static std::vector<const SeqItem*> item_ptrs(const std::vector<SeqItem>& items) {
        std::vector<const SeqItem*> out;
        out.reserve(items.size());
        for (const SeqItem& i : items) out.push_back(&i);
        return out;
    }

    void compare_pair(const StructNode& a, const SeqItem& s) {
        report.matched_pairs.emplace_back(act_id(a), seq_id(s));

        if (a.kind == StructKind::If || a.kind == StructKind::While ||
            a.kind == StructKind::DoWhile) {
            if (normalize_label(a.condition) != normalize_label(s.fragment->condition)) {
                add("C5-CONDITION", act_id(a),
                    describe(a) + " has condition \"" + a.condition + "\" but " +
                        describe(s) + " has \"" + s.fragment->condition + "\"");
            }
        }

        std::vector<std::vector<const StructNode*>> act_arms;
        std::vector<std::vector<const SeqItem*>> seq_arms;
        switch (a.kind) {
            case StructKind::Act:
                return;
            case StructKind::If: {
                for (const StructNode& arm : a.children) act_arms.push_back(as_list(arm));
                if (s.fragment->kind == FragmentKind::Opt) {
                    seq_arms.push_back(item_ptrs(s.children));
                } else {
                    for (const Span& op : s.fragment->operands) {
                        std::vector<const SeqItem*> arm;
                        for (const SeqItem& c : s.children) {
                            if (op.first <= c.pos && c.pos <= op.last) arm.push_back(&c);
                        }
                        seq_arms.push_back(std::move(arm));
                    }
                }
                if (act_arms.size() != seq_arms.size()) {
                    add("C4-KIND", act_id(a),
                        describe(a) + " has " + std::to_string(act_arms.size()) +
                            " arm(s) but " + describe(s) + " has " +
                            std::to_string(seq_arms.size()));
                    return;
                }
                break;
            }
            case StructKind::While:
            case StructKind::DoWhile:
                act_arms.push_back(as_list(a.children.front()));
                seq_arms.push_back(item_ptrs(s.children));
                break;
            case StructKind::Par: {
                // The par fragment has no operand boundaries, so the arms are
                // compared as one left-to-right sequence.
                std::vector<const StructNode*> flat;
                for (const StructNode& arm : a.children) flatten(arm, flat);
                act_arms.push_back(std::move(flat));
                seq_arms.push_back(item_ptrs(s.children));
                break;
            }
            default:
                return;
        }
        for (std::size_t k = 0; k < act_arms.size(); k++) {
            compare_lists(act_arms[k], seq_arms[k]);
        }
    }

    void compare_lists(const std::vector<const StructNode*>& acts,
                       const std::vector<const SeqItem*>& seqs) {
        std::size_t i = 0;
        std::size_t j = 0;
        while (i < acts.size() && j < seqs.size()) {
            const StructNode& a = *acts[i];
            const SeqItem& s = *seqs[j];
            if (identity_matches(a, s)) {
                compare_pair(a, s);
                i++;
                j++;
                continue;
            }
            bool a_later = false;
            for (std::size_t j2 = j + 1; j2 < seqs.size(); j2++) {
                if (identity_matches(a, *seqs[j2])) {
                    a_later = true;
                    break;
                }
            }
            bool s_later = false;
            for (std::size_t i2 = i + 1; i2 < acts.size(); i2++) {
                if (identity_matches(*acts[i2], s)) {
                    s_later = true;
                    break;
                }
            }
            if (a_later && s_later) {
                add("C3-ORDER", act_id(a),
                    describe(a) + " and " + describe(s) +
                        " appear in different orders in the two diagrams");
                i++;
                j++;
            } else if (a_later) {
                add("C2-EXTRA", seq_id(s),
                    "no activity element corresponds to " + describe(s));
                j++;
            } else if (s_later) {
                add("C1-MISSING", act_id(a),
                    "no sequence element corresponds to " + describe(a));
                i++;
            } else if (!same_class(a, s)) {
                add("C4-KIND", act_id(a),
                    describe(a) + " is paired with " + describe(s) +
                        " but their kinds disagree");
                i++;
                j++;
            } else if (a.kind != StructKind::Act) {
                add("C4-KIND", act_id(a),
                    describe(a) + " is paired with " + describe(s) +
                        " but their numbers disagree");
                i++;
                j++;
            } else {
                add("C1-MISSING", act_id(a),
                    "no sequence element corresponds to " + describe(a));
                add("C2-EXTRA", seq_id(s),
                    "no activity element corresponds to " + describe(s));
                i++;
                j++;
            }
        }
        for (; i < acts.size(); i++) {
            add("C1-MISSING", act_id(*acts[i]),
                "no sequence element corresponds to " + describe(*acts[i]));
        }
        for (; j < seqs.size(); j++) {
            add("C2-EXTRA", seq_id(*seqs[j]),
                "no activity element corresponds to " + describe(*seqs[j]));
        }
    }
};

}  // namespace

ConsistencyReport check_consistency(const ActivityGraph& activity,
                                    const SequenceModel& sequence) {
    if (!is_well_formed(activity)) {
        throw std::invalid_argument("check_consistency: activity diagram '" +
                                    activity.name + "' is not well-formed");
    }
    if (!check_nesting(sequence).empty()) {
        throw std::invalid_argument("check_consistency: sequence diagram '" +
                                    sequence.name + "' has fragment nesting errors");
    }

    ReduceResult reduced = reduce(activity);
    const ReductionTree& tree = std::get<ReductionTree>(reduced);

    ForestBuilder builder(sequence);
    std::vector<SeqItem> forest =
        builder.build(0, static_cast<int>(sequence.events.size()) - 1);

    Comparer cmp;
    cmp.compare_lists(Comparer::as_list(tree.root), Comparer::item_ptrs(forest));
    cmp.report.consistent = cmp.report.mismatches.empty();
    return cmp.report;
}

}  // namespace wellform
