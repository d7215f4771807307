#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "emopipe/corpus.hpp"
#include "emopipe/error.hpp"
#include "emopipe/labels.hpp"

namespace emopipe {

/// The single class that stands in for a multi-hot row after reduction.
/// Always a real emotion; the all-zero case is an error, not a sentinel.
using DominantLabel = Emotion;

/// What to do with all-zero label rows during reduction. The six-way head
/// has no neutral class, so they either leave the training set or abort it.
enum class NeutralPolicy { drop, error };

inline constexpr std::string_view to_string(NeutralPolicy policy) {
    return policy == NeutralPolicy::drop ? "drop" : "error";
}

/// Raised by to_dominant when every flag is zero.
class NeutralInputError : public ValueError {
public:
    using ValueError::ValueError;
};

/// Tie-break rule for multi-hot rows. Kept as a named free function so an
/// alternative (e.g. rarity-weighted) rule can be swapped in at the two
/// call sites without touching the reduction machinery.
using TieBreakFn = DominantLabel (*)(const LabelVector&);

/// Canonical rule: the set bit with the lowest ordinal wins.
inline DominantLabel lowest_ordinal_label(const LabelVector& labels) {
    for (std::size_t k = 0; k < kNumEmotions; ++k) {
        if (labels.test(k)) return static_cast<Emotion>(k);
    }
    throw NeutralInputError("to_dominant: all-zero label vector has no dominant emotion");
}

/// Reduces a multi-hot row to its dominant emotion.
inline DominantLabel to_dominant(const LabelVector& labels) {
    return lowest_ordinal_label(labels);
}

/// Expands a class back to a one-hot row (population count exactly 1).
inline LabelVector to_one_hot(DominantLabel label) {
    LabelVector v;
    v.set(label);
    return v;
}

struct ReducedSample {
    Sample sample;
    DominantLabel label;
};

struct ReduceResult {
    std::vector<ReducedSample> reduced;
    std::vector<Sample> dropped;
    /// Rows with >= 2 active labels, i.e. rows whose secondary labels the
    /// reduction discarded. Logged so the information loss is visible.
    std::size_t discarded_secondary_labels = 0;
};

/// Maps every labeled sample to (sample, dominant label), preserving order.
/// Neutral rows are routed by `policy`: dropped into `result.dropped`, or the
/// whole reduction aborts naming every offending id.
inline ReduceResult reduce_dataset(const Dataset& dataset, NeutralPolicy policy,
                                   TieBreakFn tie_break = &lowest_ordinal_label) {
    if (!dataset.labeled) throw ContractError("reduce_dataset requires a labeled dataset");

    if (policy == NeutralPolicy::error) {
        std::string offenders;
        for (const Sample& s : dataset.samples) {
            if (s.labels->none()) {
                if (!offenders.empty()) offenders += ", ";
                offenders += "'" + s.id + "'";
            }
        }
        if (!offenders.empty())
            throw ValueError("neutral rows present under neutral_policy=error: " + offenders);
    }

    ReduceResult result;
    for (const Sample& s : dataset.samples) {
        if (s.labels->none()) {
            result.dropped.push_back(s);
            continue;
        }
        if (s.labels->count() >= 2) ++result.discarded_secondary_labels;
        result.reduced.push_back(ReducedSample{s, tie_break(*s.labels)});
    }
    return result;
}

/// Key/value record of the reduction for the run manifest.
inline std::string format_reduction_manifest(NeutralPolicy policy, const ReduceResult& result) {
    std::string out;
    out += "tie_break=lowest_ordinal\n";
    out += "neutral_policy=" + std::string(to_string(policy)) + "\n";
    out += "discarded_secondary_labels=" + std::to_string(result.discarded_secondary_labels) + "\n";
    out += "dropped_neutral_rows=" + std::to_string(result.dropped.size()) + "\n";
    return out;
}

}  // namespace emopipe
