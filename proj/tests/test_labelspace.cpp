#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "emopipe/labelspace.hpp"
#include "test_support.hpp"

using namespace emopipe;

TEST_CASE("one-hot expansion and reduction invert each other", "[labelspace]") {
    for (int k = 0; k < 6; ++k) {
        const Emotion e = emotion_from_ordinal(k);
        const LabelVector hot = to_one_hot(e);
        CHECK(hot.count() == 1);
        CHECK(hot.test(e));
        CHECK(to_dominant(hot) == e);
    }
}

TEST_CASE("dominant label is the lowest set ordinal, exhaustively", "[labelspace]") {
    for (unsigned mask = 1; mask < 64; ++mask) {
        LabelVector v;
        int lowest = -1;
        for (int k = 0; k < 6; ++k) {
            if (mask & (1u << k)) {
                v.set(emotion_from_ordinal(k));
                if (lowest < 0) lowest = k;
            }
        }
        INFO("mask " << mask);
        CHECK(to_dominant(v) == emotion_from_ordinal(lowest));
    }
}

TEST_CASE("documented sample rows reduce as published", "[labelspace]") {
    CHECK(to_dominant(LabelVector::from_bits({0, 0, 0, 0, 0, 1})) == Emotion::surprise);
    // fear + sadness: fear has the lower ordinal
    CHECK(to_dominant(LabelVector::from_bits({0, 0, 1, 0, 1, 0})) == Emotion::fear);
}

TEST_CASE("all-zero vectors have no dominant label", "[labelspace]") {
    CHECK_THROWS_AS(to_dominant(LabelVector{}), NeutralInputError);
}

namespace {

Dataset labeled_dataset() {
    Dataset ds;
    ds.labeled = true;
    ds.samples.push_back({"a", "t1", LabelVector::from_bits({0, 0, 0, 0, 0, 1})});
    ds.samples.push_back({"b", "t2", LabelVector{}});
    ds.samples.push_back({"c", "t3", LabelVector::from_bits({0, 0, 1, 0, 1, 0})});
    ds.samples.push_back({"d", "t4", LabelVector{}});
    ds.samples.push_back({"e", "t5", LabelVector::from_bits({1, 1, 1, 0, 0, 0})});
    return ds;
}

}  // namespace

TEST_CASE("drop policy routes neutral rows aside and keeps order", "[labelspace]") {
    const ReduceResult result = reduce_dataset(labeled_dataset(), NeutralPolicy::drop);

    REQUIRE(result.reduced.size() == 3);
    CHECK(result.reduced[0].sample.id == "a");
    CHECK(result.reduced[0].label == Emotion::surprise);
    CHECK(result.reduced[1].sample.id == "c");
    CHECK(result.reduced[1].label == Emotion::fear);
    CHECK(result.reduced[2].sample.id == "e");
    CHECK(result.reduced[2].label == Emotion::anger);

    REQUIRE(result.dropped.size() == 2);
    CHECK(result.dropped[0].id == "b");
    CHECK(result.dropped[1].id == "d");
    CHECK(result.discarded_secondary_labels == 2);
}

TEST_CASE("error policy names every neutral row before aborting", "[labelspace]") {
    CHECK_THROWS_MATCHES(
        reduce_dataset(labeled_dataset(), NeutralPolicy::error), ValueError,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("'b'") &&
                                        Catch::Matchers::ContainsSubstring("'d'")));
}

TEST_CASE("reduction needs labels", "[labelspace]") {
    Dataset ds;
    ds.labeled = false;
    ds.samples.push_back({"a", "t", std::nullopt});
    CHECK_THROWS_AS(reduce_dataset(ds, NeutralPolicy::drop), ContractError);
}

TEST_CASE("a custom tie-break function is honored", "[labelspace]") {
    const TieBreakFn highest = [](const LabelVector& v) -> DominantLabel {
        for (int k = 5; k >= 0; --k)
            if (v.test(emotion_from_ordinal(k))) return emotion_from_ordinal(k);
        throw NeutralInputError("all zero");
    };
    Dataset ds;
    ds.labeled = true;
    ds.samples.push_back({"a", "t", LabelVector::from_bits({0, 0, 1, 0, 1, 0})});
    const ReduceResult result = reduce_dataset(ds, NeutralPolicy::drop, highest);
    CHECK(result.reduced[0].label == Emotion::sadness);
}

TEST_CASE("reduction manifest lists the policy and loss counters", "[labelspace]") {
    const ReduceResult result = reduce_dataset(labeled_dataset(), NeutralPolicy::drop);
    const std::string manifest = format_reduction_manifest(NeutralPolicy::drop, result);
    CHECK(manifest.find("tie_break=lowest_ordinal\n") != std::string::npos);
    CHECK(manifest.find("neutral_policy=drop\n") != std::string::npos);
    CHECK(manifest.find("discarded_secondary_labels=2\n") != std::string::npos);
    CHECK(manifest.find("dropped_neutral_rows=2\n") != std::string::npos);
}
