#include <catch2/catch_amalgamated.hpp>

#include "emopipe/labels.hpp"

using namespace emopipe;

TEST_CASE("emotion ordinals follow the task column order", "[labels]") {
    CHECK(static_cast<int>(Emotion::anger) == 0);
    CHECK(static_cast<int>(Emotion::disgust) == 1);
    CHECK(static_cast<int>(Emotion::fear) == 2);
    CHECK(static_cast<int>(Emotion::joy) == 3);
    CHECK(static_cast<int>(Emotion::sadness) == 4);
    CHECK(static_cast<int>(Emotion::surprise) == 5);
}

TEST_CASE("emotion names round-trip through ordinal and name lookups", "[labels]") {
    for (int i = 0; i < 6; ++i) {
        const Emotion e = emotion_from_ordinal(i);
        CHECK(emotion_from_name(to_string(e)) == e);
    }
    CHECK_THROWS_AS(emotion_from_ordinal(6), std::out_of_range);
    CHECK_THROWS_AS(emotion_from_ordinal(-1), std::out_of_range);
    CHECK_FALSE(emotion_from_name("happiness").has_value());
}

TEST_CASE("LabelVector validates its bits", "[labels]") {
    const LabelVector v = LabelVector::from_bits({0, 0, 1, 0, 1, 0});
    CHECK(v.test(Emotion::fear));
    CHECK(v.test(Emotion::sadness));
    CHECK_FALSE(v.test(Emotion::anger));
    CHECK(v.count() == 2);
    CHECK(v.any());
    CHECK_FALSE(v.none());
    CHECK(v.to_csv_cells() == "0,0,1,0,1,0");

    CHECK_THROWS_AS(LabelVector::from_bits({0, 1, 2, 0, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(LabelVector::from_bits({1, 0, 0}), std::invalid_argument);
}

TEST_CASE("default LabelVector is neutral", "[labels]") {
    const LabelVector v;
    CHECK(v.none());
    CHECK(v.count() == 0);
    CHECK(v.to_csv_cells() == "0,0,0,0,0,0");
}
