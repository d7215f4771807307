#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "emopipe/metrics.hpp"
#include "test_support.hpp"

using namespace emopipe;
using metrics::AveragingMode;

namespace {

// Brute-force reference: recounts everything by scanning the raw vectors,
// sharing no code with the engine under test.
struct OracleReport {
    double accuracy = 0.0;
    double precision[6] = {};
    double recall[6] = {};
    double f1[6] = {};
    std::size_t support[6] = {};
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
};

OracleReport oracle(const std::vector<int>& gold, const std::vector<int>& pred,
                    AveragingMode mode) {
    OracleReport rep;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < gold.size(); ++i)
        if (gold[i] == pred[i]) ++correct;
    rep.accuracy = static_cast<double>(correct) / static_cast<double>(gold.size());

    int included = 0;
    for (int k = 0; k < 6; ++k) {
        std::size_t tp = 0, gold_k = 0, pred_k = 0;
        for (std::size_t i = 0; i < gold.size(); ++i) {
            if (gold[i] == k) ++gold_k;
            if (pred[i] == k) ++pred_k;
            if (gold[i] == k && pred[i] == k) ++tp;
        }
        rep.support[k] = gold_k;
        rep.precision[k] = pred_k == 0 ? 0.0 : static_cast<double>(tp) / pred_k;
        rep.recall[k] = gold_k == 0 ? 0.0 : static_cast<double>(tp) / gold_k;
        rep.f1[k] = (rep.precision[k] + rep.recall[k]) == 0.0
                        ? 0.0
                        : 2.0 * rep.precision[k] * rep.recall[k] /
                              (rep.precision[k] + rep.recall[k]);
        if (mode == AveragingMode::macro_present && gold_k == 0 && pred_k == 0) continue;
        rep.macro_precision += rep.precision[k];
        rep.macro_recall += rep.recall[k];
        rep.macro_f1 += rep.f1[k];
        ++included;
    }
    rep.macro_precision /= included;
    rep.macro_recall /= included;
    rep.macro_f1 /= included;
    return rep;
}

void compare(const metrics::MetricsReport& got, const OracleReport& want) {
    constexpr double kTol = 1e-9;
    CHECK_THAT(got.accuracy, Catch::Matchers::WithinAbs(want.accuracy, kTol));
    for (int k = 0; k < 6; ++k) {
        INFO("class " << k);
        CHECK_THAT(got.per_class[k].precision, Catch::Matchers::WithinAbs(want.precision[k], kTol));
        CHECK_THAT(got.per_class[k].recall, Catch::Matchers::WithinAbs(want.recall[k], kTol));
        CHECK_THAT(got.per_class[k].f1, Catch::Matchers::WithinAbs(want.f1[k], kTol));
        CHECK(got.support[k] == want.support[k]);
    }
    CHECK_THAT(got.macro_precision, Catch::Matchers::WithinAbs(want.macro_precision, kTol));
    CHECK_THAT(got.macro_recall, Catch::Matchers::WithinAbs(want.macro_recall, kTol));
    CHECK_THAT(got.macro_f1, Catch::Matchers::WithinAbs(want.macro_f1, kTol));
}

}  // namespace

TEST_CASE("report matches the brute-force oracle on random inputs", "[metrics][property]") {
    testsup::TestRng rng(11);
    for (int iter = 0; iter < 1000; ++iter) {
        const std::size_t n = 1 + rng.below(50);
        std::vector<int> gold(n), pred(n);
        // skew the class range sometimes so some classes are absent
        const int classes = 1 + static_cast<int>(rng.below(6));
        for (std::size_t i = 0; i < n; ++i) {
            gold[i] = static_cast<int>(rng.below(classes));
            pred[i] = static_cast<int>(rng.below(classes));
        }
        const AveragingMode mode =
            iter % 2 == 0 ? AveragingMode::macro_all : AveragingMode::macro_present;
        INFO("iteration " << iter << " n " << n << " classes " << classes);
        compare(metrics::report(gold, pred, mode), oracle(gold, pred, mode));
    }
}

TEST_CASE("worked three-sample example", "[metrics]") {
    // gold: joy joy anger; pred: joy joy joy
    const std::vector<int> gold = {3, 3, 0};
    const std::vector<int> pred = {3, 3, 3};

    const auto all = metrics::report(gold, pred, AveragingMode::macro_all);
    CHECK_THAT(all.accuracy, Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-12));
    CHECK_THAT(all.per_class[3].precision, Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-12));
    CHECK_THAT(all.per_class[3].recall, Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(all.per_class[3].f1, Catch::Matchers::WithinAbs(0.8, 1e-12));
    CHECK_THAT(all.macro_f1, Catch::Matchers::WithinAbs(0.8 / 6.0, 1e-12));

    const auto present = metrics::report(gold, pred, AveragingMode::macro_present);
    // present classes: joy (gold+pred) and anger (gold only)
    CHECK_THAT(present.macro_f1, Catch::Matchers::WithinAbs(0.4, 1e-12));
    CHECK_THAT(present.macro_recall, Catch::Matchers::WithinAbs(0.5, 1e-12));
}

TEST_CASE("perfect prediction scores one everywhere it counts", "[metrics]") {
    const std::vector<int> gold = {0, 1, 2, 3, 4, 5, 2, 2};
    const auto rep = metrics::report(gold, gold, AveragingMode::macro_all);
    CHECK(rep.accuracy == 1.0);
    CHECK(rep.macro_f1 == 1.0);
    for (int k = 0; k < 6; ++k) CHECK(rep.per_class[k].f1 == 1.0);
}

TEST_CASE("zero denominators produce zero, not NaN", "[metrics]") {
    // class 5 never appears; class 0 never predicted
    const std::vector<int> gold = {0, 0, 1};
    const std::vector<int> pred = {1, 1, 1};
    const auto rep = metrics::report(gold, pred, AveragingMode::macro_all);
    CHECK(rep.per_class[0].precision == 0.0);
    CHECK(rep.per_class[0].recall == 0.0);
    CHECK(rep.per_class[0].f1 == 0.0);
    CHECK(rep.per_class[5].precision == 0.0);
    CHECK(rep.accuracy == Catch::Approx(1.0 / 3.0));
    for (int k = 0; k < 6; ++k) {
        CHECK(rep.per_class[k].f1 == rep.per_class[k].f1);  // not NaN
    }
}

TEST_CASE("shuffling sample order never changes the report", "[metrics][property]") {
    testsup::TestRng rng(13);
    for (int iter = 0; iter < 50; ++iter) {
        const std::size_t n = 2 + rng.below(30);
        std::vector<int> gold(n), pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            gold[i] = static_cast<int>(rng.below(6));
            pred[i] = static_cast<int>(rng.below(6));
        }
        const auto before = metrics::report(gold, pred, AveragingMode::macro_all);

        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        std::vector<int> gold2(n), pred2(n);
        for (std::size_t i = 0; i < n; ++i) {
            gold2[i] = gold[order[i]];
            pred2[i] = pred[order[i]];
        }
        const auto after = metrics::report(gold2, pred2, AveragingMode::macro_all);

        CHECK(before.accuracy == after.accuracy);
        CHECK(before.macro_f1 == after.macro_f1);
        for (int k = 0; k < 6; ++k) {
            CHECK(before.per_class[k].precision == after.per_class[k].precision);
            CHECK(before.support[k] == after.support[k]);
        }
    }
}

TEST_CASE("relabeling classes permutes rows but keeps the macro average", "[metrics][property]") {
    testsup::TestRng rng(17);
    for (int iter = 0; iter < 50; ++iter) {
        const std::size_t n = 2 + rng.below(30);
        std::vector<int> gold(n), pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            gold[i] = static_cast<int>(rng.below(6));
            pred[i] = static_cast<int>(rng.below(6));
        }
        int perm[6] = {0, 1, 2, 3, 4, 5};
        for (std::size_t i = 6; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);

        std::vector<int> gold2(n), pred2(n);
        for (std::size_t i = 0; i < n; ++i) {
            gold2[i] = perm[gold[i]];
            pred2[i] = perm[pred[i]];
        }
        const auto a = metrics::report(gold, pred, AveragingMode::macro_all);
        const auto b = metrics::report(gold2, pred2, AveragingMode::macro_all);

        CHECK_THAT(a.macro_f1, Catch::Matchers::WithinAbs(b.macro_f1, 1e-12));
        CHECK_THAT(a.macro_precision, Catch::Matchers::WithinAbs(b.macro_precision, 1e-12));
        CHECK(a.accuracy == b.accuracy);
        for (int k = 0; k < 6; ++k) {
            CHECK(a.per_class[k].f1 == b.per_class[perm[k]].f1);
            CHECK(a.support[k] == b.support[perm[k]]);
        }
    }
}

TEST_CASE("confusion matrix puts gold in rows and predictions in columns", "[metrics]") {
    const std::vector<int> gold = {2, 2, 4};
    const std::vector<int> pred = {2, 4, 4};
    const auto cm = metrics::confusion_matrix(gold, pred);
    CHECK(cm.counts[2][2] == 1);
    CHECK(cm.counts[2][4] == 1);
    CHECK(cm.counts[4][4] == 1);
    CHECK(cm.total() == 3);
    CHECK(cm.trace() == 2);
}

TEST_CASE("contract violations are rejected", "[metrics]") {
    CHECK_THROWS_AS(metrics::report({}, {}, AveragingMode::macro_all), ContractError);
    CHECK_THROWS_AS(metrics::report({1, 2}, {1}, AveragingMode::macro_all), ContractError);
    CHECK_THROWS_AS(metrics::report({6}, {0}, AveragingMode::macro_all), ContractError);
    CHECK_THROWS_AS(metrics::report({0}, {-1}, AveragingMode::macro_all), ContractError);
}

TEST_CASE("renders are stable and carry the zero-division convention", "[metrics]") {
    const std::vector<int> gold = {3, 3, 0};
    const std::vector<int> pred = {3, 3, 3};
    const auto rep = metrics::report(gold, pred, AveragingMode::macro_all);

    const std::string text = metrics::render_report(rep);
    CHECK(text == metrics::render_report(rep));
    CHECK(text.find("zero_division=0") != std::string::npos);
    CHECK(text.find("joy") != std::string::npos);
    CHECK(text.find("macro_all") != std::string::npos);

    const std::string kv = metrics::render_report_kv(rep);
    CHECK(kv.find("accuracy=0.666666666667\n") != std::string::npos);
    CHECK(kv.find("joy.f1=0.800000000000\n") != std::string::npos);
    CHECK(kv.find("averaging_mode=macro_all\n") != std::string::npos);
    CHECK(kv.find("total=3\n") != std::string::npos);
}
