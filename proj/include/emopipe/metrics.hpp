#pragma once

#include <array>
#include <cstdio>
#include <string>
#include <vector>

#include "emopipe/error.hpp"
#include "emopipe/labels.hpp"

namespace emopipe::metrics {

/// Which classes enter the macro averages: all six, or only classes that
/// occur in gold or predictions.
enum class AveragingMode { macro_all, macro_present };

inline constexpr std::string_view to_string(AveragingMode mode) {
    return mode == AveragingMode::macro_all ? "macro_all" : "macro_present";
}

/// Rows are gold classes, columns are predicted classes.
struct ConfusionMatrix {
    std::array<std::array<std::size_t, kNumEmotions>, kNumEmotions> counts{};

    std::size_t total() const {
        std::size_t n = 0;
        for (const auto& row : counts)
            for (std::size_t c : row) n += c;
        return n;
    }

    std::size_t trace() const {
        std::size_t n = 0;
        for (std::size_t k = 0; k < kNumEmotions; ++k) n += counts[k][k];
        return n;
    }
};

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct MetricsReport {
    double accuracy = 0.0;
    std::array<ClassMetrics, kNumEmotions> per_class{};
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    std::array<std::size_t, kNumEmotions> support{};
    std::size_t total = 0;
    AveragingMode averaging_mode = AveragingMode::macro_all;
};

namespace detail {

inline void check_inputs(const std::vector<int>& gold, const std::vector<int>& pred) {
    if (gold.size() != pred.size())
        throw ContractError("metrics: gold and pred lengths differ (" +
                            std::to_string(gold.size()) + " vs " + std::to_string(pred.size()) +
                            ")");
    for (int g : gold) {
        if (g < 0 || g >= static_cast<int>(kNumEmotions))
            throw ContractError("metrics: gold ordinal out of range: " + std::to_string(g));
    }
    for (int p : pred) {
        if (p < 0 || p >= static_cast<int>(kNumEmotions))
            throw ContractError("metrics: pred ordinal out of range: " + std::to_string(p));
    }
}

inline double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace detail

inline ConfusionMatrix confusion_matrix(const std::vector<int>& gold,
                                        const std::vector<int>& pred) {
    detail::check_inputs(gold, pred);
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < gold.size(); ++i)
        ++cm.counts[static_cast<std::size_t>(gold[i])][static_cast<std::size_t>(pred[i])];
    return cm;
}

/// Accuracy, per-class precision/recall/F1, and macro averages. Zero
/// denominators yield 0, never NaN, so the macro averages stay total.
inline MetricsReport report(const std::vector<int>& gold, const std::vector<int>& pred,
                            AveragingMode mode) {
    if (gold.empty()) throw ContractError("metrics: empty inputs");
    const ConfusionMatrix cm = confusion_matrix(gold, pred);

    MetricsReport rep;
    rep.averaging_mode = mode;
    rep.total = cm.total();
    rep.accuracy = detail::ratio(cm.trace(), rep.total);

    std::array<bool, kNumEmotions> present{};
    for (std::size_t k = 0; k < kNumEmotions; ++k) {
        std::size_t tp = cm.counts[k][k];
        std::size_t fp = 0, fn = 0;
        for (std::size_t j = 0; j < kNumEmotions; ++j) {
            if (j == k) continue;
            fp += cm.counts[j][k];
            fn += cm.counts[k][j];
        }
        rep.support[k] = tp + fn;
        present[k] = (tp + fn + fp) > 0;

        ClassMetrics& m = rep.per_class[k];
        m.precision = detail::ratio(tp, tp + fp);
        m.recall = detail::ratio(tp, tp + fn);
        const double pr = m.precision + m.recall;
        m.f1 = pr == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / pr;
    }

    std::size_t included = 0;
    for (std::size_t k = 0; k < kNumEmotions; ++k) {
        if (mode == AveragingMode::macro_present && !present[k]) continue;
        rep.macro_precision += rep.per_class[k].precision;
        rep.macro_recall += rep.per_class[k].recall;
        rep.macro_f1 += rep.per_class[k].f1;
        ++included;
    }
    if (included > 0) {
        rep.macro_precision /= static_cast<double>(included);
        rep.macro_recall /= static_cast<double>(included);
        rep.macro_f1 /= static_cast<double>(included);
    }
    return rep;
}

/// Fixed-width table: one row per class, the macro row, then accuracy.
/// Pure function of the report; two renders are byte-identical.
inline std::string render_report(const MetricsReport& rep) {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-14s %9s %9s %9s %9s\n", "class", "precision", "recall",
                  "f1", "support");
    out.append(line);
    for (std::size_t k = 0; k < kNumEmotions; ++k) {
        const ClassMetrics& m = rep.per_class[k];
        std::snprintf(line, sizeof(line), "%-14s %9.4f %9.4f %9.4f %9zu\n",
                      std::string(kEmotionNames[k]).c_str(), m.precision, m.recall, m.f1,
                      rep.support[k]);
        out.append(line);
    }
    std::snprintf(line, sizeof(line), "%-14s %9.4f %9.4f %9.4f %9zu\n",
                  std::string(to_string(rep.averaging_mode)).c_str(), rep.macro_precision,
                  rep.macro_recall, rep.macro_f1, rep.total);
    out.append(line);
    std::snprintf(line, sizeof(line), "%-14s %9.4f %19s %9zu\n", "accuracy", rep.accuracy, "",
                  rep.total);
    out.append(line);
    out.append("zero_division=0\n");
    return out;
}

/// Flat key/value record, one metric per line, for machine diffing.
inline std::string render_report_kv(const MetricsReport& rep) {
    std::string out;
    char line[128];
    out += "averaging_mode=" + std::string(to_string(rep.averaging_mode)) + "\n";
    out += "zero_division=0\n";
    std::snprintf(line, sizeof(line), "accuracy=%.12f\n", rep.accuracy);
    out.append(line);
    for (std::size_t k = 0; k < kNumEmotions; ++k) {
        const std::string name(kEmotionNames[k]);
        const ClassMetrics& m = rep.per_class[k];
        std::snprintf(line, sizeof(line), "%s.precision=%.12f\n", name.c_str(), m.precision);
        out.append(line);
        std::snprintf(line, sizeof(line), "%s.recall=%.12f\n", name.c_str(), m.recall);
        out.append(line);
        std::snprintf(line, sizeof(line), "%s.f1=%.12f\n", name.c_str(), m.f1);
        out.append(line);
        std::snprintf(line, sizeof(line), "%s.support=%zu\n", name.c_str(), rep.support[k]);
        out.append(line);
    }
    std::snprintf(line, sizeof(line), "macro.precision=%.12f\n", rep.macro_precision);
    out.append(line);
    std::snprintf(line, sizeof(line), "macro.recall=%.12f\n", rep.macro_recall);
    out.append(line);
    std::snprintf(line, sizeof(line), "macro.f1=%.12f\n", rep.macro_f1);
    out.append(line);
    std::snprintf(line, sizeof(line), "total=%zu\n", rep.total);
    out.append(line);
    return out;
}

}  // namespace emopipe::metrics
