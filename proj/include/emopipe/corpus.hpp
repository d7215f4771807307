#pragma once

#include <array>
#include <cstddef>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emopipe/detail/csv.hpp"
#include "emopipe/detail/utf8.hpp"
#include "emopipe/error.hpp"
#include "emopipe/labels.hpp"

namespace emopipe {

/// One dataset row: opaque id, raw text, and (for labeled splits) the
/// multi-hot emotion row. Text is stored verbatim as loaded; normalization
/// is a separate, explicit step.
struct Sample {
    std::string id;
    std::string text;
    std::optional<LabelVector> labels;

    bool operator==(const Sample&) const = default;
};

/// An ordered split. Either every sample carries labels or none does.
/// Immutable after load by convention; all operations below copy.
struct Dataset {
    std::string split_name;
    std::vector<Sample> samples;
    bool labeled = false;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }

    bool operator==(const Dataset&) const = default;
};

/// Per-class counts over a labeled split. Multi-hot rows count once per
/// active emotion, so per-emotion counts can sum past the row count.
struct DistributionStats {
    std::array<std::size_t, kNumEmotions> per_emotion_count{};
    std::size_t multi_label_count = 0;
    std::size_t neutral_count = 0;
    std::size_t total = 0;
};

/// Data-quality findings. Reporting only; the dataset is never mutated.
struct ValidationReport {
    std::vector<std::string> empty_text_ids;
    std::vector<std::string> neutral_ids;
    /// Groups of ids sharing an identical text, in first-occurrence order.
    std::vector<std::vector<std::string>> duplicate_text_groups;

    std::size_t empty_text_count() const { return empty_text_ids.size(); }
    std::size_t neutral_count() const { return neutral_ids.size(); }
    std::size_t duplicate_group_count() const { return duplicate_text_groups.size(); }
};

namespace detail {

inline std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c += 0x20;
    }
    return out;
}

inline std::string trim_ascii(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
    return std::string(s.substr(b, e - b));
}

}  // namespace detail

/// Loads one split from a CSV file in the task schema
/// (`id,text[,anger,disgust,fear,joy,sadness,surprise]`).
///
/// Column names match case-insensitively; the six emotion columns must appear
/// in canonical order when `labeled`. Unknown columns are skipped, with a note
/// appended to `warnings` when given. Row order is preserved verbatim.
inline Dataset load_split(const std::string& path, bool labeled,
                          std::vector<std::string>* warnings = nullptr,
                          std::string split_name = "") {
    auto reader = detail::CsvReader::from_file(path);

    if (!detail::is_valid_utf8(reader.content()))
        throw ValueError(path + ": file is not valid UTF-8");

    std::vector<std::string> header;
    if (!reader.next_record(header) || (header.size() == 1 && header[0].empty()))
        throw SchemaError(path + ": missing header row");

    // Resolve columns by (lowercased, trimmed) name.
    std::map<std::string, std::size_t> column_index;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string name = detail::ascii_lower(detail::trim_ascii(header[i]));
        if (column_index.count(name))
            throw SchemaError(path + ": duplicate column '" + name + "'");
        column_index[name] = i;
    }

    const auto require = [&](const std::string& name) {
        auto it = column_index.find(name);
        if (it == column_index.end())
            throw SchemaError(path + ": missing required column '" + name + "'");
        return it->second;
    };

    const std::size_t id_col = require("id");
    const std::size_t text_col = require("text");

    std::array<std::size_t, kNumEmotions> emotion_col{};
    if (labeled) {
        for (std::size_t k = 0; k < kNumEmotions; ++k) {
            auto it = column_index.find(std::string(kEmotionNames[k]));
            if (it == column_index.end())
                throw SchemaError(path + ": missing emotion column '" +
                                  std::string(kEmotionNames[k]) + "'");
            emotion_col[k] = it->second;
            if (k > 0 && emotion_col[k] <= emotion_col[k - 1])
                throw SchemaError(path + ": emotion column '" + std::string(kEmotionNames[k]) +
                                  "' out of canonical order");
        }
    }

    if (warnings) {
        for (const auto& [name, idx] : column_index) {
            if (idx == id_col || idx == text_col) continue;
            bool known = false;
            if (labeled) {
                for (std::size_t k = 0; k < kNumEmotions; ++k) {
                    if (emotion_col[k] == idx) known = true;
                }
            }
            if (!known) warnings->push_back(path + ": ignoring column '" + name + "'");
        }
    }

    Dataset dataset;
    dataset.split_name = std::move(split_name);
    dataset.labeled = labeled;

    std::map<std::string, std::size_t> seen_ids;
    std::vector<std::string> row;
    while (reader.next_record(row)) {
        if (row.size() == 1 && row[0].empty()) continue;  // trailing blank line
        if (row.size() != header.size())
            throw ValueError(path + ": record " + std::to_string(reader.record_number()) +
                             " has " + std::to_string(row.size()) + " fields, expected " +
                             std::to_string(header.size()));

        Sample sample;
        sample.id = row[id_col];
        sample.text = row[text_col];

        if (seen_ids.count(sample.id))
            throw UniquenessError(path + ": duplicate id '" + sample.id + "'");
        seen_ids[sample.id] = dataset.samples.size();

        if (labeled) {
            LabelVector labels;
            for (std::size_t k = 0; k < kNumEmotions; ++k) {
                const std::string cell = detail::trim_ascii(row[emotion_col[k]]);
                if (cell == "1") {
                    labels.set(static_cast<Emotion>(k));
                } else if (cell != "0") {
                    throw ValueError(path + ": non-binary value '" + cell + "' in column '" +
                                     std::string(kEmotionNames[k]) + "' at row id '" + sample.id +
                                     "'");
                }
            }
            sample.labels = labels;
        }
        dataset.samples.push_back(std::move(sample));
    }
    return dataset;
}

/// Serializes a dataset back to the task CSV schema (UTF-8, LF endings).
/// Reloading the result yields a field-identical Dataset.
inline std::string to_csv(const Dataset& dataset, bool include_text = true) {
    std::string out = include_text ? "id,text" : "id";
    if (dataset.labeled) {
        for (std::size_t k = 0; k < kNumEmotions; ++k) {
            out.push_back(',');
            out.append(kEmotionNames[k]);
        }
    }
    out.push_back('\n');
    for (const Sample& s : dataset.samples) {
        detail::append_csv_field(out, s.id);
        if (include_text) {
            out.push_back(',');
            detail::append_csv_field(out, s.text);
        }
        if (dataset.labeled) {
            out.push_back(',');
            out.append(s.labels.value().to_csv_cells());
        }
        out.push_back('\n');
    }
    return out;
}

inline void save_split(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    out << to_csv(dataset);
    if (!out) throw IoError("write failed: " + path);
}

/// Scans a dataset for empty texts, neutral rows, and duplicate texts.
inline ValidationReport validate(const Dataset& dataset) {
    ValidationReport report;
    std::map<std::string, std::vector<std::string>> by_text;
    for (const Sample& s : dataset.samples) {
        if (s.text.empty()) report.empty_text_ids.push_back(s.id);
        if (s.labels && s.labels->none()) report.neutral_ids.push_back(s.id);
        by_text[s.text].push_back(s.id);
    }
    // Emit duplicate groups in order of first occurrence.
    std::map<std::string, bool> reported;
    for (const Sample& s : dataset.samples) {
        auto& ids = by_text[s.text];
        if (ids.size() > 1 && !reported[s.text]) {
            report.duplicate_text_groups.push_back(ids);
            reported[s.text] = true;
        }
    }
    return report;
}

/// Per-emotion counts for a labeled split.
inline DistributionStats class_distribution(const Dataset& dataset) {
    if (!dataset.labeled)
        throw ContractError("class_distribution requires a labeled dataset");
    DistributionStats stats;
    stats.total = dataset.samples.size();
    for (const Sample& s : dataset.samples) {
        const LabelVector& labels = s.labels.value();
        const std::size_t active = labels.count();
        if (active == 0) ++stats.neutral_count;
        if (active >= 2) ++stats.multi_label_count;
        for (std::size_t k = 0; k < kNumEmotions; ++k) {
            if (labels.test(k)) ++stats.per_emotion_count[k];
        }
    }
    return stats;
}

/// Plain-text frequency table of a split's emotion distribution.
inline std::string format_distribution(const DistributionStats& stats,
                                       std::string_view title = "emotion distribution") {
    std::string out;
    out.append(title).append("\n");
    char line[96];
    for (std::size_t k = 0; k < kNumEmotions; ++k) {
        std::snprintf(line, sizeof(line), "  %-11s %8zu\n",
                      std::string(kEmotionNames[k]).c_str(), stats.per_emotion_count[k]);
        out.append(line);
    }
    std::snprintf(line, sizeof(line), "  %-11s %8zu\n", "multi-label", stats.multi_label_count);
    out.append(line);
    std::snprintf(line, sizeof(line), "  %-11s %8zu\n", "neutral", stats.neutral_count);
    out.append(line);
    std::snprintf(line, sizeof(line), "  %-11s %8zu\n", "total", stats.total);
    out.append(line);
    return out;
}

}  // namespace emopipe
