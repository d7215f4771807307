#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "emopipe/corpus.hpp"
#include "emopipe/encode.hpp"
#include "emopipe/labelspace.hpp"
#include "emopipe/textnorm.hpp"
#include "emopipe/trainer.hpp"

namespace emopipe {

/// One model decision: raw class scores plus their argmax. Scores are the
/// head outputs, unnormalized; argmax ties resolve to the lowest ordinal.
struct Prediction {
    std::string sample_id;
    Emotion emotion = Emotion::anger;
    ScoreVector scores{};
};

/// Normalized score view for display. Never used for the decision itself;
/// softmax cannot change the argmax.
inline ScoreVector softmax_view(const ScoreVector& scores) {
    double max = scores[0];
    for (double v : scores) max = std::max(max, v);
    ScoreVector out{};
    double sum = 0.0;
    for (std::size_t k = 0; k < kNumEmotions; ++k) {
        out[k] = std::exp(scores[k] - max);
        sum += out[k];
    }
    for (double& v : out) v /= sum;
    return out;
}

/// Classifies a single raw text with exactly the training-time
/// preprocessing: normalize, encode, forward, argmax.
inline Prediction predict_one(const std::string& raw_text, ClassifierBackend& backend,
                              const TokenizerBackend& tokenizer, std::int32_t budget,
                              std::string sample_id = "") {
    const FeatureRecord record = encode_text(normalize_text(raw_text), tokenizer, budget);
    const std::vector<const FeatureRecord*> batch{&record};
    const ScoreVector scores = backend.forward(batch).at(0);

    Prediction pred;
    pred.sample_id = std::move(sample_id);
    pred.scores = scores;
    pred.emotion = static_cast<Emotion>(argmax_score(scores));
    return pred;
}

/// Classifies every sample of a split in order. Labels, when present, are
/// ignored. Batching is a throughput detail; results match the
/// one-at-a-time path exactly.
inline std::vector<Prediction> predict_batch(const Dataset& dataset, ClassifierBackend& backend,
                                             const TokenizerBackend& tokenizer,
                                             std::int32_t budget, int batch_size = 8) {
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");

    std::vector<FeatureRecord> records;
    records.reserve(dataset.size());
    for (const Sample& s : dataset.samples)
        records.push_back(encode_text(normalize_text(s.text), tokenizer, budget));

    std::vector<Prediction> predictions;
    predictions.reserve(dataset.size());
    const auto stride = static_cast<std::size_t>(batch_size);
    for (std::size_t begin = 0; begin < records.size(); begin += stride) {
        const std::size_t end = std::min(begin + stride, records.size());
        std::vector<const FeatureRecord*> batch;
        batch.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i) batch.push_back(&records[i]);
        const std::vector<ScoreVector> scores = backend.forward(batch);
        for (std::size_t i = begin; i < end; ++i) {
            Prediction pred;
            pred.sample_id = dataset.samples[i].id;
            pred.scores = scores[i - begin];
            pred.emotion = static_cast<Emotion>(argmax_score(pred.scores));
            predictions.push_back(std::move(pred));
        }
    }
    return predictions;
}

/// Builds the shared-task submission CSV: one row per sample in dataset
/// order, predicted emotion expanded to a one-hot row. Ids must align
/// position by position.
inline std::string format_submission(const std::vector<Prediction>& predictions,
                                     const Dataset& dataset, bool include_text = true) {
    if (predictions.size() != dataset.size())
        throw ContractError("write_submission: " + std::to_string(predictions.size()) +
                            " predictions for " + std::to_string(dataset.size()) + " samples");
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i].sample_id != dataset.samples[i].id)
            throw ContractError("write_submission: id mismatch at row " + std::to_string(i) +
                                ": prediction '" + predictions[i].sample_id + "' vs dataset '" +
                                dataset.samples[i].id + "'");
    }

    Dataset out;
    out.split_name = dataset.split_name;
    out.labeled = true;
    out.samples.reserve(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        Sample s = dataset.samples[i];
        s.labels = to_one_hot(predictions[i].emotion);
        out.samples.push_back(std::move(s));
    }
    return to_csv(out, include_text);
}

inline void write_submission(const std::vector<Prediction>& predictions, const Dataset& dataset,
                             const std::string& path, bool include_text = true) {
    detail::write_file_bytes(path, format_submission(predictions, dataset, include_text));
}

}  // namespace emopipe
