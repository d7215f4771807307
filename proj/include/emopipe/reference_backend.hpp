#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "emopipe/detail/binio.hpp"
#include "emopipe/detail/rng.hpp"
#include "emopipe/trainer.hpp"

namespace emopipe {

/// Tiny deterministic classifier: mean of token embeddings over the
/// attention mask, then a linear head to six scores. Optimized with
/// decoupled-weight-decay Adam (0.9/0.999 moments, weight decay 0.01) and
/// global gradient-norm clipping at 1.0. All arithmetic is double precision
/// on a fixed path, so runs are bit-reproducible; reduced-precision mode
/// rounds activations through float.
class EmbeddingAverageClassifier final : public ClassifierBackend {
public:
    static constexpr std::string_view kKind = "embedding-avg/v1";
    static constexpr int kDefaultEmbedDim = 32;

    EmbeddingAverageClassifier(std::int32_t vocab_size, int embed_dim, std::uint64_t seed)
        : vocab_(vocab_size), dim_(embed_dim) {
        if (vocab_ < 1 || dim_ < 1)
            throw ConfigError("classifier needs positive vocab size and embedding dim");
        const std::size_t v = static_cast<std::size_t>(vocab_);
        const std::size_t d = static_cast<std::size_t>(dim_);
        embeddings_.assign(v * d, 0.0);
        head_weight_.assign(kNumEmotions * d, 0.0);
        head_bias_.assign(kNumEmotions, 0.0);

        detail::RandomStream init(seed, /*stream_id=*/0x9d5c);
        const double embed_range = 0.1;
        for (double& w : embeddings_) w = init.next_symmetric(embed_range);
        const double head_range = 1.0 / std::sqrt(static_cast<double>(dim_));
        for (double& w : head_weight_) w = init.next_symmetric(head_range);

        opt_m_.assign(param_count(), 0.0);
        opt_v_.assign(param_count(), 0.0);
    }

    /// Replaces the embedding table with an externally supplied matrix
    /// (vocab rows x dim columns, row-major).
    void load_embeddings(const std::vector<double>& matrix) {
        if (matrix.size() != embeddings_.size())
            throw ConfigError("embedding matrix size mismatch: got " +
                              std::to_string(matrix.size()) + " values, expected " +
                              std::to_string(embeddings_.size()));
        embeddings_ = matrix;
    }

    std::int32_t vocab_size() const { return vocab_; }
    int embed_dim() const { return dim_; }

    std::vector<ScoreVector> forward(const std::vector<const FeatureRecord*>& batch) override {
        std::vector<ScoreVector> scores;
        scores.reserve(batch.size());
        std::vector<double> pooled(static_cast<std::size_t>(dim_));
        for (const FeatureRecord* rec : batch) {
            pool(*rec, pooled);
            scores.push_back(head(pooled));
        }
        return scores;
    }

    double loss(const std::vector<ScoreVector>& scores,
                const std::vector<int>& labels) const override {
        if (scores.size() != labels.size())
            throw ContractError("loss: scores/labels length mismatch");
        if (scores.empty()) throw ContractError("loss: empty batch");
        double sum = 0.0;
        for (std::size_t i = 0; i < scores.size(); ++i)
            sum += cross_entropy(scores[i], labels[i]);
        return sum / static_cast<double>(scores.size());
    }

    double apply_update(const std::vector<const FeatureRecord*>& batch, double lr) override {
        if (batch.empty()) throw ContractError("apply_update: empty batch");
        const std::size_t d = static_cast<std::size_t>(dim_);
        const double inv_batch = 1.0 / static_cast<double>(batch.size());

        std::vector<double> grad(param_count(), 0.0);
        std::vector<double> pooled(d);
        double loss_sum = 0.0;

        for (const FeatureRecord* rec : batch) {
            if (!rec->label)
                throw ContractError("apply_update: unlabeled record in training batch");
            const int gold = static_cast<int>(*rec->label);
            const std::size_t real = pool(*rec, pooled);
            const ScoreVector s = head(pooled);
            loss_sum += cross_entropy(s, gold);

            // d(loss)/d(score) = softmax - one_hot, averaged over the batch.
            ScoreVector gs = softmax(s);
            gs[static_cast<std::size_t>(gold)] -= 1.0;
            for (double& g : gs) g *= inv_batch;

            for (std::size_t k = 0; k < kNumEmotions; ++k) {
                grad[bias_offset() + k] += gs[k];
                for (std::size_t j = 0; j < d; ++j)
                    grad[head_offset() + k * d + j] += gs[k] * pooled[j];
            }
            if (real > 0) {
                // d(loss)/d(pooled), shared by every real token of the record.
                std::vector<double> gh(d, 0.0);
                for (std::size_t k = 0; k < kNumEmotions; ++k) {
                    for (std::size_t j = 0; j < d; ++j)
                        gh[j] += head_weight_[k * d + j] * gs[k];
                }
                const double inv_real = 1.0 / static_cast<double>(real);
                for (std::size_t i = 0; i < rec->token_ids.size(); ++i) {
                    if (!rec->attention_mask[i]) continue;
                    const auto row = static_cast<std::size_t>(rec->token_ids[i]) * d;
                    for (std::size_t j = 0; j < d; ++j) grad[row + j] += gh[j] * inv_real;
                }
            }
        }

        clip_by_global_norm(grad, 1.0);
        adamw_step(grad, lr);
        return loss_sum * inv_batch;
    }

    std::string snapshot() const override {
        std::string out;
        out.append(kSnapshotMagic);
        detail::put_i32(out, vocab_);
        detail::put_i32(out, dim_);
        detail::put_u64(out, opt_step_);
        for (double w : embeddings_) detail::put_f64(out, w);
        for (double w : head_weight_) detail::put_f64(out, w);
        for (double w : head_bias_) detail::put_f64(out, w);
        for (double w : opt_m_) detail::put_f64(out, w);
        for (double w : opt_v_) detail::put_f64(out, w);
        return out;
    }

    void restore(std::string_view blob) override {
        if (blob.substr(0, kSnapshotMagic.size()) != kSnapshotMagic)
            throw IoError("snapshot does not match backend '" + std::string(kKind) +
                          "' (bad magic)");
        detail::ByteParser p(blob.substr(kSnapshotMagic.size()), "snapshot");
        const std::int32_t vocab = p.i32();
        const std::int32_t dim = p.i32();
        if (vocab != vocab_ || dim != dim_)
            throw IoError("snapshot shape (vocab=" + std::to_string(vocab) +
                          ", dim=" + std::to_string(dim) + ") does not match backend (vocab=" +
                          std::to_string(vocab_) + ", dim=" + std::to_string(dim_) + ")");
        opt_step_ = p.u64();
        for (double& w : embeddings_) w = p.f64();
        for (double& w : head_weight_) w = p.f64();
        for (double& w : head_bias_) w = p.f64();
        for (double& w : opt_m_) w = p.f64();
        for (double& w : opt_v_) w = p.f64();
        p.expect_end();
    }

    void set_reduced_precision(bool on) override { reduced_precision_ = on; }

    std::string kind() const override { return std::string(kKind); }

private:
    static constexpr std::string_view kSnapshotMagic = "EMBAVG01";
    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEpsilon = 1e-8;
    static constexpr double kWeightDecay = 0.01;

    std::size_t embed_count() const {
        return static_cast<std::size_t>(vocab_) * static_cast<std::size_t>(dim_);
    }
    std::size_t head_offset() const { return embed_count(); }
    std::size_t bias_offset() const {
        return embed_count() + kNumEmotions * static_cast<std::size_t>(dim_);
    }
    std::size_t param_count() const { return bias_offset() + kNumEmotions; }

    double& param_at(std::size_t i) {
        if (i < head_offset()) return embeddings_[i];
        if (i < bias_offset()) return head_weight_[i - head_offset()];
        return head_bias_[i - bias_offset()];
    }

    /// Mean embedding over mask=1 positions; returns the real-token count.
    std::size_t pool(const FeatureRecord& rec, std::vector<double>& out) {
        const std::size_t d = static_cast<std::size_t>(dim_);
        std::fill(out.begin(), out.end(), 0.0);
        std::size_t real = 0;
        for (std::size_t i = 0; i < rec.token_ids.size(); ++i) {
            if (!rec.attention_mask[i]) continue;
            const std::int32_t id = rec.token_ids[i];
            if (id < 0 || id >= vocab_)
                throw ContractError("token id " + std::to_string(id) + " outside vocab of " +
                                    std::to_string(vocab_));
            const std::size_t row = static_cast<std::size_t>(id) * d;
            for (std::size_t j = 0; j < d; ++j) out[j] += embeddings_[row + j];
            ++real;
        }
        if (real > 0) {
            const double inv = 1.0 / static_cast<double>(real);
            for (double& x : out) x *= inv;
        }
        if (reduced_precision_) {
            for (double& x : out) x = static_cast<double>(static_cast<float>(x));
        }
        return real;
    }

    ScoreVector head(const std::vector<double>& pooled) const {
        const std::size_t d = static_cast<std::size_t>(dim_);
        ScoreVector s{};
        for (std::size_t k = 0; k < kNumEmotions; ++k) {
            double acc = head_bias_[k];
            for (std::size_t j = 0; j < d; ++j) acc += head_weight_[k * d + j] * pooled[j];
            s[k] = reduced_precision_ ? static_cast<double>(static_cast<float>(acc)) : acc;
        }
        return s;
    }

    static ScoreVector softmax(const ScoreVector& s) {
        double max = s[0];
        for (double v : s) max = std::max(max, v);
        ScoreVector e{};
        double sum = 0.0;
        for (std::size_t k = 0; k < kNumEmotions; ++k) {
            e[k] = std::exp(s[k] - max);
            sum += e[k];
        }
        for (double& v : e) v /= sum;
        return e;
    }

    static double cross_entropy(const ScoreVector& s, int gold) {
        if (gold < 0 || gold >= static_cast<int>(kNumEmotions))
            throw ContractError("cross_entropy: label out of range");
        double max = s[0];
        for (double v : s) max = std::max(max, v);
        double sum = 0.0;
        for (double v : s) sum += std::exp(v - max);
        return std::log(sum) + max - s[static_cast<std::size_t>(gold)];
    }

    static void clip_by_global_norm(std::vector<double>& grad, double max_norm) {
        double sq = 0.0;
        for (double g : grad) sq += g * g;
        const double norm = std::sqrt(sq);
        if (norm > max_norm) {
            const double scale = max_norm / norm;
            for (double& g : grad) g *= scale;
        }
    }

    void adamw_step(const std::vector<double>& grad, double lr) {
        ++opt_step_;
        const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(opt_step_));
        const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(opt_step_));
        for (std::size_t i = 0; i < grad.size(); ++i) {
            opt_m_[i] = kBeta1 * opt_m_[i] + (1.0 - kBeta1) * grad[i];
            opt_v_[i] = kBeta2 * opt_v_[i] + (1.0 - kBeta2) * grad[i] * grad[i];
            const double mhat = opt_m_[i] / bc1;
            const double vhat = opt_v_[i] / bc2;
            double& p = param_at(i);
            p -= lr * (mhat / (std::sqrt(vhat) + kEpsilon) + kWeightDecay * p);
        }
    }

    std::int32_t vocab_;
    int dim_;
    bool reduced_precision_ = false;
    std::vector<double> embeddings_;   // vocab x dim, row-major
    std::vector<double> head_weight_;  // 6 x dim, row-major
    std::vector<double> head_bias_;    // 6
    std::vector<double> opt_m_;
    std::vector<double> opt_v_;
    std::uint64_t opt_step_ = 0;
};

}  // namespace emopipe
