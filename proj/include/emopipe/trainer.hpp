#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "emopipe/detail/binio.hpp"
#include "emopipe/detail/numfmt.hpp"
#include "emopipe/detail/rng.hpp"
#include "emopipe/encode.hpp"
#include "emopipe/error.hpp"
#include "emopipe/metrics.hpp"

namespace emopipe {

/// Training hyperparameters. Defaults are the schedule the pipeline was
/// built around: lr 2e-5, batch 8, 5 epochs, 500 warmup steps, budget 128.
struct TrainConfig {
    double learning_rate = 2e-5;
    int batch_size = 8;
    int epochs = 5;
    int warmup_steps = 500;
    int sequence_budget = 128;
    bool mixed_precision = true;
    std::uint64_t seed = 0;
    static constexpr int num_labels = static_cast<int>(kNumEmotions);

    void check() const {
        if (learning_rate <= 0) throw ConfigError("learning_rate must be positive");
        if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
        if (epochs < 1) throw ConfigError("epochs must be >= 1");
        if (warmup_steps < 1) throw ConfigError("warmup_steps must be >= 1");
        if (sequence_budget < 2) throw ConfigError("sequence_budget must be >= 2");
    }
};

using ScoreVector = std::array<double, kNumEmotions>;

/// Index of the highest score; exact ties resolve to the lowest ordinal,
/// the same rule the label reduction uses.
inline int argmax_score(const ScoreVector& scores) {
    int best = 0;
    for (int k = 1; k < static_cast<int>(kNumEmotions); ++k) {
        if (scores[static_cast<std::size_t>(k)] > scores[static_cast<std::size_t>(best)]) best = k;
    }
    return best;
}

/// Pluggable six-way classifier. One training run owns its backend
/// exclusively; forward must be deterministic given the current snapshot
/// and a fixed precision mode.
class ClassifierBackend {
public:
    virtual ~ClassifierBackend() = default;

    /// Class scores for each record in the batch.
    virtual std::vector<ScoreVector> forward(const std::vector<const FeatureRecord*>& batch) = 0;

    /// Mean classification loss of `scores` against integer labels.
    virtual double loss(const std::vector<ScoreVector>& scores,
                        const std::vector<int>& labels) const = 0;

    /// One optimization step on a labeled batch at learning rate `lr`.
    /// Returns the batch loss before the update.
    virtual double apply_update(const std::vector<const FeatureRecord*>& batch, double lr) = 0;

    /// Opaque byte snapshot of all state needed to reproduce forward.
    virtual std::string snapshot() const = 0;
    virtual void restore(std::string_view blob) = 0;

    virtual void set_reduced_precision(bool on) = 0;

    /// Stable identifier of the backend family, recorded in checkpoints.
    virtual std::string kind() const = 0;
};

struct EpochLog {
    int epoch = 0;  // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
    double val_precision = 0.0;
    double val_recall = 0.0;
    double val_f1 = 0.0;
};

struct TrainingResult {
    std::vector<EpochLog> history;
    int best_epoch = 0;           // 1-based
    std::string best_checkpoint;  // backend snapshot blob
};

/// Linear learning-rate ramp over `warmup_steps`, constant at `base_lr`
/// afterwards.
inline double warmup_lr(long step, double base_lr, long warmup_steps) {
    if (warmup_steps < 1) throw ConfigError("warmup_steps must be >= 1");
    if (step < 0) throw ContractError("warmup_lr: negative step");
    if (step >= warmup_steps) return base_lr;
    return base_lr * (static_cast<double>(step) / static_cast<double>(warmup_steps));
}

/// 1-based epoch with the highest validation accuracy; earliest on ties.
inline int select_best(const std::vector<EpochLog>& history) {
    if (history.empty()) throw ContractError("select_best: empty history");
    std::size_t best = 0;
    for (std::size_t i = 1; i < history.size(); ++i) {
        if (history[i].val_accuracy > history[best].val_accuracy) best = i;
    }
    return static_cast<int>(best) + 1;
}

namespace detail {

inline std::vector<const FeatureRecord*> gather(const FeatureSet& set,
                                                const std::vector<std::size_t>& order,
                                                std::size_t begin, std::size_t end) {
    std::vector<const FeatureRecord*> batch;
    batch.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) batch.push_back(&set.records[order[i]]);
    return batch;
}

}  // namespace detail

/// Fine-tunes `backend` on `train_set` for the configured schedule,
/// evaluating on `val_set` after every epoch. Per-epoch shuffles come from a
/// counter-based stream keyed by (seed, epoch), so two runs with the same
/// inputs produce identical histories. Returns with the best checkpoint
/// restored into the backend.
inline TrainingResult train(const TrainConfig& config, const FeatureSet& train_set,
                            const FeatureSet& val_set, ClassifierBackend& backend) {
    config.check();
    if (train_set.empty() || val_set.empty())
        throw ContractError("train: train and validation sets must be non-empty");
    if (!train_set.labeled || !val_set.labeled)
        throw ContractError("train: both splits must carry labels");
    if (train_set.sequence_budget != val_set.sequence_budget)
        throw ContractError("train: sequence budgets differ between splits");

    backend.set_reduced_precision(config.mixed_precision);

    const std::size_t n = train_set.size();
    const auto batch_size = static_cast<std::size_t>(config.batch_size);

    std::vector<int> val_gold;
    val_gold.reserve(val_set.size());
    for (const FeatureRecord& rec : val_set.records)
        val_gold.push_back(static_cast<int>(rec.label.value()));

    TrainingResult result;
    double best_accuracy = -1.0;
    long global_step = 0;

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        detail::RandomStream rng(config.seed, static_cast<std::uint64_t>(epoch));
        detail::shuffle(order, rng);

        double loss_sum = 0.0;
        for (std::size_t begin = 0; begin < n; begin += batch_size) {
            const std::size_t end = std::min(begin + batch_size, n);  // keep the partial tail
            ++global_step;
            const double lr = warmup_lr(global_step, config.learning_rate, config.warmup_steps);
            const auto batch = detail::gather(train_set, order, begin, end);
            const double batch_loss = backend.apply_update(batch, lr);
            if (!std::isfinite(batch_loss)) {
                std::string ids;
                for (std::size_t i = begin; i < end; ++i) {
                    if (!ids.empty()) ids += ",";
                    ids += std::to_string(order[i]);
                }
                throw std::runtime_error("train: non-finite loss at step " +
                                         std::to_string(global_step) + " (epoch " +
                                         std::to_string(epoch) + ", batch records [" + ids + "])");
            }
            loss_sum += batch_loss * static_cast<double>(end - begin);
        }

        // Validation pass over the frozen epoch-end parameters.
        std::vector<ScoreVector> val_scores;
        val_scores.reserve(val_set.size());
        std::vector<std::size_t> val_order(val_set.size());
        for (std::size_t i = 0; i < val_set.size(); ++i) val_order[i] = i;
        for (std::size_t begin = 0; begin < val_set.size(); begin += batch_size) {
            const std::size_t end = std::min(begin + batch_size, val_set.size());
            const auto batch = detail::gather(val_set, val_order, begin, end);
            for (ScoreVector& s : backend.forward(batch)) val_scores.push_back(s);
        }
        std::vector<int> val_pred;
        val_pred.reserve(val_scores.size());
        for (const ScoreVector& s : val_scores) val_pred.push_back(argmax_score(s));

        const auto val_report =
            metrics::report(val_gold, val_pred, metrics::AveragingMode::macro_all);

        EpochLog log;
        log.epoch = epoch;
        log.train_loss = loss_sum / static_cast<double>(n);
        log.val_loss = backend.loss(val_scores, val_gold);
        log.val_accuracy = val_report.accuracy;
        log.val_precision = val_report.macro_precision;
        log.val_recall = val_report.macro_recall;
        log.val_f1 = val_report.macro_f1;
        result.history.push_back(log);

        if (log.val_accuracy > best_accuracy) {
            best_accuracy = log.val_accuracy;
            result.best_epoch = epoch;
            result.best_checkpoint = backend.snapshot();
        }
    }

    backend.restore(result.best_checkpoint);
    return result;
}

// ---------------------------------------------------------------------------
// Checkpoint directory: snapshot blob + manifest + history CSV.

inline constexpr std::string_view kHistoryHeader =
    "epoch,train_loss,val_loss,val_accuracy,val_precision,val_recall,val_f1";

inline constexpr std::string_view kCheckpointMagic = "EMOCKPT1";

struct CheckpointManifest {
    std::string config_hash;
    int best_epoch = 0;
    std::string backend_kind;
    std::string tokenizer_fingerprint;
    // schedule the checkpoint was trained under
    double learning_rate = 0.0;
    int batch_size = 0;
    int epochs = 0;
    int warmup_steps = 0;
    int sequence_budget = 0;
    bool mixed_precision = false;
    std::uint64_t seed = 0;
};

inline std::string format_history_csv(const std::vector<EpochLog>& history,
                                      std::string_view config_hash) {
    std::string out;
    if (!config_hash.empty()) {
        out += "# run_config_hash=";
        out += config_hash;
        out += "\n";
    }
    out += kHistoryHeader;
    out += "\n";
    char line[200];
    for (const EpochLog& log : history) {
        std::snprintf(line, sizeof(line), "%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", log.epoch,
                      log.train_loss, log.val_loss, log.val_accuracy, log.val_precision,
                      log.val_recall, log.val_f1);
        out.append(line);
    }
    return out;
}

/// Parses a history CSV produced by format_history_csv. Comment lines are
/// skipped; the column header must match exactly.
inline std::vector<EpochLog> parse_history_csv(const std::string& content,
                                               const std::string& what) {
    std::vector<EpochLog> history;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos < content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string::npos) eol = content.size();
        std::string line = content.substr(pos, eol - pos);
        pos = eol + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != kHistoryHeader)
                throw SchemaError(what + ": unexpected history header '" + line + "'");
            header_seen = true;
            continue;
        }
        EpochLog log;
        double cols[7];
        int n = std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf", &cols[0], &cols[1],
                            &cols[2], &cols[3], &cols[4], &cols[5], &cols[6]);
        if (n != 7) throw ValueError(what + ": malformed history row '" + line + "'");
        log.epoch = static_cast<int>(cols[0]);
        log.train_loss = cols[1];
        log.val_loss = cols[2];
        log.val_accuracy = cols[3];
        log.val_precision = cols[4];
        log.val_recall = cols[5];
        log.val_f1 = cols[6];
        history.push_back(log);
    }
    if (!header_seen) throw SchemaError(what + ": missing history header");
    return history;
}

inline std::string format_checkpoint_manifest(const CheckpointManifest& m) {
    std::string out;
    out += "run_config_hash=" + m.config_hash + "\n";
    out += "best_epoch=" + std::to_string(m.best_epoch) + "\n";
    out += "backend=" + m.backend_kind + "\n";
    out += "tokenizer=" + m.tokenizer_fingerprint + "\n";
    out += "learning_rate=" + detail::format_double(m.learning_rate) + "\n";
    out += "batch_size=" + std::to_string(m.batch_size) + "\n";
    out += "epochs=" + std::to_string(m.epochs) + "\n";
    out += "warmup_steps=" + std::to_string(m.warmup_steps) + "\n";
    out += "sequence_budget=" + std::to_string(m.sequence_budget) + "\n";
    out += std::string("mixed_precision=") + (m.mixed_precision ? "true" : "false") + "\n";
    out += "seed=" + std::to_string(m.seed) + "\n";
    return out;
}

inline std::map<std::string, std::string> parse_key_values(const std::string& content) {
    std::map<std::string, std::string> kv;
    std::size_t pos = 0;
    while (pos < content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string::npos) eol = content.size();
        std::string line = content.substr(pos, eol - pos);
        pos = eol + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

/// Writes `dir/model.bin`, `dir/manifest.txt`, and `dir/history.csv`.
inline void save_checkpoint(const TrainingResult& result, const CheckpointManifest& manifest,
                            const std::string& dir) {
    if (result.best_epoch < 1 || result.best_checkpoint.empty())
        throw ContractError("save_checkpoint: result has no best checkpoint");
    std::filesystem::create_directories(dir);

    std::string blob;
    blob.append(kCheckpointMagic);
    detail::put_bytes(blob, manifest.backend_kind);
    detail::put_bytes(blob, result.best_checkpoint);
    detail::write_file_bytes(dir + "/model.bin", blob);

    detail::write_file_bytes(dir + "/manifest.txt", format_checkpoint_manifest(manifest));
    detail::write_file_bytes(dir + "/history.csv",
                             format_history_csv(result.history, manifest.config_hash));
}

struct LoadedCheckpoint {
    std::string backend_kind;
    std::string snapshot;
    CheckpointManifest manifest;
    std::vector<EpochLog> history;
};

/// Loads a checkpoint directory and cross-checks the blob against the
/// manifest. A sequence-budget mismatch with `expected_budget` is reported
/// through `warnings`, not an error.
inline LoadedCheckpoint load_checkpoint(const std::string& dir, int expected_budget = 0,
                                        std::vector<std::string>* warnings = nullptr) {
    const std::string model_path = dir + "/model.bin";
    const std::string blob = detail::read_file_bytes(model_path);
    if (std::string_view(blob).substr(0, kCheckpointMagic.size()) != kCheckpointMagic)
        throw IoError(model_path + ": not a checkpoint blob (bad magic)");

    detail::ByteParser p(std::string_view(blob).substr(kCheckpointMagic.size()), model_path);
    LoadedCheckpoint loaded;
    loaded.backend_kind = p.bytes();
    loaded.snapshot = p.bytes();
    p.expect_end();

    const auto kv = parse_key_values(detail::read_file_bytes(dir + "/manifest.txt"));
    const auto get = [&](const char* key) {
        auto it = kv.find(key);
        return it == kv.end() ? std::string() : it->second;
    };
    const auto get_int = [&](const char* key) {
        const std::string v = get(key);
        return v.empty() ? 0 : std::stoi(v);
    };
    loaded.manifest.config_hash = get("run_config_hash");
    loaded.manifest.best_epoch = get_int("best_epoch");
    loaded.manifest.backend_kind = get("backend");
    loaded.manifest.tokenizer_fingerprint = get("tokenizer");
    loaded.manifest.learning_rate = get("learning_rate").empty() ? 0.0 : std::stod(get("learning_rate"));
    loaded.manifest.batch_size = get_int("batch_size");
    loaded.manifest.epochs = get_int("epochs");
    loaded.manifest.warmup_steps = get_int("warmup_steps");
    loaded.manifest.sequence_budget = get_int("sequence_budget");
    loaded.manifest.mixed_precision = get("mixed_precision") == "true";
    loaded.manifest.seed = get("seed").empty() ? 0 : std::stoull(get("seed"));

    if (loaded.manifest.backend_kind != loaded.backend_kind)
        throw IoError(dir + ": manifest/blob mismatch: manifest backend='" +
                      loaded.manifest.backend_kind + "' but blob carries '" +
                      loaded.backend_kind + "'");

    if (expected_budget > 0 && loaded.manifest.sequence_budget != expected_budget && warnings)
        warnings->push_back(dir + ": checkpoint sequence_budget " +
                            std::to_string(loaded.manifest.sequence_budget) +
                            " differs from configured " + std::to_string(expected_budget));

    std::ifstream hist(dir + "/history.csv", std::ios::binary);
    if (hist) {
        std::ostringstream buf;
        buf << hist.rdbuf();
        loaded.history = parse_history_csv(buf.str(), dir + "/history.csv");
    }
    return loaded;
}

}  // namespace emopipe
