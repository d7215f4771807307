#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "emopipe/corpus.hpp"
#include "emopipe/encode.hpp"
#include "emopipe/error.hpp"
#include "emopipe/infer.hpp"
#include "emopipe/labelspace.hpp"
#include "emopipe/metrics.hpp"
#include "emopipe/pretrained.hpp"
#include "emopipe/reference_backend.hpp"
#include "emopipe/textnorm.hpp"
#include "emopipe/tokenizers.hpp"
#include "emopipe/trainer.hpp"

namespace emopipe {

/// Overrides the root directory for run artifacts and caches.
inline constexpr const char* kCacheDirEnv = "EMOPIPE_CACHE_DIR";

inline constexpr std::string_view kBackendReference = "reference";
inline constexpr std::string_view kBackendPretrained = "pretrained-adapter";

/// Everything one pipeline run depends on. Fully serializable; the hash of
/// the serialized form names the run directory and is embedded in every
/// artifact the run emits.
struct RunConfig {
    // schedule
    double learning_rate = 2e-5;
    int batch_size = 8;
    int epochs = 5;
    int warmup_steps = 500;
    int sequence_budget = 128;
    bool mixed_precision = true;
    std::uint64_t seed = 0;
    // data and artifact locations
    std::string train_csv;
    std::string val_csv;
    std::string test_csv;
    std::string output_dir = "out";
    std::string checkpoint_dir;  // empty: <run_dir>/checkpoint
    // behavior selectors
    std::string backend = std::string(kBackendReference);
    std::string pretrained_dir;
    int reference_vocab = 4096;
    NeutralPolicy neutral_policy = NeutralPolicy::drop;
    metrics::AveragingMode averaging = metrics::AveragingMode::macro_all;
    bool include_text = true;  // text column in the submission file

    TrainConfig train_config() const {
        TrainConfig tc;
        tc.learning_rate = learning_rate;
        tc.batch_size = batch_size;
        tc.epochs = epochs;
        tc.warmup_steps = warmup_steps;
        tc.sequence_budget = sequence_budget;
        tc.mixed_precision = mixed_precision;
        tc.seed = seed;
        return tc;
    }

    void check() const {
        train_config().check();
        if (backend != kBackendReference && backend != kBackendPretrained)
            throw ConfigError("unknown backend '" + backend + "' (expected 'reference' or '" +
                              std::string(kBackendPretrained) + "')");
        if (reference_vocab <= kFirstWordId)
            throw ConfigError("reference_vocab too small");
    }

    /// Canonical key=value serialization, keys in fixed order. Stable input
    /// for hashing and the on-disk config record.
    std::string serialize() const {
        std::string out;
        out += "averaging=" + std::string(metrics::to_string(averaging)) + "\n";
        out += "backend=" + backend + "\n";
        out += "batch_size=" + std::to_string(batch_size) + "\n";
        out += "checkpoint_dir=" + checkpoint_dir + "\n";
        out += "epochs=" + std::to_string(epochs) + "\n";
        out += std::string("include_text=") + (include_text ? "true" : "false") + "\n";
        out += "learning_rate=" + detail::format_double(learning_rate) + "\n";
        out += std::string("mixed_precision=") + (mixed_precision ? "true" : "false") + "\n";
        out += "neutral_policy=" + std::string(to_string(neutral_policy)) + "\n";
        out += "output_dir=" + output_dir + "\n";
        out += "pretrained_dir=" + pretrained_dir + "\n";
        out += "reference_vocab=" + std::to_string(reference_vocab) + "\n";
        out += "seed=" + std::to_string(seed) + "\n";
        out += "sequence_budget=" + std::to_string(sequence_budget) + "\n";
        out += "test_csv=" + test_csv + "\n";
        out += "train_csv=" + train_csv + "\n";
        out += "val_csv=" + val_csv + "\n";
        out += "warmup_steps=" + std::to_string(warmup_steps) + "\n";
        return out;
    }

    std::string hash() const { return detail::hex64(detail::fnv1a64(serialize())); }
};

// ---------------------------------------------------------------------------
// Config loading: defaults < config file < explicit overrides.

inline bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "off" || value == "no") return false;
    throw ConfigError("invalid boolean for " + key + ": '" + value + "'");
}

inline std::map<std::string, std::string> parse_config_file(const std::string& path) {
    const std::string content = detail::read_file_bytes(path);
    std::map<std::string, std::string> kv;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string::npos) eol = content.size();
        std::string line = content.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string trimmed = detail::trim_ascii(line);
        if (trimmed.empty() || trimmed[0] == '#') {
            if (pos > content.size()) break;
            continue;
        }
        const std::size_t eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected key=value, got '" + trimmed + "'");
        kv[detail::trim_ascii(trimmed.substr(0, eq))] = detail::trim_ascii(trimmed.substr(eq + 1));
        if (pos > content.size()) break;
    }
    return kv;
}

/// Applies key=value pairs onto a config. Unknown keys are errors so typos
/// cannot silently change a run.
inline void apply_config_entries(RunConfig& config,
                                 const std::map<std::string, std::string>& entries) {
    for (const auto& [key, value] : entries) {
        try {
            if (key == "learning_rate") {
                config.learning_rate = std::stod(value);
            } else if (key == "batch_size") {
                config.batch_size = std::stoi(value);
            } else if (key == "epochs") {
                config.epochs = std::stoi(value);
            } else if (key == "warmup_steps") {
                config.warmup_steps = std::stoi(value);
            } else if (key == "sequence_budget") {
                config.sequence_budget = std::stoi(value);
            } else if (key == "mixed_precision") {
                config.mixed_precision = parse_bool(value, key);
            } else if (key == "seed") {
                config.seed = std::stoull(value);
            } else if (key == "train_csv") {
                config.train_csv = value;
            } else if (key == "val_csv") {
                config.val_csv = value;
            } else if (key == "test_csv") {
                config.test_csv = value;
            } else if (key == "output_dir") {
                config.output_dir = value;
            } else if (key == "checkpoint_dir") {
                config.checkpoint_dir = value;
            } else if (key == "backend") {
                config.backend = value;
            } else if (key == "pretrained_dir") {
                config.pretrained_dir = value;
            } else if (key == "reference_vocab") {
                config.reference_vocab = std::stoi(value);
            } else if (key == "neutral_policy") {
                if (value == "drop") {
                    config.neutral_policy = NeutralPolicy::drop;
                } else if (value == "error") {
                    config.neutral_policy = NeutralPolicy::error;
                } else {
                    throw ConfigError("neutral_policy must be 'drop' or 'error', got '" + value +
                                      "'");
                }
            } else if (key == "averaging") {
                if (value == "macro_all") {
                    config.averaging = metrics::AveragingMode::macro_all;
                } else if (value == "macro_present") {
                    config.averaging = metrics::AveragingMode::macro_present;
                } else {
                    throw ConfigError("averaging must be 'macro_all' or 'macro_present', got '" +
                                      value + "'");
                }
            } else if (key == "include_text") {
                config.include_text = parse_bool(value, key);
            } else {
                throw ConfigError("unknown config key '" + key + "'");
            }
        } catch (const std::invalid_argument&) {
            throw ConfigError("invalid value for " + key + ": '" + value + "'");
        } catch (const std::out_of_range&) {
            throw ConfigError("value out of range for " + key + ": '" + value + "'");
        }
    }
}

// ---------------------------------------------------------------------------
// Run directory layout. Artifacts of different configs land in different
// directories keyed by the config hash, so they can never collide.

inline std::filesystem::path run_root(const RunConfig& config) {
    if (const char* env = std::getenv(kCacheDirEnv); env && *env) return env;
    return config.output_dir;
}

inline std::filesystem::path run_dir(const RunConfig& config) {
    return run_root(config) / ("run-" + config.hash().substr(0, 12));
}

inline std::filesystem::path checkpoint_dir(const RunConfig& config) {
    if (!config.checkpoint_dir.empty()) return config.checkpoint_dir;
    return run_dir(config) / "checkpoint";
}

namespace detail {

inline std::string with_hash_line(std::string_view config_hash, std::string_view body) {
    std::string out = "# run_config_hash=";
    out.append(config_hash);
    out.push_back('\n');
    out.append(body);
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Backend construction.

struct BackendBundle {
    std::unique_ptr<TokenizerBackend> tokenizer;
    std::unique_ptr<ClassifierBackend> classifier;
};

inline std::unique_ptr<TokenizerBackend> make_tokenizer(const RunConfig& config) {
    if (config.backend == kBackendPretrained) {
        const PretrainedAssets assets = probe_pretrained_dir(config.pretrained_dir);
        return make_pretrained_tokenizer(assets);
    }
    return std::make_unique<HashWordTokenizer>(config.reference_vocab);
}

/// Builds tokenizer + classifier together; for the pretrained adapter the
/// capability probe runs once, up front.
inline BackendBundle make_backend_bundle(const RunConfig& config) {
    BackendBundle bundle;
    if (config.backend == kBackendPretrained) {
        const PretrainedAssets assets = probe_pretrained_dir(config.pretrained_dir);
        bundle.tokenizer = make_pretrained_tokenizer(assets);
        bundle.classifier = make_pretrained_backend(assets, config.seed);
    } else {
        bundle.tokenizer = std::make_unique<HashWordTokenizer>(config.reference_vocab);
        bundle.classifier = std::make_unique<EmbeddingAverageClassifier>(
            config.reference_vocab, EmbeddingAverageClassifier::kDefaultEmbedDim, config.seed);
    }
    bundle.classifier->set_reduced_precision(config.mixed_precision);
    return bundle;
}

// ---------------------------------------------------------------------------
// prepare: load, validate, normalize, reduce, encode, cache.

struct SplitArtifacts {
    std::string name;
    std::size_t rows = 0;
    std::size_t reduced = 0;
    std::size_t dropped = 0;
    std::size_t discarded_secondary_labels = 0;
    DistributionStats distribution;
    ValidationReport validation;
    std::filesystem::path features_path;
};

struct PrepareOutput {
    std::filesystem::path run_dir;
    std::filesystem::path manifest_path;
    std::string distribution_text;
    std::vector<SplitArtifacts> splits;
    std::vector<std::string> warnings;
};

namespace detail {

inline std::string format_reduced_csv(const std::vector<ReducedSample>& reduced) {
    std::string out = "id,text,label\n";
    for (const ReducedSample& rs : reduced) {
        append_csv_field(out, rs.sample.id);
        out.push_back(',');
        append_csv_field(out, rs.sample.text);
        out.push_back(',');
        out += std::to_string(static_cast<int>(rs.label));
        out.push_back('\n');
    }
    return out;
}

}  // namespace detail

inline PrepareOutput cmd_prepare(const RunConfig& config) {
    config.check();
    if (config.train_csv.empty() || config.val_csv.empty())
        throw ConfigError("prepare needs train_csv and val_csv");

    const std::string hash = config.hash();
    const std::filesystem::path dir = run_dir(config);
    const std::filesystem::path prep = dir / "prepare";
    std::filesystem::create_directories(prep);

    PrepareOutput out;
    out.run_dir = dir;

    const auto tokenizer = make_tokenizer(config);

    std::string manifest;
    manifest += "run_config_hash=" + hash + "\n";
    manifest += "backend=" + config.backend + "\n";
    manifest += "tokenizer=" + tokenizer->fingerprint() + "\n";
    manifest += "sequence_budget=" + std::to_string(config.sequence_budget) + "\n";
    manifest += "tie_break=lowest_ordinal\n";
    manifest += "neutral_policy=" + std::string(to_string(config.neutral_policy)) + "\n";

    std::string distribution_text;
    std::size_t total_discarded = 0;
    std::size_t total_dropped = 0;

    const std::pair<std::string, std::string> split_paths[] = {{"train", config.train_csv},
                                                               {"validation", config.val_csv}};
    for (const auto& [name, csv_path] : split_paths) {
        const Dataset raw = load_split(csv_path, /*labeled=*/true, &out.warnings, name);

        SplitArtifacts art;
        art.name = name;
        art.rows = raw.size();
        art.distribution = class_distribution(raw);
        art.validation = validate(raw);
        distribution_text += format_distribution(art.distribution, name);

        const Dataset normalized = preprocess_dataset(raw);
        save_split(normalized, (prep / (name + ".normalized.csv")).string());

        const ReduceResult reduction = reduce_dataset(normalized, config.neutral_policy);
        art.reduced = reduction.reduced.size();
        art.dropped = reduction.dropped.size();
        art.discarded_secondary_labels = reduction.discarded_secondary_labels;
        total_discarded += reduction.discarded_secondary_labels;
        total_dropped += reduction.dropped.size();
        detail::write_file_bytes((prep / (name + ".reduced.csv")).string(),
                                 detail::format_reduced_csv(reduction.reduced));

        const FeatureSet features =
            encode_dataset(reduction.reduced, *tokenizer, config.sequence_budget);
        art.features_path = prep / (name + ".features.bin");
        save_feature_cache(features, art.features_path.string(), hash);

        out.splits.push_back(std::move(art));
    }

    manifest += "discarded_secondary_labels=" + std::to_string(total_discarded) + "\n";
    manifest += "dropped_neutral_rows=" + std::to_string(total_dropped) + "\n";
    for (const SplitArtifacts& art : out.splits) {
        manifest += art.name + ".rows=" + std::to_string(art.rows) + "\n";
        manifest += art.name + ".reduced=" + std::to_string(art.reduced) + "\n";
        manifest += art.name + ".dropped_neutral=" + std::to_string(art.dropped) + "\n";
        manifest += art.name + ".discarded_secondary_labels=" +
                    std::to_string(art.discarded_secondary_labels) + "\n";
        manifest += art.name + ".empty_texts=" + std::to_string(art.validation.empty_text_count()) + "\n";
        manifest += art.name + ".duplicate_text_groups=" +
                    std::to_string(art.validation.duplicate_group_count()) + "\n";
        manifest += art.name + ".features_fnv=" +
                    detail::hex64(detail::fnv1a64(detail::read_file_bytes(art.features_path.string()))) +
                    "\n";
    }

    detail::write_file_bytes((dir / "config.txt").string(),
                             detail::with_hash_line(hash, config.serialize()));
    detail::write_file_bytes((prep / "distribution.txt").string(),
                             detail::with_hash_line(hash, distribution_text));
    out.manifest_path = prep / "manifest.txt";
    detail::write_file_bytes(out.manifest_path.string(), manifest);

    out.distribution_text = std::move(distribution_text);
    return out;
}

// ---------------------------------------------------------------------------
// train: fine-tune on the prepared caches and save the best checkpoint.

struct TrainOutput {
    std::filesystem::path checkpoint_dir;
    std::filesystem::path history_path;
    TrainingResult result;
    std::string epoch_table;
};

namespace detail {

inline FeatureSet load_prepared_features(const RunConfig& config, const std::string& split,
                                         const TokenizerBackend& tokenizer) {
    const std::filesystem::path path = run_dir(config) / "prepare" / (split + ".features.bin");
    if (!std::filesystem::exists(path))
        throw ConfigError("prepared cache not found: " + path.string() + " (run 'prepare' first)");
    FeatureSet set = load_feature_cache(path.string());
    if (set.sequence_budget != config.sequence_budget)
        throw ConfigError(path.string() + ": cache budget " +
                          std::to_string(set.sequence_budget) + " does not match configured " +
                          std::to_string(config.sequence_budget) + " (re-run 'prepare')");
    if (set.backend_fingerprint != tokenizer.fingerprint())
        throw ConfigError(path.string() + ": cache was built with tokenizer '" +
                          set.backend_fingerprint + "', current is '" + tokenizer.fingerprint() +
                          "' (re-run 'prepare')");
    return set;
}

inline std::string format_epoch_table(const TrainingResult& result) {
    std::string out;
    char line[200];
    std::snprintf(line, sizeof(line), "%-6s %11s %11s %9s %9s %9s %9s\n", "epoch", "train_loss",
                  "val_loss", "val_acc", "val_prec", "val_rec", "val_f1");
    out.append(line);
    for (const EpochLog& log : result.history) {
        std::snprintf(line, sizeof(line), "%-6d %11.6f %11.6f %9.4f %9.4f %9.4f %9.4f\n",
                      log.epoch, log.train_loss, log.val_loss, log.val_accuracy,
                      log.val_precision, log.val_recall, log.val_f1);
        out.append(line);
    }
    std::snprintf(line, sizeof(line), "best epoch: %d (val_accuracy %.4f)\n", result.best_epoch,
                  result.history[static_cast<std::size_t>(result.best_epoch - 1)].val_accuracy);
    out.append(line);
    return out;
}

}  // namespace detail

inline TrainOutput cmd_train(const RunConfig& config) {
    config.check();
    const std::string hash = config.hash();

    BackendBundle bundle = make_backend_bundle(config);
    const FeatureSet train_set =
        detail::load_prepared_features(config, "train", *bundle.tokenizer);
    const FeatureSet val_set =
        detail::load_prepared_features(config, "validation", *bundle.tokenizer);

    TrainOutput out;
    out.result = train(config.train_config(), train_set, val_set, *bundle.classifier);

    CheckpointManifest manifest;
    manifest.config_hash = hash;
    manifest.best_epoch = out.result.best_epoch;
    manifest.backend_kind = bundle.classifier->kind();
    manifest.tokenizer_fingerprint = bundle.tokenizer->fingerprint();
    manifest.learning_rate = config.learning_rate;
    manifest.batch_size = config.batch_size;
    manifest.epochs = config.epochs;
    manifest.warmup_steps = config.warmup_steps;
    manifest.sequence_budget = config.sequence_budget;
    manifest.mixed_precision = config.mixed_precision;
    manifest.seed = config.seed;

    out.checkpoint_dir = checkpoint_dir(config);
    save_checkpoint(out.result, manifest, out.checkpoint_dir.string());
    out.history_path = out.checkpoint_dir / "history.csv";

    detail::write_file_bytes((run_dir(config) / "config.txt").string(),
                             detail::with_hash_line(hash, config.serialize()));

    out.epoch_table = detail::format_epoch_table(out.result);
    return out;
}

// ---------------------------------------------------------------------------
// evaluate: score a labeled split with the saved best checkpoint.

struct EvaluateOutput {
    std::filesystem::path eval_dir;
    metrics::MetricsReport macro_all;
    metrics::MetricsReport macro_present;
    std::vector<std::filesystem::path> written;
    std::vector<std::string> warnings;
};

namespace detail {

struct RestoredModel {
    BackendBundle bundle;
    LoadedCheckpoint checkpoint;
};

inline RestoredModel restore_model(const RunConfig& config, std::vector<std::string>* warnings) {
    RestoredModel model;
    model.checkpoint =
        load_checkpoint(checkpoint_dir(config).string(), config.sequence_budget, warnings);
    model.bundle = make_backend_bundle(config);
    if (warnings && model.checkpoint.manifest.tokenizer_fingerprint !=
                        model.bundle.tokenizer->fingerprint())
        warnings->push_back("checkpoint tokenizer '" +
                            model.checkpoint.manifest.tokenizer_fingerprint +
                            "' differs from configured '" +
                            model.bundle.tokenizer->fingerprint() + "'");
    model.bundle.classifier->restore(model.checkpoint.snapshot);
    return model;
}

}  // namespace detail

inline EvaluateOutput cmd_evaluate(const RunConfig& config, const std::string& split) {
    config.check();
    std::string csv_path;
    if (split == "train") {
        csv_path = config.train_csv;
    } else if (split == "validation") {
        csv_path = config.val_csv;
    } else {
        throw ConfigError("evaluate supports labeled splits 'train' and 'validation', got '" +
                          split + "'");
    }
    if (csv_path.empty()) throw ConfigError("no CSV configured for split '" + split + "'");

    EvaluateOutput out;
    detail::RestoredModel model = detail::restore_model(config, &out.warnings);

    const Dataset raw = load_split(csv_path, /*labeled=*/true, &out.warnings, split);
    const Dataset normalized = preprocess_dataset(raw);
    const ReduceResult reduction = reduce_dataset(normalized, config.neutral_policy);
    const FeatureSet features =
        encode_dataset(reduction.reduced, *model.bundle.tokenizer, config.sequence_budget);
    if (features.empty()) throw ContractError("evaluate: split '" + split + "' has no usable rows");

    std::vector<int> gold;
    std::vector<int> pred;
    gold.reserve(features.size());
    pred.reserve(features.size());
    const auto stride = static_cast<std::size_t>(config.batch_size);
    std::vector<const FeatureRecord*> batch;
    for (std::size_t begin = 0; begin < features.size(); begin += stride) {
        const std::size_t end = std::min(begin + stride, features.size());
        batch.clear();
        for (std::size_t i = begin; i < end; ++i) batch.push_back(&features.records[i]);
        for (const ScoreVector& s : model.bundle.classifier->forward(batch))
            pred.push_back(argmax_score(s));
    }
    for (const FeatureRecord& rec : features.records)
        gold.push_back(static_cast<int>(rec.label.value()));

    out.macro_all = metrics::report(gold, pred, metrics::AveragingMode::macro_all);
    out.macro_present = metrics::report(gold, pred, metrics::AveragingMode::macro_present);

    const std::string hash = config.hash();
    out.eval_dir = run_dir(config) / "eval";
    std::filesystem::create_directories(out.eval_dir);
    const auto write_pair = [&](const metrics::MetricsReport& rep) {
        const std::string mode(metrics::to_string(rep.averaging_mode));
        const auto txt = out.eval_dir / (split + "." + mode + ".txt");
        const auto kv = out.eval_dir / (split + "." + mode + ".kv");
        detail::write_file_bytes(txt.string(),
                                 detail::with_hash_line(hash, metrics::render_report(rep)));
        detail::write_file_bytes(
            kv.string(),
            "run_config_hash=" + hash + "\nsplit=" + split + "\n" + metrics::render_report_kv(rep));
        out.written.push_back(txt);
        out.written.push_back(kv);
    };
    write_pair(out.macro_all);
    write_pair(out.macro_present);
    return out;
}

// ---------------------------------------------------------------------------
// predict: emit the submission file for the test split.

struct PredictOutput {
    std::filesystem::path submission_path;
    std::size_t rows = 0;
    std::array<std::size_t, kNumEmotions> per_class{};
    std::vector<std::string> warnings;
};

inline PredictOutput cmd_predict(const RunConfig& config) {
    config.check();
    if (config.test_csv.empty()) throw ConfigError("predict needs test_csv");

    PredictOutput out;
    detail::RestoredModel model = detail::restore_model(config, &out.warnings);

    const Dataset test =
        load_split(config.test_csv, /*labeled=*/false, &out.warnings, "test");
    const std::vector<Prediction> predictions =
        predict_batch(test, *model.bundle.classifier, *model.bundle.tokenizer,
                      config.sequence_budget, config.batch_size);

    const std::filesystem::path dir = run_dir(config);
    std::filesystem::create_directories(dir);
    out.submission_path = dir / "submission.csv";
    write_submission(predictions, test, out.submission_path.string(), config.include_text);

    out.rows = predictions.size();
    for (const Prediction& p : predictions) ++out.per_class[static_cast<std::size_t>(p.emotion)];

    detail::write_file_bytes((dir / "config.txt").string(),
                             detail::with_hash_line(config.hash(), config.serialize()));
    return out;
}

// ---------------------------------------------------------------------------
// report: aggregate several runs' histories, Table-style `mean ± spread`.

struct AggregateRow {
    std::string metric;
    double mean = 0.0;
    double spread = 0.0;  // population standard deviation
};

struct ReportOutput {
    std::size_t run_count = 0;
    std::vector<AggregateRow> rows;
    std::string table;
};

inline ReportOutput cmd_report(const std::vector<std::string>& history_paths) {
    if (history_paths.empty()) throw ConfigError("report needs at least one history CSV");

    // One row per run: the epoch with the best validation accuracy.
    std::vector<EpochLog> best_rows;
    for (const std::string& path : history_paths) {
        const auto history = parse_history_csv(detail::read_file_bytes(path), path);
        if (history.empty()) throw ValueError(path + ": empty history");
        best_rows.push_back(history[static_cast<std::size_t>(select_best(history) - 1)]);
    }

    ReportOutput out;
    out.run_count = best_rows.size();
    const auto aggregate = [&](const std::string& name, auto getter) {
        AggregateRow row;
        row.metric = name;
        const double n = static_cast<double>(best_rows.size());
        for (const EpochLog& log : best_rows) row.mean += getter(log);
        row.mean /= n;
        double sq = 0.0;
        for (const EpochLog& log : best_rows) {
            const double d = getter(log) - row.mean;
            sq += d * d;
        }
        row.spread = std::sqrt(sq / n);
        out.rows.push_back(row);
    };
    aggregate("train_loss", [](const EpochLog& l) { return l.train_loss; });
    aggregate("val_loss", [](const EpochLog& l) { return l.val_loss; });
    aggregate("val_accuracy", [](const EpochLog& l) { return l.val_accuracy; });
    aggregate("val_precision", [](const EpochLog& l) { return l.val_precision; });
    aggregate("val_recall", [](const EpochLog& l) { return l.val_recall; });
    aggregate("val_f1", [](const EpochLog& l) { return l.val_f1; });

    std::string table;
    char line[160];
    std::snprintf(line, sizeof(line),
                  "# %zu run(s); per run: epoch with max val_accuracy; spread: population std\n",
                  out.run_count);
    table.append(line);
    std::snprintf(line, sizeof(line), "%-14s %8s     %6s\n", "metric", "mean", "std");
    table.append(line);
    for (const AggregateRow& row : out.rows) {
        std::snprintf(line, sizeof(line), "%-14s %8.4f +/- %6.4f\n", row.metric.c_str(), row.mean,
                      row.spread);
        table.append(line);
    }
    out.table = std::move(table);
    return out;
}

}  // namespace emopipe
