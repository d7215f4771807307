#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "emopipe/reference_backend.hpp"
#include "emopipe/tokenizers.hpp"
#include "emopipe/trainer.hpp"
#include "test_support.hpp"

using namespace emopipe;

TEST_CASE("warmup ramps linearly then holds the base rate", "[trainer]") {
    CHECK(warmup_lr(0, 2e-5, 500) == 0.0);
    CHECK_THAT(warmup_lr(250, 2e-5, 500), Catch::Matchers::WithinAbs(1e-5, 1e-18));
    CHECK(warmup_lr(500, 2e-5, 500) == 2e-5);
    CHECK(warmup_lr(750, 2e-5, 500) == 2e-5);

    double prev = -1.0;
    for (long step = 0; step <= 1000; ++step) {
        const double lr = warmup_lr(step, 2e-5, 500);
        CHECK(lr >= prev);
        prev = lr;
    }
    CHECK_THROWS_AS(warmup_lr(-1, 2e-5, 500), ContractError);
    CHECK_THROWS_AS(warmup_lr(0, 2e-5, 0), ConfigError);
}

TEST_CASE("best epoch has the highest validation accuracy, earliest on ties", "[trainer]") {
    const auto epoch = [](int e, double acc) {
        EpochLog log;
        log.epoch = e;
        log.val_accuracy = acc;
        return log;
    };
    CHECK(select_best({epoch(1, 0.5), epoch(2, 0.7), epoch(3, 0.6)}) == 2);
    CHECK(select_best({epoch(1, 0.7), epoch(2, 0.7)}) == 1);
    CHECK(select_best({epoch(1, 0.5), epoch(2, 0.7), epoch(3, 0.7)}) == 2);
    CHECK(select_best({epoch(1, 0.4)}) == 1);
    CHECK_THROWS_AS(select_best({}), ContractError);
}

TEST_CASE("schedule parameters are validated up front", "[trainer]") {
    TrainConfig config;
    config.epochs = 0;
    CHECK_THROWS_AS(config.check(), ConfigError);
    config = TrainConfig{};
    config.batch_size = 0;
    CHECK_THROWS_AS(config.check(), ConfigError);
    config = TrainConfig{};
    config.learning_rate = 0.0;
    CHECK_THROWS_AS(config.check(), ConfigError);
    config = TrainConfig{};
    config.sequence_budget = 1;
    CHECK_THROWS_AS(config.check(), ConfigError);
    CHECK_NOTHROW(TrainConfig{}.check());
}

TEST_CASE("argmax breaks exact ties toward the lowest ordinal", "[trainer]") {
    CHECK(argmax_score({0.1, 0.9, 0.2, 0.9, 0.0, 0.0}) == 1);
    CHECK(argmax_score({0.5, 0.5, 0.5, 0.5, 0.5, 0.5}) == 0);
    CHECK(argmax_score({-1.0, -2.0, -0.5, -3.0, -4.0, -5.0}) == 2);
}

namespace {

FeatureSet tiny_set(const std::vector<std::pair<std::string, Emotion>>& rows,
                    std::int32_t budget = 6) {
    const HashWordTokenizer tok(256);
    std::vector<ReducedSample> reduced;
    for (const auto& [text, label] : rows)
        reduced.push_back({{"id" + std::to_string(reduced.size()), text, std::nullopt}, label});
    return encode_dataset(reduced, tok, budget);
}

/// Test double that follows a per-epoch validation-accuracy script. Infers
/// the epoch from the number of updates seen; forward() is only invoked by
/// the trainer for validation passes.
class ScriptedBackend final : public ClassifierBackend {
public:
    ScriptedBackend(std::vector<double> val_accuracy, std::size_t updates_per_epoch,
                    std::size_t val_size, double update_loss = 1.0)
        : script_(std::move(val_accuracy)),
          updates_per_epoch_(updates_per_epoch),
          val_size_(val_size),
          update_loss_(update_loss) {}

    std::vector<ScoreVector> forward(const std::vector<const FeatureRecord*>& batch) override {
        const std::size_t epoch = updates_ / updates_per_epoch_;  // 1-based after a full epoch
        const double accuracy = script_.at(epoch - 1);
        const auto correct = static_cast<std::size_t>(
            std::llround(accuracy * static_cast<double>(val_size_)));
        std::vector<ScoreVector> scores;
        for (const FeatureRecord* rec : batch) {
            const std::size_t index = forwarded_++ % val_size_;
            const int gold = static_cast<int>(rec->label.value());
            const int pred = index < correct ? gold : (gold + 1) % 6;
            ScoreVector s{};
            s[static_cast<std::size_t>(pred)] = 1.0;
            scores.push_back(s);
        }
        return scores;
    }

    double loss(const std::vector<ScoreVector>&, const std::vector<int>&) const override {
        return 0.5;
    }

    double apply_update(const std::vector<const FeatureRecord*>&, double lr) override {
        ++updates_;
        lr_trace.push_back(lr);
        return update_loss_;
    }

    std::string snapshot() const override {
        return "after_epoch=" + std::to_string(updates_ / updates_per_epoch_);
    }

    void restore(std::string_view blob) override { last_restored = std::string(blob); }
    void set_reduced_precision(bool) override {}
    std::string kind() const override { return "scripted/v1"; }

    std::vector<double> lr_trace;
    std::string last_restored;

private:
    std::vector<double> script_;
    std::size_t updates_per_epoch_;
    std::size_t val_size_;
    double update_loss_;
    std::size_t updates_ = 0;
    std::size_t forwarded_ = 0;
};

}  // namespace

TEST_CASE("training keeps the epoch with the best validation accuracy", "[trainer]") {
    const FeatureSet train_set = tiny_set({
        {"kotu ta yi", Emotion::anger},
        {"zabe ya ci", Emotion::joy},
        {"bincike ya nuna", Emotion::fear},
        {"murna da farin ciki", Emotion::joy},
        {"damuwa ta kama", Emotion::sadness},
    });
    const FeatureSet val_set = tiny_set({
        {"kotu", Emotion::anger},
        {"zabe", Emotion::joy},
        {"labari", Emotion::surprise},
        {"gaskiya", Emotion::disgust},
        {"hukunci", Emotion::fear},
        {"talauci", Emotion::sadness},
        {"tsaro", Emotion::anger},
        {"magana", Emotion::joy},
        {"ciki", Emotion::fear},
        {"farin", Emotion::sadness},
    });

    TrainConfig config;
    config.epochs = 3;
    config.batch_size = 2;
    config.warmup_steps = 4;
    config.learning_rate = 1e-3;
    config.sequence_budget = 6;

    // 5 records, batch 2 -> 3 updates per epoch (partial tail kept)
    ScriptedBackend backend({0.5, 0.7, 0.6}, 3, 10);
    const TrainingResult result = train(config, train_set, val_set, backend);

    REQUIRE(result.history.size() == 3);
    CHECK(result.best_epoch == 2);
    CHECK(result.best_checkpoint == "after_epoch=2");
    CHECK(backend.last_restored == "after_epoch=2");
    CHECK_THAT(result.history[0].val_accuracy, Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK_THAT(result.history[1].val_accuracy, Catch::Matchers::WithinAbs(0.7, 1e-12));
    CHECK_THAT(result.history[2].val_accuracy, Catch::Matchers::WithinAbs(0.6, 1e-12));

    // nine updates at warmup 4, lr 1e-3: ramp then constant
    REQUIRE(backend.lr_trace.size() == 9);
    CHECK_THAT(backend.lr_trace[0], Catch::Matchers::WithinAbs(0.25e-3, 1e-15));
    CHECK_THAT(backend.lr_trace[1], Catch::Matchers::WithinAbs(0.5e-3, 1e-15));
    CHECK_THAT(backend.lr_trace[2], Catch::Matchers::WithinAbs(0.75e-3, 1e-15));
    for (std::size_t i = 3; i < 9; ++i) CHECK(backend.lr_trace[i] == 1e-3);

    // accuracy ties keep the earliest epoch
    ScriptedBackend tie_backend({0.7, 0.7, 0.5}, 3, 10);
    CHECK(train(config, train_set, val_set, tie_backend).best_epoch == 1);
}

TEST_CASE("non-finite loss aborts with step and record context", "[trainer]") {
    const FeatureSet train_set = tiny_set({{"kotu", Emotion::anger}, {"zabe", Emotion::joy}});
    TrainConfig config;
    config.epochs = 1;
    config.batch_size = 2;
    config.sequence_budget = 6;

    ScriptedBackend backend({1.0}, 1, 2, std::numeric_limits<double>::quiet_NaN());
    CHECK_THROWS_MATCHES(
        train(config, train_set, train_set, backend), std::runtime_error,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("step 1") &&
                                        Catch::Matchers::ContainsSubstring("epoch 1")));
}

TEST_CASE("identical seeds give bit-identical histories", "[trainer]") {
    const FeatureSet train_set = tiny_set({
        {"kotu ta yi hukunci", Emotion::anger},
        {"zabe ya ci gaba", Emotion::joy},
        {"bincike ya nuna damuwa", Emotion::fear},
        {"murna da farin ciki", Emotion::joy},
        {"talauci da damuwa", Emotion::sadness},
        {"labari mai ban mamaki", Emotion::surprise},
        {"gaskiya ce kawai", Emotion::disgust},
    });
    TrainConfig config;
    config.epochs = 4;
    config.batch_size = 3;
    config.warmup_steps = 5;
    config.learning_rate = 0.05;
    config.sequence_budget = 6;
    config.seed = 7;

    const auto run = [&] {
        EmbeddingAverageClassifier backend(256, 8, config.seed);
        const TrainingResult result = train(config, train_set, train_set, backend);
        return format_history_csv(result.history, "fixedhash0000000");
    };
    const std::string first = run();
    const std::string second = run();
    CHECK(first == second);

    config.seed = 8;
    EmbeddingAverageClassifier other(256, 8, config.seed);
    const std::string different =
        format_history_csv(train(config, train_set, train_set, other).history,
                           "fixedhash0000000");
    CHECK(first != different);
}

TEST_CASE("shuffling differs across epochs but not across runs", "[trainer]") {
    std::vector<std::size_t> base(64);
    for (std::size_t i = 0; i < base.size(); ++i) base[i] = i;

    auto shuffled = [&](std::uint64_t seed, std::uint64_t epoch) {
        std::vector<std::size_t> order = base;
        detail::RandomStream rng(seed, epoch);
        detail::shuffle(order, rng);
        return order;
    };
    CHECK(shuffled(7, 1) == shuffled(7, 1));
    CHECK(shuffled(7, 1) != shuffled(7, 2));
    CHECK(shuffled(7, 1) != shuffled(8, 1));

    auto order = shuffled(7, 3);
    std::sort(order.begin(), order.end());
    CHECK(order == base);  // permutation, nothing lost
}

TEST_CASE("history CSV round-trips and rejects foreign schemas", "[trainer]") {
    std::vector<EpochLog> history;
    for (int e = 1; e <= 3; ++e) {
        EpochLog log;
        log.epoch = e;
        log.train_loss = 1.5 / e;
        log.val_loss = 1.2 / e;
        log.val_accuracy = 0.5 + 0.1 * e;
        log.val_precision = 0.4 + 0.1 * e;
        log.val_recall = 0.45 + 0.1 * e;
        log.val_f1 = 0.42 + 0.1 * e;
        history.push_back(log);
    }

    const std::string csv = format_history_csv(history, "abcdef0123456789");
    CHECK(csv.find("# run_config_hash=abcdef0123456789\n") == 0);
    CHECK(csv.find(kHistoryHeader) != std::string::npos);

    const auto back = parse_history_csv(csv, "test");
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back[i].epoch == history[i].epoch);
        CHECK_THAT(back[i].val_accuracy,
                   Catch::Matchers::WithinAbs(history[i].val_accuracy, 1e-6));
        CHECK_THAT(back[i].train_loss, Catch::Matchers::WithinAbs(history[i].train_loss, 1e-6));
    }

    CHECK_THROWS_AS(parse_history_csv("epoch,loss\n1,2\n", "test"), SchemaError);
    CHECK_THROWS_AS(parse_history_csv("", "test"), SchemaError);
    const std::string malformed = std::string(kHistoryHeader) + "\n1,2,3\n";
    CHECK_THROWS_AS(parse_history_csv(malformed, "test"), ValueError);
}

TEST_CASE("checkpoint directory round-trips snapshot, manifest and history", "[trainer]") {
    testsup::TempDir tmp("trainer");

    TrainingResult result;
    result.best_epoch = 2;
    result.best_checkpoint = std::string("\x00\x01snapshot bytes\xff", 17);
    EpochLog log;
    log.epoch = 1;
    log.train_loss = 1.5168;
    log.val_accuracy = 0.74;
    result.history.push_back(log);

    CheckpointManifest manifest;
    manifest.config_hash = "1234567890abcdef";
    manifest.best_epoch = 2;
    manifest.backend_kind = "embedding-avg/v1";
    manifest.tokenizer_fingerprint = "hashws/v1/vocab=256";
    manifest.learning_rate = 2e-5;
    manifest.batch_size = 8;
    manifest.epochs = 5;
    manifest.warmup_steps = 500;
    manifest.sequence_budget = 128;
    manifest.mixed_precision = true;
    manifest.seed = 7;

    const std::string dir = tmp.file("ckpt");
    save_checkpoint(result, manifest, dir);

    const std::string manifest_text = testsup::read_text(dir + "/manifest.txt");
    CHECK(manifest_text.find("learning_rate=2e-05\n") != std::string::npos);
    CHECK(manifest_text.find("batch_size=8\n") != std::string::npos);
    CHECK(manifest_text.find("epochs=5\n") != std::string::npos);
    CHECK(manifest_text.find("warmup_steps=500\n") != std::string::npos);

    const LoadedCheckpoint loaded = load_checkpoint(dir);
    CHECK(loaded.backend_kind == "embedding-avg/v1");
    CHECK(loaded.snapshot == result.best_checkpoint);
    CHECK(loaded.manifest.config_hash == manifest.config_hash);
    CHECK(loaded.manifest.best_epoch == 2);
    CHECK(loaded.manifest.learning_rate == 2e-5);
    CHECK(loaded.manifest.seed == 7);
    CHECK(loaded.manifest.mixed_precision);
    REQUIRE(loaded.history.size() == 1);
    CHECK_THAT(loaded.history[0].train_loss, Catch::Matchers::WithinAbs(1.5168, 1e-6));

    std::vector<std::string> warnings;
    load_checkpoint(dir, 128, &warnings);
    CHECK(warnings.empty());
    load_checkpoint(dir, 64, &warnings);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("sequence_budget") != std::string::npos);
}

TEST_CASE("corrupt checkpoints are refused", "[trainer]") {
    testsup::TempDir tmp("trainer");
    TrainingResult result;
    result.best_epoch = 1;
    result.best_checkpoint = "blob";
    EpochLog log;
    log.epoch = 1;
    result.history.push_back(log);
    CheckpointManifest manifest;
    manifest.config_hash = "x";
    manifest.best_epoch = 1;
    manifest.backend_kind = "embedding-avg/v1";

    const std::string dir = tmp.file("ckpt");
    save_checkpoint(result, manifest, dir);

    SECTION("truncated model blob") {
        const std::string blob = testsup::read_text(dir + "/model.bin");
        testsup::write_text(dir + "/model.bin", blob.substr(0, blob.size() - 2));
        CHECK_THROWS_AS(load_checkpoint(dir), IoError);
    }
    SECTION("bad magic") {
        testsup::write_text(dir + "/model.bin", "NOTACKPTxxxx");
        CHECK_THROWS_AS(load_checkpoint(dir), IoError);
    }
    SECTION("manifest names a different backend") {
        std::string manifest_text = testsup::read_text(dir + "/manifest.txt");
        const auto pos = manifest_text.find("backend=embedding-avg/v1");
        manifest_text.replace(pos, std::string("backend=embedding-avg/v1").size(),
                              "backend=other/v9");
        testsup::write_text(dir + "/manifest.txt", manifest_text);
        CHECK_THROWS_MATCHES(load_checkpoint(dir), IoError,
                             Catch::Matchers::MessageMatches(
                                 Catch::Matchers::ContainsSubstring("mismatch")));
    }
    SECTION("empty training result cannot be saved") {
        TrainingResult empty;
        CHECK_THROWS_AS(save_checkpoint(empty, manifest, tmp.file("empty")), ContractError);
    }
}

TEST_CASE("trainer rejects unusable splits", "[trainer]") {
    const FeatureSet train_set = tiny_set({{"kotu", Emotion::anger}});
    FeatureSet empty;
    empty.labeled = true;
    empty.sequence_budget = 6;

    TrainConfig config;
    config.sequence_budget = 6;
    EmbeddingAverageClassifier backend(256, 8, 0);
    CHECK_THROWS_AS(train(config, empty, train_set, backend), ContractError);
    CHECK_THROWS_AS(train(config, train_set, empty, backend), ContractError);

    FeatureSet other_budget = tiny_set({{"kotu", Emotion::anger}}, 8);
    CHECK_THROWS_AS(train(config, train_set, other_budget, backend), ContractError);
}
