#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "emopipe/pipeline.hpp"

namespace {

struct Flags {
    std::string config_file;
    std::uint64_t seed = 0;
    std::string backend;
    int budget = 0;
    std::string averaging;
    bool no_text = false;
    double learning_rate = 0.0;
    int batch_size = 0;
    int epochs = 0;
    int warmup_steps = 0;
    bool mixed_precision = true;
    std::string train_csv;
    std::string val_csv;
    std::string test_csv;
    std::string output_dir;
    std::string checkpoint_dir;
    std::string pretrained_dir;
    std::string neutral_policy;
    int reference_vocab = 0;
    std::string split = "validation";
    std::vector<std::string> histories;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config_file,
                    "key=value config file; explicit flags override it");
    sub->add_option("--seed", f.seed, "RNG seed for initialization and shuffling");
    sub->add_option("--backend", f.backend,
                    "classifier backend: reference or pretrained-adapter");
    sub->add_option("--budget", f.budget, "fixed sequence length, special tokens included");
    sub->add_option("--averaging", f.averaging, "macro_all or macro_present");
    sub->add_flag("--no-text", f.no_text, "omit the text column from the submission file");
    sub->add_option("--lr", f.learning_rate, "base learning rate");
    sub->add_option("--batch-size", f.batch_size, "mini-batch size");
    sub->add_option("--epochs", f.epochs, "number of training epochs");
    sub->add_option("--warmup-steps", f.warmup_steps, "linear learning-rate warmup steps");
    sub->add_flag("--mixed-precision,!--full-precision", f.mixed_precision,
                  "round activations through reduced precision (default on)");
    sub->add_option("--train-csv", f.train_csv, "labeled training split");
    sub->add_option("--val-csv", f.val_csv, "labeled validation split");
    sub->add_option("--test-csv", f.test_csv, "unlabeled test split");
    sub->add_option("--output-dir", f.output_dir,
                    "artifact root; $EMOPIPE_CACHE_DIR overrides it");
    sub->add_option("--checkpoint-dir", f.checkpoint_dir,
                    "checkpoint location (default: <run dir>/checkpoint)");
    sub->add_option("--pretrained-dir", f.pretrained_dir,
                    "exported-asset directory for the pretrained-adapter backend");
    sub->add_option("--vocab", f.reference_vocab,
                    "hash vocabulary size of the reference tokenizer");
    sub->add_option("--neutral-policy", f.neutral_policy,
                    "handling of all-zero label rows: drop or error");
}

emopipe::RunConfig build_config(const CLI::App* sub, const Flags& f) {
    emopipe::RunConfig config;
    if (sub->count("--config"))
        emopipe::apply_config_entries(config, emopipe::parse_config_file(f.config_file));
    if (sub->count("--seed")) config.seed = f.seed;
    if (sub->count("--backend")) config.backend = f.backend;
    if (sub->count("--budget")) config.sequence_budget = f.budget;
    if (sub->count("--averaging"))
        emopipe::apply_config_entries(config, {{"averaging", f.averaging}});
    if (sub->count("--no-text")) config.include_text = false;
    if (sub->count("--lr")) config.learning_rate = f.learning_rate;
    if (sub->count("--batch-size")) config.batch_size = f.batch_size;
    if (sub->count("--epochs")) config.epochs = f.epochs;
    if (sub->count("--warmup-steps")) config.warmup_steps = f.warmup_steps;
    if (sub->count("--mixed-precision") || sub->count("--full-precision"))
        config.mixed_precision = f.mixed_precision;
    if (sub->count("--train-csv")) config.train_csv = f.train_csv;
    if (sub->count("--val-csv")) config.val_csv = f.val_csv;
    if (sub->count("--test-csv")) config.test_csv = f.test_csv;
    if (sub->count("--output-dir")) config.output_dir = f.output_dir;
    if (sub->count("--checkpoint-dir")) config.checkpoint_dir = f.checkpoint_dir;
    if (sub->count("--pretrained-dir")) config.pretrained_dir = f.pretrained_dir;
    if (sub->count("--vocab")) config.reference_vocab = f.reference_vocab;
    if (sub->count("--neutral-policy"))
        emopipe::apply_config_entries(config, {{"neutral_policy", f.neutral_policy}});
    return config;
}

void print_warnings(const std::string& command, const std::vector<std::string>& warnings) {
    for (const std::string& w : warnings)
        std::fprintf(stderr, "emopipe %s: warning: %s\n", command.c_str(), w.c_str());
}

int dispatch(const CLI::App* sub, Flags& f) {
    const std::string name = sub->get_name();
    if (name == "report") {
        const emopipe::ReportOutput out = emopipe::cmd_report(f.histories);
        std::fputs(out.table.c_str(), stdout);
        return 0;
    }

    const emopipe::RunConfig config = build_config(sub, f);
    if (name == "prepare") {
        const emopipe::PrepareOutput out = emopipe::cmd_prepare(config);
        print_warnings(name, out.warnings);
        std::fputs(out.distribution_text.c_str(), stdout);
        for (const emopipe::SplitArtifacts& art : out.splits)
            std::printf("%s: %zu rows, %zu kept, %zu neutral dropped\n", art.name.c_str(),
                        art.rows, art.reduced, art.dropped);
        std::printf("run dir: %s\n", out.run_dir.string().c_str());
    } else if (name == "train") {
        const emopipe::TrainOutput out = emopipe::cmd_train(config);
        std::fputs(out.epoch_table.c_str(), stdout);
        std::printf("checkpoint: %s\n", out.checkpoint_dir.string().c_str());
    } else if (name == "evaluate") {
        const emopipe::EvaluateOutput out = emopipe::cmd_evaluate(config, f.split);
        print_warnings(name, out.warnings);
        const emopipe::metrics::MetricsReport& shown =
            config.averaging == emopipe::metrics::AveragingMode::macro_present
                ? out.macro_present
                : out.macro_all;
        std::fputs(emopipe::metrics::render_report(shown).c_str(), stdout);
        std::printf("reports: %s\n", out.eval_dir.string().c_str());
    } else if (name == "predict") {
        const emopipe::PredictOutput out = emopipe::cmd_predict(config);
        print_warnings(name, out.warnings);
        std::printf("wrote %zu rows: %s\n", out.rows, out.submission_path.string().c_str());
        for (std::size_t k = 0; k < emopipe::kNumEmotions; ++k)
            std::printf("  %s=%zu\n",
                        std::string(emopipe::to_string(emopipe::emotion_from_ordinal(
                                        static_cast<int>(k))))
                            .c_str(),
                        out.per_class[k]);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"emotion-classification pipeline for small labeled text corpora"};
    app.require_subcommand(1);

    Flags f;
    CLI::App* prepare =
        app.add_subcommand("prepare", "validate, normalize, reduce and encode the splits");
    add_common(prepare, f);
    CLI::App* train = app.add_subcommand("train", "fine-tune on the prepared feature caches");
    add_common(train, f);
    CLI::App* evaluate =
        app.add_subcommand("evaluate", "score a labeled split with the saved best checkpoint");
    add_common(evaluate, f);
    evaluate->add_option("--split", f.split, "labeled split to score: train or validation");
    CLI::App* predict =
        app.add_subcommand("predict", "write the submission file for the test split");
    add_common(predict, f);
    CLI::App* report =
        app.add_subcommand("report", "aggregate run histories as mean +/- std per metric");
    report->add_option("histories", f.histories, "history.csv paths, one per run")->required();

    CLI11_PARSE(app, argc, argv);

    const CLI::App* sub = app.get_subcommands().front();
    try {
        return dispatch(sub, f);
    } catch (const emopipe::ConfigError& e) {
        std::fprintf(stderr, "emopipe %s: %s (see 'emopipe %s --help')\n",
                     sub->get_name().c_str(), e.what(), sub->get_name().c_str());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "emopipe %s: %s\n", sub->get_name().c_str(), e.what());
        return 1;
    }
}
