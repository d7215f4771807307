#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "emopipe/detail/binio.hpp"
#include "emopipe/error.hpp"
#include "emopipe/reference_backend.hpp"
#include "emopipe/tokenizers.hpp"

namespace emopipe {

// The pretrained-adapter backend consumes assets exported from a pretrained
// encoder: a vocabulary file and an embedding matrix. The embedding table
// seeds the same embedding-average architecture the reference backend uses;
// only the initialization and the tokenizer change. A capability probe runs
// before anything is loaded so a misconfigured run fails in one step with a
// complete list of what is missing.

inline constexpr std::string_view kEmbeddingMagic = "EMOEMB01";

struct PretrainedAssets {
    std::string dir;
    std::string vocab_path;      // <dir>/vocab.txt
    std::string embedding_path;  // <dir>/embeddings.bin
    std::int32_t vocab_size = 0;
    std::int32_t embed_dim = 0;
};

/// Header check of an embedding matrix file; returns (rows, dim).
inline std::pair<std::int32_t, std::int32_t> read_embedding_header(const std::string& path) {
    const std::string bytes = detail::read_file_bytes(path);
    if (std::string_view(bytes).substr(0, kEmbeddingMagic.size()) != kEmbeddingMagic)
        throw IoError(path + ": not an embedding matrix file (bad magic)");
    detail::ByteParser p(std::string_view(bytes).substr(kEmbeddingMagic.size()), path);
    const std::int32_t rows = p.i32();
    const std::int32_t dim = p.i32();
    if (rows < 1 || dim < 1)
        throw IoError(path + ": degenerate embedding shape " + std::to_string(rows) + "x" +
                      std::to_string(dim));
    return {rows, dim};
}

inline std::vector<double> load_embedding_matrix(const std::string& path, std::int32_t& rows,
                                                 std::int32_t& dim) {
    const std::string bytes = detail::read_file_bytes(path);
    if (std::string_view(bytes).substr(0, kEmbeddingMagic.size()) != kEmbeddingMagic)
        throw IoError(path + ": not an embedding matrix file (bad magic)");
    detail::ByteParser p(std::string_view(bytes).substr(kEmbeddingMagic.size()), path);
    rows = p.i32();
    dim = p.i32();
    std::vector<double> matrix(static_cast<std::size_t>(rows) * static_cast<std::size_t>(dim));
    for (double& v : matrix) v = p.f64();
    p.expect_end();
    return matrix;
}

inline std::string serialize_embedding_matrix(std::int32_t rows, std::int32_t dim,
                                              const std::vector<double>& matrix) {
    if (matrix.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(dim))
        throw ConfigError("embedding matrix size does not match declared shape");
    std::string out;
    out.append(kEmbeddingMagic);
    detail::put_i32(out, rows);
    detail::put_i32(out, dim);
    for (double v : matrix) detail::put_f64(out, v);
    return out;
}

/// Verifies a pretrained asset directory end to end. Throws ConfigError
/// listing every missing or inconsistent piece at once.
inline PretrainedAssets probe_pretrained_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<std::string> problems;
    if (dir.empty()) {
        problems.push_back("no pretrained_dir configured (set pretrained_dir or --pretrained)");
    } else if (!fs::is_directory(dir)) {
        problems.push_back("'" + dir + "' is not a directory");
    }

    PretrainedAssets assets;
    assets.dir = dir;
    assets.vocab_path = dir + "/vocab.txt";
    assets.embedding_path = dir + "/embeddings.bin";

    if (problems.empty()) {
        if (!fs::is_regular_file(assets.vocab_path))
            problems.push_back("missing vocabulary file " + assets.vocab_path);
        if (!fs::is_regular_file(assets.embedding_path))
            problems.push_back("missing embedding matrix " + assets.embedding_path);
    }

    if (problems.empty()) {
        try {
            VocabFileTokenizer vocab(assets.vocab_path);
            assets.vocab_size = vocab.vocab_size();
        } catch (const std::exception& e) {
            problems.push_back(std::string("vocab file invalid: ") + e.what());
        }
        try {
            const auto [rows, dim] = read_embedding_header(assets.embedding_path);
            assets.embed_dim = dim;
            if (assets.vocab_size > 0 && rows != assets.vocab_size)
                problems.push_back("embedding rows (" + std::to_string(rows) +
                                   ") do not match vocab size (" +
                                   std::to_string(assets.vocab_size) + ")");
        } catch (const std::exception& e) {
            problems.push_back(std::string("embedding matrix invalid: ") + e.what());
        }
    }

    if (!problems.empty()) {
        std::string msg = "pretrained-adapter probe failed:";
        for (const std::string& p : problems) msg += "\n  - " + p;
        throw ConfigError(msg);
    }
    return assets;
}

inline std::unique_ptr<TokenizerBackend> make_pretrained_tokenizer(
    const PretrainedAssets& assets) {
    return std::make_unique<VocabFileTokenizer>(assets.vocab_path);
}

/// Classifier seeded from the exported embedding table; the head is freshly
/// initialized from `seed` and the whole model fine-tunes as usual.
inline std::unique_ptr<EmbeddingAverageClassifier> make_pretrained_backend(
    const PretrainedAssets& assets, std::uint64_t seed) {
    std::int32_t rows = 0, dim = 0;
    const std::vector<double> matrix = load_embedding_matrix(assets.embedding_path, rows, dim);
    auto backend = std::make_unique<EmbeddingAverageClassifier>(rows, dim, seed);
    backend->load_embeddings(matrix);
    return backend;
}

}  // namespace emopipe
