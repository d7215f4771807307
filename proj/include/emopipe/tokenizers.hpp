#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "emopipe/encode.hpp"
#include "emopipe/error.hpp"

namespace emopipe {

namespace detail {

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

inline std::vector<std::string_view> split_words(std::string_view text) {
    std::vector<std::string_view> words;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == ' ') {
            if (i > start) words.push_back(text.substr(start, i - start));
            start = i + 1;
        }
    }
    return words;
}

}  // namespace detail

// Shared special-token layout for the shipped tokenizers.
inline constexpr std::int32_t kPadId = 0;
inline constexpr std::int32_t kUnkId = 1;
inline constexpr std::int32_t kBosId = 2;
inline constexpr std::int32_t kEosId = 3;
inline constexpr std::int32_t kFirstWordId = 4;

/// Deterministic word-hash tokenizer: splits normalized text on spaces and
/// hashes each word into a fixed id range. No external assets, so the whole
/// pipeline is testable offline. Wraps every sequence in BOS/EOS.
class HashWordTokenizer final : public TokenizerBackend {
public:
    explicit HashWordTokenizer(std::int32_t vocab_size = 4096) : vocab_size_(vocab_size) {
        if (vocab_size_ <= kFirstWordId)
            throw ConfigError("hash tokenizer vocab must exceed the reserved id range");
    }

    std::vector<std::int32_t> tokenize(std::string_view text) const override {
        std::vector<std::int32_t> ids;
        ids.push_back(kBosId);
        for (std::string_view word : detail::split_words(text)) {
            const std::uint64_t h = detail::fnv1a64(word);
            ids.push_back(kFirstWordId +
                          static_cast<std::int32_t>(h % static_cast<std::uint64_t>(
                                                            vocab_size_ - kFirstWordId)));
        }
        ids.push_back(kEosId);
        return ids;
    }

    std::int32_t pad_id() const override { return kPadId; }
    std::int32_t vocab_size() const override { return vocab_size_; }

    std::string fingerprint() const override {
        return "hashws/v1/vocab=" + std::to_string(vocab_size_);
    }

private:
    std::int32_t vocab_size_;
};

/// Adapter for an exported vocabulary file: one token per line, line number =
/// id. The file must start with the four specials [PAD] [UNK] [BOS] [EOS] in
/// that order. Lookup is whole-word; unknown words map to [UNK].
class VocabFileTokenizer final : public TokenizerBackend {
public:
    explicit VocabFileTokenizer(const std::string& vocab_path) {
        std::ifstream in(vocab_path, std::ios::binary);
        if (!in) throw IoError("cannot open vocab file: " + vocab_path);
        std::string line;
        std::string all;
        std::int32_t next_id = 0;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (word_to_id_.count(line))
                throw ValueError(vocab_path + ": duplicate vocab entry '" + line + "'");
            word_to_id_[line] = next_id++;
            all += line;
            all.push_back('\n');
        }
        static constexpr std::string_view kSpecials[4] = {"[PAD]", "[UNK]", "[BOS]", "[EOS]"};
        for (int i = 0; i < 4; ++i) {
            auto it = word_to_id_.find(std::string(kSpecials[i]));
            if (it == word_to_id_.end() || it->second != i)
                throw SchemaError(vocab_path + ": vocab must start with " +
                                  std::string(kSpecials[i]) + " at id " + std::to_string(i));
        }
        vocab_size_ = next_id;
        content_hash_ = detail::hex64(detail::fnv1a64(all));
    }

    std::vector<std::int32_t> tokenize(std::string_view text) const override {
        std::vector<std::int32_t> ids;
        ids.push_back(kBosId);
        for (std::string_view word : detail::split_words(text)) {
            auto it = word_to_id_.find(std::string(word));
            ids.push_back(it == word_to_id_.end() ? kUnkId : it->second);
        }
        ids.push_back(kEosId);
        return ids;
    }

    std::int32_t pad_id() const override { return kPadId; }
    std::int32_t vocab_size() const override { return vocab_size_; }

    std::string fingerprint() const override {
        return "vocabfile/v1/size=" + std::to_string(vocab_size_) + "/hash=" + content_hash_;
    }

private:
    std::map<std::string, std::int32_t> word_to_id_;
    std::int32_t vocab_size_ = 0;
    std::string content_hash_;
};

}  // namespace emopipe
