#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emopipe/detail/binio.hpp"
#include "emopipe/error.hpp"
#include "emopipe/labelspace.hpp"

namespace emopipe {

/// Pluggable tokenizer. Implementations own their special-token scheme and
/// must be deterministic: identical text yields identical ids, and the pad
/// id never appears among real tokens.
class TokenizerBackend {
public:
    virtual ~TokenizerBackend() = default;

    /// Full id sequence for a normalized text, special tokens included,
    /// before any truncation or padding.
    virtual std::vector<std::int32_t> tokenize(std::string_view text) const = 0;

    virtual std::int32_t pad_id() const = 0;

    virtual std::int32_t vocab_size() const = 0;

    /// Identifies the backend and its configuration; recorded in feature
    /// caches and checkpoints so stale artifacts are detectable.
    virtual std::string fingerprint() const = 0;
};

/// Fixed-length encoded sample: `sequence_budget` token ids, a 1s-then-0s
/// attention mask, and (for training data) the class ordinal.
struct FeatureRecord {
    std::vector<std::int32_t> token_ids;
    std::vector<std::uint8_t> attention_mask;
    std::optional<DominantLabel> label;

    std::size_t real_token_count() const {
        std::size_t n = 0;
        for (auto m : attention_mask) n += m;
        return n;
    }

    bool operator==(const FeatureRecord&) const = default;
};

struct FeatureSet {
    std::vector<FeatureRecord> records;
    std::int32_t sequence_budget = 128;
    std::string backend_fingerprint;
    bool labeled = false;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }

    bool operator==(const FeatureSet&) const = default;
};

/// Encodes one text: tokenize, truncate to `budget` keeping the head, then
/// right-pad with the backend's pad id. Special tokens count inside the
/// budget.
inline FeatureRecord encode_text(std::string_view text, const TokenizerBackend& backend,
                                 std::int32_t budget) {
    if (budget < 2)
        throw ConfigError("sequence budget must be >= 2, got " + std::to_string(budget));
    std::vector<std::int32_t> ids = backend.tokenize(text);
    const auto real = std::min<std::size_t>(ids.size(), static_cast<std::size_t>(budget));
    ids.resize(static_cast<std::size_t>(budget), backend.pad_id());

    FeatureRecord rec;
    rec.token_ids = std::move(ids);
    rec.attention_mask.assign(static_cast<std::size_t>(budget), 0);
    for (std::size_t i = 0; i < real; ++i) rec.attention_mask[i] = 1;
    return rec;
}

/// Encodes reduced training rows in order, carrying each dominant label.
inline FeatureSet encode_dataset(const std::vector<ReducedSample>& reduced,
                                 const TokenizerBackend& backend, std::int32_t budget) {
    FeatureSet set;
    set.sequence_budget = budget;
    set.backend_fingerprint = backend.fingerprint();
    set.labeled = true;
    set.records.reserve(reduced.size());
    for (const ReducedSample& rs : reduced) {
        FeatureRecord rec = encode_text(rs.sample.text, backend, budget);
        rec.label = rs.label;
        set.records.push_back(std::move(rec));
    }
    return set;
}

/// Unlabeled variant used on the test split.
inline FeatureSet encode_texts(const std::vector<std::string>& texts,
                               const TokenizerBackend& backend, std::int32_t budget) {
    FeatureSet set;
    set.sequence_budget = budget;
    set.backend_fingerprint = backend.fingerprint();
    set.labeled = false;
    set.records.reserve(texts.size());
    for (const std::string& t : texts) set.records.push_back(encode_text(t, backend, budget));
    return set;
}

// ---------------------------------------------------------------------------
// On-disk feature cache. Columnar: header, then all token ids, then all
// masks, then labels. Reload is bit-identical; the header pins the budget,
// backend fingerprint, and the run config hash that produced the file.

inline constexpr std::string_view kFeatureCacheMagic = "EMOFEAT1";

inline std::string serialize_feature_set(const FeatureSet& set, std::string_view config_hash) {
    std::string out;
    out.append(kFeatureCacheMagic);
    detail::put_u32(out, static_cast<std::uint32_t>(set.sequence_budget));
    detail::put_u64(out, set.records.size());
    out.push_back(set.labeled ? 1 : 0);
    detail::put_bytes(out, set.backend_fingerprint);
    detail::put_bytes(out, config_hash);
    for (const FeatureRecord& rec : set.records) {
        for (std::int32_t id : rec.token_ids) detail::put_i32(out, id);
    }
    for (const FeatureRecord& rec : set.records) {
        for (std::uint8_t m : rec.attention_mask) out.push_back(static_cast<char>(m));
    }
    if (set.labeled) {
        for (const FeatureRecord& rec : set.records)
            detail::put_i32(out, static_cast<std::int32_t>(rec.label.value()));
    }
    return out;
}

inline FeatureSet parse_feature_set(std::string_view bytes, const std::string& what,
                                    std::string* config_hash_out = nullptr) {
    if (bytes.substr(0, kFeatureCacheMagic.size()) != kFeatureCacheMagic)
        throw IoError(what + ": not a feature cache (bad magic)");
    detail::ByteParser p(bytes.substr(kFeatureCacheMagic.size()), what);

    FeatureSet set;
    set.sequence_budget = static_cast<std::int32_t>(p.u32());
    const std::uint64_t count = p.u64();
    set.labeled = p.u8() != 0;
    set.backend_fingerprint = p.bytes();
    const std::string config_hash = p.bytes();
    if (config_hash_out) *config_hash_out = config_hash;

    const auto budget = static_cast<std::size_t>(set.sequence_budget);
    if (set.sequence_budget < 2)
        throw IoError(what + ": invalid sequence budget " +
                      std::to_string(set.sequence_budget));
    // Each record needs budget i32 ids plus budget mask bytes; reject files
    // whose declared count cannot fit before allocating for it.
    if (count > p.remaining() / (budget * 5))
        throw IoError(what + ": truncated (declares " + std::to_string(count) + " records)");
    set.records.resize(count);
    for (FeatureRecord& rec : set.records) {
        rec.token_ids.resize(budget);
        for (std::int32_t& id : rec.token_ids) id = p.i32();
    }
    for (FeatureRecord& rec : set.records) {
        rec.attention_mask.resize(budget);
        for (std::uint8_t& m : rec.attention_mask) m = p.u8();
    }
    if (set.labeled) {
        for (FeatureRecord& rec : set.records) rec.label = emotion_from_ordinal(p.i32());
    }
    p.expect_end();
    return set;
}

inline void save_feature_cache(const FeatureSet& set, const std::string& path,
                               std::string_view config_hash) {
    detail::write_file_bytes(path, serialize_feature_set(set, config_hash));
}

inline FeatureSet load_feature_cache(const std::string& path,
                                     std::string* config_hash_out = nullptr) {
    return parse_feature_set(detail::read_file_bytes(path), path, config_hash_out);
}

}  // namespace emopipe
