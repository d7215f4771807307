#pragma once

#include <algorithm>
#include <string>
#include <string_view>

#include "emopipe/corpus.hpp"
#include "emopipe/detail/lowercase_table.hpp"
#include "emopipe/detail/utf8.hpp"

namespace emopipe {

namespace detail {

/// Unicode White_Space code points.
inline constexpr bool is_unicode_space(char32_t cp) {
    return (cp >= 0x09 && cp <= 0x0D) || cp == 0x20 || cp == 0x85 || cp == 0xA0 ||
           cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 || cp == 0x2029 ||
           cp == 0x202F || cp == 0x205F || cp == 0x3000;
}

/// Locale-independent Unicode simple lowercase of a single code point.
inline char32_t simple_lowercase(char32_t cp) {
    if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 0x20 : cp;
    const CaseMapping* begin = kLowercaseTable;
    const CaseMapping* end = kLowercaseTable + kLowercaseTableSize;
    const CaseMapping* it = std::lower_bound(
        begin, end, cp, [](const CaseMapping& m, char32_t c) { return m.upper < c; });
    if (it != end && it->upper == cp) return it->lower;
    return cp;
}

}  // namespace detail

/// Canonical text cleaning applied identically at train and inference time:
/// Unicode simple lowercase, every whitespace run collapsed to one ASCII
/// space, outer whitespace stripped. Input must be valid UTF-8 (ingestion
/// rejects anything else).
inline std::string normalize_text(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    bool seen_token = false;
    std::size_t pos = 0;
    while (pos < raw.size()) {
        const char32_t cp = detail::decode_utf8(raw, pos);
        if (cp == detail::kInvalidCodePoint)
            throw std::invalid_argument("normalize_text: input is not valid UTF-8");
        if (detail::is_unicode_space(cp)) {
            pending_space = seen_token;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        detail::append_utf8(out, detail::simple_lowercase(cp));
        seen_token = true;
    }
    return out;
}

/// Copy of `dataset` with every text normalized; ids, labels, and order are
/// untouched.
inline Dataset preprocess_dataset(const Dataset& dataset) {
    Dataset out = dataset;
    for (Sample& s : out.samples) s.text = normalize_text(s.text);
    return out;
}

}  // namespace emopipe
