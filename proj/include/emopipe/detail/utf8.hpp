#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace emopipe::detail {

inline constexpr char32_t kInvalidCodePoint = 0xFFFFFFFF;

/// Decodes one UTF-8 code point starting at `pos`. On success advances `pos`
/// past the sequence and returns the code point; on malformed input returns
/// kInvalidCodePoint and leaves `pos` at the offending byte.
inline char32_t decode_utf8(std::string_view s, std::size_t& pos) {
    if (pos >= s.size()) return kInvalidCodePoint;
    const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
    const unsigned char b0 = byte(pos);
    if (b0 < 0x80) {
        ++pos;
        return b0;
    }
    int len;
    char32_t cp;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        return kInvalidCodePoint;
    }
    if (pos + len > s.size()) return kInvalidCodePoint;
    for (int i = 1; i < len; ++i) {
        const unsigned char b = byte(pos + i);
        if ((b & 0xC0) != 0x80) return kInvalidCodePoint;
        cp = (cp << 6) | (b & 0x3F);
    }
    // Reject overlong forms, surrogates, and out-of-range values.
    static constexpr char32_t kMinByLen[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMinByLen[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
        return kInvalidCodePoint;
    pos += len;
    return cp;
}

inline void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

/// True when `s` is well-formed UTF-8 end to end.
inline bool is_valid_utf8(std::string_view s) {
    std::size_t pos = 0;
    while (pos < s.size()) {
        if (decode_utf8(s, pos) == kInvalidCodePoint) return false;
    }
    return true;
}

/// Number of code points in a valid UTF-8 string.
inline std::size_t utf8_length(std::string_view s) {
    std::size_t pos = 0, n = 0;
    while (pos < s.size()) {
        if (decode_utf8(s, pos) == kInvalidCodePoint) return n;
        ++n;
    }
    return n;
}

}  // namespace emopipe::detail
