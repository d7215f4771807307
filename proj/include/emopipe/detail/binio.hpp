#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "emopipe/error.hpp"

namespace emopipe::detail {

// Little-endian, bounds-checked binary encoding. Used by the feature cache
// and checkpoint blobs, which must reload bit-identically on any platform.

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_i32(std::string& out, std::int32_t v) {
    put_u32(out, static_cast<std::uint32_t>(v));
}

inline void put_f64(std::string& out, double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    put_u64(out, bits);
}

inline void put_bytes(std::string& out, std::string_view bytes) {
    put_u64(out, bytes.size());
    out.append(bytes);
}

class ByteParser {
public:
    ByteParser(std::string_view data, std::string what) : data_(data), what_(std::move(what)) {}

    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(data_[pos_++]);
    }

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return v;
    }

    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }

    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }

    std::string bytes() {
        const std::uint64_t n = u64();
        need(n);
        std::string out(data_.substr(pos_, n));
        pos_ += n;
        return out;
    }

    bool exhausted() const { return pos_ == data_.size(); }

    std::size_t remaining() const { return data_.size() - pos_; }

    void expect_end() const {
        if (!exhausted())
            throw IoError(what_ + ": trailing bytes after payload (" +
                          std::to_string(data_.size() - pos_) + " extra)");
    }

private:
    void need(std::uint64_t n) const {
        if (pos_ + n > data_.size())
            throw IoError(what_ + ": truncated (wanted " + std::to_string(n) + " bytes at offset " +
                          std::to_string(pos_) + ", have " + std::to_string(data_.size() - pos_) +
                          ")");
    }

    std::string_view data_;
    std::string what_;
    std::size_t pos_ = 0;
};

inline std::string read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file_bytes(const std::string& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace emopipe::detail
