#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "emopipe/error.hpp"

namespace emopipe::detail {

/// Minimal RFC 4180 reader: comma separator, double-quote quoting with ""
/// escapes, LF or CRLF records, newlines allowed inside quoted fields.
class CsvReader {
public:
    explicit CsvReader(std::string content) : content_(std::move(content)) {
        // Strip a UTF-8 BOM if present.
        if (content_.size() >= 3 && content_.compare(0, 3, "\xEF\xBB\xBF") == 0) pos_ = 3;
    }

    static CsvReader from_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open file: " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return CsvReader(buf.str());
    }

    bool at_end() const { return pos_ >= content_.size(); }

    /// Reads the next record into `fields`. Returns false at end of input.
    /// `record_number` (1-based, header = 1) identifies the record in errors.
    bool next_record(std::vector<std::string>& fields) {
        fields.clear();
        if (at_end()) return false;
        ++record_number_;
        std::string field;
        bool quoted = false;
        for (;;) {
            if (pos_ >= content_.size()) {
                if (quoted)
                    throw ValueError("unterminated quoted field in record " +
                                     std::to_string(record_number_));
                fields.push_back(std::move(field));
                return true;
            }
            const char c = content_[pos_++];
            if (quoted) {
                if (c == '"') {
                    if (pos_ < content_.size() && content_[pos_] == '"') {
                        field.push_back('"');
                        ++pos_;
                    } else {
                        quoted = false;
                    }
                } else {
                    field.push_back(c);
                }
            } else if (c == '"' && field.empty()) {
                quoted = true;
            } else if (c == ',') {
                fields.push_back(std::move(field));
                field.clear();
            } else if (c == '\n' || c == '\r') {
                if (c == '\r' && pos_ < content_.size() && content_[pos_] == '\n') ++pos_;
                fields.push_back(std::move(field));
                return true;
            } else {
                field.push_back(c);
            }
        }
    }

    int record_number() const { return record_number_; }

    std::string_view content() const { return content_; }

private:
    std::string content_;
    std::size_t pos_ = 0;
    int record_number_ = 0;
};

inline bool needs_quoting(std::string_view field) {
    return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

inline void append_csv_field(std::string& out, std::string_view field) {
    if (!needs_quoting(field)) {
        out.append(field);
        return;
    }
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
}

}  // namespace emopipe::detail
