#pragma once

#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace shedad {

/// Split one CSV line on commas.  Fields are plain (no quoting in any of
/// the formats this tool reads or writes); a trailing '\r' is stripped.
inline void split_csv_line(std::string_view line, std::vector<std::string_view>& out) {
    out.clear();
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

/// Line-oriented CSV reader that tracks line numbers for error messages.
class CsvReader {
public:
    explicit CsvReader(const std::string& path) : path_(path) {
        in_.rdbuf()->pubsetbuf(buf_.data(), static_cast<std::streamsize>(buf_.size()));
        in_.open(path, std::ios::binary);
        if (!in_) throw DataError("cannot open '" + path + "'");
    }

    /// Read the next non-empty line into `fields`; returns false at EOF.
    bool next(std::vector<std::string_view>& fields) {
        while (std::getline(in_, line_)) {
            ++line_no_;
            if (line_.empty() || line_ == "\r") continue;
            split_csv_line(line_, fields);
            return true;
        }
        return false;
    }

    std::size_t line_number() const { return line_no_; }
    const std::string& path() const { return path_; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw DataError(path_ + ":" + std::to_string(line_no_) + ": " + msg);
    }

private:
    std::string path_;
    std::ifstream in_;
    std::string line_;
    std::size_t line_no_ = 0;
    std::vector<char> buf_ = std::vector<char>(1 << 20);
};

}  // namespace shedad
