#pragma once

// Minimal delimiter-separated text I/O: header row required, no quoting,
// trailing CR stripped.  Doubles are written with 17 significant digits so
// output files round-trip bit-exactly.

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace sensweep::csv {

std::vector<std::string> split_line(std::string_view line, char delim);

// Streaming reader; data rows are numbered from 1 (header excluded).
// Lines starting with '#' are treated as comments and skipped.
class reader {
public:
    explicit reader(const std::filesystem::path& path, char delim = ',');

    const std::vector<std::string>& header() const { return header_; }
    // Column index or -1.
    int column(std::string_view name) const;

    // Fills `fields` with the next data row; false at end of file.
    bool next(std::vector<std::string>& fields);
    std::size_t row() const { return row_; }

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::ifstream in_;
    char delim_;
    std::vector<std::string> header_;
    std::size_t row_ = 0;
    std::string line_;
};

struct table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

table read_table(const std::filesystem::path& path, char delim = ',');

// 17 significant digits; round-trips any finite double.
std::string format_double(double v);

std::string join(const std::vector<std::string>& fields, char delim = ',');

}  // namespace sensweep::csv
