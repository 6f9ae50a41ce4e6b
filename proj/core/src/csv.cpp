#include "sensweep/csv.hpp"

#include <cstdio>

#include "sensweep/errors.hpp"

namespace sensweep::csv {

std::vector<std::string> split_line(std::string_view line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

reader::reader(const std::filesystem::path& path, char delim)
    : path_(path), in_(path), delim_(delim) {
    if (!in_) {
        throw validation_error("cannot open file: " + path.string());
    }
    for (;;) {
        if (!std::getline(in_, line_)) {
            throw validation_error("empty file (header row required): " + path.string());
        }
        if (!line_.empty() && line_.back() == '\r') line_.pop_back();
        if (line_.empty() || line_[0] == '#') continue;
        break;
    }
    header_ = split_line(line_, delim_);
}

int reader::column(std::string_view name) const {
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (header_[i] == name) return static_cast<int>(i);
    }
    return -1;
}

bool reader::next(std::vector<std::string>& fields) {
    while (std::getline(in_, line_)) {
        if (!line_.empty() && line_.back() == '\r') line_.pop_back();
        if (line_.empty() || line_[0] == '#') continue;
        ++row_;
        fields = split_line(line_, delim_);
        return true;
    }
    return false;
}

table read_table(const std::filesystem::path& path, char delim) {
    reader r(path, delim);
    table t;
    t.header = r.header();
    std::vector<std::string> fields;
    while (r.next(fields)) t.rows.push_back(fields);
    return t;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string join(const std::vector<std::string>& fields, char delim) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(delim);
        out += fields[i];
    }
    return out;
}

}  // namespace sensweep::csv
