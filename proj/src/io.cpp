#include "pmf/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace pmf {

std::string format_float(double v) {
    char buf[40];
    if (std::isnan(v)) return "nan";
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void Csv::add(std::string header, std::vector<double> column) {
    if (!columns.empty() && column.size() != columns.front().size())
        throw std::invalid_argument("csv: column length mismatch");
    headers.push_back(std::move(header));
    columns.push_back(std::move(column));
}

std::string Csv::to_string() const {
    std::string out;
    for (std::size_t c = 0; c < headers.size(); ++c) {
        if (c) out += ',';
        out += headers[c];
    }
    out += '\n';
    std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) out += ',';
            out += format_float(columns[c][r]);
        }
        out += '\n';
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("io: cannot open " + path.string());
    f << content;
    if (!f) throw std::runtime_error("io: write failed for " + path.string());
}

void Report::set(const std::string& key, double value) { entries_.emplace_back(key, value); }
void Report::set(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, value);
}
void Report::set(const std::string& key, const char* value) {
    entries_.emplace_back(key, std::string(value));
}
void Report::set(const std::string& key, bool value) { entries_.emplace_back(key, value); }
void Report::set(const std::string& key, long value) { entries_.emplace_back(key, value); }

namespace {

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
            out += c;
        } else if (c == '\n') {
            out += "\\n";
        } else {
            out += c;
        }
    }
    return out;
}

}  // namespace

std::string Report::to_json() const {
    std::string out = "{\n";
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        out += "  \"" + json_escape(entries_[i].first) + "\": ";
        const Value& v = entries_[i].second;
        if (std::holds_alternative<double>(v)) {
            double d = std::get<double>(v);
            out += std::isfinite(d) ? format_float(d) : ("\"" + format_float(d) + "\"");
        } else if (std::holds_alternative<std::string>(v)) {
            out += "\"" + json_escape(std::get<std::string>(v)) + "\"";
        } else if (std::holds_alternative<bool>(v)) {
            out += std::get<bool>(v) ? "true" : "false";
        } else {
            out += std::to_string(std::get<long>(v));
        }
        out += (i + 1 < entries_.size()) ? ",\n" : "\n";
    }
    out += "}\n";
    return out;
}

void Report::write(const std::filesystem::path& path) const {
    write_text_file(path, to_json());
}

}  // namespace pmf
