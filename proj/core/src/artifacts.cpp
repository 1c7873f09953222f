#include "nslab/artifacts.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace nslab {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // prefer the shortest representation that round-trips
    for (int prec = 1; prec <= 16; ++prec) {
        char cand[40];
        std::snprintf(cand, sizeof(cand), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(cand, "%lf", &back);
        if (back == v) return cand;
    }
    return buf;
}

CsvWriter::CsvWriter(std::string path, std::vector<std::string> columns)
    : path_(std::move(path)), columns_(std::move(columns)) {}

void CsvWriter::comment(const std::string& key, const std::string& value) {
    comments_.emplace_back(key, value);
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_.size()) throw std::invalid_argument("CsvWriter::row: column count mismatch");
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) line += ',';
        line += format_double(values[i]);
    }
    rows_.push_back(std::move(line));
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
    if (values.size() != columns_.size()) throw std::invalid_argument("CsvWriter::row_mixed: column count mismatch");
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) line += ',';
        line += values[i];
    }
    rows_.push_back(std::move(line));
}

void CsvWriter::write() const {
    std::ofstream os(path_);
    if (!os) throw std::runtime_error("CsvWriter: cannot open " + path_);
    for (const auto& [k, v] : comments_) os << "# " << k << "=" << v << "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
    os << "\n";
    for (const auto& r : rows_) os << r << "\n";
    if (!os) throw std::runtime_error("CsvWriter: write failed for " + path_);
}

}  // namespace nslab
