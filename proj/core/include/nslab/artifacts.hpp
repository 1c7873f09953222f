#pragma once

#include <string>
#include <vector>

#include "nslab/config.hpp"

namespace nslab {

/// Shortest round-trip decimal form; identical across runs and thread counts.
std::string format_double(double v);

/// CSV with `# key=value` comment headers (config hash and seed always
/// included) and deterministic number formatting.
class CsvWriter {
public:
    CsvWriter(std::string path, std::vector<std::string> columns);

    void comment(const std::string& key, const std::string& value);
    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& values);

    /// Writes the file; rows must match the column count.
    void write() const;

private:
    std::string path_;
    std::vector<std::string> columns_;
    std::vector<std::pair<std::string, std::string>> comments_;
    std::vector<std::string> rows_;
};

}  // namespace nslab
