#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "divcorr/errors.hpp"

namespace divcorr {

// %.17g keeps doubles round-trippable and the bytes reproducible.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add_row(std::vector<std::string> cells) {
        if (cells.size() != columns_.size())
            throw ConfigError("csv row width mismatch");
        rows_.push_back(std::move(cells));
    }

    std::string body() const {
        std::string out;
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            if (i) out += ",";
            out += columns_[i];
        }
        out += "\n";
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out += ",";
                out += row[i];
            }
            out += "\n";
        }
        return out;
    }

    void write(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw ConfigError("cannot open output file " + path);
        f << body();
    }

    std::size_t row_count() const { return rows_.size(); }

  private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

} // namespace divcorr
