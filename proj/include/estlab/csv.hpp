// Copyright 2026 The estlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace estlab {

inline constexpr const char *kVersion = "0.1.0";

/// 64-bit FNV-1a, used as a short stable digest of run configurations.
inline std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string digest_hex(std::string_view text) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(text)));
    return buf;
}

/// Always 17 significant digits, so reruns compare byte-for-byte.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// A cell is either text or a number.
struct Cell {
    Cell(double v) : text(format_double(v)) {}
    Cell(int v) : text(std::to_string(v)) {}
    Cell(long v) : text(std::to_string(v)) {}
    Cell(long long v) : text(std::to_string(v)) {}
    Cell(unsigned long v) : text(std::to_string(v)) {}
    Cell(unsigned long long v) : text(std::to_string(v)) {}
    Cell(bool v) : text(v ? "1" : "0") {}
    Cell(const char *s) : text(s) {}
    Cell(std::string s) : text(std::move(s)) {}
    std::string text;
};

/// Tabular result: header names, rows of cells, and the metadata that goes on
/// the leading comment line.
struct Table {
    std::vector<std::string> headers;
    std::vector<std::vector<std::string>> rows;
    std::string config;  ///< canonical text of the parameters; digested into the header
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument unless the row matches the header width.
    void add_row(std::vector<Cell> cells) {
        if (cells.size() != headers.size()) {
            throw std::invalid_argument("row has " + std::to_string(cells.size()) + " cells, table has " +
                                        std::to_string(headers.size()) + " columns");
        }
        std::vector<std::string> row;
        row.reserve(cells.size());
        for (auto &c : cells) row.push_back(std::move(c.text));
        rows.push_back(std::move(row));
    }

    std::string metadata_line() const {
        return std::string("# estlab-version=") + kVersion + " config=" + digest_hex(config) +
               " seed=" + std::to_string(seed);
    }

    /// Header line plus data rows, LF terminated.
    std::string data_section() const {
        std::string out;
        auto join = [&out](const std::vector<std::string> &cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i) out += ',';
                out += cells[i];
            }
            out += '\n';
        };
        join(headers);
        for (const auto &r : rows) join(r);
        return out;
    }

    std::string to_csv() const { return metadata_line() + "\n" + data_section(); }

    /// Index of a named column, or npos.
    std::size_t column(std::string_view name) const {
        for (std::size_t i = 0; i < headers.size(); ++i) {
            if (headers[i] == name) return i;
        }
        return static_cast<std::size_t>(-1);
    }

    double number(std::size_t row, std::string_view name) const { return std::stod(rows.at(row).at(column(name))); }
};

} // namespace estlab
