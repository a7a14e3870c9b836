// SPDX-License-Identifier: Apache-2.0
//
// chantool - millimeter-wave channel modeling toolkit
// Copyright (C) 2026 chantool contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "chantool/core.hpp"
#include "chantool/pathloss.hpp"

namespace chantool
{

// Shortest round-trip decimal form; locale independent. NaN prints as "nan".
inline std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    if (v == 0.0)
        v = 0.0; // drop the sign of -0
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

// Fixed number of decimals, for human-facing columns
inline std::string format_fixed(double v, int decimals)
{
    if (!std::isfinite(v))
        return format_double(v);
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, decimals);
    std::string s(buf, p);
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos)
        s.erase(0, 1);
    return s;
}

class CsvWriter
{
public:
    explicit CsvWriter(std::initializer_list<std::string_view> header)
    {
        bool first = true;
        for (auto h : header)
        {
            if (!first)
                out_ += ',';
            out_ += h;
            first = false;
        }
        out_ += '\n';
    }

    CsvWriter &row(const std::vector<std::string> &cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i)
        {
            if (i)
                out_ += ',';
            out_ += cells[i];
        }
        out_ += '\n';
        return *this;
    }

    CsvWriter &raw_line(std::string_view line)
    {
        out_ += line;
        out_ += '\n';
        return *this;
    }

    const std::string &str() const { return out_; }

private:
    std::string out_;
};

inline std::vector<std::string> split_csv_line(std::string_view line)
{
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true)
    {
        const auto comma = line.find(',', pos);
        auto cell = line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t'))
            cell.remove_prefix(1);
        while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r'))
            cell.remove_suffix(1);
        out.emplace_back(cell);
        if (comma == std::string_view::npos)
            break;
        pos = comma + 1;
    }
    return out;
}

inline double parse_double_cell(const std::string &cell, const std::string &where)
{
    double v = 0.0;
    auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || p != cell.data() + cell.size())
        throw InvalidArgument(where + ": '" + cell + "' is not a number");
    return v;
}

// Reads distance_m,freq_ghz,pl_db rows
inline std::vector<PathLossSample> parse_path_loss_csv(std::string_view text, const std::string &source = "<csv>")
{
    std::vector<PathLossSample> out;
    std::size_t pos = 0;
    int line_no = 0;
    bool header_seen = false;
    while (pos < text.size())
    {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty() || line.front() == '#')
            continue;
        const auto cells = split_csv_line(line);
        const std::string where = source + ":" + std::to_string(line_no);
        if (!header_seen)
        {
            if (cells != std::vector<std::string>{"distance_m", "freq_ghz", "pl_db"})
                throw InvalidArgument(where + ": expected header distance_m,freq_ghz,pl_db");
            header_seen = true;
            continue;
        }
        if (cells.size() != 3)
            throw InvalidArgument(where + ": expected 3 columns");
        PathLossSample s{parse_double_cell(cells[0], where), parse_double_cell(cells[1], where),
                         parse_double_cell(cells[2], where)};
        if (!std::isfinite(s.distance_m) || s.distance_m < 1.0)
            throw InvalidArgument(where + ": distance_m must be >= 1");
        if (!std::isfinite(s.freq_ghz) || !(s.freq_ghz > 0.0))
            throw InvalidArgument(where + ": freq_ghz must be positive");
        if (!std::isfinite(s.pl_db))
            throw InvalidArgument(where + ": pl_db must be finite");
        out.push_back(s);
    }
    if (!header_seen)
        throw InvalidArgument(source + ": empty file");
    return out;
}

inline std::string read_text_file(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InvalidArgument("cannot open '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace chantool
