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
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "chantool/core.hpp"

// INI-style configuration:
//
//   # comment
//   [section]
//   key = value      ; trailing comments start with '#' or ';'
//
// Sections and keys are checked against a fixed schema; anything unknown is an error.
// Keys carry their unit as a suffix (_m, _ghz, _hz, _db, _s, ...).

namespace chantool
{

class ConfigError : public Error
{
public:
    using Error::Error;
};

inline const std::map<std::string, std::set<std::string>, std::less<>> &config_schema()
{
    static const std::map<std::string, std::set<std::string>, std::less<>> schema = {
        {"blockage",
         {"model", "carrier_ghz", "tx_x_m", "tx_y_m", "tx_z_m", "rx_x_m", "rx_y_m", "rx_z_m", "body_width_m",
          "body_height_m", "body_center_z_m", "cylinder_radius_m", "trajectory", "crossing_distance_m", "start_m",
          "stop_m", "step_m", "gtd_terms", "gtd_combine"}},
        {"pathloss",
         {"model", "preset", "ple", "alpha", "beta_db", "gamma", "sigma_db", "n_samples", "distance_min_m",
          "distance_max_m", "freq_ghz", "seed"}},
        {"gbsm",
         {"carrier_ghz", "n_tx", "n_rx", "antenna_spacing_m", "k_factor_db", "mean_clusters", "rays_per_cluster",
          "delay_scale_s", "ray_delay_scale_s", "per_cluster_shadow_db", "angle_spread_rad", "birth_rate_hz",
          "death_rate_hz", "snapshot_interval_s", "duration_s", "tx_x_m", "tx_y_m", "tx_z_m", "rx_x_m", "rx_y_m",
          "rx_z_m", "tx_vx_mps", "tx_vy_mps", "tx_vz_mps", "rx_vx_mps", "rx_vy_mps", "rx_vz_mps", "sample_period_s",
          "n_delay", "seed"}},
        {"sounder",
         {"pn_order", "pad_head", "pad_tail", "interp_factor", "rrc_rolloff", "rrc_span_chips", "sample_rate_hz",
          "gt_dbi", "gr_dbi", "p_pa_dbm", "p_cal_dbm", "g_lna_db", "l_cable_db", "max_paths", "rel_threshold_db",
          "noise_margin_db", "noise_tail_fraction", "snr_db", "seed", "n_snapshots", "path_delays_ns",
          "path_powers_db"}},
        {"analysis", {"threshold", "tx_index", "rx_index", "los_track"}},
    };
    return schema;
}

struct ConfigEntry
{
    std::string value;
    int line = 0;
};

class Config
{
public:
    static Config parse(std::string_view text, std::string source = "<config>")
    {
        Config c;
        c.source_ = std::move(source);
        std::string current;
        int line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size())
        {
            const std::size_t nl = text.find('\n', pos);
            std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
            pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
            ++line_no;

            std::string line(strip(cut_comment(raw)));
            if (line.empty())
                continue;
            if (line.front() == '[')
            {
                if (line.back() != ']')
                    c.fail(line_no, "malformed section header");
                current = std::string(strip(std::string_view(line).substr(1, line.size() - 2)));
                if (!config_schema().count(current))
                    c.fail(line_no, "unknown section [" + current + "]");
                if (c.sections_.count(current))
                    c.fail(line_no, "duplicate section [" + current + "]");
                c.sections_[current];
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                c.fail(line_no, "expected 'key = value'");
            if (current.empty())
                c.fail(line_no, "key outside of any section");
            const std::string key(strip(std::string_view(line).substr(0, eq)));
            const std::string value(strip(std::string_view(line).substr(eq + 1)));
            const auto &allowed = config_schema().find(current)->second;
            if (!allowed.count(key))
                c.fail(line_no, "unknown key '" + key + "' in [" + current + "]");
            auto &sec = c.sections_[current];
            if (sec.count(key))
                c.fail(line_no, "duplicate key '" + key + "'");
            if (value.empty())
                c.fail(line_no, "empty value for '" + key + "'");
            sec[key] = ConfigEntry{value, line_no};
        }
        return c;
    }

    static Config load(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw ConfigError(path.string() + ": cannot open config file");
        std::stringstream ss;
        ss << in.rdbuf();
        return parse(ss.str(), path.string());
    }

    bool has_section(std::string_view s) const { return sections_.count(std::string(s)) != 0; }

    void require_section(std::string_view s) const
    {
        if (!has_section(s))
            throw ConfigError(source_ + ": missing section [" + std::string(s) + "]");
    }

    bool has(std::string_view section, std::string_view key) const { return find(section, key) != nullptr; }

    std::string get_string(std::string_view section, std::string_view key, std::string fallback) const
    {
        const auto *e = find(section, key);
        return e ? e->value : fallback;
    }

    double get_double(std::string_view section, std::string_view key, double fallback) const
    {
        const auto *e = find(section, key);
        return e ? to_double(*e, key) : fallback;
    }

    std::int64_t get_int(std::string_view section, std::string_view key, std::int64_t fallback) const
    {
        const auto *e = find(section, key);
        if (!e)
            return fallback;
        std::int64_t v = 0;
        const auto *b = e->value.data();
        const auto *end = b + e->value.size();
        auto [p, ec] = std::from_chars(b, end, v);
        if (ec != std::errc() || p != end)
            fail(e->line, "'" + std::string(key) + "' expects an integer, got '" + e->value + "'");
        return v;
    }

    bool get_bool(std::string_view section, std::string_view key, bool fallback) const
    {
        const auto *e = find(section, key);
        if (!e)
            return fallback;
        if (e->value == "true" || e->value == "1" || e->value == "yes")
            return true;
        if (e->value == "false" || e->value == "0" || e->value == "no")
            return false;
        fail(e->line, "'" + std::string(key) + "' expects true or false, got '" + e->value + "'");
    }

    std::vector<double> get_list(std::string_view section, std::string_view key, std::vector<double> fallback) const
    {
        const auto *e = find(section, key);
        if (!e)
            return fallback;
        std::vector<double> out;
        std::string_view rest = e->value;
        while (true)
        {
            const auto comma = rest.find(',');
            ConfigEntry item{std::string(strip(rest.substr(0, comma))), e->line};
            out.push_back(to_double(item, key));
            if (comma == std::string_view::npos)
                break;
            rest = rest.substr(comma + 1);
        }
        return out;
    }

    // Line number of a key, for error messages raised by callers (0 if absent)
    int line_of(std::string_view section, std::string_view key) const
    {
        const auto *e = find(section, key);
        return e ? e->line : 0;
    }

    [[noreturn]] void fail(int line, const std::string &msg) const
    {
        throw ConfigError(source_ + ":" + std::to_string(line) + ": " + msg);
    }

    const std::string &source() const { return source_; }

private:
    static std::string_view cut_comment(std::string_view s)
    {
        const auto p = s.find_first_of("#;");
        return p == std::string_view::npos ? s : s.substr(0, p);
    }

    static std::string_view strip(std::string_view s)
    {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string_view::npos)
            return {};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    const ConfigEntry *find(std::string_view section, std::string_view key) const
    {
        auto s = sections_.find(std::string(section));
        if (s == sections_.end())
            return nullptr;
        auto k = s->second.find(std::string(key));
        return k == s->second.end() ? nullptr : &k->second;
    }

    double to_double(const ConfigEntry &e, std::string_view key) const
    {
        double v = 0.0;
        const auto *b = e.value.data();
        const auto *end = b + e.value.size();
        auto [p, ec] = std::from_chars(b, end, v);
        if (ec != std::errc() || p != end || !std::isfinite(v))
            fail(e.line, "'" + std::string(key) + "' expects a finite number, got '" + e.value + "'");
        return v;
    }

    std::string source_;
    std::map<std::string, std::map<std::string, ConfigEntry>> sections_;
};

} // namespace chantool
