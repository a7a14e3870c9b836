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

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "chantool/core.hpp"
#include "chantool/gbsm.hpp"
#include "chantool/parallel.hpp"
#include "chantool/sounder.hpp"

namespace chantool
{

struct CorrelationMatrix
{
    std::size_t snapshot_count = 0;
    std::vector<double> values; // row-major, snapshot_count^2

    double operator()(std::size_t i, std::size_t j) const { return values[i * snapshot_count + j]; }
    double &operator()(std::size_t i, std::size_t j) { return values[i * snapshot_count + j]; }

    static CorrelationMatrix identity(std::size_t n)
    {
        CorrelationMatrix m;
        m.snapshot_count = n;
        m.values.assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = 1.0;
        return m;
    }
};

struct StationaryReport
{
    std::vector<std::pair<std::size_t, std::size_t>> intervals; // inclusive [start, end]
    double threshold = 0.8;
};

namespace detail
{
struct Centered
{
    std::vector<double> v;
    double norm = 0.0; // zero for a constant vector
};

inline Centered center_vector(const std::vector<double> &x)
{
    Centered c;
    c.v = x;
    double mean = 0.0;
    for (double a : x)
        mean += a;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (auto &a : c.v)
    {
        a -= mean;
        ss += a * a;
    }
    c.norm = std::sqrt(ss);
    // relative test so vectors that are constant up to rounding count as constant
    double scale = 0.0;
    for (double a : x)
        scale = std::max(scale, std::fabs(a));
    if (c.norm <= 1e-14 * scale * std::sqrt(static_cast<double>(x.size())))
        c.norm = 0.0;
    return c;
}

inline double pearson(const Centered &a, const Centered &b)
{
    if (a.norm == 0.0 && b.norm == 0.0)
        return 1.0;
    if (a.norm == 0.0 || b.norm == 0.0)
        return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i)
        s += a.v[i] * b.v[i];
    return std::clamp(s / (a.norm * b.norm), -1.0, 1.0);
}
} // namespace detail

// Pearson correlation between two vectors. Two constant vectors correlate to 1, a constant
// and a varying one to 0.
inline double pearson_correlation(const std::vector<double> &a, const std::vector<double> &b)
{
    if (a.size() != b.size() || a.empty())
        throw InvalidArgument("pearson_correlation: length mismatch");
    return detail::pearson(detail::center_vector(a), detail::center_vector(b));
}

// Pairwise correlation of linear-power PDPs
inline CorrelationMatrix pdp_correlation_matrix(const std::vector<PowerDelayProfile> &pdps)
{
    if (pdps.size() < 2)
        throw InvalidArgument("pdp_correlation_matrix: at least 2 PDPs required");
    const std::size_t len = pdps.front().power_db.size();
    if (len == 0)
        throw InvalidArgument("pdp_correlation_matrix: empty PDP");
    for (const auto &p : pdps)
        if (p.power_db.size() != len)
            throw InvalidArgument("pdp_correlation_matrix: PDP length mismatch");

    const std::size_t n = pdps.size();
    std::vector<detail::Centered> centered(n);
    parallel_for(n, [&](std::size_t i) { centered[i] = detail::center_vector(pdps[i].linear()); });

    CorrelationMatrix m = CorrelationMatrix::identity(n);
    parallel_for(n, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j)
            m(i, j) = detail::pearson(centered[i], centered[j]);
    });
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            m(j, i) = m(i, j);
    return m;
}

// Greedy anchored segmentation: a window grows from its anchor while corr(anchor, j)
// stays at or above the threshold.
inline StationaryReport stationary_intervals(const CorrelationMatrix &corr, double threshold = 0.8)
{
    if (!(threshold > 0.0) || !(threshold < 1.0))
        throw InvalidArgument("stationary_intervals: threshold must be in (0, 1)");
    StationaryReport r;
    r.threshold = threshold;
    const std::size_t n = corr.snapshot_count;
    std::size_t anchor = 0;
    while (anchor < n)
    {
        std::size_t end = anchor;
        while (end + 1 < n && corr(anchor, end + 1) >= threshold)
            ++end;
        r.intervals.emplace_back(anchor, end);
        anchor = end + 1;
    }
    return r;
}

// Co-polarized minus cross-polarized received power
inline double xpr_db(const std::vector<Mpc> &co_pol, const std::vector<Mpc> &cross_pol)
{
    if (co_pol.empty() || cross_pol.empty())
        throw InvalidArgument("no paths");
    return received_power(co_pol) - received_power(cross_pol);
}

struct TrackPoint
{
    double t = 0.0;
    double power_db = power_floor_db;
};

// LOS power of one CIR: strongest bin in the 3-bin window starting at the first bin that
// carries power above the extraction threshold
inline double los_power_db(const CirSnapshot &cir)
{
    const auto mpcs = extract_mpcs(cir);
    std::size_t first = 0;
    if (!mpcs.empty())
        first = static_cast<std::size_t>(std::llround(mpcs.front().delay_s / cir.sample_period_s));
    else
        return power_floor_db;
    double best = 0.0;
    for (std::size_t i = first; i < std::min(first + 3, cir.samples.size()); ++i)
        best = std::max(best, std::norm(cir.samples[i]));
    return power_to_db(best);
}

inline std::vector<TrackPoint> los_power_track(const CirSequence &seq, int tx = 0, int rx = 0)
{
    if (seq.n_time == 0 || seq.snapshots.empty())
        throw InvalidArgument("los_power_track: empty sequence");
    std::vector<TrackPoint> out(seq.n_time);
    parallel_for(seq.n_time, [&](std::size_t i) {
        const auto &s = seq.at(i, tx, rx);
        out[i] = TrackPoint{s.t, los_power_db(s)};
    });
    return out;
}

} // namespace chantool
