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
#include <cstdint>
#include <functional>
#include <vector>

#include "chantool/core.hpp"
#include "chantool/parallel.hpp"
#include "chantool/random.hpp"

// Time-varying cluster channel with a Ricean LOS term:
//
//   h_qp(t, tau) = sqrt(K/(K+1)) h_LOS + sqrt(1/(K+1)) sum_n sum_m h_nm
//
// Clusters follow a per-step birth-death process. Arrays are uniform linear along y.

namespace chantool
{

struct GbsmConfig
{
    FrequencyBand band = band_28ghz;
    int n_tx = 1;
    int n_rx = 1;
    double antenna_spacing_m = 0.075;
    double k_factor_db = 3.0;
    double mean_clusters = 8.0;
    int rays_per_cluster = 10;
    double delay_scale_s = 30e-9;        // mean excess delay of clusters
    double ray_delay_scale_s = 1e-9;     // mean intra-cluster excess delay
    double per_cluster_shadow_db = 3.0;
    double angle_spread_rad = 0.1;       // per-ray deviation around the cluster mean
    double birth_rate_hz = 0.0;
    double death_rate_hz = 0.0;
    double snapshot_interval_s = 62.5e-6;
    double duration_s = 1.0;
    Point3 tx_position{0.0, 0.0, 1.5};
    Point3 rx_position{10.0, 0.0, 1.5};
    Point3 tx_velocity{0.0, 0.0, 0.0};
    Point3 rx_velocity{0.0, 0.0, 0.0};
    double sample_period_s = 1.0 / 1.28e9;
    int n_delay = 256;
    std::int64_t seed = 1;

    std::size_t time_steps() const
    {
        return static_cast<std::size_t>(std::llround(std::floor(duration_s / snapshot_interval_s + 1e-9)));
    }

    void validate() const
    {
        band.validate();
        if (n_tx < 1 || n_rx < 1 || n_tx > 255 || n_rx > 255)
            throw InvalidArgument("GbsmConfig: antenna counts must be in [1, 255]");
        if (!(antenna_spacing_m >= 0.0))
            throw InvalidArgument("GbsmConfig: antenna_spacing_m must be >= 0");
        if (!std::isfinite(k_factor_db))
            throw InvalidArgument("GbsmConfig: k_factor_db must be finite");
        if (!(mean_clusters >= 0.0) || !std::isfinite(mean_clusters))
            throw InvalidArgument("GbsmConfig: mean_clusters must be >= 0");
        if (rays_per_cluster < 1)
            throw InvalidArgument("GbsmConfig: rays_per_cluster must be >= 1");
        if (!(delay_scale_s > 0.0) || !(ray_delay_scale_s >= 0.0))
            throw InvalidArgument("GbsmConfig: delay scales must be positive");
        if (!(per_cluster_shadow_db >= 0.0) || !(angle_spread_rad >= 0.0))
            throw InvalidArgument("GbsmConfig: spreads must be >= 0");
        if (!(birth_rate_hz >= 0.0) || !(death_rate_hz >= 0.0))
            throw InvalidArgument("GbsmConfig: rates must be >= 0");
        if (!(snapshot_interval_s > 0.0) || !(duration_s > 0.0))
            throw InvalidArgument("GbsmConfig: snapshot_interval_s and duration_s must be positive");
        if (!(sample_period_s > 0.0) || n_delay < 1)
            throw InvalidArgument("GbsmConfig: delay grid must be non-empty");
        if (!tx_position.finite() || !rx_position.finite() || !tx_velocity.finite() || !rx_velocity.finite())
            throw InvalidArgument("GbsmConfig: positions and velocities must be finite");
        if (tx_position == rx_position)
            throw InvalidArgument("GbsmConfig: tx and rx coincide");
    }
};

// Exceeding the snapshot budget of a run
class SizingError : public Error
{
public:
    using Error::Error;
};

inline constexpr std::size_t max_snapshots = 10'000'000;

struct Ray
{
    double aoa_rad = 0.0;
    double aod_rad = 0.0;
    double phase_rad = 0.0;
    double sub_delay_s = 0.0;
};

struct Cluster
{
    std::uint64_t id = 0;
    double delay_s = 0.0; // absolute delay
    double power_linear = 0.0;
    double shadow_linear = 1.0; // unnormalized weight, kept for renormalization
    std::vector<Ray> rays;
};

struct ClusterState
{
    std::vector<Cluster> clusters;
    double t = 0.0;
    std::uint64_t next_id = 0;

    double total_power() const
    {
        double p = 0.0;
        for (const auto &c : clusters)
            p += c.power_linear;
        return p;
    }
};

inline double los_delay(const GbsmConfig &cfg) { return distance(cfg.tx_position, cfg.rx_position) / speed_of_light; }

namespace detail
{
inline double wrap_angle(double a)
{
    a = std::fmod(a + pi, 2.0 * pi);
    if (a < 0.0)
        a += 2.0 * pi;
    return a - pi;
}

inline void normalize_powers(ClusterState &s)
{
    double total = 0.0;
    for (const auto &c : s.clusters)
        total += c.shadow_linear;
    for (auto &c : s.clusters)
        c.power_linear = c.shadow_linear / total;
}

// New cluster with excess delay tau over the LOS delay
inline Cluster make_cluster(const GbsmConfig &cfg, double base_delay, RandomStream &rs, std::uint64_t id)
{
    Cluster c;
    c.id = id;
    const double excess = rs.exponential(cfg.delay_scale_s);
    c.delay_s = base_delay + excess;
    const double z = rs.normal(0.0, cfg.per_cluster_shadow_db);
    c.shadow_linear = std::exp(-excess / cfg.delay_scale_s) * std::pow(10.0, -z / 10.0);
    const double aoa_mean = rs.uniform(-pi, pi);
    const double aod_mean = rs.uniform(-pi, pi);
    c.rays.resize(static_cast<std::size_t>(cfg.rays_per_cluster));
    for (auto &r : c.rays)
    {
        r.aoa_rad = wrap_angle(aoa_mean + rs.normal(0.0, cfg.angle_spread_rad));
        r.aod_rad = wrap_angle(aod_mean + rs.normal(0.0, cfg.angle_spread_rad));
        r.phase_rad = rs.uniform(0.0, 2.0 * pi);
        r.sub_delay_s = cfg.ray_delay_scale_s > 0.0 ? rs.exponential(cfg.ray_delay_scale_s) : 0.0;
    }
    return c;
}
} // namespace detail

inline ClusterState init_clusters(const GbsmConfig &cfg, RandomStream &stream)
{
    cfg.validate();
    ClusterState s;
    const auto n = std::max<std::uint64_t>(1, stream.poisson(cfg.mean_clusters));
    const double base = los_delay(cfg);
    for (std::uint64_t i = 0; i < n; ++i)
        s.clusters.push_back(detail::make_cluster(cfg, base, stream, s.next_id++));
    detail::normalize_powers(s);
    return s;
}

// Unit direction of a horizontal angle
inline Point3 unit_azimuth(double a) { return {std::cos(a), std::sin(a), 0.0}; }

// One birth-death step of length dt plus delay drift and Doppler phase rotation
inline ClusterState evolve_clusters(const ClusterState &state, const GbsmConfig &cfg, double dt_s,
                                    RandomStream &stream)
{
    if (!(dt_s > 0.0))
        throw InvalidArgument("evolve_clusters: dt_s must be positive");
    ClusterState next;
    next.t = state.t + dt_s;
    next.next_id = state.next_id;

    const double survive = std::exp(-cfg.death_rate_hz * dt_s);
    const double k = cfg.band.wavenumber();
    const double base = los_delay(cfg);
    for (const auto &c : state.clusters)
    {
        if (cfg.death_rate_hz > 0.0 && !stream.bernoulli(survive))
            continue;
        Cluster m = c;
        if (!m.rays.empty())
        {
            // drift of the cluster from its mean arrival and departure direction
            const Ray &r0 = m.rays.front();
            const double rate = -(dot(cfg.rx_velocity, unit_azimuth(r0.aoa_rad)) +
                                  dot(cfg.tx_velocity, unit_azimuth(r0.aod_rad))) /
                                speed_of_light;
            m.delay_s = std::max(base, m.delay_s + rate * dt_s);
        }
        for (auto &r : m.rays)
        {
            const double doppler = dot(cfg.rx_velocity, unit_azimuth(r.aoa_rad)) +
                                   dot(cfg.tx_velocity, unit_azimuth(r.aod_rad));
            r.phase_rad = std::fmod(r.phase_rad + k * doppler * dt_s, 2.0 * pi);
        }
        next.clusters.push_back(std::move(m));
    }

    const auto births = cfg.birth_rate_hz > 0.0 ? stream.poisson(cfg.birth_rate_hz * dt_s) : 0;
    for (std::uint64_t i = 0; i < births; ++i)
        next.clusters.push_back(detail::make_cluster(cfg, base, stream, next.next_id++));
    if (next.clusters.empty())
        next.clusters.push_back(detail::make_cluster(cfg, base, stream, next.next_id++));
    detail::normalize_powers(next);
    return next;
}

// Element position of a uniform linear array along y, centered on the array origin
inline double element_offset(const GbsmConfig &cfg, int index, int count)
{
    return (static_cast<double>(index) - 0.5 * (count - 1)) * cfg.antenna_spacing_m;
}

// LOS and NLOS parts of a snapshot on the delay grid
struct SnapshotParts
{
    std::vector<cplx> los;
    std::vector<cplx> nlos;
};

inline double k_linear(const GbsmConfig &cfg) { return db_to_power(cfg.k_factor_db); }

// Largest delay bin the state can occupy
inline std::size_t required_delay_bins(const ClusterState &state, const GbsmConfig &cfg)
{
    double max_delay = los_delay(cfg);
    for (const auto &c : state.clusters)
        for (const auto &r : c.rays)
            max_delay = std::max(max_delay, c.delay_s + r.sub_delay_s);
    const auto bin = static_cast<std::size_t>(std::llround(max_delay / cfg.sample_period_s));
    return bin + 1;
}

inline SnapshotParts synthesize_components(const ClusterState &state, const GbsmConfig &cfg, double t, int tx_idx,
                                           int rx_idx, std::size_t n_delay = 0)
{
    if (tx_idx < 0 || tx_idx >= cfg.n_tx || rx_idx < 0 || rx_idx >= cfg.n_rx)
        throw InvalidArgument("synthesize_snapshot: antenna index out of range");
    const std::size_t needed = required_delay_bins(state, cfg);
    if (n_delay == 0)
        n_delay = static_cast<std::size_t>(cfg.n_delay);
    if (needed > n_delay)
        n_delay = needed + 10;

    SnapshotParts out;
    out.los.assign(n_delay, cplx{0.0, 0.0});
    out.nlos.assign(n_delay, cplx{0.0, 0.0});
    const double k = cfg.band.wavenumber();
    const double kf = k_linear(cfg);
    const double a_los = std::sqrt(kf / (kf + 1.0));
    const double a_nlos = std::sqrt(1.0 / (kf + 1.0));
    const double ytx = element_offset(cfg, tx_idx, cfg.n_tx);
    const double yrx = element_offset(cfg, rx_idx, cfg.n_rx);
    const cplx j(0.0, 1.0);

    // LOS: geometric phase over the element-to-element distance at time t
    const Point3 tx_t = cfg.tx_position + t * cfg.tx_velocity + Point3{0.0, ytx, 0.0};
    const Point3 rx_t = cfg.rx_position + t * cfg.rx_velocity + Point3{0.0, yrx, 0.0};
    const double d = distance(tx_t, rx_t);
    const auto los_bin = static_cast<std::size_t>(std::llround(d / speed_of_light / cfg.sample_period_s));
    if (los_bin < n_delay)
        out.los[los_bin] += a_los * std::exp(-j * k * d);

    for (const auto &c : state.clusters)
    {
        const double ray_amp = a_nlos * std::sqrt(c.power_linear / static_cast<double>(c.rays.size()));
        for (const auto &r : c.rays)
        {
            const double array_phase = k * (yrx * std::sin(r.aoa_rad) + ytx * std::sin(r.aod_rad));
            const auto bin = static_cast<std::size_t>(std::llround((c.delay_s + r.sub_delay_s) / cfg.sample_period_s));
            out.nlos[std::min(bin, n_delay - 1)] += ray_amp * std::exp(j * (r.phase_rad + array_phase));
        }
    }
    return out;
}

inline CirSnapshot synthesize_snapshot(const ClusterState &state, const GbsmConfig &cfg, double t, int tx_idx,
                                       int rx_idx, std::size_t n_delay = 0)
{
    auto parts = synthesize_components(state, cfg, t, tx_idx, rx_idx, n_delay);
    CirSnapshot s;
    s.samples = std::move(parts.los);
    for (std::size_t i = 0; i < s.samples.size(); ++i)
        s.samples[i] += parts.nlos[i];
    s.sample_period_s = cfg.sample_period_s;
    s.t = t;
    s.tx_index = tx_idx;
    s.rx_index = rx_idx;
    return s;
}

struct CirSequence
{
    GbsmConfig config;
    std::size_t n_time = 0;
    std::size_t n_delay = 0;
    double t0_s = 0.0;
    double dt_s = 0.0;
    std::vector<CirSnapshot> snapshots; // (time, tx, rx) row-major
    std::vector<std::size_t> cluster_counts;

    const CirSnapshot &at(std::size_t time, int tx, int rx) const
    {
        return snapshots[(time * config.n_tx + static_cast<std::size_t>(tx)) * config.n_rx + static_cast<std::size_t>(rx)];
    }
};

struct ScenarioSummary
{
    std::size_t n_time = 0;
    std::size_t n_delay = 0;
    double mean_clusters = 0.0;
    std::vector<std::size_t> cluster_counts;
};

// Receives the snapshots of one time step, in (tx, rx) order
using SnapshotSink = std::function<void(std::size_t time_index, const std::vector<CirSnapshot> &)>;

namespace detail
{
inline void check_size(const GbsmConfig &cfg)
{
    const std::size_t steps = cfg.time_steps();
    const double total = static_cast<double>(steps) * cfg.n_tx * cfg.n_rx;
    if (steps == 0)
        throw InvalidArgument("run_scenario: duration shorter than one snapshot interval");
    if (total > static_cast<double>(max_snapshots))
        throw SizingError("run_scenario: " + std::to_string(static_cast<long long>(total)) +
                          " snapshots exceed the limit of 10000000");
}

template <class Fn>
void walk_states(const GbsmConfig &cfg, Fn &&fn)
{
    RandomStream init = derive_substream(cfg.seed, "gbsm-init", 0);
    ClusterState state = init_clusters(cfg, init);
    const std::size_t steps = cfg.time_steps();
    for (std::size_t i = 0; i < steps; ++i)
    {
        if (i > 0)
        {
            RandomStream evo = derive_substream(cfg.seed, "gbsm-evolve", static_cast<std::int64_t>(i));
            state = evolve_clusters(state, cfg, cfg.snapshot_interval_s, evo);
        }
        fn(i, state);
    }
}
} // namespace detail

// Streams a scenario to a sink. The delay grid is sized in a first pass so every
// snapshot shares the same length. Returns summary statistics.
inline ScenarioSummary stream_scenario(const GbsmConfig &cfg, const SnapshotSink &sink)
{
    cfg.validate();
    detail::check_size(cfg);

    std::size_t n_delay = static_cast<std::size_t>(cfg.n_delay);
    detail::walk_states(cfg, [&](std::size_t, const ClusterState &s) {
        const std::size_t need = required_delay_bins(s, cfg);
        if (need > n_delay)
            n_delay = need + 10;
    });

    ScenarioSummary summary;
    summary.n_time = cfg.time_steps();
    summary.n_delay = n_delay;
    double cluster_sum = 0.0;
    const auto pairs = static_cast<std::size_t>(cfg.n_tx * cfg.n_rx);
    std::vector<CirSnapshot> buffer(pairs);
    detail::walk_states(cfg, [&](std::size_t i, const ClusterState &s) {
        cluster_sum += static_cast<double>(s.clusters.size());
        summary.cluster_counts.push_back(s.clusters.size());
        const double t = static_cast<double>(i) * cfg.snapshot_interval_s;
        parallel_for(pairs, [&](std::size_t p) {
            const int tx = static_cast<int>(p / cfg.n_rx);
            const int rx = static_cast<int>(p % cfg.n_rx);
            buffer[p] = synthesize_snapshot(s, cfg, t, tx, rx, n_delay);
        }, pairs > 1 ? thread_count() : 1u);
        sink(i, buffer);
    });
    summary.mean_clusters = cluster_sum / static_cast<double>(summary.n_time);
    return summary;
}

inline CirSequence run_scenario(const GbsmConfig &cfg)
{
    CirSequence seq;
    seq.config = cfg;
    seq.dt_s = cfg.snapshot_interval_s;
    const auto summary = stream_scenario(cfg, [&](std::size_t, const std::vector<CirSnapshot> &snaps) {
        seq.snapshots.insert(seq.snapshots.end(), snaps.begin(), snaps.end());
    });
    seq.n_time = summary.n_time;
    seq.n_delay = summary.n_delay;
    seq.cluster_counts = summary.cluster_counts;
    return seq;
}

} // namespace chantool
