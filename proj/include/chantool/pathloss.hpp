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

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "chantool/core.hpp"
#include "chantool/random.hpp"

// Large-scale path loss: close-in (CI) and alpha-beta-gamma (ABG) models, with the
// floating-intercept (FI) model as the gamma = 0 case. Distances in meters, frequencies in GHz.

namespace chantool
{

struct PathLossSample
{
    double distance_m = 1.0;
    double freq_ghz = 28.0;
    double pl_db = 0.0;
};

struct CiModel
{
    double n = 2.0;
    double sigma_db = 0.0;
};

// PL = 10 alpha log10(d) + beta + 10 gamma log10(f)
struct AbgModel
{
    double alpha = 2.0;
    double beta_db = 0.0;
    double gamma = 0.0;
    double sigma_db = 0.0;
};

struct FitReport
{
    std::size_t sample_count = 0;
    double residual_rms_db = 0.0;
};

namespace detail
{
inline void check_eval_args(double d_m, double f_ghz)
{
    if (!std::isfinite(d_m) || d_m < 1.0)
        throw InvalidArgument("path loss: distance must be >= 1 m (close-in reference)");
    if (!std::isfinite(f_ghz) || !(f_ghz > 0.0))
        throw InvalidArgument("path loss: frequency must be positive");
}
} // namespace detail

// 32.4 dB is the free-space loss at 1 m and 1 GHz
inline double ci_eval(const CiModel &m, double d_m, double f_ghz)
{
    detail::check_eval_args(d_m, f_ghz);
    return 32.4 + 20.0 * std::log10(f_ghz) + 10.0 * m.n * std::log10(d_m);
}

inline double abg_eval(const AbgModel &m, double d_m, double f_ghz)
{
    detail::check_eval_args(d_m, f_ghz);
    return 10.0 * m.alpha * std::log10(d_m) + m.beta_db + 10.0 * m.gamma * std::log10(f_ghz);
}

inline void validate_samples(const std::vector<PathLossSample> &samples)
{
    for (const auto &s : samples)
    {
        if (!std::isfinite(s.pl_db))
            throw InvalidArgument("path loss sample: pl_db must be finite");
        detail::check_eval_args(s.distance_m, s.freq_ghz);
    }
}

// Single-parameter least squares, n = sum(A D) / sum(D^2)
inline CiModel ci_fit(const std::vector<PathLossSample> &samples)
{
    validate_samples(samples);
    if (samples.size() < 2)
        throw InvalidArgument("ci_fit: at least 2 samples required");
    double ad = 0.0, dd = 0.0;
    bool distinct = false;
    for (const auto &s : samples)
    {
        const double a = s.pl_db - 32.4 - 20.0 * std::log10(s.freq_ghz);
        const double d = 10.0 * std::log10(s.distance_m);
        ad += a * d;
        dd += d * d;
        distinct = distinct || s.distance_m != samples.front().distance_m;
    }
    if (!distinct || !(dd > 0.0))
        throw InvalidArgument("ci_fit: rank deficient, all distances are equal");
    CiModel m;
    m.n = ad / dd;
    double ss = 0.0;
    for (const auto &s : samples)
    {
        const double r = s.pl_db - ci_eval(m, s.distance_m, s.freq_ghz);
        ss += r * r;
    }
    m.sigma_db = std::sqrt(ss / static_cast<double>(samples.size()));
    return m;
}

// OLS over the columns (10 log10 d, 1, 10 log10 f). fix_gamma pins gamma and drops the
// frequency column (fix_gamma = 0 gives the FI model).
inline AbgModel abg_fit(const std::vector<PathLossSample> &samples, std::optional<double> fix_gamma = std::nullopt)
{
    validate_samples(samples);
    const bool free_gamma = !fix_gamma.has_value();
    const std::size_t need = free_gamma ? 3 : 2;
    if (samples.size() < need)
        throw InvalidArgument("abg_fit: at least " + std::to_string(need) + " samples required");

    const auto rows = static_cast<Eigen::Index>(samples.size());
    const Eigen::Index cols = free_gamma ? 3 : 2;
    Eigen::MatrixXd a(rows, cols);
    Eigen::VectorXd y(rows);
    bool d_varies = false, f_varies = false;
    for (Eigen::Index i = 0; i < rows; ++i)
    {
        const auto &s = samples[static_cast<std::size_t>(i)];
        a(i, 0) = 10.0 * std::log10(s.distance_m);
        a(i, 1) = 1.0;
        if (free_gamma)
            a(i, 2) = 10.0 * std::log10(s.freq_ghz);
        y(i) = s.pl_db - (free_gamma ? 0.0 : 10.0 * *fix_gamma * std::log10(s.freq_ghz));
        d_varies = d_varies || s.distance_m != samples.front().distance_m;
        f_varies = f_varies || s.freq_ghz != samples.front().freq_ghz;
    }
    if (!d_varies)
        throw InvalidArgument("abg_fit: rank deficient, column 10*log10(distance_m) is collinear with the intercept");
    if (free_gamma && !f_varies)
        throw InvalidArgument("abg_fit: rank deficient, column 10*log10(freq_ghz) is collinear with the intercept "
                              "(single-frequency data needs gamma fixed to 0, the FI model)");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < cols)
        throw InvalidArgument("abg_fit: rank deficient, columns 10*log10(distance_m) and 10*log10(freq_ghz) are collinear");
    const Eigen::VectorXd x = qr.solve(y);

    AbgModel m;
    m.alpha = x(0);
    m.beta_db = x(1);
    m.gamma = free_gamma ? x(2) : *fix_gamma;
    double ss = 0.0;
    for (const auto &s : samples)
    {
        const double r = s.pl_db - abg_eval(m, s.distance_m, s.freq_ghz);
        ss += r * r;
    }
    m.sigma_db = std::sqrt(ss / static_cast<double>(samples.size()));
    return m;
}

inline AbgModel fi_fit(const std::vector<PathLossSample> &samples) { return abg_fit(samples, 0.0); }

// Deterministic loss plus one N(0, sigma) draw
inline double shadowed_sample(const CiModel &m, double d_m, double f_ghz, RandomStream &stream)
{
    return ci_eval(m, d_m, f_ghz) + m.sigma_db * stream.normal();
}

inline double shadowed_sample(const AbgModel &m, double d_m, double f_ghz, RandomStream &stream)
{
    return abg_eval(m, d_m, f_ghz) + m.sigma_db * stream.normal();
}

// Published per-band parameter sets
struct PathLossPreset
{
    std::string_view name;
    double freq_ghz;
    CiModel ci;
    AbgModel fi;
};

inline const std::vector<PathLossPreset> &path_loss_presets()
{
    static const std::vector<PathLossPreset> presets = {
        {"measured-28", 28.0, {2.637, 5.47}, {2.374, 67.31, 0.0, 6.57}},
        {"measured-32", 32.0, {2.964, 6.07}, {2.263, 76.36, 0.0, 5.67}},
        {"measured-39", 39.0, {2.638, 9.72}, {2.294, 70.48, 0.0, 9.80}},
    };
    return presets;
}

inline const PathLossPreset &path_loss_preset(std::string_view name)
{
    for (const auto &p : path_loss_presets())
        if (p.name == name)
            return p;
    throw InvalidArgument("unknown path loss preset '" + std::string(name) + "'");
}

} // namespace chantool
