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

// Shared helpers for the test binaries: reference scenarios, independent oracles,
// temporary directories and CLI invocation.

#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "chantool/archive.hpp"
#include "chantool/blockage.hpp"
#include "chantool/core.hpp"
#include "chantool/random.hpp"

namespace testsupport
{

using namespace chantool;

// 10 m link at 1.5 m antenna height
inline BlockageScenario link_10m(double carrier_ghz = 28.0)
{
    BlockageScenario s;
    s.tx = {0.0, 0.0, 1.5};
    s.rx = {10.0, 0.0, 1.5};
    s.band = FrequencyBand::ghz(carrier_ghz);
    return s;
}

inline Screen body_screen_at(double x, double y = 0.0) { return Screen{{x, y, 0.875}, 0.4, 1.75}; }
inline Cylinder body_cylinder_at(double x, double y = 0.0, double r = 0.2) { return Cylinder{{x, y, 0.875}, r, 1.75}; }

// ---- Fresnel integrals by adaptive Gauss-Kronrod quadrature -----------------

inline double fresnel_c_quad(double x)
{
    auto f = [](double t) { return std::cos(0.5 * pi * t * t); };
    // split into unit pieces so each panel holds few oscillations
    double acc = 0.0;
    const double sgn = x < 0 ? -1.0 : 1.0;
    const double ax = std::fabs(x);
    for (double a = 0.0; a < ax; a += 0.25)
        acc += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, std::min(ax, a + 0.25), 15, 1e-14);
    return sgn * acc;
}

inline double fresnel_s_quad(double x)
{
    auto f = [](double t) { return std::sin(0.5 * pi * t * t); };
    double acc = 0.0;
    const double sgn = x < 0 ? -1.0 : 1.0;
    const double ax = std::fabs(x);
    for (double a = 0.0; a < ax; a += 0.25)
        acc += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, std::min(ax, a + 0.25), 15, 1e-14);
    return sgn * acc;
}

// ---- Airy Ai from its Maclaurin series in 200-digit floating point ------------
//
// Ai(x) = c1 f(x) - c2 g(x), f = sum 3^k (1/3)_k x^(3k) / (3k)!, g = sum 3^k (2/3)_k x^(3k+1) / (3k+1)!
// 200 decimal digits absorb the cancellation for x down to about -40.

using big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<200>>;

inline double airy_ai_series(double xd)
{
    const big x = xd;
    const big c1("0.355028053887817239260063186004183176397979174199177");
    const big c2("0.258819403792806798405183560189203963479091138354934");
    big f = 1, g = x;
    big tf = 1, tg = x;
    const big x3 = x * x * x;
    for (int k = 1; k < 2000; ++k)
    {
        // term ratios of f and g
        tf *= x3 / big((3 * k - 1) * (3 * k));
        tg *= x3 / big((3 * k) * (3 * k + 1));
        f += tf;
        g += tg;
        if (k > 10 && abs(tf) < big("1e-60") && abs(tg) < big("1e-60"))
            break;
    }
    return static_cast<double>(c1 * f - c2 * g);
}

// n-th zero by bisection around the asymptotic estimate
inline double airy_zero_bisect(int n)
{
    const double t = 3.0 * pi / 8.0 * (4.0 * n - 1.0);
    const double guess = std::pow(t, 2.0 / 3.0) * (1.0 + 5.0 / 48.0 / (t * t));
    double lo = guess - 0.3, hi = guess + 0.3;
    double flo = airy_ai_series(-lo);
    for (int i = 0; i < 200 && hi - lo > 1e-13; ++i)
    {
        const double mid = 0.5 * (lo + hi);
        const double fm = airy_ai_series(-mid);
        if ((fm < 0) == (flo < 0))
        {
            lo = mid;
            flo = fm;
        }
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// ---- files and processes ------------------------------------------------------

class TempDir
{
public:
    TempDir()
    {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("chantool_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::filesystem::path operator/(const std::string &name) const { return path_ / name; }
    const std::filesystem::path &path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path &p, const std::string &text)
{
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline std::string slurp(const std::filesystem::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Non-empty lines split on commas
inline std::vector<std::vector<std::string>> csv_rows(const std::filesystem::path &p)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

// Archive whose PDPs switch between two multipath patterns at snapshot `change`.
// Each regime has its own set of fixed taps plus a small random perturbation.
inline CirArchive two_regime_archive(std::size_t change = 700, std::size_t total = 1000, std::uint64_t seed = 1)
{
    CirArchive a;
    a.header.n_time = static_cast<std::uint32_t>(total);
    a.header.n_delay = 64;
    a.header.dt_s = 62.5e-6;
    RandomStream r(seed);
    for (std::size_t t = 0; t < total; ++t)
    {
        std::vector<double> amp(64, 0.0);
        if (t < change)
        {
            amp[3] = 1.0;
            amp[11] = 0.6;
            amp[30] = 0.3;
        }
        else
        {
            amp[7] = 1.0;
            amp[19] = 0.7;
            amp[45] = 0.4;
        }
        for (std::size_t k = 0; k < 64; ++k)
        {
            const double a_k = amp[k] * (1.0 + 0.02 * r.normal()) + 0.003 * std::fabs(r.normal());
            const double ph = r.uniform(0.0, 2.0 * pi);
            a.samples.emplace_back(static_cast<float>(a_k * std::cos(ph)), static_cast<float>(a_k * std::sin(ph)));
        }
    }
    return a;
}

#ifdef CHANTOOL_CLI_PATH
// Runs the CLI with optional thread cap; returns the exit code
inline int run_cli(const std::string &args, int threads = 0, const std::string &log = "/dev/null")
{
    std::string cmd = "CHANTOOL_THREADS=" + std::to_string(threads) + " \"" + CHANTOOL_CLI_PATH + "\" " + args +
                      " >" + log + " 2>&1";
    const int rc = std::system(cmd.c_str());
    if (rc == -1)
        return -1;
    return WEXITSTATUS(rc);
}
#endif

} // namespace testsupport
