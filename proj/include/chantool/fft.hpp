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

#include <complex>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "chantool/core.hpp"

// Thin FFTW wrapper. Plans are created once per (size, direction) and reused with the
// new-array execute interface, so calls are safe from several threads.

namespace chantool
{

namespace detail
{
class FftPlanCache
{
public:
    static FftPlanCache &instance()
    {
        static FftPlanCache cache;
        return cache;
    }

    fftw_plan get(int n, int sign)
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = plans_.find({n, sign});
        if (it != plans_.end())
            return it->second;
        std::vector<cplx> scratch(static_cast<std::size_t>(n));
        auto *p = reinterpret_cast<fftw_complex *>(scratch.data());
        fftw_plan plan = fftw_plan_dft_1d(n, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(std::make_pair(n, sign), plan);
        return plan;
    }

    FftPlanCache(const FftPlanCache &) = delete;
    FftPlanCache &operator=(const FftPlanCache &) = delete;

private:
    FftPlanCache() = default;
    ~FftPlanCache()
    {
        for (auto &kv : plans_)
            fftw_destroy_plan(kv.second);
    }

    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

inline std::vector<cplx> run_fft(std::vector<cplx> data, int sign)
{
    if (data.empty())
        return data;
    fftw_plan plan = FftPlanCache::instance().get(static_cast<int>(data.size()), sign);
    auto *p = reinterpret_cast<fftw_complex *>(data.data());
    fftw_execute_dft(plan, p, p);
    return data;
}
} // namespace detail

// Forward DFT, X[k] = sum_n x[n] exp(-j 2 pi k n / N)
inline std::vector<cplx> fft(std::vector<cplx> x) { return detail::run_fft(std::move(x), FFTW_FORWARD); }

// Inverse DFT including the 1/N factor
inline std::vector<cplx> ifft(std::vector<cplx> x)
{
    auto y = detail::run_fft(std::move(x), FFTW_BACKWARD);
    const double scale = y.empty() ? 1.0 : 1.0 / static_cast<double>(y.size());
    for (auto &v : y)
        v *= scale;
    return y;
}

// Circular convolution of two equal-length sequences
inline std::vector<cplx> circular_convolve(const std::vector<cplx> &a, const std::vector<cplx> &b)
{
    if (a.size() != b.size())
        throw InvalidArgument("circular_convolve: length mismatch");
    auto fa = fft(a);
    const auto fb = fft(b);
    for (std::size_t i = 0; i < fa.size(); ++i)
        fa[i] *= fb[i];
    return ifft(std::move(fa));
}

// Circular cross-correlation r[k] = sum_n y[n + k] conj(x[n])
inline std::vector<cplx> circular_correlate(const std::vector<cplx> &y, const std::vector<cplx> &x)
{
    if (y.size() != x.size())
        throw InvalidArgument("circular_correlate: length mismatch");
    auto fy = fft(y);
    const auto fx = fft(x);
    for (std::size_t i = 0; i < fy.size(); ++i)
        fy[i] *= std::conj(fx[i]);
    return ifft(std::move(fy));
}

} // namespace chantool
