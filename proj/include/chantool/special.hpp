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
#include <complex>
#include <string>

#include <boost/math/special_functions/airy.hpp>

#include "chantool/core.hpp"

namespace chantool
{

struct FresnelCS
{
    double c = 0.0; // C(x) = int_0^x cos(pi t^2 / 2) dt
    double s = 0.0; // S(x) = int_0^x sin(pi t^2 / 2) dt
};

// Normalized Fresnel integrals.
// Power series up to |x| = 1.5, beyond that the continued fraction of the complementary
// error function evaluated with the modified Lentz method. Both branches reach ~1e-15.
inline FresnelCS fresnel(double x)
{
    constexpr double eps = 1e-16;
    constexpr double tiny = 1e-300;
    constexpr int max_iter = 500;
    constexpr double series_limit = 1.5;

    if (!std::isfinite(x))
    {
        if (std::isnan(x))
            return {x, x};
        return x > 0 ? FresnelCS{0.5, 0.5} : FresnelCS{-0.5, -0.5};
    }

    const double ax = std::fabs(x);
    FresnelCS r;
    if (ax < 1e-150)
    {
        r = {ax, 0.0};
    }
    else if (ax <= series_limit)
    {
        // Alternating series, C and S terms interleaved
        double sum = 0.0, sums = 0.0, sumc = ax;
        double sign = 1.0;
        const double fact = 0.5 * pi * ax * ax;
        bool odd = true;
        double term = ax;
        double n = 3.0;
        for (int k = 1; k <= max_iter; ++k)
        {
            term *= fact / k;
            sum += sign * term / n;
            const double test = std::fabs(sum) * eps;
            if (odd)
            {
                sign = -sign;
                sums = sum;
                sum = sumc;
            }
            else
            {
                sumc = sum;
                sum = sums;
            }
            if (term < test)
                break;
            odd = !odd;
            n += 2.0;
        }
        r = {sumc, sums};
    }
    else
    {
        const double pix2 = pi * ax * ax;
        std::complex<double> b(1.0, -pix2);
        std::complex<double> cc(1.0 / tiny, 0.0);
        std::complex<double> d = 1.0 / b;
        std::complex<double> h = d;
        double n = -1.0;
        for (int k = 2; k <= max_iter; ++k)
        {
            n += 2.0;
            const double a = -n * (n + 1.0);
            b += 4.0;
            d = 1.0 / (a * d + b);
            cc = b + a / cc;
            const std::complex<double> del = cc * d;
            h *= del;
            if (std::fabs(del.real() - 1.0) + std::fabs(del.imag()) < eps)
                break;
        }
        h *= std::complex<double>(ax, -ax);
        const std::complex<double> cs =
            std::complex<double>(0.5, 0.5) * (1.0 - std::complex<double>(std::cos(0.5 * pix2), std::sin(0.5 * pix2)) * h);
        r = {cs.real(), cs.imag()};
    }
    if (x < 0.0)
    {
        r.c = -r.c;
        r.s = -r.s;
    }
    return r;
}

// int_a^b exp(-j pi t^2 / 2) dt, the one-dimensional factor of the Kirchhoff aperture integral
inline cplx fresnel_segment(double a, double b)
{
    const FresnelCS fa = fresnel(a);
    const FresnelCS fb = fresnel(b);
    return {fb.c - fa.c, -(fb.s - fa.s)};
}

inline constexpr int airy_zero_max_index = 20;

// alpha_n > 0 such that Ai(-alpha_n) = 0, n = 1..20
inline double airy_zero(int n)
{
    if (n < 1 || n > airy_zero_max_index)
        throw InvalidArgument("airy_zero: index " + std::to_string(n) + " outside [1, 20]");
    return -boost::math::airy_ai_zero<double>(n);
}

// Ai'(-alpha_n)
inline double airy_ai_prime_at_zero(int n) { return boost::math::airy_ai_prime(-airy_zero(n)); }

} // namespace chantool
