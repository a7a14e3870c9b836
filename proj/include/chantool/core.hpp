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
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace chantool
{

using cplx = std::complex<double>;

inline constexpr double speed_of_light = 299792458.0; // m/s
inline constexpr double pi = 3.14159265358979323846;

// Power assigned to bins with zero amplitude (and to empty path sets)
inline constexpr double power_floor_db = -300.0;

// Base class for all errors raised by the library
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Invalid argument or violated precondition
class InvalidArgument : public Error
{
public:
    using Error::Error;
};

// Geometry that the requested model cannot evaluate
class GeometryError : public Error
{
public:
    using Error::Error;
};

// Cartesian position in meters, z up, ground plane at z = 0
struct Point3
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }

    friend Point3 operator+(const Point3 &a, const Point3 &b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Point3 operator-(const Point3 &a, const Point3 &b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Point3 operator*(double s, const Point3 &a) { return {s * a.x, s * a.y, s * a.z}; }
    friend bool operator==(const Point3 &, const Point3 &) = default;
};

inline double dot(const Point3 &a, const Point3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Point3 &a) { return std::sqrt(dot(a, a)); }
inline double distance(const Point3 &a, const Point3 &b) { return norm(a - b); }

// Carrier and signal bandwidth of one measurement band
struct FrequencyBand
{
    double carrier_hz = 28e9;
    double bandwidth_hz = 1e9;

    double wavelength() const { return speed_of_light / carrier_hz; }
    double wavenumber() const { return 2.0 * pi / wavelength(); }

    void validate() const
    {
        if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz))
            throw InvalidArgument("FrequencyBand: carrier_hz must be positive and finite");
        if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz))
            throw InvalidArgument("FrequencyBand: bandwidth_hz must be positive and finite");
    }

    static FrequencyBand ghz(double carrier_ghz, double bandwidth_ghz = 1.0)
    {
        return {carrier_ghz * 1e9, bandwidth_ghz * 1e9};
    }
};

// The three measured bands
inline const FrequencyBand band_28ghz = FrequencyBand::ghz(28.0);
inline const FrequencyBand band_32ghz = FrequencyBand::ghz(32.0);
inline const FrequencyBand band_39ghz = FrequencyBand::ghz(39.0);

// Complex channel impulse response on a uniform delay grid for one (tx, rx, t) triple
struct CirSnapshot
{
    std::vector<cplx> samples;
    double sample_period_s = 1.0 / 1.28e9;
    double t = 0.0;
    int tx_index = 0;
    int rx_index = 0;

    void validate() const
    {
        if (samples.empty())
            throw InvalidArgument("CirSnapshot: samples must not be empty");
        if (!(sample_period_s > 0.0))
            throw InvalidArgument("CirSnapshot: sample_period_s must be positive");
        for (const auto &s : samples)
            if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
                throw InvalidArgument("CirSnapshot: non-finite amplitude");
    }
};

// Linear power to dB with the zero-power floor
inline double power_to_db(double power_linear)
{
    if (!(power_linear > 0.0))
        return power_floor_db;
    return std::max(10.0 * std::log10(power_linear), power_floor_db);
}

inline double db_to_power(double db) { return std::pow(10.0, db / 10.0); }

// One extracted multipath component
struct Mpc
{
    double delay_s = 0.0;
    double power_db = power_floor_db;
    cplx amplitude{0.0, 0.0};

    static Mpc from_amplitude(double delay_s, cplx amplitude)
    {
        return {delay_s, power_to_db(std::norm(amplitude)), amplitude};
    }

    double power_linear() const { return db_to_power(power_db); }
};

struct PowerDelayProfile
{
    std::vector<double> power_db;
    double sample_period_s = 1.0 / 1.28e9;

    std::vector<double> linear() const
    {
        std::vector<double> out(power_db.size());
        for (std::size_t i = 0; i < power_db.size(); ++i)
            out[i] = power_db[i] <= power_floor_db ? 0.0 : db_to_power(power_db[i]);
        return out;
    }
};

inline PowerDelayProfile pdp_from_cir(const CirSnapshot &cir)
{
    PowerDelayProfile pdp;
    pdp.sample_period_s = cir.sample_period_s;
    pdp.power_db.resize(cir.samples.size());
    for (std::size_t i = 0; i < cir.samples.size(); ++i)
        pdp.power_db[i] = power_to_db(std::norm(cir.samples[i]));
    return pdp;
}

} // namespace chantool
