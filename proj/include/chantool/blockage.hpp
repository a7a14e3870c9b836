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

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "chantool/core.hpp"
#include "chantool/parallel.hpp"
#include "chantool/special.hpp"

// Human blockage attenuation.
//
// Two blocker geometries are supported: a rectangular absorbing screen (knife-edge models,
// METIS and Kirchhoff) and a perfectly conducting vertical cylinder (creeping-wave GTD model).
// All geometry is evaluated in the link frame: the "along" axis is the top-view direction
// from tx to rx, the "lateral" axis is horizontal and perpendicular to it, z is vertical.
// Screens are always oriented perpendicular to the top-view tx-rx direction.

namespace chantool
{

// Rectangular absorbing screen. Default: 0.4 m x 1.75 m person standing on the ground.
struct Screen
{
    Point3 center{0.0, 0.0, 0.875};
    double width_m = 0.4;
    double height_m = 1.75;

    double bottom_z() const { return center.z - 0.5 * height_m; }
    double top_z() const { return center.z + 0.5 * height_m; }

    void validate() const
    {
        if (!center.finite())
            throw InvalidArgument("Screen: center must be finite");
        if (!(width_m > 0.0) || !(height_m > 0.0))
            throw InvalidArgument("Screen: width_m and height_m must be positive");
    }
};

// Perfectly conducting vertical cylinder; center is the midpoint of the axis.
// The default diameter equals the default screen width.
struct Cylinder
{
    Point3 center{0.0, 0.0, 0.875};
    double radius_m = 0.2;
    double height_m = 1.75;

    double bottom_z() const { return center.z - 0.5 * height_m; }
    double top_z() const { return center.z + 0.5 * height_m; }

    void validate() const
    {
        if (!center.finite())
            throw InvalidArgument("Cylinder: center must be finite");
        if (!(radius_m > 0.0) || !(height_m > 0.0))
            throw InvalidArgument("Cylinder: radius_m and height_m must be positive");
    }
};

using Blocker = std::variant<Screen, Cylinder>;

// The same body seen by the other model family: width <-> diameter
inline Screen as_screen(const Blocker &b)
{
    if (const auto *s = std::get_if<Screen>(&b))
        return *s;
    const auto &c = std::get<Cylinder>(b);
    return Screen{c.center, 2.0 * c.radius_m, c.height_m};
}

inline Cylinder as_cylinder(const Blocker &b)
{
    if (const auto *c = std::get_if<Cylinder>(&b))
        return *c;
    const auto &s = std::get<Screen>(b);
    return Cylinder{s.center, 0.5 * s.width_m, s.height_m};
}

inline Point3 blocker_center(const Blocker &b)
{
    return std::visit([](const auto &x) { return x.center; }, b);
}

inline void set_blocker_center(Blocker &b, const Point3 &p)
{
    std::visit([&](auto &x) { x.center = p; }, b);
}

struct BlockageScenario
{
    Point3 tx{0.0, 0.0, 1.5};
    Point3 rx{10.0, 0.0, 1.5};
    FrequencyBand band = band_28ghz;
    std::vector<Blocker> blockers;

    void validate() const
    {
        if (!tx.finite() || !rx.finite())
            throw InvalidArgument("BlockageScenario: tx and rx must be finite");
        if (tx == rx)
            throw InvalidArgument("BlockageScenario: tx and rx coincide");
        band.validate();
    }
};

enum class BlockageModel
{
    metis,
    kirchhoff,
    gtd
};

inline std::string_view to_string(BlockageModel m)
{
    switch (m)
    {
    case BlockageModel::metis:
        return "metis";
    case BlockageModel::kirchhoff:
        return "kirchhoff";
    case BlockageModel::gtd:
        return "gtd";
    }
    return "unknown";
}

inline std::optional<BlockageModel> parse_blockage_model(std::string_view s)
{
    if (s == "metis")
        return BlockageModel::metis;
    if (s == "kirchhoff")
        return BlockageModel::kirchhoff;
    if (s == "gtd")
        return BlockageModel::gtd;
    return std::nullopt;
}

// Points closer than this to an edge count as shadowed
inline constexpr double grazing_tolerance_m = 1e-12;

namespace detail
{
// Link frame built from the top view of the tx-rx segment
struct LinkFrame
{
    Point3 tx, rx;
    double length = 0.0; // top-view tx-rx distance
    double ax = 1.0, ay = 0.0; // along unit vector (horizontal)

    explicit LinkFrame(const Point3 &tx_, const Point3 &rx_) : tx(tx_), rx(rx_)
    {
        const double dx = rx.x - tx.x;
        const double dy = rx.y - tx.y;
        length = std::hypot(dx, dy);
        if (length > 0.0)
        {
            ax = dx / length;
            ay = dy / length;
        }
    }

    double along(const Point3 &p) const { return (p.x - tx.x) * ax + (p.y - tx.y) * ay; }
    double lateral(const Point3 &p) const { return -(p.x - tx.x) * ay + (p.y - tx.y) * ax; }
    double los_height(double s) const { return tx.z + (rx.z - tx.z) * s / length; }
};
} // namespace detail

// Per-edge knife-edge term of the METIS shadowing screen:
// F = atan(+-(pi/2) sqrt((pi/lambda)(d1 + d2 - r))) / pi, + when the edge shadows the LOS.
inline double metis_edge_term(double d1_m, double d2_m, double r_m, double wavelength_m, bool in_shadow)
{
    if (!std::isfinite(d1_m) || !std::isfinite(d2_m) || !std::isfinite(r_m) || !std::isfinite(wavelength_m))
        throw InvalidArgument("metis_edge_term: non-finite input");
    if (!(d1_m > 0.0) || !(d2_m > 0.0) || !(r_m > 0.0) || !(wavelength_m > 0.0))
        throw InvalidArgument("metis_edge_term: distances and wavelength must be positive");
    double excess = d1_m + d2_m - r_m;
    if (excess < 0.0)
    {
        // Rounding of d1 + d2 for an edge on the LOS
        if (excess > -1e-12 * r_m)
            excess = 0.0;
        else
            throw InvalidArgument("metis_edge_term: negative path excess");
    }
    const double sign = in_shadow ? 1.0 : -1.0;
    return std::atan(sign * 0.5 * pi * std::sqrt(pi / wavelength_m * excess)) / pi;
}

// Four edge terms of one screen, in the order left, right (top view), bottom, top (side view)
struct MetisEdgeTerms
{
    double left = 0.0, right = 0.0, bottom = 0.0, top = 0.0;
};

inline std::optional<MetisEdgeTerms> metis_edge_terms(const BlockageScenario &scn, const Screen &screen)
{
    scn.validate();
    screen.validate();
    const detail::LinkFrame f(scn.tx, scn.rx);
    if (f.length <= 0.0)
        return std::nullopt;
    const double s = f.along(screen.center);
    if (!(s > 0.0) || !(s < f.length))
        return std::nullopt;

    const double lambda = scn.band.wavelength();
    const double yc = f.lateral(screen.center);
    const double y1 = yc - 0.5 * screen.width_m;
    const double y2 = yc + 0.5 * screen.width_m;
    const double zb = screen.bottom_z();
    const double zt = screen.top_z();
    const double zlos = f.los_height(s);
    const double tol = grazing_tolerance_m;

    MetisEdgeTerms t;
    auto top_view = [&](double ye, bool shadow) {
        return metis_edge_term(std::hypot(s, ye), std::hypot(f.length - s, ye), f.length, lambda, shadow);
    };
    t.left = top_view(y1, y1 <= tol);
    t.right = top_view(y2, y2 >= -tol);

    const double r_side = std::hypot(f.length, scn.rx.z - scn.tx.z);
    auto side_view = [&](double ze, bool shadow) {
        return metis_edge_term(std::hypot(s, ze - scn.tx.z), std::hypot(f.length - s, ze - scn.rx.z), r_side, lambda,
                               shadow);
    };
    t.bottom = side_view(zb, zlos >= zb - tol);
    t.top = side_view(zt, zlos <= zt + tol);
    return t;
}

// METIS screen loss A = -20 log10(1 - (A_l + A_r)(A_t + A_b)) in dB.
// Screens that are not between tx and rx along the link give 0 dB.
inline double metis_screen_attenuation(const BlockageScenario &scn, const Screen &screen)
{
    const auto terms = metis_edge_terms(scn, screen);
    if (!terms)
        return 0.0;
    const double product = (terms->left + terms->right) * (terms->bottom + terms->top);
    return -20.0 * std::log10(1.0 - product);
}

// Sparse-blocker summation of per-screen losses in dB
inline double metis_multi_screen_attenuation(const BlockageScenario &scn)
{
    double total = 0.0;
    for (const auto &b : scn.blockers)
    {
        const auto *screen = std::get_if<Screen>(&b);
        if (!screen)
            throw InvalidArgument("metis_multi_screen_attenuation: all blockers must be screens");
        total += metis_screen_attenuation(scn, *screen);
    }
    return total;
}

// Radius of the first Fresnel zone, sqrt(lambda d1 d2 / (d1 + d2))
inline double fresnel_zone_radius(double d1_m, double d2_m, double wavelength_m)
{
    if (!std::isfinite(d1_m) || !std::isfinite(d2_m) || !std::isfinite(wavelength_m))
        throw InvalidArgument("fresnel_zone_radius: non-finite input");
    if (d1_m < 0.0 || d2_m < 0.0 || !(d1_m + d2_m > 0.0) || !(wavelength_m > 0.0))
        throw InvalidArgument("fresnel_zone_radius: distances must be non-negative and wavelength positive");
    return std::sqrt(wavelength_m * d1_m * d2_m / (d1_m + d2_m));
}

// Normalized field behind the screen, E/E0 = 1 - (j/2) int int_rect exp(-j pi/2 (u^2 + v^2)) du dv.
// The open aperture is the full plane minus the screen rectangle (Babinet), and the
// rectangle integral separates into two Fresnel segments.
inline cplx kirchhoff_field(const BlockageScenario &scn, const Screen &screen)
{
    scn.validate();
    screen.validate();
    const detail::LinkFrame f(scn.tx, scn.rx);
    if (!(f.length > 0.0))
        throw GeometryError("no aperture plane: screen plane is parallel to the LOS");
    const double s = f.along(screen.center);
    if (!(s > 0.0) || !(s < f.length))
        throw GeometryError("screen is not between tx and rx");

    const double r1 = fresnel_zone_radius(s, f.length - s, scn.band.wavelength());
    const double scale = std::sqrt(2.0) / r1;
    const double yc = f.lateral(screen.center);
    const double zlos = f.los_height(s);
    const double u1 = scale * (yc - 0.5 * screen.width_m);
    const double u2 = scale * (yc + 0.5 * screen.width_m);
    const double v1 = scale * (screen.bottom_z() - zlos);
    const double v2 = scale * (screen.top_z() - zlos);

    const cplx rect = cplx(0.0, 0.5) * fresnel_segment(u1, u2) * fresnel_segment(v1, v2);
    return 1.0 - rect;
}

inline double kirchhoff_screen_attenuation(const BlockageScenario &scn, const Screen &screen)
{
    return -20.0 * std::log10(std::abs(kirchhoff_field(scn, screen)));
}

// How the two creeping waves (one around each side of the cylinder) are combined
enum class CreepingCombine
{
    power,   // |A1|^2 + |A2|^2
    coherent // |A1 + A2|^2
};

struct GtdOptions
{
    int n_terms = 5;
    CreepingCombine combine = CreepingCombine::power;
};

// Mode terms of the two creeping waves (soft-polarization series), relative to a unit
// incident field at the cylinder. Index [side][n].
struct GtdTerms
{
    std::array<std::vector<cplx>, 2> terms;
    std::array<double, 2> arc_m{0.0, 0.0};
    double tx_leg_m = 0.0;
    double rx_leg_m = 0.0; // S_d, rx to its tangent point

    cplx side_sum(int side, int n_terms) const
    {
        cplx acc{0.0, 0.0};
        for (int n = 0; n < n_terms && n < static_cast<int>(terms[side].size()); ++n)
            acc += terms[side][n];
        return acc;
    }
};

inline GtdTerms gtd_cylinder_terms(const BlockageScenario &scn, const Cylinder &cyl, int n_terms)
{
    scn.validate();
    cyl.validate();
    if (n_terms < 1 || n_terms > airy_zero_max_index)
        throw InvalidArgument("gtd: n_terms must be in [1, 20]");

    const double a = cyl.radius_m;
    const double tx_dx = scn.tx.x - cyl.center.x, tx_dy = scn.tx.y - cyl.center.y;
    const double rx_dx = scn.rx.x - cyl.center.x, rx_dy = scn.rx.y - cyl.center.y;
    const double dt = std::hypot(tx_dx, tx_dy);
    const double dr = std::hypot(rx_dx, rx_dy);
    if (dt <= a || dr <= a)
        throw GeometryError("gtd: tx or rx inside the cylinder");

    // Top-view distance from the axis to the tx-rx segment, and the LOS height there
    const detail::LinkFrame f(scn.tx, scn.rx);
    const double s = std::clamp(f.along(cyl.center), 0.0, f.length);
    const double px = scn.tx.x + s * f.ax - cyl.center.x;
    const double py = scn.tx.y + s * f.ay - cyl.center.y;
    const double miss = std::hypot(px, py);
    const double zlos = f.length > 0.0 ? f.los_height(s) : scn.tx.z;
    if (miss > a + grazing_tolerance_m || zlos < cyl.bottom_z() - grazing_tolerance_m ||
        zlos > cyl.top_z() + grazing_tolerance_m)
        throw GeometryError("cylinder does not shadow LOS");

    const double k = scn.band.wavenumber();
    const double m = std::cbrt(0.5 * k * a);
    const double beta_t = std::acos(a / dt);
    const double beta_r = std::acos(a / dr);
    const double theta_t = std::atan2(tx_dy, tx_dx);
    const double theta_r = std::atan2(rx_dy, rx_dx);
    double ccw = std::fmod(theta_r - theta_t, 2.0 * pi);
    if (ccw < 0.0)
        ccw += 2.0 * pi;

    GtdTerms out;
    out.tx_leg_m = std::sqrt(dt * dt - a * a);
    out.rx_leg_m = std::sqrt(dr * dr - a * a);
    out.arc_m[0] = std::max(0.0, a * (ccw - beta_t - beta_r));
    out.arc_m[1] = std::max(0.0, a * (2.0 * pi - ccw - beta_t - beta_r));

    const double direct = std::hypot(scn.rx.x - scn.tx.x, scn.rx.y - scn.tx.y);
    const cplx j(0.0, 1.0);
    const cplx spread = 1.0 / std::sqrt(8.0 * j * k * out.rx_leg_m);
    const cplx e_m_jpi6 = std::exp(-j * (pi / 6.0));
    const cplx e_p_jpi6 = std::exp(j * (pi / 6.0));
    for (int side = 0; side < 2; ++side)
    {
        const double gamma = out.arc_m[side];
        const cplx legs = std::exp(-j * k * (out.tx_leg_m + out.rx_leg_m - direct));
        out.terms[side].reserve(n_terms);
        for (int n = 1; n <= n_terms; ++n)
        {
            const double alpha = airy_zero(n);
            const double aip = airy_ai_prime_at_zero(n);
            const cplx weight = 2.0 * m / (aip * aip) * e_m_jpi6;         // D_n
            const cplx attenuation = alpha / a * m * e_p_jpi6;            // Omega_n
            out.terms[side].push_back(weight * legs * spread * std::exp(-(j * k + attenuation) * gamma));
        }
    }
    return out;
}

// Creeping-wave loss of a conducting cylinder in dB, relative to the unobstructed field.
// Throws GeometryError("cylinder does not shadow LOS") if the blocker is clear of the LOS.
inline double gtd_cylinder_attenuation(const BlockageScenario &scn, const Cylinder &cyl, const GtdOptions &opt = {})
{
    const GtdTerms t = gtd_cylinder_terms(scn, cyl, opt.n_terms);
    const cplx a1 = t.side_sum(0, opt.n_terms);
    const cplx a2 = t.side_sum(1, opt.n_terms);
    const double p = opt.combine == CreepingCombine::coherent ? std::norm(a1 + a2) : std::norm(a1) + std::norm(a2);
    return -10.0 * std::log10(p);
}

inline double gtd_cylinder_attenuation(const BlockageScenario &scn, const Cylinder &cyl, int n_terms)
{
    return gtd_cylinder_attenuation(scn, cyl, GtdOptions{n_terms, CreepingCombine::power});
}

// True if the LOS crosses the screen rectangle (edges count as crossing)
inline bool screen_shadows_los(const BlockageScenario &scn, const Screen &screen)
{
    const detail::LinkFrame f(scn.tx, scn.rx);
    if (!(f.length > 0.0))
        return false;
    const double s = f.along(screen.center);
    if (!(s > 0.0) || !(s < f.length))
        return false;
    const double y = f.lateral(screen.center);
    const double z = f.los_height(s);
    const double tol = grazing_tolerance_m;
    return std::fabs(y) <= 0.5 * screen.width_m + tol && z >= screen.bottom_z() - tol && z <= screen.top_z() + tol;
}

struct SweepPoint
{
    Point3 position;
    double attenuation_db = 0.0;
};

struct SweepResult
{
    std::vector<SweepPoint> points;
    std::size_t warnings = 0; // points whose geometry could not be evaluated (NaN)
};

struct SweepOptions
{
    GtdOptions gtd;
};

// Attenuation of one blocker under one model; 0 dB when the blocker leaves the LOS clear
inline double blocker_attenuation(const BlockageScenario &scn, BlockageModel model, const Blocker &b,
                                  const SweepOptions &opt = {})
{
    switch (model)
    {
    case BlockageModel::metis: {
        const Screen s = as_screen(b);
        return screen_shadows_los(scn, s) ? metis_screen_attenuation(scn, s) : 0.0;
    }
    case BlockageModel::kirchhoff: {
        const Screen s = as_screen(b);
        return screen_shadows_los(scn, s) ? kirchhoff_screen_attenuation(scn, s) : 0.0;
    }
    case BlockageModel::gtd: {
        try
        {
            return gtd_cylinder_attenuation(scn, as_cylinder(b), opt.gtd);
        }
        catch (const GeometryError &e)
        {
            if (std::string_view(e.what()) == "cylinder does not shadow LOS")
                return 0.0;
            throw;
        }
    }
    }
    return 0.0;
}

// Moves the blockers along a trajectory. Each trajectory point is the position of the first
// blocker's center; the other blockers keep their offset to it. Losses of several blockers add
// in dB. Points whose geometry fails are reported as NaN and counted, the sweep continues.
inline SweepResult sweep_blocker(const BlockageScenario &scn, BlockageModel model, const std::vector<Point3> &trajectory,
                                 const SweepOptions &opt = {})
{
    if (trajectory.empty())
        throw InvalidArgument("sweep_blocker: trajectory must not be empty");
    if (scn.blockers.empty())
        throw InvalidArgument("sweep_blocker: scenario has no blocker");
    scn.validate();

    const Point3 anchor = blocker_center(scn.blockers.front());
    SweepResult result;
    result.points.resize(trajectory.size());
    std::vector<char> failed(trajectory.size(), 0);

    parallel_for(trajectory.size(), [&](std::size_t i) {
        const Point3 shift = trajectory[i] - anchor;
        double total = 0.0;
        try
        {
            for (const auto &b : scn.blockers)
            {
                Blocker moved = b;
                set_blocker_center(moved, blocker_center(b) + shift);
                total += blocker_attenuation(scn, model, moved, opt);
            }
        }
        catch (const Error &)
        {
            total = std::numeric_limits<double>::quiet_NaN();
            failed[i] = 1;
        }
        result.points[i] = SweepPoint{trajectory[i], total};
    });

    for (char f : failed)
        result.warnings += f;
    return result;
}

// Blocker positions perpendicular to the link at a given distance from tx
inline std::vector<Point3> crossing_trajectory(const BlockageScenario &scn, double along_m, double start_m,
                                               double stop_m, double step_m, double center_z)
{
    const detail::LinkFrame f(scn.tx, scn.rx);
    std::vector<Point3> out;
    const long n = std::lround(std::floor((stop_m - start_m) / step_m + 1e-9)) + 1;
    for (long i = 0; i < n; ++i)
    {
        const double off = start_m + static_cast<double>(i) * step_m;
        out.push_back({scn.tx.x + along_m * f.ax - off * f.ay, scn.tx.y + along_m * f.ay + off * f.ax, center_z});
    }
    return out;
}

// Blocker positions on the top-view LOS at distances start..stop from tx
inline std::vector<Point3> along_trajectory(const BlockageScenario &scn, double start_m, double stop_m, double step_m,
                                            double center_z)
{
    const detail::LinkFrame f(scn.tx, scn.rx);
    std::vector<Point3> out;
    const long n = std::lround(std::floor((stop_m - start_m) / step_m + 1e-9)) + 1;
    for (long i = 0; i < n; ++i)
    {
        const double d = start_m + static_cast<double>(i) * step_m;
        out.push_back({scn.tx.x + d * f.ax, scn.tx.y + d * f.ay, center_z});
    }
    return out;
}

} // namespace chantool
